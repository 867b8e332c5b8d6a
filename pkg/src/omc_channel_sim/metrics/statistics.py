import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import stats

from omc_channel_sim.exceptions import AlignmentError, DomainError, UndefinedCorrelationError
from omc_channel_sim.traces import VoltageTrace

logger = logging.getLogger(__name__)

TraceLike = Union[VoltageTrace, np.ndarray]

QQ_MIN_SAMPLES = 20


def _samples(trace: TraceLike) -> np.ndarray:
    if isinstance(trace, VoltageTrace):
        return trace.samples
    return np.asarray(trace, dtype=float)


def _paired(a: TraceLike, b: TraceLike) -> Tuple[np.ndarray, np.ndarray]:
    a_samples, b_samples = _samples(a), _samples(b)
    if a_samples.shape != b_samples.shape:
        raise AlignmentError(f"traces differ in length: {a_samples.size} vs {b_samples.size}")
    if isinstance(a, VoltageTrace) and isinstance(b, VoltageTrace) and not a.same_grid(b):
        raise AlignmentError("traces are not on the same time grid; resample first")
    return a_samples, b_samples


def pearson(a: TraceLike, b: TraceLike) -> float:
    """
    Product-moment correlation of two equally long traces.

    Args:
        a (TraceLike): First trace.
        b (TraceLike): Second trace.

    Returns:
        float: Correlation coefficient in [-1, 1].
    """
    a_samples, b_samples = _paired(a, b)
    if a_samples.size < 2:
        raise DomainError("correlation needs at least two samples")
    if np.ptp(a_samples) == 0 or np.ptp(b_samples) == 0:
        raise UndefinedCorrelationError("correlation is undefined for a trace without variance")
    value = float(stats.pearsonr(a_samples, b_samples).statistic)
    return min(1.0, max(-1.0, value))


def nrmse(model: TraceLike, ref: TraceLike) -> float:
    """
    Root-mean-square error normalized by the range max(ref) - min(ref) of the reference.

    Args:
        model (TraceLike): Compared trace.
        ref (TraceLike): Reference trace.

    Returns:
        float: NRMSE as a fraction.
    """
    model_samples, ref_samples = _paired(model, ref)
    if model_samples.size == 0:
        raise DomainError("NRMSE needs non-empty traces")
    spread = float(np.ptp(ref_samples))
    if spread <= 0:
        raise DomainError("NRMSE is undefined for a flat reference trace")
    return float(np.sqrt(np.mean((model_samples - ref_samples) ** 2)) / spread)


def peak_error(model: TraceLike, ref: TraceLike) -> float:
    """Relative peak amplitude error |max(model) - max(ref)| / max(ref); timing is ignored."""
    model_samples, ref_samples = _samples(model), _samples(ref)
    if model_samples.size == 0 or ref_samples.size == 0:
        raise DomainError("peak error needs non-empty traces")
    reference_peak = float(np.max(ref_samples))
    if reference_peak <= 0:
        raise DomainError(f"peak error needs a positive reference peak, got {reference_peak}")
    return abs(float(np.max(model_samples)) - reference_peak) / reference_peak


def residuals(exp: TraceLike, model: TraceLike) -> TraceLike:
    """
    Pointwise difference exp - model on a shared grid.

    Returns:
        A VoltageTrace when exp is one, otherwise an array.
    """
    exp_samples, model_samples = _paired(exp, model)
    difference = exp_samples - model_samples
    if isinstance(exp, VoltageTrace):
        return exp.with_samples(difference)
    return difference


@dataclass(frozen=True)
class QQResult:
    """
    Normal Q-Q data of a residual sample.

    Attributes:
        points (np.ndarray): (n, 2) array of theoretical standard normal quantiles
            and sorted standardized residuals.
        ks_p (float): Kolmogorov-Smirnov p-value against N(0, s^2) with s estimated.
        std (float): Estimated residual standard deviation s.
    """

    points: np.ndarray
    ks_p: float
    std: float

    @property
    def theoretical(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def empirical(self) -> np.ndarray:
        return self.points[:, 1]


def qq_against_normal(values: TraceLike) -> QQResult:
    """
    Pairs sorted standardized residuals with standard normal quantiles.

    Plotting positions are (i - 0.5) / n. The Kolmogorov-Smirnov test uses the
    estimated standard deviation, so its p-value is indicative only.

    Args:
        values (TraceLike): Residual sample, at least 20 values.

    Returns:
        QQResult: Q-Q points and KS p-value.
    """
    sample = _samples(values)
    n = sample.size
    if n < QQ_MIN_SAMPLES:
        raise DomainError(f"Q-Q analysis needs at least {QQ_MIN_SAMPLES} samples, got {n}")
    std = float(np.std(sample, ddof=1))
    if not std > 0:
        raise DomainError("Q-Q analysis is undefined for zero-variance residuals")
    positions = (np.arange(1, n + 1) - 0.5) / n
    theoretical = stats.norm.ppf(positions)
    empirical = np.sort((sample - np.mean(sample)) / std)
    ks_p = float(stats.kstest(sample, "norm", args=(0.0, std)).pvalue)
    logger.debug("Q-Q over %d residuals: s = %.4g, KS p = %.4g", n, std, ks_p)
    return QQResult(points=np.column_stack([theoretical, empirical]), ks_p=ks_p, std=std)


def qq_slope(qq: QQResult, central: float = 0.95) -> float:
    """
    Least-squares slope of the Q-Q points over the central probability mass.

    Args:
        qq (QQResult): Q-Q data.
        central (float): Central share of plotting positions used in the fit.

    Returns:
        float: Slope; 1 for a normal sample.
    """
    if not 0 < central <= 1:
        raise DomainError(f"central share must lie in (0, 1], got {central}")
    limit = stats.norm.ppf(0.5 + central / 2) if central < 1 else np.inf
    inside = np.abs(qq.theoretical) <= limit
    slope, _ = np.polyfit(qq.theoretical[inside], qq.empirical[inside], 1)
    return float(slope)


def residual_histogram(values: TraceLike, bins: int = 50) -> Tuple[np.ndarray, np.ndarray]:
    """
    Histogram of residuals.

    Returns:
        Tuple[np.ndarray, np.ndarray]: Counts per bin, summing to the sample count, and bin edges.
    """
    sample = _samples(values)
    if sample.size == 0:
        raise DomainError("histogram needs at least one residual")
    counts, edges = np.histogram(sample, bins=bins)
    return counts, edges
