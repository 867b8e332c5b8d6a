import json
import logging
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from omc_channel_sim.exceptions import DomainError
from omc_channel_sim.metrics.statistics import (
    QQ_MIN_SAMPLES,
    TraceLike,
    nrmse,
    peak_error,
    pearson,
    qq_against_normal,
    residuals,
)

logger = logging.getLogger(__name__)

NRMSE_NORMALIZER = "range"
# Q-Q points kept in a report; the full set goes to the noise-report CSV.
REPORT_QQ_POINTS = 200


class ValidationReport(BaseModel):
    """
    Metrics of one comparison between an experimental and a model voltage trace.

    Attributes:
        pearson_r (float): Pearson correlation.
        nrmse (float): RMSE divided by the model trace range.
        nrmse_normalizer (str): Label of the NRMSE normalizer, always "range".
        peak_error (float): Relative peak amplitude error.
        residual_mean (float): Mean of exp - model in V.
        residual_std (float): Standard deviation of exp - model in V.
        qq_points (List[Tuple[float, float]]): Thinned normal Q-Q points of the residuals.
        ks_p (Optional[float]): Kolmogorov-Smirnov p-value, None when residuals are degenerate.
        alignment_lag (float): Lag applied to the experiment before comparison, in s.
        n_samples (int): Number of compared samples.
    Methods:
        save(file_path: str): Save the report as a JSON document.
        load_from_file(file_path: str) -> ValidationReport: Load a report from a JSON document.
        as_dict() -> dict: Convert the report to a dictionary.
    """

    pearson_r: float = Field(..., ge=-1.0, le=1.0, description="Pearson correlation.")
    nrmse: float = Field(..., ge=0.0, description="Normalized root-mean-square error.")
    nrmse_normalizer: str = Field(NRMSE_NORMALIZER, description="NRMSE normalizer label.")
    peak_error: float = Field(..., ge=0.0, description="Relative peak amplitude error.")
    residual_mean: float = Field(..., description="Residual mean in V.")
    residual_std: float = Field(..., ge=0.0, description="Residual standard deviation in V.")
    qq_points: List[Tuple[float, float]] = Field(default_factory=list, description="Normal Q-Q points.")
    ks_p: Optional[float] = Field(None, description="Kolmogorov-Smirnov p-value.")
    alignment_lag: float = Field(0.0, description="Applied alignment lag in s.")
    n_samples: int = Field(..., ge=1, description="Compared samples.")

    def as_dict(self) -> dict:
        return self.model_dump(mode="json")

    def save(self, file_path: str):
        with open(file_path, "w", encoding="utf-8") as file:
            json.dump(self.as_dict(), file, indent=4)

    @staticmethod
    def load_from_file(file_path: str) -> "ValidationReport":
        with open(file_path, "r", encoding="utf-8") as file:
            return ValidationReport(**json.load(file))


def thin_qq_points(points: np.ndarray, limit: int = REPORT_QQ_POINTS) -> List[Tuple[float, float]]:
    """Evenly spaced subset of Q-Q points, first and last kept; order is preserved."""
    if len(points) > limit:
        points = points[np.unique(np.linspace(0, len(points) - 1, limit).round().astype(int))]
    return [(float(a), float(b)) for a, b in points]


def build_report(exp: TraceLike, model: TraceLike, alignment_lag: float = 0.0) -> ValidationReport:
    """
    Computes every validation metric with the model trace as reference.

    Args:
        exp (TraceLike): Experimental trace, already resampled and aligned.
        model (TraceLike): Noise-free model prediction on the same grid.
        alignment_lag (float): Lag that was applied, reported as is.

    Returns:
        ValidationReport: The filled report.
    """
    difference = residuals(exp, model)
    samples = difference.samples if hasattr(difference, "samples") else difference
    qq_points, ks_p = [], None
    if samples.size >= QQ_MIN_SAMPLES:
        try:
            qq = qq_against_normal(samples)
            qq_points, ks_p = thin_qq_points(qq.points), qq.ks_p
        except DomainError as exc:
            logger.warning("residual Q-Q skipped: %s", exc)
    report = ValidationReport(
        pearson_r=pearson(exp, model),
        nrmse=nrmse(exp, model),
        peak_error=peak_error(exp, model),
        residual_mean=float(np.mean(samples)),
        residual_std=float(np.std(samples, ddof=1)) if samples.size > 1 else 0.0,
        qq_points=qq_points,
        ks_p=ks_p,
        alignment_lag=alignment_lag,
        n_samples=int(samples.size),
    )
    logger.info(
        "validation: r = %.4f, NRMSE = %.3f%% (%s), peak error = %.3f%%",
        report.pearson_r,
        100 * report.nrmse,
        report.nrmse_normalizer,
        100 * report.peak_error,
    )
    return report


class NoiseReport(BaseModel):
    """
    Residual noise characterization of one recording.

    Attributes:
        n_samples (int): Number of residuals.
        residual_mean (float): Mean residual in V.
        residual_std (float): Residual standard deviation in V.
        ks_p (float): Kolmogorov-Smirnov p-value against N(0, s^2).
        qq_slope (float): Slope of the Q-Q points over the central 95 % of plotting positions.
        histogram_bins (int): Number of residual histogram bins.
        alignment_lag (float): Lag applied before computing residuals, in s.
    """

    n_samples: int = Field(..., ge=1, description="Number of residuals.")
    residual_mean: float = Field(..., description="Residual mean in V.")
    residual_std: float = Field(..., ge=0.0, description="Residual standard deviation in V.")
    ks_p: float = Field(..., ge=0.0, le=1.0, description="Kolmogorov-Smirnov p-value.")
    qq_slope: float = Field(..., description="Central Q-Q slope.")
    histogram_bins: int = Field(..., ge=1, description="Residual histogram bins.")
    alignment_lag: float = Field(0.0, description="Applied alignment lag in s.")

    def as_dict(self) -> dict:
        return self.model_dump(mode="json")

    def save(self, file_path: str):
        with open(file_path, "w", encoding="utf-8") as file:
            json.dump(self.as_dict(), file, indent=4)
