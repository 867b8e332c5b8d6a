import logging
import math
from typing import Tuple, Union

import numpy as np
from scipy import signal

from omc_channel_sim.exceptions import AlignmentError, DomainError
from omc_channel_sim.sequence.schedule import SimulationGrid
from omc_channel_sim.trace_io.csv_traces import RawTrace
from omc_channel_sim.traces import VoltageTrace

logger = logging.getLogger(__name__)

# Correlation scores closer than this count as a tie, won by the smaller lag.
TIE_TOLERANCE = 1e-12


def resample(
    raw: RawTrace,
    grid: Union[SimulationGrid, np.ndarray],
    circuit_voltage: float = 5.0,
    t0: float = 0.0,
) -> VoltageTrace:
    """
    Linearly interpolates a recorded trace onto a uniform grid.

    Args:
        raw (RawTrace): Recorded trace.
        grid: SimulationGrid, shifted by t0, or an array of uniformly spaced times.
        circuit_voltage (float): V_c stored on the result.
        t0 (float): Offset added to the times of a SimulationGrid.

    Returns:
        VoltageTrace: Samples on the grid.
    """
    if isinstance(grid, SimulationGrid):
        times, dt = t0 + grid.times, grid.dt
    else:
        times = np.asarray(grid, dtype=float)
        if times.size < 2:
            raise DomainError("an explicit resampling grid needs at least two times")
        dt = float(times[1] - times[0])
    tolerance = 1e-9 * max(dt, 1.0)
    if times[0] < raw.start - tolerance or times[-1] > raw.end + tolerance:
        raise DomainError(
            f"grid [{times[0]:.6g}, {times[-1]:.6g}] s extends beyond the recording [{raw.start:.6g}, {raw.end:.6g}] s"
        )
    samples = np.interp(times, raw.timestamps, raw.voltages)
    return VoltageTrace(t0=float(times[0]), dt=dt, samples=samples, circuit_voltage=circuit_voltage)


def _overlap(exp: np.ndarray, model: np.ndarray, lag: int) -> Tuple[np.ndarray, np.ndarray]:
    n = exp.size
    if lag >= 0:
        return exp[lag:], model[: n - lag]
    return exp[: n + lag], model[-lag:]


def _overlap_correlations(exp: np.ndarray, model: np.ndarray, lags: np.ndarray) -> np.ndarray:
    """Pearson correlation of exp(t + lag) against model(t) over the overlap, for each lag in samples."""
    n = exp.size
    e = exp - exp.mean()
    m = model - model.mean()
    full_lags = signal.correlation_lags(n, n, mode="full")
    cross = signal.correlate(e, m, mode="full")[np.searchsorted(full_lags, lags)]

    def window_sums(x: np.ndarray, start: np.ndarray, stop: np.ndarray) -> np.ndarray:
        cumulative = np.concatenate(([0.0], np.cumsum(x)))
        return cumulative[stop] - cumulative[start]

    positive = np.maximum(lags, 0)
    negative = np.maximum(-lags, 0)
    count = n - np.abs(lags)
    exp_start, exp_stop = positive, n - negative
    model_start, model_stop = negative, n - positive
    sum_e = window_sums(e, exp_start, exp_stop)
    sum_m = window_sums(m, model_start, model_stop)
    sum_ee = window_sums(e * e, exp_start, exp_stop)
    sum_mm = window_sums(m * m, model_start, model_stop)
    covariance = cross - sum_e * sum_m / count
    variance = (sum_ee - sum_e**2 / count) * (sum_mm - sum_m**2 / count)
    with np.errstate(divide="ignore", invalid="ignore"):
        scores = covariance / np.sqrt(variance)
    return np.where((variance > 0) & (count >= 2), scores, -np.inf)


def align(exp: VoltageTrace, model: VoltageTrace, max_lag: float) -> float:
    """
    Finds the lag that best lines up an experimental trace with the model.

    The returned lag L satisfies exp(t + L) ~ model(t): a model delayed by two
    samples gives L = -2 dt. Candidates are whole samples within +-max_lag; the
    correlation over the overlapping part decides, and ties go to the smaller |L|.

    Args:
        exp (VoltageTrace): Experimental trace.
        model (VoltageTrace): Model trace on the same grid.
        max_lag (float): Largest lag searched in s.

    Returns:
        float: The lag in s, a multiple of dt.
    """
    if max_lag < 0:
        raise DomainError(f"max_lag must be non-negative, got {max_lag}")
    if not exp.same_grid(model):
        raise AlignmentError("alignment needs both traces on the same grid; resample first")
    if np.ptp(exp.samples) == 0 or np.ptp(model.samples) == 0:
        raise AlignmentError("alignment is undefined for a flat trace")
    max_shift = min(int(math.floor(max_lag / exp.dt + 1e-9)), len(exp) - 2)
    # Smallest |L| first, the negative lag before the positive one.
    shifts = np.array(sorted(range(-max_shift, max_shift + 1), key=lambda shift: (abs(shift), shift)))
    scores = _overlap_correlations(exp.samples, model.samples, shifts)
    winner = int(np.flatnonzero(scores >= scores.max() - TIE_TOLERANCE)[0])
    best_shift, best_score = int(shifts[winner]), float(scores[winner])
    lag = best_shift * exp.dt
    logger.info("alignment lag %.4g s (%d samples, correlation %.6f)", lag, best_shift, best_score)
    return lag


def apply_lag(exp: VoltageTrace, model: VoltageTrace, lag: float) -> Tuple[VoltageTrace, VoltageTrace]:
    """
    Crops both traces to their overlap after shifting the experiment by lag.

    Returns:
        Tuple[VoltageTrace, VoltageTrace]: Shifted experiment and model, sharing the model's time base.
    """
    if not exp.same_grid(model):
        raise AlignmentError("lag can only be applied to traces on the same grid")
    shift = int(round(lag / exp.dt))
    if abs(shift) >= len(exp):
        raise AlignmentError(f"lag {lag} s leaves no overlap")
    exp_part, model_part = _overlap(exp.samples, model.samples, shift)
    t0 = model.t0 + max(-shift, 0) * model.dt
    return (
        VoltageTrace(t0=t0, dt=exp.dt, samples=exp_part, circuit_voltage=exp.circuit_voltage),
        VoltageTrace(t0=t0, dt=model.dt, samples=model_part, circuit_voltage=model.circuit_voltage),
    )
