import logging
from dataclasses import dataclass

import numpy as np

from omc_channel_sim.config.scenario import ScenarioConfig
from omc_channel_sim.exceptions import DomainError
from omc_channel_sim.metrics.report import ValidationReport, build_report
from omc_channel_sim.metrics.statistics import residuals
from omc_channel_sim.sequence.superposition import end_to_end
from omc_channel_sim.trace_io.alignment import align, apply_lag, resample
from omc_channel_sim.trace_io.csv_traces import RawTrace, sanitize
from omc_channel_sim.traces import VoltageTrace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComparedTraces:
    """
    Experiment and noise-free model on one grid, after resampling and alignment.

    Attributes:
        exp (VoltageTrace): Experimental voltage.
        model (VoltageTrace): Model prediction.
        lag (float): Applied alignment lag in s.
        clipped (int): Experimental samples clipped into [0, V_c].
    """

    exp: VoltageTrace
    model: VoltageTrace
    lag: float
    clipped: int

    @property
    def residuals(self) -> VoltageTrace:
        return residuals(self.exp, self.model)


def model_prediction(scenario: ScenarioConfig) -> VoltageTrace:
    """Noise-free sensor voltage of a scenario."""
    schedule = scenario.build_schedule()
    grid = scenario.build_grid(schedule)
    return end_to_end(
        scenario.channel, scenario.receiver, scenario.receiver_position, schedule, grid, noisy=False
    )


def compare_with_model(exp: RawTrace, scenario: ScenarioConfig) -> ComparedTraces:
    """
    Puts a recorded trace and the scenario's model prediction on a common grid.

    The model grid is cropped to the recording span, the recording is resampled
    onto it and, when enabled, aligned within the configured lag bound.

    Args:
        exp (RawTrace): Recorded trace.
        scenario (ScenarioConfig): Scenario that should explain it.

    Returns:
        ComparedTraces: Traces ready for the metrics.
    """
    if len(exp) < 2:
        raise DomainError(f"validation needs at least two samples, got {len(exp)}")
    clean, clipped = sanitize(exp, scenario.receiver.circuit_voltage)
    model = model_prediction(scenario)
    times = model.times
    tolerance = 1e-9 * model.dt
    inside = np.nonzero((times >= clean.start - tolerance) & (times <= clean.end + tolerance))[0]
    if inside.size < 2:
        raise DomainError("recording does not overlap the simulated time span")
    first, last = int(inside[0]), int(inside[-1])
    model = VoltageTrace(
        t0=float(times[first]),
        dt=model.dt,
        samples=model.samples[first : last + 1],
        circuit_voltage=model.circuit_voltage,
    )
    resampled = resample(clean, model.times, scenario.receiver.circuit_voltage)
    resampled = VoltageTrace(
        t0=model.t0, dt=model.dt, samples=resampled.samples, circuit_voltage=resampled.circuit_voltage
    )
    lag = 0.0
    if scenario.validation.align and scenario.validation.max_lag > 0:
        lag = align(resampled, model, scenario.validation.max_lag)
        resampled, model = apply_lag(resampled, model, lag)
    return ComparedTraces(exp=resampled, model=model, lag=lag, clipped=clipped)


def validate(exp: RawTrace, scenario: ScenarioConfig) -> ValidationReport:
    """
    Compares a recorded trace with the noise-free model prediction of a scenario.

    Args:
        exp (RawTrace): Recorded (or synthetic) trace.
        scenario (ScenarioConfig): Scenario naming geometry, schedule and parameters.

    Returns:
        ValidationReport: All metrics, with the model as reference and the applied lag.
    """
    compared = compare_with_model(exp, scenario)
    return build_report(compared.exp, compared.model, alignment_lag=compared.lag)
