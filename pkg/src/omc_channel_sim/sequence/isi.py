import numpy as np

from omc_channel_sim.exceptions import DomainError
from omc_channel_sim.sequence.schedule import TransmissionSchedule
from omc_channel_sim.traces import VoltageTrace


def inter_pulse_minima(voltage: VoltageTrace, sched: TransmissionSchedule, arrival_time: float) -> np.ndarray:
    """
    Lowest voltage after each pulse before the next symbol arrives.

    The window of pulse k runs from the end of its arrival plateau,
    start_k + t_a + T_p, to the arrival of the next symbol slot,
    start_k + T_sym + t_a, clipped to the end of the trace.

    Args:
        voltage (VoltageTrace): Sensor voltage.
        sched (TransmissionSchedule): Regular schedule that produced the trace.
        arrival_time (float): Advective arrival time t_a in s.

    Returns:
        np.ndarray: One minimum per pulse, in V.
    """
    if sched.symbol_period is None:
        raise DomainError("inter-pulse minima need a regular schedule with a symbol period")
    times = voltage.times
    minima = []
    for start in sched.pulse_starts:
        window_start = start + arrival_time + sched.pulse.duration
        window_end = min(start + sched.symbol_period + arrival_time, times[-1])
        inside = (times >= window_start) & (times <= window_end)
        if not np.any(inside):
            raise DomainError(f"no samples between {window_start:.3f} s and {window_end:.3f} s")
        minima.append(float(voltage.samples[inside].min()))
    return np.asarray(minima)


def baseline_drift_fraction(minima: np.ndarray, baseline: float) -> float:
    """Relative rise of the highest inter-pulse minimum above the clean-air baseline."""
    if baseline <= 0:
        raise DomainError(f"baseline voltage must be positive, got {baseline}")
    return float((np.max(minima) - baseline) / baseline)
