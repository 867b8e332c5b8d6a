"""
Metal-oxide sensor receiver: static power-law response, voltage divider and first-order kinetics.
"""
import logging
import math
from typing import Optional

import numpy as np

from omc_channel_sim.exceptions import DomainError
from omc_channel_sim.receiver.params import ReceiverParams
from omc_channel_sim.traces import ConcentrationTrace, ConcentrationUnit, VoltageTrace

logger = logging.getLogger(__name__)


def mol_per_m3_to_mg_per_L(c, molar_mass: float):
    """
    Converts mol/m^3 to mg/L. One g/m^3 is one mg/L, so the factor is the molar mass.

    Args:
        c: Concentration(s) in mol/m^3, non-negative.
        molar_mass (float): Molar mass in g/mol.

    Returns:
        Concentration(s) in mg/L.
    """
    if molar_mass < 0 or np.any(np.asarray(c) < 0):
        raise DomainError("unit conversion needs non-negative inputs")
    return c * molar_mass


def to_mg_per_L(trace: ConcentrationTrace, molar_mass: float) -> ConcentrationTrace:
    if trace.unit is ConcentrationUnit.mg_per_L:
        return trace
    return trace.scaled(molar_mass, ConcentrationUnit.mg_per_L)


def clean_air_resistance(params: ReceiverParams) -> float:
    return params.clean_air_ratio * params.reference_resistance


def static_resistance(params: ReceiverParams, c):
    """
    Steady-state sensing resistance R0 * 10^b * c^m, capped at the clean-air resistance Gamma * R0.

    Args:
        params (ReceiverParams): Receiver description.
        c: Concentration(s) in mg/L.

    Returns:
        Resistance(s) in ohm.
    """
    c = np.maximum(np.asarray(c, dtype=float), params.concentration_floor)
    resistance = (
        params.reference_resistance * 10.0**params.sensitivity_intercept * c**params.sensitivity_slope
    )
    resistance = np.minimum(resistance, clean_air_resistance(params))
    return float(resistance) if resistance.ndim == 0 else resistance


def static_voltage(params: ReceiverParams, c):
    """
    Equilibrium divider voltage V_c * R_L / (R_L + R_static(c)).

    Args:
        params (ReceiverParams): Receiver description.
        c: Concentration(s) in mg/L.

    Returns:
        Voltage(s) in V, strictly inside (0, V_c).
    """
    resistance = static_resistance(params, c)
    return params.circuit_voltage * params.load_resistance / (params.load_resistance + resistance)


def baseline_voltage(params: ReceiverParams) -> float:
    """Clean-air output voltage, the default initial condition of the kinetics."""
    return static_voltage(params, 0.0)


def calibrate_intercept(anchor_concentration: float, anchor_ratio: float, slope: float = -1.03) -> float:
    """
    Chooses b so that the power law passes through a datasheet anchor point.

    Args:
        anchor_concentration (float): Anchor concentration in mg/L.
        anchor_ratio (float): Datasheet R_s / R0 at the anchor.
        slope (float): Sensitivity slope m.

    Returns:
        float: b = log10(anchor_ratio) - m * log10(anchor_concentration).
    """
    if anchor_concentration <= 0 or anchor_ratio <= 0:
        raise DomainError("calibration anchors must be positive")
    return math.log10(anchor_ratio) - slope * math.log10(anchor_concentration)


def reference_resistance(clean_air_resistance: float, clean_air_ratio: float) -> float:
    """
    Reference resistance R0 = R_air / Gamma.

    Args:
        clean_air_resistance (float): Measured clean-air resistance in ohm.
        clean_air_ratio (float): Datasheet clean-air intercept Gamma.

    Returns:
        float: R0 in ohm.
    """
    if clean_air_resistance <= 0 or clean_air_ratio <= 0:
        raise DomainError("clean-air resistance and ratio must be positive")
    return clean_air_resistance / clean_air_ratio


def integrate_kinetics(
    params: ReceiverParams, c_trace: ConcentrationTrace, v0: Optional[float] = None
) -> VoltageTrace:
    """
    Integrates the first-order sensor kinetics with an exact per-sample exponential update.

    The static voltage is held constant over each step. The time constant is
    tau_rise when the static voltage exceeds the current output, tau_decay otherwise,
    decided at the start of the step.

    Args:
        params (ReceiverParams): Receiver description.
        c_trace (ConcentrationTrace): Ambient concentration in mg/L.
        v0 (Optional[float]): Initial voltage; defaults to the clean-air baseline.

    Returns:
        VoltageTrace: Output voltage on the same grid as the input.
    """
    if c_trace.unit is not ConcentrationUnit.mg_per_L:
        raise DomainError(f"kinetics expects mg/L, got {c_trace.unit.value}")
    if v0 is None:
        v0 = baseline_voltage(params)
    if not 0.0 <= v0 <= params.circuit_voltage:
        raise DomainError(f"initial voltage {v0} outside [0, {params.circuit_voltage}]")

    targets = np.atleast_1d(static_voltage(params, c_trace.samples)).tolist()
    rise = math.exp(-c_trace.dt / params.tau_rise)
    decay = math.exp(-c_trace.dt / params.tau_decay)

    output = [0.0] * len(targets)
    current = float(v0)
    for k, target in enumerate(targets):
        output[k] = current
        factor = rise if target > current else decay
        current = target + (current - target) * factor
    logger.debug("integrated %d kinetics steps (dt=%.4g s)", len(output), c_trace.dt)
    return VoltageTrace(t0=c_trace.t0, dt=c_trace.dt, samples=np.asarray(output), circuit_voltage=params.circuit_voltage)


def step_response(initial: float, final: float, tau: float, times: np.ndarray) -> np.ndarray:
    """Closed-form first-order response final + (initial - final) * exp(-t / tau)."""
    return final + (initial - final) * np.exp(-np.asarray(times, dtype=float) / tau)


def transition_time(trace: VoltageTrace, start_time: float, initial: float, final: float, fraction: float) -> float:
    """
    Time after start_time until the trace first covers a fraction of the initial-to-final gap.

    Args:
        trace (VoltageTrace): Output voltage.
        start_time (float): Start of the transition in s.
        initial (float): Voltage at the start of the transition.
        final (float): Voltage the transition heads to.
        fraction (float): Fraction of the gap, e.g. 1 - 1/e.

    Returns:
        float: Elapsed time in s, or inf when the fraction is never reached.
    """
    times = trace.times
    progress = (trace.samples - initial) / (final - initial)
    reached = np.nonzero((times >= start_time - 1e-12) & (progress >= fraction))[0]
    if reached.size == 0:
        return math.inf
    return float(times[reached[0]] - start_time)
