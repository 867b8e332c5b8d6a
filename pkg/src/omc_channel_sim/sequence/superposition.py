import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from omc_channel_sim.channel.channel_base import get_channel_model
from omc_channel_sim.channel.params import ChannelDiagnostics, ChannelParams, SpacePoint
from omc_channel_sim.receiver.mox_sensor import integrate_kinetics, to_mg_per_L
from omc_channel_sim.receiver.noise import SeedLike, add_noise
from omc_channel_sim.receiver.params import ReceiverParams
from omc_channel_sim.sequence.schedule import SimulationGrid, TransmissionSchedule
from omc_channel_sim.traces import ConcentrationTrace, ConcentrationUnit, VoltageTrace

logger = logging.getLogger(__name__)


def superpose(
    params: ChannelParams,
    p: SpacePoint,
    sched: TransmissionSchedule,
    grid: SimulationGrid,
    diagnostics: Optional[ChannelDiagnostics] = None,
) -> ConcentrationTrace:
    """
    Sums the pulse responses of every scheduled pulse on the grid (LTI superposition).

    Args:
        params (ChannelParams): Channel description.
        p (SpacePoint): Receiver position.
        sched (TransmissionSchedule): Pulse starts and shape.
        grid (SimulationGrid): Output grid.
        diagnostics (Optional[ChannelDiagnostics]): Collector for channel counters.

    Returns:
        ConcentrationTrace: Concentration in mol/m^3, linear in M.
    """
    grid.check_against(sched)
    model = get_channel_model(params, diagnostics)
    times = grid.times
    total = np.zeros_like(times)
    for start in sched.pulse_starts:
        total += model.pulse_trace(p, sched.pulse, times - start)
    logger.debug("superposed %d pulses on %d samples", sched.count, times.size)
    return ConcentrationTrace(t0=0.0, dt=grid.dt, samples=total, unit=ConcentrationUnit.mol_per_m3)


@dataclass(frozen=True)
class SimulationResult:
    """
    Every stage of one end-to-end run.

    Attributes:
        concentration (ConcentrationTrace): Ambient concentration in mg/L.
        clean_voltage (VoltageTrace): Noise-free sensor voltage.
        noisy_voltage (Optional[VoltageTrace]): Voltage with measurement noise, when requested.
    """

    concentration: ConcentrationTrace
    clean_voltage: VoltageTrace
    noisy_voltage: Optional[VoltageTrace] = None

    @property
    def output(self) -> VoltageTrace:
        return self.noisy_voltage if self.noisy_voltage is not None else self.clean_voltage


def simulate_chain(
    params: ChannelParams,
    rx: ReceiverParams,
    p: SpacePoint,
    sched: TransmissionSchedule,
    grid: SimulationGrid,
    seed: SeedLike = None,
    noisy: bool = True,
    v0: Optional[float] = None,
    diagnostics: Optional[ChannelDiagnostics] = None,
) -> SimulationResult:
    """
    Runs superposition, unit conversion, sensor kinetics and optional noise.

    Args:
        params (ChannelParams): Channel description.
        rx (ReceiverParams): Receiver description.
        p (SpacePoint): Receiver position.
        sched (TransmissionSchedule): Pulse schedule.
        grid (SimulationGrid): Output grid.
        seed: Noise seed; fixed seeds give identical noisy traces.
        noisy (bool): Whether to add measurement noise.
        v0 (Optional[float]): Initial voltage, clean-air baseline by default.
        diagnostics (Optional[ChannelDiagnostics]): Collector for channel counters.

    Returns:
        SimulationResult: Concentration, clean and noisy voltage.
    """
    concentration = to_mg_per_L(superpose(params, p, sched, grid, diagnostics), rx.molar_mass)
    clean = integrate_kinetics(rx, concentration, v0)
    noisy_voltage = add_noise(clean, rx.noise_kappa, seed) if noisy else None
    return SimulationResult(concentration=concentration, clean_voltage=clean, noisy_voltage=noisy_voltage)


def end_to_end(
    params: ChannelParams,
    rx: ReceiverParams,
    p: SpacePoint,
    sched: TransmissionSchedule,
    grid: SimulationGrid,
    seed: SeedLike = None,
    noisy: bool = True,
) -> VoltageTrace:
    """
    Sensor voltage produced by a transmission schedule.

    Args:
        params (ChannelParams): Channel description.
        rx (ReceiverParams): Receiver description.
        p (SpacePoint): Receiver position.
        sched (TransmissionSchedule): Pulse schedule.
        grid (SimulationGrid): Output grid.
        seed: Noise seed.
        noisy (bool): Whether to add measurement noise.

    Returns:
        VoltageTrace: Noisy voltage, or the clean voltage when noisy is False.
    """
    return simulate_chain(params, rx, p, sched, grid, seed=seed, noisy=noisy).output
