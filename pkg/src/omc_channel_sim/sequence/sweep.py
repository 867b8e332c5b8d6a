import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from omc_channel_sim.channel.params import ChannelParams, PulseShape, SpacePoint
from omc_channel_sim.config.runtime import worker_count
from omc_channel_sim.exceptions import DomainError
from omc_channel_sim.receiver.mox_sensor import baseline_voltage
from omc_channel_sim.receiver.params import ReceiverParams
from omc_channel_sim.sequence.isi import baseline_drift_fraction, inter_pulse_minima
from omc_channel_sim.sequence.schedule import DEFAULT_GRID_DT, SimulationGrid, TransmissionSchedule
from omc_channel_sim.sequence.superposition import SimulationResult, simulate_chain

logger = logging.getLogger(__name__)

DEFAULT_SYMBOL_PERIODS = (300.0, 150.0, 75.0, 30.0, 10.0)
PULSES_PER_SEQUENCE = 5


@dataclass(frozen=True)
class SweepPoint:
    """
    Result of one symbol period of a sweep.

    Attributes:
        symbol_period (float): T_sym in s.
        schedule (TransmissionSchedule): The five-pulse schedule.
        result (SimulationResult): Concentration, clean and noisy voltage.
        minima (np.ndarray): Inter-pulse voltage minima per symbol, from the clean voltage.
        baseline (float): Clean-air baseline voltage.
        drift_fraction (float): Baseline drift fraction.
    """

    symbol_period: float
    schedule: TransmissionSchedule
    result: SimulationResult
    minima: np.ndarray
    baseline: float
    drift_fraction: float


def run_symbol_period(
    params: ChannelParams,
    rx: ReceiverParams,
    p: SpacePoint,
    pulse: PulseShape,
    symbol_period: float,
    count: int = PULSES_PER_SEQUENCE,
    dt: float = DEFAULT_GRID_DT,
    seed=None,
) -> SweepPoint:
    schedule = TransmissionSchedule.regular(count, symbol_period, pulse)
    grid = SimulationGrid.default_for(schedule, rx, dt)
    result = simulate_chain(params, rx, p, schedule, grid, seed=seed)
    minima = inter_pulse_minima(result.clean_voltage, schedule, params.arrival_time(p.x))
    baseline = baseline_voltage(rx)
    point = SweepPoint(
        symbol_period=symbol_period,
        schedule=schedule,
        result=result,
        minima=minima,
        baseline=baseline,
        drift_fraction=baseline_drift_fraction(minima, baseline),
    )
    logger.info(
        "%s T_sym=%g s: drift fraction %.3e", params.geometry.value, symbol_period, point.drift_fraction
    )
    return point


def run_symbol_period_sweep(
    params: ChannelParams,
    rx: ReceiverParams,
    p: SpacePoint,
    pulse: PulseShape,
    periods: Sequence[float] = DEFAULT_SYMBOL_PERIODS,
    count: int = PULSES_PER_SEQUENCE,
    dt: float = DEFAULT_GRID_DT,
    seed: Optional[int] = None,
    max_workers: Optional[int] = None,
    show_progress: bool = False,
) -> List[SweepPoint]:
    """
    Simulates a regular pulse sequence for every symbol period.

    Periods run concurrently; each gets its own noise stream spawned from the
    master seed, and results come back in the order of the periods.

    Args:
        params (ChannelParams): Channel description.
        rx (ReceiverParams): Receiver description, shared by every period.
        p (SpacePoint): Receiver position.
        pulse (PulseShape): Pulse shape.
        periods (Sequence[float]): Symbol periods in s.
        count (int): Pulses per sequence.
        dt (float): Grid spacing in s.
        seed (Optional[int]): Master noise seed.
        max_workers (Optional[int]): Thread bound, OMC_SIM_THREADS by default.
        show_progress (bool): Show a progress bar.

    Returns:
        List[SweepPoint]: One point per period, in input order.
    """
    if any(period <= 0 for period in periods):
        raise DomainError(f"symbol periods must be positive, got {list(periods)}")
    streams = np.random.SeedSequence(seed).spawn(len(periods))
    with ThreadPoolExecutor(max_workers=worker_count(max_workers)) as executor:
        futures = [
            executor.submit(run_symbol_period, params, rx, p, pulse, period, count, dt, stream)
            for period, stream in zip(periods, streams)
        ]
        return [
            future.result()
            for future in tqdm(futures, desc=f"{params.geometry.value} sweep", disable=not show_progress)
        ]
