import math
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from omc_channel_sim.channel.params import PulseShape
from omc_channel_sim.exceptions import DomainError
from omc_channel_sim.receiver.params import ReceiverParams

DEFAULT_GRID_DT = 0.01
# Relative tolerance on start_k = start_0 + k * T_sym for regular schedules.
REGULAR_START_TOLERANCE = 1e-9


class TransmissionSchedule(BaseModel):
    """
    Start times of identical odor pulses.

    Attributes:
        pulse_starts (List[float]): Strictly increasing start times in s.
        pulse (PulseShape): Shape shared by every pulse.
        symbol_period (Optional[float]): T_sym of a regular schedule, where start_k = start_0 + k * T_sym.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    pulse_starts: List[float] = Field(default_factory=lambda: [0.0], description="Pulse start times in s.")
    pulse: PulseShape = Field(default_factory=PulseShape, description="Pulse shape.")
    symbol_period: Optional[float] = Field(None, gt=0.0, description="Symbol period T_sym in s.")

    @model_validator(mode="after")
    def _check_starts(self) -> "TransmissionSchedule":
        starts = self.pulse_starts
        if any(start < 0 for start in starts):
            raise ValueError("pulse starts must be non-negative")
        if any(later <= earlier for earlier, later in zip(starts, starts[1:])):
            raise ValueError("pulse starts must be strictly increasing")
        if self.symbol_period is not None:
            for k, start in enumerate(starts):
                expected = starts[0] + k * self.symbol_period
                if abs(start - expected) > REGULAR_START_TOLERANCE * max(1.0, abs(expected)):
                    raise ValueError(
                        f"pulse start {k} is {start} s, but symbol period {self.symbol_period} s puts it at {expected} s"
                    )
        return self

    @staticmethod
    def regular(count: int, symbol_period: float, pulse: Optional[PulseShape] = None) -> "TransmissionSchedule":
        """
        Creates a schedule with start_k = k * T_sym for k = 0 .. count - 1.

        Args:
            count (int): Number of pulses.
            symbol_period (float): T_sym in s.
            pulse (Optional[PulseShape]): Pulse shape, a 1 s pulse by default.

        Returns:
            TransmissionSchedule: The regular schedule.
        """
        if count < 0:
            raise DomainError(f"pulse count must be non-negative, got {count}")
        return TransmissionSchedule(
            pulse_starts=[k * symbol_period for k in range(count)],
            pulse=pulse or PulseShape(),
            symbol_period=symbol_period,
        )

    @property
    def count(self) -> int:
        return len(self.pulse_starts)

    @property
    def last_start(self) -> float:
        return self.pulse_starts[-1] if self.pulse_starts else 0.0

    def shifted(self, delta: float) -> "TransmissionSchedule":
        return TransmissionSchedule(
            pulse_starts=[start + delta for start in self.pulse_starts],
            pulse=self.pulse,
            symbol_period=self.symbol_period,
        )

    def merged(self, other: "TransmissionSchedule") -> "TransmissionSchedule":
        if other.pulse != self.pulse:
            raise DomainError("only schedules with the same pulse shape can be merged")
        return TransmissionSchedule(pulse_starts=sorted(self.pulse_starts + other.pulse_starts), pulse=self.pulse)


class SimulationGrid(BaseModel):
    """
    Uniform time grid starting at t = 0.

    Attributes:
        t_end (float): Last grid time in s.
        dt (float): Grid spacing in s.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    t_end: float = Field(..., gt=0.0, description="End time in s.")
    dt: float = Field(DEFAULT_GRID_DT, gt=0.0, description="Grid spacing in s.")

    @staticmethod
    def default_for(
        schedule: TransmissionSchedule, receiver: ReceiverParams, dt: float = DEFAULT_GRID_DT
    ) -> "SimulationGrid":
        """
        Grid running to last start + T_sym + 5 tau_decay, T_p standing in for T_sym on one-shot schedules.
        """
        period = schedule.symbol_period if schedule.symbol_period is not None else schedule.pulse.duration
        return SimulationGrid(t_end=schedule.last_start + period + 5 * receiver.tau_decay, dt=dt)

    @property
    def n_samples(self) -> int:
        return int(math.floor(self.t_end / self.dt + 1e-9)) + 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) * self.dt

    def check_against(self, schedule: TransmissionSchedule):
        """Enforces dt <= T_p / 10 and t_end beyond the last pulse start."""
        if self.dt > schedule.pulse.duration / 10 * (1 + 1e-12):
            raise DomainError(f"grid dt {self.dt} s exceeds T_p / 10 = {schedule.pulse.duration / 10} s")
        if schedule.count and not self.t_end > schedule.last_start:
            raise DomainError(f"grid ends at {self.t_end} s, before the last pulse start {schedule.last_start} s")
