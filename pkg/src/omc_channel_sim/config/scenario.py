import json
import logging
from copy import deepcopy
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from omc_channel_sim.channel.params import ChannelParams, GeometryKind, PulseShape, SpacePoint
from omc_channel_sim.exceptions import ConfigError, DomainError
from omc_channel_sim.oracle.config import OracleConfig
from omc_channel_sim.receiver.params import ReceiverParams
from omc_channel_sim.sequence.schedule import DEFAULT_GRID_DT, SimulationGrid, TransmissionSchedule

logger = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1


class ScenarioPreset(Enum):
    """
    Named parameter sets of the testbed, selected by the "defaults" key of a scenario document.
    """

    table1_bounded = "table1_bounded"
    table1_unbounded = "table1_unbounded"


PRESETS = {
    ScenarioPreset.table1_bounded: {
        "channel": {"geometry": GeometryKind.bounded_square.value},
        "receiver": {"tau_rise": 0.23, "tau_decay": 30.0},
    },
    ScenarioPreset.table1_unbounded: {
        "channel": {"geometry": GeometryKind.unbounded.value},
        "receiver": {"tau_rise": 0.05, "tau_decay": 45.0},
    },
}


class ScheduleSpec(BaseModel):
    """
    Transmission schedule as written in a scenario document.

    Attributes:
        count (int): Number of pulses of a regular schedule.
        symbol_period (Optional[float]): T_sym of a regular schedule in s.
        pulse_duration (float): T_p in s.
        pulse_starts (Optional[List[float]]): Explicit start times; overrides count and symbol_period.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    count: int = Field(1, ge=0, description="Pulse count.")
    symbol_period: Optional[float] = Field(None, gt=0.0, description="Symbol period in s.")
    pulse_duration: float = Field(1.0, gt=0.0, description="Pulse duration in s.")
    pulse_starts: Optional[List[float]] = Field(None, description="Explicit pulse start times in s.")

    @model_validator(mode="after")
    def _check_buildable(self) -> "ScheduleSpec":
        try:
            self.build()
        except ValueError as error:
            raise ValueError(f"schedule cannot be built: {error}") from error
        return self

    def build(self) -> TransmissionSchedule:
        pulse = PulseShape(duration=self.pulse_duration)
        if self.pulse_starts is not None:
            return TransmissionSchedule(pulse_starts=self.pulse_starts, pulse=pulse)
        if self.symbol_period is None:
            if self.count > 1:
                raise DomainError("a schedule with several pulses needs symbol_period or pulse_starts")
            return TransmissionSchedule(pulse_starts=[0.0] * self.count, pulse=pulse)
        return TransmissionSchedule.regular(self.count, self.symbol_period, pulse)


class GridSpec(BaseModel):
    """
    Simulation grid as written in a scenario document.

    Attributes:
        dt (float): Grid spacing in s.
        t_end (Optional[float]): End time in s; by default the schedule plus five decay constants.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: float = Field(DEFAULT_GRID_DT, gt=0.0, description="Grid spacing in s.")
    t_end: Optional[float] = Field(None, gt=0.0, description="End time in s.")

    def build(self, schedule: TransmissionSchedule, receiver: ReceiverParams) -> SimulationGrid:
        if self.t_end is None:
            return SimulationGrid.default_for(schedule, receiver, self.dt)
        return SimulationGrid(t_end=self.t_end, dt=self.dt)


class ValidationSettings(BaseModel):
    """
    Settings of the comparison against experimental traces.

    Attributes:
        align (bool): Search the lag that best aligns experiment and model.
        max_lag (float): Largest lag searched, in s.
        histogram_bins (int): Bins of the residual histogram in noise reports.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    align: bool = Field(True, description="Align traces before computing metrics.")
    max_lag: float = Field(2.0, ge=0.0, description="Largest alignment lag in s.")
    histogram_bins: int = Field(50, ge=1, description="Residual histogram bins.")


class ScenarioConfig(BaseModel):
    """
    Complete description of one simulation or validation scenario.

    Attributes:
        defaults (Optional[ScenarioPreset]): Preset the document was expanded from.
        channel (ChannelParams): Channel parameters.
        receiver_position (SpacePoint): Receiver position.
        receiver (ReceiverParams): Receiver parameters.
        schedule (ScheduleSpec): Transmission schedule.
        grid (GridSpec): Simulation grid.
        seed (int): Noise seed.
        oracle (OracleConfig): Particle oracle settings.
        validation (ValidationSettings): Trace comparison settings.
    Methods:
        save(file_path: str): Save the scenario to a JSON file.
        load_from_file(file_path: str) -> ScenarioConfig: Load a scenario from a JSON file.
        load_from_dict(settings: dict) -> ScenarioConfig: Load a scenario from a dictionary.
        as_dict() -> dict: Convert the scenario to a dictionary.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    defaults: Optional[ScenarioPreset] = Field(None, description="Preset the scenario was expanded from.")
    channel: ChannelParams = Field(default_factory=ChannelParams, description="Channel parameters.")
    receiver_position: SpacePoint = Field(default_factory=SpacePoint, description="Receiver position.")
    receiver: ReceiverParams = Field(default_factory=ReceiverParams, description="Receiver parameters.")
    schedule: ScheduleSpec = Field(default_factory=ScheduleSpec, description="Transmission schedule.")
    grid: GridSpec = Field(default_factory=GridSpec, description="Simulation grid.")
    seed: int = Field(0, ge=0, le=MAX_SEED, description="Noise seed.")
    oracle: OracleConfig = Field(default_factory=OracleConfig, description="Particle oracle settings.")
    validation: ValidationSettings = Field(default_factory=ValidationSettings, description="Validation settings.")

    @model_validator(mode="after")
    def _check_grid(self) -> "ScenarioConfig":
        schedule = self.build_schedule()
        self.build_grid(schedule).check_against(schedule)
        return self

    def build_schedule(self) -> TransmissionSchedule:
        return self.schedule.build()

    def build_grid(self, schedule: Optional[TransmissionSchedule] = None) -> SimulationGrid:
        return self.grid.build(schedule or self.build_schedule(), self.receiver)

    def with_updates(self, **sections) -> "ScenarioConfig":
        """Re-validated copy with top-level sections replaced, e.g. seed or oracle."""
        data = self.as_dict()
        for key, value in sections.items():
            data[key] = value.model_dump(mode="json") if isinstance(value, BaseModel) else value
        return ScenarioConfig.load_from_dict(data)

    def as_dict(self) -> dict:
        return self.model_dump(mode="json")

    def save(self, file_path: str):
        with open(file_path, "w", encoding="utf-8") as file:
            json.dump(self.as_dict(), file, indent=4)

    @staticmethod
    def load_from_file(file_path: str) -> "ScenarioConfig":
        try:
            with open(file_path, "r", encoding="utf-8") as file:
                loaded_settings = json.load(file)
        except OSError as error:
            raise ConfigError(f"cannot read scenario: {error}") from error
        except json.JSONDecodeError as error:
            raise ConfigError(f"invalid JSON at line {error.lineno}, column {error.colno}: {error.msg}") from error
        if not isinstance(loaded_settings, dict):
            raise ConfigError("scenario document must be a JSON object")
        return ScenarioConfig.load_from_dict(loaded_settings)

    @staticmethod
    def load_from_dict(settings: dict) -> "ScenarioConfig":
        """
        Expands the "defaults" preset, merges the user keys over it and validates the result.

        Args:
            settings (dict): Scenario document.

        Returns:
            ScenarioConfig: The validated scenario.
        """
        expanded = expand_preset(settings)
        try:
            return ScenarioConfig(**expanded)
        except ValidationError as error:
            first = error.errors()[0]
            field_path = ".".join(str(part) for part in first["loc"])
            raise ConfigError(first["msg"], field_path) from error


def merge_settings(base: dict, override: dict) -> dict:
    """Recursive merge; nested dictionaries combine and every other value from override wins."""
    merged = deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = merge_settings(merged[key], value)
        else:
            merged[key] = deepcopy(value)
    return merged


def expand_preset(settings: dict) -> dict:
    """
    Replaces the "defaults" key of a scenario document by the preset it names.

    Args:
        settings (dict): Scenario document, optionally with "defaults".

    Returns:
        dict: The user document merged over the preset.
    """
    name = settings.get("defaults")
    if name is None:
        return dict(settings)
    try:
        preset = ScenarioPreset(name)
    except ValueError:
        choices = ", ".join(member.value for member in ScenarioPreset)
        raise ConfigError(f"unknown preset {name!r}, expected one of {choices}", "defaults") from None
    logger.debug("expanding scenario preset %s", preset.value)
    return merge_settings(PRESETS[preset], settings)


def preset_scenario(preset: ScenarioPreset, **overrides) -> ScenarioConfig:
    """Scenario of a preset with optional section overrides as plain dictionaries."""
    return ScenarioConfig.load_from_dict({"defaults": preset.value, **overrides})
