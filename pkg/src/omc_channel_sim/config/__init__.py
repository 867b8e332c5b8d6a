from .runtime import THREADS_ENV_VAR, worker_count
from .scenario import (
    PRESETS,
    GridSpec,
    ScenarioConfig,
    ScenarioPreset,
    ScheduleSpec,
    ValidationSettings,
    expand_preset,
    merge_settings,
    preset_scenario,
)
