from .exceptions import (
    AlignmentError,
    ConfigError,
    DomainError,
    NumericalError,
    OmcSimError,
    SingularPointError,
    TraceParseError,
    UndefinedCorrelationError,
)
from .traces import ConcentrationTrace, ConcentrationUnit, VoltageTrace
from .channel import ChannelParams, GeometryKind, PulseShape, SpacePoint, get_channel_model
from .receiver import ReceiverParams, add_noise, integrate_kinetics
from .sequence import SimulationGrid, TransmissionSchedule, end_to_end, run_symbol_period_sweep, superpose
from .config import ScenarioConfig, ScenarioPreset
from .metrics import ValidationReport
from .trace_io import RawTrace, load_csv, save_csv, validate
