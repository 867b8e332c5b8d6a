from .params import (
    ChannelDiagnostics,
    ChannelParams,
    DiffusivitySegment,
    DiracArrival,
    GeometryKind,
    PulseShape,
    SpacePoint,
    TravelFrame,
)
from .travel import max_diffusivity, travel_parameter
from .bounded import (
    bounded_impulse,
    bounded_pulse_trace,
    profile_crossover,
    pulse_response_bounded,
    transverse_profile,
    transverse_profile_images,
    transverse_profile_series,
)
from .unbounded import (
    pulse_response_unbounded,
    unbounded_cell_average,
    unbounded_impulse,
    unbounded_mass,
    unbounded_pulse_trace,
)
from .channel_base import BoundedSquareChannel, ChannelModel, UnboundedChannel, get_channel_model
