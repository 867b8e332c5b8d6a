import pytest

from omc_channel_sim.channel import ChannelParams, GeometryKind, PulseShape, SpacePoint
from omc_channel_sim.receiver import ReceiverParams


@pytest.fixture
def bounded_params() -> ChannelParams:
    return ChannelParams()


@pytest.fixture
def unbounded_params() -> ChannelParams:
    return ChannelParams(geometry=GeometryKind.unbounded)


@pytest.fixture
def receiver_point() -> SpacePoint:
    return SpacePoint(x=1.10, y=0.0, z=0.0)


@pytest.fixture
def one_second_pulse() -> PulseShape:
    return PulseShape(duration=1.0)


@pytest.fixture
def receiver() -> ReceiverParams:
    return ReceiverParams()


@pytest.fixture
def unbounded_receiver() -> ReceiverParams:
    return ReceiverParams(tau_rise=0.05, tau_decay=45.0)
