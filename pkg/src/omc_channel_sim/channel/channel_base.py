from abc import ABC, abstractmethod
from typing import Optional, Union

import numpy as np

from omc_channel_sim.channel.bounded import bounded_impulse, bounded_pulse_trace, pulse_response_bounded
from omc_channel_sim.channel.params import (
    ChannelDiagnostics,
    ChannelParams,
    DiracArrival,
    GeometryKind,
    PulseShape,
    SpacePoint,
)
from omc_channel_sim.channel.unbounded import (
    pulse_response_unbounded,
    unbounded_impulse,
    unbounded_pulse_trace,
)


class ChannelModel(ABC):
    """
    Abstract base class for all channel geometries.
    """

    def __init__(self, params: ChannelParams):
        self.params = params

    @abstractmethod
    def get_geometry_kind(self) -> GeometryKind:
        """
        Returns the geometry identifier of the model.

        Returns:
            GeometryKind: The geometry identifier.
        """
        pass

    @abstractmethod
    def impulse(self, p: SpacePoint, t: float) -> Union[float, DiracArrival]:
        """
        Evaluates the impulse response at a point.

        Args:
            p (SpacePoint): Evaluation point.
            t (float): Time since release in s.

        Returns:
            The concentration in mol/m^3, or a DiracArrival for geometries whose
            impulse response is singular in time.
        """
        pass

    @abstractmethod
    def pulse_response(self, p: SpacePoint, pulse: PulseShape, t: float) -> float:
        """
        Evaluates the finite-pulse response at one time.

        Args:
            p (SpacePoint): Receiver position.
            pulse (PulseShape): Emitted pulse.
            t (float): Time since the pulse start in s.

        Returns:
            float: Concentration in mol/m^3.
        """
        pass

    @abstractmethod
    def pulse_trace(self, p: SpacePoint, pulse: PulseShape, times: np.ndarray) -> np.ndarray:
        """
        Evaluates the finite-pulse response over an array of times since the pulse start.

        Args:
            p (SpacePoint): Receiver position.
            pulse (PulseShape): Emitted pulse.
            times (np.ndarray): Times since the pulse start in s.

        Returns:
            np.ndarray: Concentration samples in mol/m^3.
        """
        pass

    def arrival_time(self, p: SpacePoint) -> float:
        return self.params.arrival_time(p.x)


class UnboundedChannel(ChannelModel):
    def __init__(self, params: ChannelParams, diagnostics: Optional[ChannelDiagnostics] = None):
        super().__init__(params)
        self.diagnostics = diagnostics

    def get_geometry_kind(self) -> GeometryKind:
        return GeometryKind.unbounded

    def impulse(self, p: SpacePoint, t: float) -> float:
        return unbounded_impulse(self.params, p, t)

    def pulse_response(self, p: SpacePoint, pulse: PulseShape, t: float) -> float:
        return pulse_response_unbounded(self.params, p, pulse, t, self.diagnostics)

    def pulse_trace(self, p: SpacePoint, pulse: PulseShape, times: np.ndarray) -> np.ndarray:
        return unbounded_pulse_trace(self.params, p, pulse, times, self.diagnostics)


class BoundedSquareChannel(ChannelModel):
    def __init__(self, params: ChannelParams, diagnostics: Optional[ChannelDiagnostics] = None):
        super().__init__(params)
        self.diagnostics = diagnostics

    def get_geometry_kind(self) -> GeometryKind:
        return GeometryKind.bounded_square

    def impulse(self, p: SpacePoint, t: float = 0.0) -> DiracArrival:
        return bounded_impulse(self.params, p, self.diagnostics)

    def pulse_response(self, p: SpacePoint, pulse: PulseShape, t: float) -> float:
        return pulse_response_bounded(self.params, p, pulse, t, self.diagnostics)

    def pulse_trace(self, p: SpacePoint, pulse: PulseShape, times: np.ndarray) -> np.ndarray:
        return bounded_pulse_trace(self.params, p, pulse, times, self.diagnostics)


def get_channel_model(params: ChannelParams, diagnostics: Optional[ChannelDiagnostics] = None) -> ChannelModel:
    """
    Returns the channel model matching the geometry of the parameters.

    Args:
        params (ChannelParams): Channel description.
        diagnostics (Optional[ChannelDiagnostics]): Collector passed on to every evaluation.

    Returns:
        ChannelModel: The geometry-specific model.
    """
    if params.geometry is GeometryKind.unbounded:
        return UnboundedChannel(params, diagnostics)
    return BoundedSquareChannel(params, diagnostics)
