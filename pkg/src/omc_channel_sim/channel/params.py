import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from omc_channel_sim.exceptions import DomainError, NumericalError

logger = logging.getLogger(__name__)

# Values at or above this are treated as truncation noise and clamped to zero.
NEGATIVE_TOLERANCE = -1e-12


class GeometryKind(Enum):
    """
    Identifies the propagation medium and selects the matching channel model.
    """

    unbounded = "unbounded"
    bounded_square = "bounded"


class TravelFrame(Enum):
    """
    Chooses where the travel parameter of the unbounded puff is evaluated.

    downwind: r = r(x) at the evaluation point.
    elapsed: r = r(u * t) at the puff centroid, the exact free-space solution.
    Both frames coincide at t = x / u.
    """

    downwind = "downwind"
    elapsed = "elapsed"


class DiffusivitySegment(BaseModel):
    """
    One constant piece of a piecewise-constant diffusivity profile K(x).
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    x_start: float = Field(..., ge=0.0, description="Segment start along the flow in m.")
    x_end: float = Field(..., description="Segment end along the flow in m.")
    diffusivity: float = Field(..., ge=0.0, description="Diffusivity on the segment in m^2/s.")

    @model_validator(mode="after")
    def _check_order(self) -> "DiffusivitySegment":
        if not self.x_end > self.x_start:
            raise ValueError("x_end must be greater than x_start")
        return self


class ChannelParams(BaseModel):
    """
    Physical description of the odor channel.

    Defaults describe the ethanol wind-tunnel testbed with a bounded duct.

    Attributes:
        released_amount (float): Amount M released per pulse in mol.
        diffusivity (float): Effective turbulent diffusivity K in m^2/s.
        flow_speed (float): Mean flow speed u along +x in m/s.
        source_height (float): Height h of the source above the reflecting ground in m.
        half_width (float): Half edge length l of the square duct in m.
        geometry (GeometryKind): Unbounded half-space or bounded square duct.
        diffusivity_profile (Optional[List[DiffusivitySegment]]): Piecewise-constant K(x);
            when given it replaces the constant K in the travel parameter.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    released_amount: float = Field(0.32, gt=0.0, description="Released amount M in mol.")
    diffusivity: float = Field(
        0.05, ge=0.0, description="Effective diffusivity K in m^2/s. Zero only for degenerate oracle runs."
    )
    flow_speed: float = Field(5.0, gt=0.0, description="Flow speed u along +x in m/s.")
    source_height: float = Field(0.125, ge=0.0, description="Source height h above the ground in m.")
    half_width: float = Field(0.125, gt=0.0, description="Duct half-width l in m.")
    geometry: GeometryKind = Field(GeometryKind.bounded_square, description="Channel geometry.")
    diffusivity_profile: Optional[List[DiffusivitySegment]] = Field(
        None, description="Optional piecewise-constant diffusivity profile along x."
    )

    @model_validator(mode="after")
    def _check_profile(self) -> "ChannelParams":
        if self.diffusivity_profile:
            segments = self.diffusivity_profile
            if segments[0].x_start != 0.0:
                raise ValueError("diffusivity profile must start at x = 0")
            for previous, current in zip(segments, segments[1:]):
                if current.x_start != previous.x_end:
                    raise ValueError("diffusivity profile segments must be contiguous")
        return self

    def with_amount(self, released_amount: float) -> "ChannelParams":
        return self.model_copy(update={"released_amount": released_amount})

    def arrival_time(self, x: float) -> float:
        """Advective arrival time x / u."""
        return x / self.flow_speed


class SpacePoint(BaseModel):
    """
    Evaluation point, x downwind of the source, y and z transverse.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    x: float = Field(1.10, description="Downwind coordinate in m.")
    y: float = Field(0.0, description="Lateral coordinate in m.")
    z: float = Field(0.0, description="Vertical coordinate in m.")

    def check_inside_duct(self, half_width: float):
        if abs(self.y) > half_width or abs(self.z) > half_width:
            raise DomainError(
                f"point ({self.y}, {self.z}) lies outside the duct cross-section |y|, |z| <= {half_width}"
            )

    def mirrored(self) -> "SpacePoint":
        return self.model_copy(update={"y": -self.y})


class PulseShape(BaseModel):
    """
    Rectangular emission of finite duration.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    duration: float = Field(1.0, gt=0.0, description="Pulse duration T_p in s.")


@dataclass(frozen=True)
class DiracArrival:
    """
    Bounded-duct impulse response: a Dirac in time at the advective arrival.

    Attributes:
        arrival_time (float): t_a = x / u in s.
        amplitude (float): (M / u) * a(r, y) * b(r, z) in mol s / m^3.
    """

    arrival_time: float
    amplitude: float


@dataclass
class ChannelDiagnostics:
    """
    Counters filled by channel evaluations. Owned by the caller, one per run.

    Attributes:
        clamped_negatives (int): Number of truncation negatives clamped to zero.
        most_negative (float): Smallest value seen before clamping.
        series_terms (int): Largest number of cosine terms used by a profile evaluation.
        quadrature_evaluations (int): Integrand evaluations spent in adaptive quadrature.
    """

    clamped_negatives: int = 0
    most_negative: float = 0.0
    series_terms: int = 0
    quadrature_evaluations: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def clamp_nonnegative(values, diagnostics: Optional[ChannelDiagnostics] = None, what: str = "concentration"):
    """
    Clamps tiny negative truncation residue to zero.

    Args:
        values: Scalar or array of evaluated values.
        diagnostics (Optional[ChannelDiagnostics]): Collector that counts clamped values.
        what (str): Quantity name used in error messages.

    Returns:
        The clamped values with the input's type.
    """
    array = np.asarray(values, dtype=float)
    if np.any(array < NEGATIVE_TOLERANCE):
        raise NumericalError(
            f"{what} evaluated to {array.min():.3e}, below the truncation tolerance",
            {"minimum": float(array.min()), "tolerance": NEGATIVE_TOLERANCE},
        )
    negative = array < 0.0
    count = int(np.count_nonzero(negative))
    if count:
        if diagnostics is not None:
            diagnostics.clamped_negatives += count
            diagnostics.most_negative = min(diagnostics.most_negative, float(array.min()))
        logger.debug("clamped %d negative %s values (min %.3e)", count, what, array.min())
        array = np.where(negative, 0.0, array)
    if np.ndim(values) == 0:
        return float(array)
    return array
