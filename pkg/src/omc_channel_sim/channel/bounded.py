"""
Bounded square duct: Neumann transverse profile and the advective Dirac arrival.
"""
import logging
import math
from typing import Optional

import numpy as np

from omc_channel_sim.channel.params import (
    ChannelDiagnostics,
    ChannelParams,
    DiracArrival,
    GeometryKind,
    PulseShape,
    SpacePoint,
    clamp_nonnegative,
)
from omc_channel_sim.channel.travel import travel_parameter
from omc_channel_sim.exceptions import DomainError, SingularPointError

logger = logging.getLogger(__name__)

SERIES_TOLERANCE = 1e-14
MAX_SERIES_TERMS = 100_000
IMAGE_TOLERANCE = 1e-14
CROSSOVER_FACTOR = 1e-2
# Grid times within this distance of a pulse window edge count as inside it.
WINDOW_TOLERANCE = 1e-9


def profile_crossover(half_width: float) -> float:
    """
    Travel parameter r* below which the image sum replaces the cosine series.

    Args:
        half_width (float): Duct half-width l in m.

    Returns:
        float: r* = (l / pi)^2 * 1e-2 in m^2.
    """
    return (half_width / math.pi) ** 2 * CROSSOVER_FACTOR


def _check_profile_args(r: float, y, half_width: float) -> np.ndarray:
    if r < 0:
        raise DomainError(f"transverse profile needs r >= 0, got {r}")
    if not half_width > 0:
        raise DomainError(f"half-width must be positive, got {half_width}")
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) > half_width * (1 + 1e-12)):
        raise DomainError(f"transverse coordinate outside [-{half_width}, {half_width}]")
    return y


def transverse_profile_series(
    r: float, y, half_width: float, diagnostics: Optional[ChannelDiagnostics] = None
):
    """
    Cosine-series form 1/(2l) + (1/l) * sum_n exp(-(n pi / l)^2 r) cos(n pi y / l).

    Terms are summed until their magnitude falls below 1e-14 / l, with a hard
    cap of 1e5 terms.

    Args:
        r (float): Travel parameter in m^2, r > 0.
        y: Transverse coordinate(s) in m.
        half_width (float): Duct half-width l in m.
        diagnostics (Optional[ChannelDiagnostics]): Collector for term counts.

    Returns:
        Profile value(s) in 1/m.
    """
    y = _check_profile_args(r, y, half_width)
    if r == 0:
        raise DomainError("cosine series diverges at r = 0; use the image sum")
    wavenumber = math.pi / half_width
    n_terms = math.ceil(math.sqrt(-math.log(SERIES_TOLERANCE) / r) / wavenumber)
    n_terms = min(max(n_terms, 1), MAX_SERIES_TERMS)
    if n_terms == MAX_SERIES_TERMS:
        logger.warning("cosine series hit the %d term cap at r = %.3e", MAX_SERIES_TERMS, r)
    if diagnostics is not None:
        diagnostics.series_terms = max(diagnostics.series_terms, n_terms)

    n = np.arange(1, n_terms + 1, dtype=float)
    weights = np.exp(-((n * wavenumber) ** 2) * r)
    cosines = np.cos(np.multiply.outer(y, n) * wavenumber)
    value = 1.0 / (2 * half_width) + (cosines @ weights) / half_width
    return clamp_nonnegative(value, diagnostics, what="transverse profile")


def transverse_profile_images(
    r: float, y, half_width: float, diagnostics: Optional[ChannelDiagnostics] = None
):
    """
    Method-of-images form of the Neumann profile for a source at the duct centre.

    The walls at +-l mirror the source onto y_k+ = 4kl and y_k- = 4kl + 2l for
    every integer k. Shells of images are added until the nearest omitted image
    contributes less than 1e-14.

    Args:
        r (float): Travel parameter in m^2.
        y: Transverse coordinate(s) in m.
        half_width (float): Duct half-width l in m.
        diagnostics (Optional[ChannelDiagnostics]): Collector for clamp counts.

    Returns:
        Profile value(s) in 1/m. At r = 0 this is the Dirac limit: inf at the
        source, 0 elsewhere.
    """
    y = _check_profile_args(r, y, half_width)
    if r == 0:
        value = np.where(y == 0.0, math.inf, 0.0)
        return float(value) if value.ndim == 0 else value

    prefactor = 1.0 / math.sqrt(4 * math.pi * r)

    def kernel(image: float):
        return prefactor * np.exp(-((y - image) ** 2) / (4 * r))

    total = kernel(0.0) + kernel(2 * half_width)
    k = 0
    while True:
        k += 1
        period = 4 * k * half_width
        shell = (period, -period, period + 2 * half_width, -period + 2 * half_width)
        contributions = [kernel(image) for image in shell]
        for contribution in contributions:
            total = total + contribution
        if max(float(np.max(c)) for c in contributions) < IMAGE_TOLERANCE:
            break
    return clamp_nonnegative(total, diagnostics, what="transverse profile")


def transverse_profile(r: float, y, half_width: float, diagnostics: Optional[ChannelDiagnostics] = None):
    """
    Neumann transverse profile a(r, y) of the square duct; b(r, z) is the same function of z.

    Uses the image sum below the crossover r* and the cosine series above it.
    The profile integrates to one over [-l, l].

    Args:
        r (float): Travel parameter in m^2, r >= 0.
        y: Transverse coordinate(s) in m, |y| <= l.
        half_width (float): Duct half-width l in m.
        diagnostics (Optional[ChannelDiagnostics]): Collector for counters.

    Returns:
        Profile value(s) in 1/m.
    """
    if r < profile_crossover(half_width):
        return transverse_profile_images(r, y, half_width, diagnostics)
    return transverse_profile_series(r, y, half_width, diagnostics)


def _require_bounded(params: ChannelParams, p: SpacePoint) -> float:
    if params.geometry is not GeometryKind.bounded_square:
        raise DomainError(f"bounded response needs geometry {GeometryKind.bounded_square.value}, got {params.geometry.value}")
    if p.x <= 0:
        raise DomainError(f"bounded response needs x > 0, got {p.x}")
    p.check_inside_duct(params.half_width)
    r = travel_parameter(params, p.x)
    if r == 0:
        raise SingularPointError(f"bounded response is singular at r = 0 (x = {p.x}, K = {params.diffusivity})")
    return r


def bounded_impulse(
    params: ChannelParams, p: SpacePoint, diagnostics: Optional[ChannelDiagnostics] = None
) -> DiracArrival:
    """
    Impulse response of the square duct.

    The time dependence is a Dirac at the advective arrival t_a = x / u. It is
    returned symbolically and never sampled.

    Args:
        params (ChannelParams): Bounded channel description.
        p (SpacePoint): Receiver position inside the duct, x > 0.
        diagnostics (Optional[ChannelDiagnostics]): Collector for counters.

    Returns:
        DiracArrival: Arrival time and amplitude (M/u) a(r, y) b(r, z).
    """
    r = _require_bounded(params, p)
    a = transverse_profile(r, p.y, params.half_width, diagnostics)
    b = transverse_profile(r, p.z, params.half_width, diagnostics)
    amplitude = params.released_amount / params.flow_speed * a * b
    return DiracArrival(arrival_time=params.arrival_time(p.x), amplitude=amplitude)


def pulse_response_bounded(
    params: ChannelParams,
    p: SpacePoint,
    pulse: PulseShape,
    t: float,
    diagnostics: Optional[ChannelDiagnostics] = None,
) -> float:
    """
    Finite-pulse response of the duct.

    The Dirac collapses the convolution into a rectangular window of height
    amplitude / T_p over [t_a, t_a + T_p].

    Args:
        params (ChannelParams): Bounded channel description.
        p (SpacePoint): Receiver position.
        pulse (PulseShape): Emitted pulse.
        t (float): Time since the pulse start in s.
        diagnostics (Optional[ChannelDiagnostics]): Collector for counters.

    Returns:
        float: Concentration in mol/m^3.
    """
    arrival = bounded_impulse(params, p, diagnostics)
    if arrival.arrival_time - WINDOW_TOLERANCE <= t <= arrival.arrival_time + pulse.duration + WINDOW_TOLERANCE:
        return arrival.amplitude / pulse.duration
    return 0.0


def bounded_pulse_trace(
    params: ChannelParams,
    p: SpacePoint,
    pulse: PulseShape,
    times: np.ndarray,
    diagnostics: Optional[ChannelDiagnostics] = None,
) -> np.ndarray:
    """Vectorized pulse_response_bounded over an array of times since the pulse start."""
    arrival = bounded_impulse(params, p, diagnostics)
    times = np.asarray(times, dtype=float)
    inside = (times >= arrival.arrival_time - WINDOW_TOLERANCE) & (
        times <= arrival.arrival_time + pulse.duration + WINDOW_TOLERANCE
    )
    return np.where(inside, arrival.amplitude / pulse.duration, 0.0)
