"""
Unbounded half-space: Gaussian puff over a perfectly reflecting ground at z = -h.
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import integrate, special

from omc_channel_sim.channel.params import (
    ChannelDiagnostics,
    ChannelParams,
    GeometryKind,
    PulseShape,
    SpacePoint,
    TravelFrame,
    clamp_nonnegative,
)
from omc_channel_sim.channel.travel import travel_parameter
from omc_channel_sim.exceptions import DomainError, NumericalError, SingularPointError

logger = logging.getLogger(__name__)

QUAD_EPSREL = 1e-8
QUAD_EPSABS = 1e-30
QUAD_LIMIT = 200
# Half-width of the quadrature window around a Gaussian, in units of sqrt(r).
GAUSSIAN_SPAN = 40.0


def _require_unbounded(params: ChannelParams, p: SpacePoint):
    if params.geometry is not GeometryKind.unbounded:
        raise DomainError(f"unbounded response needs geometry {GeometryKind.unbounded.value}, got {params.geometry.value}")
    if p.z < -params.source_height:
        raise DomainError(f"point z = {p.z} lies below the ground at z = {-params.source_height}")


def _frame_travel_parameter(params: ChannelParams, p: SpacePoint, t: float, frame: TravelFrame) -> float:
    if frame is TravelFrame.downwind:
        r = travel_parameter(params, p.x)
    else:
        r = travel_parameter(params, params.flow_speed * t)
    if r == 0:
        raise SingularPointError(f"Gaussian puff is singular at r = 0 (x = {p.x}, t = {t})")
    return r


def _transverse_factor(params: ChannelParams, y: float, z: float, r: float) -> float:
    h = params.source_height
    prefactor = params.released_amount / (8 * (math.pi * r) ** 1.5)
    ground = math.exp(-(z**2) / (4 * r)) + math.exp(-((z + 2 * h) ** 2) / (4 * r))
    return prefactor * math.exp(-(y**2) / (4 * r)) * ground


def unbounded_impulse(
    params: ChannelParams,
    p: SpacePoint,
    t: float,
    frame: TravelFrame = TravelFrame.downwind,
) -> float:
    """
    Gaussian puff of an instantaneous release above a reflecting ground plane.

    C = M / (8 (pi r)^1.5) * exp(-((x - u t)^2 + y^2) / (4 r))
        * [exp(-z^2 / (4 r)) + exp(-(z + 2h)^2 / (4 r))]

    Args:
        params (ChannelParams): Unbounded channel description.
        p (SpacePoint): Evaluation point with z >= -h.
        t (float): Time since release in s. Non-positive times give 0.
        frame (TravelFrame): Where r is evaluated, at x (downwind) or at u t (elapsed).

    Returns:
        float: Concentration in mol/m^3.
    """
    _require_unbounded(params, p)
    if t <= 0:
        return 0.0
    r = _frame_travel_parameter(params, p, t, frame)
    longitudinal = math.exp(-((p.x - params.flow_speed * t) ** 2) / (4 * r))
    return longitudinal * _transverse_factor(params, p.y, p.z, r)


def pulse_response_unbounded(
    params: ChannelParams,
    p: SpacePoint,
    pulse: PulseShape,
    t: float,
    diagnostics: Optional[ChannelDiagnostics] = None,
) -> float:
    """
    Finite-pulse response (1/T_p) * integral over [0, min(t, T_p)] of C_unb(t - tau) d tau.

    Evaluated by adaptive Gauss-Kronrod quadrature with a breakpoint at the
    advective arrival, rel-tol 1e-8 and absolute floor 1e-30 mol/m^3.

    Args:
        params (ChannelParams): Unbounded channel description.
        p (SpacePoint): Receiver position.
        pulse (PulseShape): Emitted pulse.
        t (float): Time since the pulse start in s, t >= 0.
        diagnostics (Optional[ChannelDiagnostics]): Collector for evaluation counts.

    Returns:
        float: Concentration in mol/m^3.
    """
    _require_unbounded(params, p)
    if t < 0:
        raise DomainError(f"pulse response needs t >= 0, got {t}")
    upper = min(t, pulse.duration)
    if upper <= 0:
        return 0.0
    r = _frame_travel_parameter(params, p, t, TravelFrame.downwind)
    peak = t - params.arrival_time(p.x)
    spread = math.sqrt(2 * r) / params.flow_speed
    points = sorted(
        tau for tau in (peak - 5 * spread, peak, peak + 5 * spread) if 0.0 < tau < upper
    )

    result = integrate.quad(
        lambda tau: unbounded_impulse(params, p, t - tau),
        0.0,
        upper,
        epsabs=QUAD_EPSABS,
        epsrel=QUAD_EPSREL,
        limit=QUAD_LIMIT,
        points=points or None,
        full_output=1,
    )
    value, abserr, info = result[0], result[1], result[2]
    if diagnostics is not None:
        diagnostics.quadrature_evaluations += int(info["neval"])
    if len(result) > 3:
        raise NumericalError(
            "pulse response quadrature did not converge",
            {"message": result[3], "abserr": abserr, "value": value, "interval": (0.0, upper), "t": t},
        )
    return clamp_nonnegative(value / pulse.duration, diagnostics)


def _erf_difference(upper: np.ndarray, lower: np.ndarray) -> np.ndarray:
    # erf(upper) - erf(lower) without cancellation in either tail.
    right_tail = special.erfc(lower) - special.erfc(upper)
    left_tail = special.erfc(-upper) - special.erfc(-lower)
    middle = special.erf(upper) - special.erf(lower)
    return np.where(lower > 0, right_tail, np.where(upper < 0, left_tail, middle))


def unbounded_pulse_trace(
    params: ChannelParams,
    p: SpacePoint,
    pulse: PulseShape,
    times: np.ndarray,
    diagnostics: Optional[ChannelDiagnostics] = None,
) -> np.ndarray:
    """
    Closed form of pulse_response_unbounded over an array of times since the pulse start.

    With r fixed by the receiver position, the pulse integral of the Gaussian
    in (x - u t) is a difference of error functions.

    Args:
        params (ChannelParams): Unbounded channel description.
        p (SpacePoint): Receiver position.
        pulse (PulseShape): Emitted pulse.
        times (np.ndarray): Times since the pulse start in s.
        diagnostics (Optional[ChannelDiagnostics]): Collector for clamp counts.

    Returns:
        np.ndarray: Concentration in mol/m^3, zero for non-positive times.
    """
    _require_unbounded(params, p)
    times = np.asarray(times, dtype=float)
    r = _frame_travel_parameter(params, p, 0.0, TravelFrame.downwind)
    u = params.flow_speed
    scale = 2 * math.sqrt(r)
    upper_time = np.maximum(times, 0.0)
    lower_time = np.maximum(times - pulse.duration, 0.0)
    window = _erf_difference((u * upper_time - p.x) / scale, (u * lower_time - p.x) / scale)
    amplitude = _transverse_factor(params, p.y, p.z, r) * math.sqrt(math.pi * r) / (u * pulse.duration)
    values = np.where(times > 0, amplitude * window, 0.0)
    return clamp_nonnegative(values, diagnostics)


def _gaussian_integral(lower: float, upper: float, center: float, r: float) -> float:
    scale = 2 * math.sqrt(r)
    window = _erf_difference(np.asarray((upper - center) / scale), np.asarray((lower - center) / scale))
    return math.sqrt(math.pi * r) * float(window)


def unbounded_mass(params: ChannelParams, t: float) -> float:
    """
    Amount of odorant in the half-space z >= -h at time t, by numerical quadrature.

    The elapsed-frame field separates into x, y and z factors; each factor is
    integrated by adaptive quadrature and the product returned. It equals M for
    every t > 0.

    Args:
        params (ChannelParams): Unbounded channel description.
        t (float): Time since release in s, t > 0.

    Returns:
        float: Integrated amount in mol.
    """
    if t <= 0:
        raise DomainError(f"mass integral needs t > 0, got {t}")
    origin = SpacePoint(x=params.flow_speed * t, y=0.0, z=0.0)
    _require_unbounded(params, origin)
    r = _frame_travel_parameter(params, origin, t, TravelFrame.elapsed)
    h = params.source_height
    span = GAUSSIAN_SPAN * math.sqrt(r)
    options = dict(epsabs=QUAD_EPSABS, epsrel=1e-12, limit=QUAD_LIMIT)

    center = params.flow_speed * t
    along, _ = integrate.quad(
        lambda x: math.exp(-((x - center) ** 2) / (4 * r)), center - span, center + span, points=[center], **options
    )
    across, _ = integrate.quad(lambda y: math.exp(-(y**2) / (4 * r)), -span, span, points=[0.0], **options)
    vertical, _ = integrate.quad(
        lambda z: math.exp(-(z**2) / (4 * r)) + math.exp(-((z + 2 * h) ** 2) / (4 * r)),
        -h,
        span + h,
        points=[0.0] if span + h > 0.0 > -h else None,
        **options,
    )
    mass = params.released_amount / (8 * (math.pi * r) ** 1.5) * along * across * vertical
    logger.debug("unbounded mass at t=%.3f s: %.12g mol (r=%.4g m^2)", t, mass, r)
    return mass


def unbounded_cell_average(
    params: ChannelParams,
    center: SpacePoint,
    half_widths: Tuple[float, float, float],
    t: float,
) -> float:
    """
    Mean elapsed-frame concentration over an axis-aligned box, in closed form.

    The part of the box below the ground is excluded from both integral and volume.

    Args:
        params (ChannelParams): Unbounded channel description.
        center (SpacePoint): Box centre.
        half_widths (Tuple[float, float, float]): Box half-widths along x, y, z in m.
        t (float): Time since release in s, t > 0.

    Returns:
        float: Box-averaged concentration in mol/m^3.
    """
    _require_unbounded(params, center)
    if t <= 0:
        return 0.0
    r = _frame_travel_parameter(params, center, t, TravelFrame.elapsed)
    hx, hy, hz = half_widths
    h = params.source_height
    z_low = max(center.z - hz, -h)
    z_high = center.z + hz
    along = _gaussian_integral(center.x - hx, center.x + hx, params.flow_speed * t, r)
    across = _gaussian_integral(center.y - hy, center.y + hy, 0.0, r)
    vertical = _gaussian_integral(z_low, z_high, 0.0, r) + _gaussian_integral(z_low, z_high, -2 * h, r)
    volume = (2 * hx) * (2 * hy) * (z_high - z_low)
    return params.released_amount / (8 * (math.pi * r) ** 1.5) * along * across * vertical / volume
