from omc_channel_sim.channel.params import ChannelParams
from omc_channel_sim.exceptions import DomainError


def travel_parameter(params: ChannelParams, x: float) -> float:
    """
    Travel parameter r(x) = (1/u) * integral of K over [0, x].

    For constant K this is K * x / u. With a piecewise-constant profile the
    integral is summed segment by segment; beyond the last segment the last
    diffusivity is held.

    Args:
        params (ChannelParams): Channel description.
        x (float): Downwind distance in m, x >= 0.

    Returns:
        float: r in m^2.
    """
    if x < 0:
        raise DomainError(f"travel parameter needs x >= 0, got {x}")
    segments = params.diffusivity_profile
    if not segments:
        return params.diffusivity * x / params.flow_speed

    integral = 0.0
    for segment in segments:
        if x <= segment.x_start:
            break
        integral += segment.diffusivity * (min(x, segment.x_end) - segment.x_start)
    last = segments[-1]
    if x > last.x_end:
        integral += last.diffusivity * (x - last.x_end)
    return integral / params.flow_speed


def max_diffusivity(params: ChannelParams) -> float:
    """Largest diffusivity along the flow, the constant K when no profile is set."""
    if not params.diffusivity_profile:
        return params.diffusivity
    return max(segment.diffusivity for segment in params.diffusivity_profile)
