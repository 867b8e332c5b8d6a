import logging
from typing import Union

import numpy as np

from omc_channel_sim.exceptions import DomainError
from omc_channel_sim.traces import VoltageTrace

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


def add_noise(v: VoltageTrace, kappa: float, seed: SeedLike = None) -> VoltageTrace:
    """
    Adds signal-dependent Gaussian measurement noise N(0, kappa^2 V(t)^2) to every sample.

    Noisy samples are clipped into [0, V_c]; the number of clipped samples is
    stored on the returned trace and logged.

    Args:
        v (VoltageTrace): Clean voltage trace.
        kappa (float): Noise scaling coefficient, kappa >= 0.
        seed: Seed or generator; a fixed seed gives identical traces.

    Returns:
        VoltageTrace: Noisy trace on the same grid.
    """
    if kappa < 0:
        raise DomainError(f"noise coefficient must be non-negative, got {kappa}")
    if kappa == 0:
        return v
    rng = np.random.default_rng(seed)
    noisy = v.samples + rng.normal(0.0, 1.0, size=v.samples.size) * kappa * np.abs(v.samples)
    clipped = np.clip(noisy, 0.0, v.circuit_voltage)
    clip_events = int(np.count_nonzero(clipped != noisy))
    if clip_events:
        logger.warning("clipped %d of %d noisy samples into [0, %.3g] V", clip_events, noisy.size, v.circuit_voltage)
    return v.with_samples(clipped, clip_events=clip_events)
