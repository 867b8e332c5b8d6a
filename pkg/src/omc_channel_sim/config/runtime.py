import logging
import os
from typing import Optional

logger = logging.getLogger(__name__)

THREADS_ENV_VAR = "OMC_SIM_THREADS"


def worker_count(override: Optional[int] = None) -> int:
    """
    Number of worker threads for concurrent sweeps and particle lanes.

    Args:
        override (Optional[int]): Explicit count, e.g. from --threads.

    Returns:
        int: The override, else OMC_SIM_THREADS, else the CPU count.
    """
    if override is not None:
        return max(1, int(override))
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logger.warning("ignoring non-integer %s=%r", THREADS_ENV_VAR, raw)
    return os.cpu_count() or 1
