from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from omc_channel_sim.exceptions import DomainError


class ConcentrationUnit(Enum):
    mol_per_m3 = "mol/m3"
    mg_per_L = "mg/L"


def _as_samples(samples) -> np.ndarray:
    array = np.asarray(samples, dtype=float)
    if array.ndim != 1:
        raise DomainError(f"trace samples must be one-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise DomainError("trace samples must be finite")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class ConcentrationTrace:
    """
    Uniformly sampled concentration at the receiver.

    Attributes:
        t0 (float): Time of the first sample in seconds.
        dt (float): Sample spacing in seconds.
        samples (np.ndarray): Concentration samples, never negative.
        unit (ConcentrationUnit): Unit of the samples.
    """

    t0: float
    dt: float
    samples: np.ndarray
    unit: ConcentrationUnit = ConcentrationUnit.mg_per_L

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        object.__setattr__(self, "samples", _as_samples(self.samples))
        if np.any(self.samples < 0):
            raise DomainError("concentration samples must be non-negative")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) * self.dt

    def scaled(self, factor: float, unit: ConcentrationUnit) -> "ConcentrationTrace":
        return replace(self, samples=self.samples * factor, unit=unit)


@dataclass(frozen=True)
class VoltageTrace:
    """
    Uniformly sampled sensor voltage.

    Attributes:
        t0 (float): Time of the first sample in seconds.
        dt (float): Sample spacing in seconds.
        samples (np.ndarray): Voltage samples in volts.
        circuit_voltage (float): Supply voltage V_c bounding every sample.
        clip_events (int): Number of samples clipped into [0, V_c] by the noise stage.
    """

    t0: float
    dt: float
    samples: np.ndarray
    circuit_voltage: float
    clip_events: int = field(default=0)

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        object.__setattr__(self, "samples", _as_samples(self.samples))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) * self.dt

    def with_samples(self, samples, clip_events: int = 0) -> "VoltageTrace":
        return replace(self, samples=samples, clip_events=clip_events)

    def same_grid(self, other: "VoltageTrace", rel_tol: float = 1e-9) -> bool:
        """Checks if both traces share start, spacing and length."""
        return (
            len(self) == len(other)
            and abs(self.dt - other.dt) <= rel_tol * self.dt
            and abs(self.t0 - other.t0) <= rel_tol * max(self.dt, abs(self.t0))
        )
