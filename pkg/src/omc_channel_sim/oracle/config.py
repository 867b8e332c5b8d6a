from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

ACCEPTANCE_MIN_PARTICLES = 10_000


class OracleConfig(BaseModel):
    """
    Settings of the Monte Carlo particle oracle.

    Attributes:
        n_particles (int): Number of released particles, split across lanes.
        dt (float): Largest time step in s.
        seed (int): Master seed; every lane spawns an independent child stream from it.
        lanes (int): Number of independent particle lanes. Fixed so results do not
            depend on the number of threads.
        cell_half_widths (Tuple[float, float, float]): Receiver cell half-widths in m.
        bins (int): Number of histogram bins for profile comparisons.
        snapshot_times (List[float]): Times at which the unbounded cloud is binned, in s.
        band (float): Acceptance band in standard errors.
        dump_path (Optional[str]): When set, binned estimates are written there as text.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_particles: int = Field(1_000_000, ge=1, description="Number of particles.")
    dt: float = Field(1e-3, gt=0.0, description="Largest time step in s.")
    seed: int = Field(0, ge=0, description="Master seed.")
    lanes: int = Field(8, ge=1, description="Independent particle lanes.")
    cell_half_widths: Tuple[float, float, float] = Field(
        (0.02, 0.02, 0.02), description="Receiver cell half-widths along x, y, z in m."
    )
    bins: int = Field(20, ge=2, description="Histogram bins.")
    snapshot_times: List[float] = Field(
        default_factory=lambda: [0.15, 0.22, 0.35], description="Unbounded snapshot times in s."
    )
    band: float = Field(3.0, gt=0.0, description="Acceptance band in standard errors.")
    dump_path: Optional[str] = Field(None, description="Optional text dump of binned estimates.")

    @property
    def insufficient_statistics(self) -> bool:
        return self.n_particles < ACCEPTANCE_MIN_PARTICLES
