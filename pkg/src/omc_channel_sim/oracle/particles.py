"""
Random-walk particle oracle for the channel models.

Every particle advects with the mean flow and takes Gaussian diffusion steps
whose variance over an interval equals twice the growth of the travel
parameter r(u t) across it, so constant and piecewise-constant diffusivity
share one integrator. Particles are split into a fixed number of lanes; each
lane owns a child stream of the master seed and lanes are merged by summation
in lane order, so results depend on the seed only.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from omc_channel_sim.channel.params import ChannelParams, GeometryKind, SpacePoint
from omc_channel_sim.channel.travel import max_diffusivity, travel_parameter
from omc_channel_sim.config.runtime import worker_count
from omc_channel_sim.exceptions import DomainError
from omc_channel_sim.oracle.config import OracleConfig

logger = logging.getLogger(__name__)

# Largest allowed diffusion step relative to the duct half-width.
WALL_STEP_FRACTION = 0.1


def fold_into_duct(values: np.ndarray, half_width: float) -> np.ndarray:
    """
    Maps coordinates back into [-l, l] by repeated specular reflection at the walls.

    Args:
        values (np.ndarray): Unconstrained coordinates in m.
        half_width (float): Wall position l in m.

    Returns:
        np.ndarray: Reflected coordinates, all within [-l, l].
    """
    period = 4 * half_width
    shifted = np.mod(np.asarray(values, dtype=float) + half_width, period)
    shifted = np.where(shifted > 2 * half_width, period - shifted, shifted)
    return shifted - half_width


def reflect_at_ground(z: np.ndarray, source_height: float) -> np.ndarray:
    """Specular reflection at the ground plane z = -h."""
    return np.where(z < -source_height, -2 * source_height - z, z)


def lane_sizes(n_particles: int, lanes: int) -> List[int]:
    """Splits n particles over lanes as evenly as possible, earlier lanes take the remainder."""
    base, remainder = divmod(n_particles, lanes)
    return [base + (1 if index < remainder else 0) for index in range(lanes)]


def _step_schedule(t_end: float, dt: float) -> np.ndarray:
    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    return np.linspace(0.0, t_end, n_steps + 1)


def _diffusion_scale(params: ChannelParams, t_from: float, t_to: float) -> float:
    u = params.flow_speed
    growth = travel_parameter(params, u * t_to) - travel_parameter(params, u * t_from)
    return math.sqrt(2 * max(growth, 0.0))


@dataclass(frozen=True)
class UnboundedSnapshot:
    """
    Particle cloud statistics of one lane, or of all lanes merged, at one time.

    Attributes:
        time (float): Snapshot time in s.
        cell_count (int): Particles inside the receiver cell.
        x_counts (np.ndarray): Histogram of the downwind coordinate.
        x_edges (np.ndarray): Bin edges of x_counts in m.
        x_sum (float): Sum of the downwind coordinates in m.
        max_x_deviation (float): Largest |x - u t| over all particles.
        max_transverse (float): Largest |y| or |z| over all particles.
    """

    time: float
    cell_count: int
    x_counts: np.ndarray
    x_edges: np.ndarray
    x_sum: float
    max_x_deviation: float
    max_transverse: float

    def mean_x(self, n_particles: int) -> float:
        return self.x_sum / n_particles

    def merged(self, other: "UnboundedSnapshot") -> "UnboundedSnapshot":
        return UnboundedSnapshot(
            time=self.time,
            cell_count=self.cell_count + other.cell_count,
            x_counts=self.x_counts + other.x_counts,
            x_edges=self.x_edges,
            x_sum=self.x_sum + other.x_sum,
            max_x_deviation=max(self.max_x_deviation, other.max_x_deviation),
            max_transverse=max(self.max_transverse, other.max_transverse),
        )


@dataclass(frozen=True)
class UnboundedEstimate:
    """
    Particle estimate of the unbounded puff.

    Attributes:
        receiver (SpacePoint): Centre of the receiver cell.
        n_particles (int): Number of released particles.
        snapshots (List[UnboundedSnapshot]): One merged snapshot per time.
    """

    receiver: SpacePoint
    n_particles: int
    snapshots: List[UnboundedSnapshot]


@dataclass(frozen=True)
class BoundedEstimate:
    """
    Particle estimate of the transverse profiles in the square duct at the receiver plane.

    Attributes:
        travel_parameter (float): r at the receiver plane in m^2.
        n_particles (int): Number of released particles.
        edges (np.ndarray): Common bin edges over [-l, l] in m.
        y_counts (np.ndarray): Histogram of y.
        z_counts (np.ndarray): Histogram of z.
        max_abs_coordinate (float): Largest |y| or |z| over all particles.
    """

    travel_parameter: float
    n_particles: int
    edges: np.ndarray
    y_counts: np.ndarray
    z_counts: np.ndarray
    max_abs_coordinate: float


def x_histogram_edges(params: ChannelParams, t: float, bins: int) -> np.ndarray:
    """Downwind bins spanning five standard deviations either side of the puff centroid."""
    center = params.flow_speed * t
    r = travel_parameter(params, center)
    if r == 0:
        return np.linspace(center - 1e-9, center + 1e-9, bins + 1)
    span = 5 * math.sqrt(2 * r)
    return np.linspace(center - span, center + span, bins + 1)


def _run_lanes(
    worker: Callable[[int, np.random.SeedSequence], object],
    cfg: OracleConfig,
    max_workers: Optional[int],
    show_progress: bool,
    desc: str,
) -> list:
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.lanes)
    sizes = lane_sizes(cfg.n_particles, cfg.lanes)
    with ThreadPoolExecutor(max_workers=worker_count(max_workers)) as executor:
        futures = [executor.submit(worker, size, child) for size, child in zip(sizes, children)]
        return [future.result() for future in tqdm(futures, desc=desc, disable=not show_progress)]


def simulate_unbounded(
    params: ChannelParams,
    p: SpacePoint,
    cfg: OracleConfig,
    max_workers: Optional[int] = None,
    show_progress: bool = False,
) -> UnboundedEstimate:
    """
    Releases particles at the origin of the half-space and records them at every snapshot time.

    Particles advance in steps no longer than cfg.dt and are reflected at the
    ground z = -h after every step.

    Args:
        params (ChannelParams): Unbounded channel description.
        p (SpacePoint): Centre of the receiver cell.
        cfg (OracleConfig): Oracle settings.
        max_workers (Optional[int]): Thread bound, OMC_SIM_THREADS by default.
        show_progress (bool): Show a progress bar over lanes.

    Returns:
        UnboundedEstimate: Merged snapshots in time order.
    """
    if params.geometry is not GeometryKind.unbounded:
        raise DomainError(f"unbounded oracle needs geometry {GeometryKind.unbounded.value}")
    times = sorted(cfg.snapshot_times)
    if not times or times[0] <= 0:
        raise DomainError("snapshot times must be positive")
    hx, hy, hz = cfg.cell_half_widths
    h = params.source_height
    u = params.flow_speed
    edges = [x_histogram_edges(params, t, cfg.bins) for t in times]

    def lane(size: int, seed: np.random.SeedSequence) -> List[UnboundedSnapshot]:
        rng = np.random.default_rng(seed)
        x = np.zeros(size)
        y = np.zeros(size)
        z = np.zeros(size)
        now = 0.0
        snapshots = []
        for t, x_edges in zip(times, edges):
            steps = _step_schedule(t - now, cfg.dt) + now
            for t_from, t_to in zip(steps[:-1], steps[1:]):
                scale = _diffusion_scale(params, t_from, t_to)
                x += u * (t_to - t_from) + scale * rng.standard_normal(size)
                y += scale * rng.standard_normal(size)
                z = reflect_at_ground(z + scale * rng.standard_normal(size), h)
            now = t
            inside = (np.abs(x - p.x) <= hx) & (np.abs(y - p.y) <= hy) & (np.abs(z - p.z) <= hz)
            counts, _ = np.histogram(x, bins=x_edges)
            snapshots.append(
                UnboundedSnapshot(
                    time=t,
                    cell_count=int(np.count_nonzero(inside)),
                    x_counts=counts,
                    x_edges=x_edges,
                    x_sum=float(np.sum(x)),
                    max_x_deviation=float(np.max(np.abs(x - u * t))) if size else 0.0,
                    max_transverse=float(max(np.max(np.abs(y)), np.max(np.abs(z)))) if size else 0.0,
                )
            )
        return snapshots

    lanes = _run_lanes(lane, cfg, max_workers, show_progress, "unbounded oracle")
    merged = lanes[0]
    for other in lanes[1:]:
        merged = [a.merged(b) for a, b in zip(merged, other)]
    logger.info(
        "unbounded oracle: %d particles, %d lanes, cell counts %s",
        cfg.n_particles,
        cfg.lanes,
        [snapshot.cell_count for snapshot in merged],
    )
    return UnboundedEstimate(receiver=p, n_particles=cfg.n_particles, snapshots=merged)


def simulate_bounded(
    params: ChannelParams,
    p: SpacePoint,
    cfg: OracleConfig,
    max_workers: Optional[int] = None,
    show_progress: bool = False,
) -> BoundedEstimate:
    """
    Releases particles at the duct centre and bins their cross-section positions at x = p.x.

    Transverse coordinates are folded back into the duct after every step.
    The step must keep the diffusion length sqrt(2 K dt) below l / 10.

    Args:
        params (ChannelParams): Bounded channel description.
        p (SpacePoint): Receiver position; only x sets the observation plane.
        cfg (OracleConfig): Oracle settings.
        max_workers (Optional[int]): Thread bound, OMC_SIM_THREADS by default.
        show_progress (bool): Show a progress bar over lanes.

    Returns:
        BoundedEstimate: Merged y and z histograms.
    """
    if params.geometry is not GeometryKind.bounded_square:
        raise DomainError(f"bounded oracle needs geometry {GeometryKind.bounded_square.value}")
    if p.x <= 0:
        raise DomainError(f"bounded oracle needs x > 0, got {p.x}")
    l = params.half_width
    step_length = math.sqrt(2 * max_diffusivity(params) * cfg.dt)
    if step_length >= WALL_STEP_FRACTION * l:
        raise DomainError(
            f"oracle step too coarse: sqrt(2 K dt) = {step_length:.4g} m must stay below l / 10 = {l / 10:.4g} m"
        )
    t_end = params.arrival_time(p.x)
    steps = _step_schedule(t_end, cfg.dt)
    scales = [_diffusion_scale(params, a, b) for a, b in zip(steps[:-1], steps[1:])]
    edges = np.linspace(-l, l, cfg.bins + 1)

    def lane(size: int, seed: np.random.SeedSequence) -> Tuple[np.ndarray, np.ndarray, float]:
        rng = np.random.default_rng(seed)
        y = np.zeros(size)
        z = np.zeros(size)
        for scale in scales:
            y = fold_into_duct(y + scale * rng.standard_normal(size), l)
            z = fold_into_duct(z + scale * rng.standard_normal(size), l)
        y_counts, _ = np.histogram(y, bins=edges)
        z_counts, _ = np.histogram(z, bins=edges)
        extent = float(max(np.max(np.abs(y)), np.max(np.abs(z)))) if size else 0.0
        return y_counts, z_counts, extent

    lanes = _run_lanes(lane, cfg, max_workers, show_progress, "bounded oracle")
    y_counts = np.zeros(cfg.bins, dtype=np.int64)
    z_counts = np.zeros(cfg.bins, dtype=np.int64)
    extent = 0.0
    for lane_y, lane_z, lane_extent in lanes:
        y_counts += lane_y
        z_counts += lane_z
        extent = max(extent, lane_extent)
    r = travel_parameter(params, p.x)
    logger.info("bounded oracle: %d particles, %d steps, r = %.4g m^2", cfg.n_particles, len(scales), r)
    return BoundedEstimate(
        travel_parameter=r,
        n_particles=cfg.n_particles,
        edges=edges,
        y_counts=y_counts,
        z_counts=z_counts,
        max_abs_coordinate=extent,
    )
