"""
Compares particle estimates with the analytic channel solutions bin by bin.
"""
import json
import logging
import math
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field
from scipy import integrate, special, stats

from omc_channel_sim.channel.bounded import transverse_profile
from omc_channel_sim.channel.params import ChannelParams, GeometryKind, SpacePoint
from omc_channel_sim.channel.travel import travel_parameter
from omc_channel_sim.channel.unbounded import unbounded_cell_average
from omc_channel_sim.oracle.config import OracleConfig
from omc_channel_sim.oracle.particles import BoundedEstimate, UnboundedEstimate

logger = logging.getLogger(__name__)

ACCEPTANCE_PASS_FRACTION = 0.95
EXACT_TOLERANCE = 1e-9


class OracleBin(BaseModel):
    """
    One compared bin.

    Attributes:
        label (str): What the bin measures, for example "cell t=0.22" or "y[3]".
        analytic (float): Analytic value, a concentration or a density.
        empirical (float): Particle estimate in the same unit.
        standard_error (float): Monte Carlo standard error of the estimate.
        passed (bool): Whether |empirical - analytic| lies within the acceptance band.
    """

    label: str = Field(..., description="Bin label.")
    analytic: float = Field(..., description="Analytic value.")
    empirical: float = Field(..., description="Particle estimate.")
    standard_error: float = Field(..., description="Monte Carlo standard error.")
    passed: bool = Field(..., description="Within the acceptance band.")


class OracleComparison(BaseModel):
    """
    Outcome of an oracle run.

    Attributes:
        geometry (GeometryKind): Geometry that was checked.
        n_particles (int): Number of particles.
        bins (List[OracleBin]): Every compared bin.
        pass_fraction (float): Share of bins within the band, 1.0 when there are none.
        insufficient_statistics (bool): Fewer particles than the acceptance criterion needs.
        exact_match (Optional[bool]): For K = 0, whether all particles sit exactly on the advected source.
        uniformity_p_value (Optional[float]): Chi-square p-value of the transverse histogram against uniform.
    """

    geometry: GeometryKind = Field(..., description="Checked geometry.")
    n_particles: int = Field(..., description="Number of particles.")
    bins: List[OracleBin] = Field(default_factory=list, description="Compared bins.")
    pass_fraction: float = Field(1.0, description="Share of bins within the band.")
    insufficient_statistics: bool = Field(False, description="Too few particles for acceptance.")
    exact_match: Optional[bool] = Field(None, description="Degenerate K = 0 check.")
    uniformity_p_value: Optional[float] = Field(None, description="Chi-square uniformity p-value.")

    @property
    def accepted(self) -> bool:
        if self.exact_match is not None:
            return self.exact_match
        return not self.insufficient_statistics and self.pass_fraction >= ACCEPTANCE_PASS_FRACTION

    def as_dict(self) -> dict:
        data = self.model_dump(mode="json")
        data["accepted"] = self.accepted
        return data

    def save(self, file_path: str):
        with open(file_path, "w", encoding="utf-8") as file:
            json.dump(self.as_dict(), file, indent=4)

    def bins_frame(self) -> pd.DataFrame:
        return pd.DataFrame([b.model_dump() for b in self.bins], columns=list(OracleBin.model_fields))


def binomial_standard_error(probability: float, n: int) -> float:
    """Standard error sqrt(p (1 - p) / n) of an estimated bin probability."""
    probability = min(max(probability, 0.0), 1.0)
    return math.sqrt(probability * (1.0 - probability) / n)


def chi_square_uniformity(counts: np.ndarray) -> float:
    """
    Pearson chi-square test of a histogram against equal expected counts.

    Args:
        counts (np.ndarray): Observed counts per bin.

    Returns:
        float: p-value of the test.
    """
    counts = np.asarray(counts, dtype=float)
    return float(stats.chisquare(counts).pvalue)


def _make_bin(label: str, analytic: float, empirical: float, standard_error: float, band: float) -> OracleBin:
    passed = abs(empirical - analytic) <= band * standard_error
    if standard_error == 0.0:
        passed = math.isclose(empirical, analytic, rel_tol=1e-12, abs_tol=1e-300)
    return OracleBin(
        label=label, analytic=analytic, empirical=empirical, standard_error=standard_error, passed=passed
    )


def _summarize(geometry: GeometryKind, cfg: OracleConfig, bins: List[OracleBin], **extra) -> OracleComparison:
    pass_fraction = float(np.mean([b.passed for b in bins])) if bins else 1.0
    comparison = OracleComparison(
        geometry=geometry,
        n_particles=cfg.n_particles,
        bins=bins,
        pass_fraction=pass_fraction,
        insufficient_statistics=cfg.insufficient_statistics,
        **extra,
    )
    if comparison.insufficient_statistics:
        logger.warning("only %d particles: pass fraction is reported but not accepted", cfg.n_particles)
    logger.info(
        "%s oracle: %d of %d bins within %.1f SE",
        geometry.value,
        sum(b.passed for b in bins),
        len(bins),
        cfg.band,
    )
    if cfg.dump_path:
        comparison.bins_frame().to_csv(cfg.dump_path, index=False, float_format="%.9g")
    return comparison


def _cell_volume(params: ChannelParams, p: SpacePoint, cfg: OracleConfig) -> float:
    hx, hy, hz = cfg.cell_half_widths
    z_low = max(p.z - hz, -params.source_height)
    return (2 * hx) * (2 * hy) * (p.z + hz - z_low)


def compare_unbounded(params: ChannelParams, estimate: UnboundedEstimate, cfg: OracleConfig) -> OracleComparison:
    """
    Checks the receiver cell concentration and the downwind marginal at every snapshot.

    The cell estimate M * count / (n V) is compared with the box average of the
    puff, the mean downwind position with u t, and the x histogram with the
    Gaussian marginal integrated over each bin. With K = 0 the analytic field is
    singular and only the exact advection of every particle is checked.

    Args:
        params (ChannelParams): Unbounded channel description.
        estimate (UnboundedEstimate): Particle estimate.
        cfg (OracleConfig): Oracle settings used for the run.

    Returns:
        OracleComparison: Bins and acceptance flags.
    """
    n = estimate.n_particles
    u = params.flow_speed
    if travel_parameter(params, u * estimate.snapshots[-1].time) == 0:
        exact = all(
            s.max_x_deviation <= EXACT_TOLERANCE * max(1.0, u * s.time) and s.max_transverse == 0.0
            for s in estimate.snapshots
        )
        return _summarize(GeometryKind.unbounded, cfg, [], exact_match=exact)

    p = estimate.receiver
    volume = _cell_volume(params, p, cfg)
    bins = []
    for snapshot in estimate.snapshots:
        t = snapshot.time
        analytic = unbounded_cell_average(params, p, cfg.cell_half_widths, t)
        probability = analytic * volume / params.released_amount
        bins.append(
            _make_bin(
                f"cell t={t:g}",
                analytic,
                params.released_amount * snapshot.cell_count / (n * volume),
                params.released_amount * binomial_standard_error(probability, n) / volume,
                cfg.band,
            )
        )

        r = travel_parameter(params, u * t)
        bins.append(
            _make_bin(f"mean x t={t:g}", u * t, snapshot.mean_x(n), math.sqrt(2 * r / n), cfg.band)
        )
        scale = 2 * math.sqrt(r)
        edges = snapshot.x_edges
        probabilities = 0.5 * (special.erf((edges[1:] - u * t) / scale) - special.erf((edges[:-1] - u * t) / scale))
        widths = np.diff(edges)
        for index, (prob, count, width) in enumerate(zip(probabilities, snapshot.x_counts, widths)):
            bins.append(
                _make_bin(
                    f"x[{index}] t={t:g}",
                    float(prob / width),
                    float(count / (n * width)),
                    binomial_standard_error(float(prob), n) / width,
                    cfg.band,
                )
            )
    return _summarize(GeometryKind.unbounded, cfg, bins)


def profile_bin_probabilities(r: float, edges: np.ndarray, half_width: float) -> np.ndarray:
    """Integrals of the transverse profile a(r, .) over consecutive bins."""
    probabilities = []
    for low, high in zip(edges[:-1], edges[1:]):
        value, _ = integrate.quad(lambda y: transverse_profile(r, y, half_width), low, high, epsrel=1e-10)
        probabilities.append(value)
    return np.asarray(probabilities)


def compare_bounded(params: ChannelParams, estimate: BoundedEstimate, cfg: OracleConfig) -> OracleComparison:
    """
    Checks the y and z histograms at the receiver plane against the Neumann profile.

    Args:
        params (ChannelParams): Bounded channel description.
        estimate (BoundedEstimate): Particle estimate.
        cfg (OracleConfig): Oracle settings used for the run.

    Returns:
        OracleComparison: Bins, acceptance flags and the uniformity p-value of the y histogram.
    """
    n = estimate.n_particles
    l = params.half_width
    if estimate.travel_parameter == 0:
        return _summarize(GeometryKind.bounded_square, cfg, [], exact_match=estimate.max_abs_coordinate == 0.0)

    edges = estimate.edges
    widths = np.diff(edges)
    probabilities = profile_bin_probabilities(estimate.travel_parameter, edges, l)
    bins = []
    for axis, counts in (("y", estimate.y_counts), ("z", estimate.z_counts)):
        for index, (prob, count, width) in enumerate(zip(probabilities, counts, widths)):
            bins.append(
                _make_bin(
                    f"{axis}[{index}]",
                    float(prob / width),
                    float(count / (n * width)),
                    binomial_standard_error(float(prob), n) / width,
                    cfg.band,
                )
            )
    return _summarize(
        GeometryKind.bounded_square,
        cfg,
        bins,
        uniformity_p_value=chi_square_uniformity(estimate.y_counts),
    )
