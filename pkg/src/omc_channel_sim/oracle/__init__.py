from .config import ACCEPTANCE_MIN_PARTICLES, OracleConfig
from .particles import (
    BoundedEstimate,
    UnboundedEstimate,
    UnboundedSnapshot,
    fold_into_duct,
    lane_sizes,
    reflect_at_ground,
    simulate_bounded,
    simulate_unbounded,
)
from .comparison import (
    ACCEPTANCE_PASS_FRACTION,
    OracleBin,
    OracleComparison,
    binomial_standard_error,
    chi_square_uniformity,
    compare_bounded,
    compare_unbounded,
    profile_bin_probabilities,
)
