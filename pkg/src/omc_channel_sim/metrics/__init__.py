from .statistics import (
    QQ_MIN_SAMPLES,
    QQResult,
    TraceLike,
    nrmse,
    peak_error,
    pearson,
    qq_against_normal,
    qq_slope,
    residual_histogram,
    residuals,
)
from .report import NRMSE_NORMALIZER, NoiseReport, ValidationReport, build_report, thin_qq_points
