"""Sparse per-response screening of a wide predictor table.

LASSO / elastic-net fits by coordinate descent, K-fold penalty selection,
selection-count aggregation and a counts-vs-local-factor regression.
"""

__version__ = "0.1.0"

from .dataset import (  # noqa: E402
    AlignedDataset,
    DataError,
    PredictorTable,
    ResponseMetadata,
    ResponseTable,
    StandardizedDesign,
    align,
    load_metadata,
    load_table,
    standardize,
)
from .solver import (  # noqa: E402
    Coefficients,
    ConvergenceConfig,
    PathResult,
    PenaltySpec,
    check_kkt,
    fit,
    fit_path,
    lambda_max,
    soft_threshold,
)
from .model_selection import CvConfig, CvCurve, assign_folds, cross_validate, select_lambda  # noqa: E402
from .screening import (  # noqa: E402
    ResponseResult,
    ScreeningReport,
    aggregate_predictor_counts,
    count_nonzero,
    screen_all,
)
from .analysis import CountFactorPairs, RegressionSummary, extract_pairs, regress_counts_on_factor  # noqa: E402
