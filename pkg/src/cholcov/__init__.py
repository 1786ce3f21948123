"""Sparse Cholesky covariance factor estimation.

Estimates lower-triangular factors T with Sigma = T T^t under sparsity,
via l1-penalized matrix-loss proximal gradient descent and via banded /
lasso recursive regressions, plus the simulation and QDA classification
harnesses used to compare them.
"""

__version__ = "0.1.0"

from .errors import (
    BandTooLarge,
    CholcovError,
    ClassMissingInSplit,
    ConvergenceFailure,
    DimensionMismatch,
    EmptySample,
    LabelMismatch,
    LineSearchStall,
    NotPositiveDefinite,
    NotSymmetric,
    ParseError,
    RaggedRows,
    SingularDesign,
    UndefinedMetric,
    ZeroVariance,
)
from .linalg import (
    DataSample,
    DenseMatrix,
    LowerTriangularFactor,
    cholesky_decompose,
    induced_one_norm_diff,
    sample_correlation,
    sample_covariance,
    standardize,
    triangular_solve,
)
from .losses import LossKind, fr_value, grad_t, nll_value
from .metrics import (
    ClassificationReport,
    SupportComparison,
    classification_metrics,
    support_metrics,
)
from .methods import METHODS, fit_method, fit_with_selection, select_hyper
from .prox import SolverConfig, SolverTrace, prox_solve, soft_threshold
from .qda import (
    ClassModel,
    classify,
    evaluate_loocv,
    evaluate_split,
    fit_qda,
    log_joint,
)
from .regression import (
    BandConfig,
    LassoConfig,
    fit_banded,
    fit_lasso,
    select_band_k,
)
from .relations import (
    regression_coefficients,
    u_from_sigma,
    verify_appendix_a,
    verify_proposition1,
)
from .simulate import (
    ScenarioSpec,
    fixed_sigma,
    random_sparse_cholesky,
    sample_gaussian,
)

__all__ = [name for name in dir() if not name.startswith("_")]
