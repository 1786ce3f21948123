"""Registry of the four factor estimators compared in the experiments.

Every method maps zero-mean data to a lower-triangular factor:

  mband   banded recursive least squares (hyperparameter: band k)
  mlasso  recursive lasso over residuals (hyperparameter: penalty)
  mglik   proximal solver on the penalized negative log-likelihood
  mgfrob  proximal solver on the penalized squared Frobenius distance

Hyperparameters are selected by held-out likelihood cross-validation when
not supplied.
"""

from __future__ import annotations

import numpy as np

from .linalg import DataSample, LowerTriangularFactor, sample_covariance
from .losses import LossKind
from .prox import SolverConfig, default_init, prox_solve, select_penalty
from .regression import (
    LassoConfig,
    fit_banded,
    fit_lasso,
    select_band_k,
    select_lasso_penalty,
)

MBAND = "mband"
MLASSO = "mlasso"
MGLIK = "mglik"
MGFROB = "mgfrob"

METHODS = (MBAND, MLASSO, MGLIK, MGFROB)

_ALIASES = {
    "banded": MBAND,
    "lasso": MLASSO,
    "prox_nll": MGLIK,
    "prox_fr": MGFROB,
}

_PROX_TAG = {MGLIK: "nll", MGFROB: "fr"}


def normalize_method(name: str) -> str:
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in METHODS:
        raise ValueError(f"unknown method {name!r}; expected one of {METHODS}")
    return key


def _as_values(data) -> np.ndarray:
    if isinstance(data, DataSample):
        return data.values
    return np.asarray(data, dtype=float)


def fit_method(name: str, data, hyper) -> LowerTriangularFactor:
    """Fit one method on zero-mean data with a fixed hyperparameter."""
    name = normalize_method(name)
    x = _as_values(data)
    if name == MBAND:
        return fit_banded(x, int(hyper))
    if name == MLASSO:
        return fit_lasso(x, LassoConfig(penalty=float(hyper)))
    tag = _PROX_TAG[name]
    ref = sample_covariance(x, center=False)
    loss = LossKind(tag, ref)
    factor, _ = prox_solve(loss, default_init(ref), SolverConfig(penalty=float(hyper)))
    return factor


def select_hyper(name: str, data, folds: int = 5, *, k_grid=None, penalty_grid=None):
    """Cross-validated hyperparameter for one method on zero-mean data."""
    name = normalize_method(name)
    x = _as_values(data)
    if name == MBAND:
        return select_band_k(x, folds, k_grid)
    if name == MLASSO:
        return select_lasso_penalty(x, folds, penalty_grid)
    return select_penalty(_PROX_TAG[name], x, folds, penalty_grid)


def fit_with_selection(
    name: str, data, folds: int = 5, *, k_grid=None, penalty_grid=None
) -> tuple[LowerTriangularFactor, float | int]:
    """Select a hyperparameter by cross-validation, then fit on all rows."""
    hyper = select_hyper(name, data, folds, k_grid=k_grid, penalty_grid=penalty_grid)
    return fit_method(name, data, hyper), hyper
