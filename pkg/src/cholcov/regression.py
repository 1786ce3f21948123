"""Regression-based factor estimators.

Both estimators build the unit-diagonal factor row by row: variable i is
regressed on the residuals of the variables before it, the fitted residual
becomes the next regressor, and the residual second moments form the
diagonal. The banded variant restricts each row's regressors to the k
nearest predecessors and solves by least squares; the lasso variant uses
all predecessors with an l1-penalized fit solved by cyclic coordinate
descent over the residual Gram matrix.

Data is taken as already zero-mean (standardize or center upstream);
no intercepts are fitted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandTooLarge, ConvergenceFailure, SingularDesign
from .linalg import DataSample, LowerTriangularFactor, sample_covariance
from .losses import nll_value

# Residual columns whose mean square falls at or below this floor are
# treated as fully explained: they are dropped from later designs and their
# diagonal entry is clamped here, keeping the factor invertible.
RESIDUAL_FLOOR = 1e-12


@dataclass(frozen=True)
class BandConfig:
    """Band parameter for the least-squares estimator."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("band k must be >= 0")


@dataclass(frozen=True)
class LassoConfig:
    """Penalty and coordinate-descent controls for the lasso estimator."""

    penalty: float
    tol: float = 1e-8
    max_sweeps: int = 1000

    def __post_init__(self):
        if self.penalty < 0.0:
            raise ValueError("penalty must be >= 0")
        if self.tol <= 0.0:
            raise ValueError("tol must be > 0")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")


def _values(data) -> np.ndarray:
    if isinstance(data, DataSample):
        return data.values
    return np.asarray(data, dtype=float)


def _assemble_factor(unit_lower: np.ndarray, diag: np.ndarray) -> LowerTriangularFactor:
    t = unit_lower * np.sqrt(diag)[np.newaxis, :]
    return LowerTriangularFactor(np.tril(t))


def fit_banded(data, config: BandConfig | int) -> LowerTriangularFactor:
    """k-banded recursive least-squares estimate of the covariance factor.

    Row i is regressed on the residuals of the k variables immediately
    before it; entries further than k below the diagonal are structural
    zeros. Requires k < min(N - 1, p).
    """
    k = config.k if isinstance(config, BandConfig) else int(config)
    if k < 0:
        raise ValueError("band k must be >= 0")
    x = _values(data)
    n, p = x.shape
    if k >= min(n - 1, p):
        raise BandTooLarge(f"k={k} must be smaller than min(N-1, p)={min(n - 1, p)}")

    resid = np.empty_like(x)
    unit_lower = np.eye(p)
    diag = np.empty(p)
    alive = []  # indices of residual columns usable as regressors
    for i in range(p):
        start = max(0, i - k)
        cols = [j for j in alive if j >= start]
        if cols:
            design = resid[:, cols]
            coefs, _, rank, _ = np.linalg.lstsq(design, x[:, i], rcond=None)
            if rank < len(cols):
                raise SingularDesign(f"rank-deficient residual design at row {i}")
            unit_lower[i, cols] = coefs
            resid[:, i] = x[:, i] - design @ coefs
        else:
            resid[:, i] = x[:, i]
        ms = float(resid[:, i] @ resid[:, i]) / n
        if ms > RESIDUAL_FLOOR:
            alive.append(i)
            diag[i] = ms
        else:
            diag[i] = RESIDUAL_FLOOR
    return _assemble_factor(unit_lower, diag)


def _coordinate_descent(gram, cross, penalty, tol, max_sweeps) -> np.ndarray:
    """Minimize ||x - E l||^2 + penalty ||l||_1 given gram = E^t E and
    cross = E^t x. Convergence: largest coefficient change in a sweep
    below tol."""
    m = cross.shape[0]
    coefs = np.zeros(m)
    resid_corr = cross.copy()  # E^t (x - E l)
    half = penalty / 2.0
    for _ in range(max_sweeps):
        biggest = 0.0
        for j in range(m):
            old = coefs[j]
            rho = resid_corr[j] + gram[j, j] * old
            new = np.sign(rho) * max(abs(rho) - half, 0.0) / gram[j, j]
            if new != old:
                resid_corr -= gram[:, j] * (new - old)
                coefs[j] = new
                biggest = max(biggest, abs(new - old))
        if biggest < tol:
            return coefs
    raise ConvergenceFailure(
        f"coordinate descent did not converge in {max_sweeps} sweeps"
    )


def lasso_kkt_residual(design, target, coefs, penalty: float) -> float:
    """Largest violation of the subgradient conditions of
    min ||target - design @ coefs||^2 + penalty ||coefs||_1:
    active coordinates need gradient + penalty * sign = 0, inactive ones
    need |gradient| <= penalty."""
    grad = -2.0 * design.T @ (target - design @ coefs)
    active = coefs != 0.0
    worst = 0.0
    if active.any():
        worst = float(np.abs(grad[active] + penalty * np.sign(coefs[active])).max())
    if (~active).any():
        slack = float(np.abs(grad[~active]).max()) - penalty
        worst = max(worst, slack)
    return worst


def fit_lasso(data, config: LassoConfig) -> LowerTriangularFactor:
    """Recursive lasso estimate of the covariance factor: each variable is
    l1-regressed on all previous residuals."""
    x = _values(data)
    n, p = x.shape
    if n < 2:
        raise ValueError("lasso estimator needs at least 2 observations")

    resid = np.empty_like(x)
    gram = np.zeros((p, p))  # inner products of residual columns
    unit_lower = np.eye(p)
    diag = np.empty(p)
    alive: list[int] = []
    for i in range(p):
        if alive:
            design_gram = gram[np.ix_(alive, alive)]
            cross = resid[:, alive].T @ x[:, i]
            coefs = _coordinate_descent(
                design_gram, cross, config.penalty, config.tol, config.max_sweeps
            )
            unit_lower[i, alive] = coefs
            resid[:, i] = x[:, i] - resid[:, alive] @ coefs
        else:
            resid[:, i] = x[:, i]
        gram[:i, i] = gram[i, :i] = resid[:, :i].T @ resid[:, i]
        gram[i, i] = resid[:, i] @ resid[:, i]
        ms = gram[i, i] / n
        if ms > RESIDUAL_FLOOR:
            alive.append(i)
            diag[i] = ms
        else:
            diag[i] = RESIDUAL_FLOOR
    return _assemble_factor(unit_lower, diag)


def _fold_indices(n: int, folds: int) -> list[np.ndarray]:
    return [chunk for chunk in np.array_split(np.arange(n), folds)]


def _holdout_nll(fit, train, test) -> float:
    factor = fit(train)
    return nll_value(factor, sample_covariance(test, center=False))


def select_band_k(data, folds: int, k_grid=None) -> int:
    """Band parameter minimizing mean held-out negative log-likelihood over
    contiguous cross-validation folds; ties go to the smaller k."""
    if folds < 2:
        raise ValueError("folds must be >= 2")
    x = _values(data)
    n, p = x.shape
    if n < folds:
        raise ValueError("need at least one observation per fold")
    parts = _fold_indices(n, folds)
    min_train = n - max(len(part) for part in parts)
    k_cap = min(min_train - 1, p)
    if k_grid is None:
        k_grid = range(k_cap)
    else:
        k_grid = [k for k in k_grid if k < k_cap]
    scores = []
    for k in k_grid:
        total = 0.0
        for held in parts:
            mask = np.ones(n, dtype=bool)
            mask[held] = False
            total += _holdout_nll(lambda tr: fit_banded(tr, k), x[mask], x[held])
        scores.append(total / folds)
    return int(list(k_grid)[int(np.argmin(scores))])


def lasso_penalty_grid(data, *, num: int = 20, span: float = 1e-4) -> np.ndarray:
    """Logarithmic penalty grid ending at the smallest level that zeroes
    every coefficient of the first regression (2 max |X^t x_i| over column
    pairs, an upper proxy for the recursive designs)."""
    x = _values(data)
    prods = np.abs(x.T @ x)
    strict = prods[np.tril_indices_from(prods, k=-1)]
    top = 2.0 * float(strict.max()) if strict.size and strict.max() > 0 else 1.0
    return np.logspace(np.log10(top * span), np.log10(top), num)


def select_lasso_penalty(data, folds: int, grid=None) -> float:
    """Lasso penalty minimizing mean held-out negative log-likelihood over
    contiguous cross-validation folds; ties go to the smaller penalty."""
    if folds < 2:
        raise ValueError("folds must be >= 2")
    x = _values(data)
    n = x.shape[0]
    if n < folds:
        raise ValueError("need at least one observation per fold")
    if grid is None:
        grid = lasso_penalty_grid(x)
    parts = _fold_indices(n, folds)
    scores = []
    for lam in grid:
        cfg = LassoConfig(penalty=float(lam))
        total = 0.0
        for held in parts:
            mask = np.ones(n, dtype=bool)
            mask[held] = False
            total += _holdout_nll(lambda tr: fit_lasso(tr, cfg), x[mask], x[held])
        scores.append(total / folds)
    return float(np.asarray(grid)[int(np.argmin(scores))])
