"""Regression readings of the two Cholesky factorizations of a covariance
matrix, and numerical oracles for the identities connecting them.

For a positive definite covariance S, the unit-diagonal lower factor L of
S = L D L^t stores in entry (i, j) the coefficient of variable j in the
least-squares regression of variable i on the leading block {0..j}. The
unit-diagonal upper factor U of the precision matrix stores, per column,
the coefficients of the full recursive regressions on all predecessors.
The two verifiers below evaluate both sides of these identities from
independent computations and report the worst deviation.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite
from .linalg import cholesky_decompose, _as_square


def regression_coefficients(sigma, i: int, prefix_len: int) -> np.ndarray:
    """Coefficients of the regression of variable ``i`` on the leading
    variables {0, ..., prefix_len - 1}, computed from the covariance alone
    as Sigma_JJ^{-1} Sigma_Ji.

    ``prefix_len`` may be 0 (empty regression, empty coefficient vector);
    ``i`` must not belong to the prefix.
    """
    s = _as_square(sigma)
    p = s.shape[0]
    if not 0 <= i < p:
        raise DimensionMismatch(f"variable index {i} out of range for p={p}")
    if prefix_len > i:
        raise ValueError("prefix must not contain the regressed variable")
    if prefix_len == 0:
        return np.empty(0)
    block = s[:prefix_len, :prefix_len]
    try:
        chol = np.linalg.cholesky(block)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("leading covariance block is not PD") from None
    rhs = s[:prefix_len, i]
    half = np.linalg.solve(chol, rhs)
    return np.linalg.solve(chol.T, half)


def verify_proposition1(sigma) -> float:
    """Worst absolute gap between the unit-diagonal Cholesky factor entries
    l_ij and the independently computed regression coefficients of variable
    i on the leading block {0..j}."""
    s = _as_square(sigma)
    p = s.shape[0]
    lower = cholesky_decompose(s).unit_lower()
    worst = 0.0
    for i in range(1, p):
        for j in range(i):
            beta = regression_coefficients(s, i, j + 1)
            worst = max(worst, abs(lower[i, j] - beta[j]))
    return worst


def u_from_sigma(sigma) -> tuple[np.ndarray, np.ndarray]:
    """Unit-diagonal upper factor U and error variances d of the precision
    factorization Sigma^{-1} = U diag(1/d) U^t, built column by column from
    the recursive regressions of each variable on all its predecessors.

    Entry (j, i) of U for j < i is minus the coefficient of variable j in
    the regression of variable i on {0..i-1}; d[i] is that regression's
    residual variance.
    """
    s = _as_square(sigma)
    p = s.shape[0]
    u = np.eye(p)
    d = np.empty(p)
    d[0] = s[0, 0]
    for i in range(1, p):
        beta = regression_coefficients(s, i, i)
        u[:i, i] = -beta
        d[i] = s[i, i] - s[i, :i] @ beta
    if np.any(d <= 0.0):
        raise NotPositiveDefinite("nonpositive residual variance")
    return u, d


def verify_appendix_a(sigma) -> float:
    """Worst absolute deviation in the coefficient-update identity relating
    the short regression of i on {0..j} to the full regression of i on
    {0..i-1}:

        beta_{ij|0..j} = beta_{ij|0..i-1}
                         + sum_{k=j+1}^{i-1} beta_{ik|0..i-1} beta_{kj|0..j}

    Both sides are evaluated from covariance-block solves only.
    """
    s = _as_square(sigma)
    p = s.shape[0]
    short_tbl = np.zeros((p, p))
    for i in range(1, p):
        for j in range(i):
            short_tbl[i, j] = regression_coefficients(s, i, j + 1)[j]
    worst = 0.0
    for i in range(1, p):
        full = regression_coefficients(s, i, i)
        for j in range(i):
            rhs = full[j]
            for k in range(j + 1, i):
                rhs += full[k] * short_tbl[k, j]
            worst = max(worst, abs(short_tbl[i, j] - rhs))
    return worst
