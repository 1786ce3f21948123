"""Differentiable matrix losses over the factor parametrization S(T) = T T^t.

Two losses are supported: the zero-mean negative Gaussian log-likelihood

    nll(T) = ln det(T T^t) + tr((T T^t)^{-1} S_hat)

and the squared Frobenius distance

    fr(T) = || T T^t - S_hat ||_F^2.

Gradients with respect to T reduce to 2 * grad_Sigma * T, with the dense
result restricted to the lower triangle because T is constrained lower
triangular. Evaluation uses the factor's log-diagonal and triangular
substitution throughout; the full covariance is never inverted densely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs

from .errors import DimensionMismatch, NotSymmetric
from .linalg import SYMMETRY_TOL, LowerTriangularFactor, _as_square

_dtrtri = get_lapack_funcs("trtri", dtype=np.float64)

NLL = "nll"
FR = "fr"


def _tri_inv(t: np.ndarray) -> np.ndarray:
    """Inverse of a lower-triangular matrix by back substitution."""
    inv, info = _dtrtri(t, lower=1)
    if info != 0:
        raise np.linalg.LinAlgError(f"triangular inverse failed (info={info})")
    return inv


def _factor_values(t) -> np.ndarray:
    if isinstance(t, LowerTriangularFactor):
        return t.values
    arr = _as_square(t)
    if np.any(np.diag(arr) <= 0.0):
        raise ValueError("factor diagonal must be strictly positive")
    return np.tril(arr)


@dataclass(frozen=True)
class LossKind:
    """A loss tag bundled with its reference matrix (sample covariance or
    correlation)."""

    tag: str
    reference: np.ndarray

    def __post_init__(self):
        if self.tag not in (NLL, FR):
            raise ValueError(f"unknown loss tag {self.tag!r}")
        ref = np.array(self.reference, dtype=float)
        ref = _as_square(ref)
        scale = max(1.0, float(np.abs(ref).max()))
        if float(np.abs(ref - ref.T).max()) > SYMMETRY_TOL * scale:
            raise NotSymmetric("loss reference matrix must be symmetric")
        ref.flags.writeable = False
        object.__setattr__(self, "reference", ref)

    @classmethod
    def nll(cls, sigma_hat) -> "LossKind":
        return cls(NLL, np.asarray(sigma_hat, dtype=float))

    @classmethod
    def fr(cls, sigma_hat) -> "LossKind":
        return cls(FR, np.asarray(sigma_hat, dtype=float))

    @property
    def p(self) -> int:
        return self.reference.shape[0]

    def value(self, t) -> float:
        if self.tag == NLL:
            return nll_value(t, self.reference)
        return fr_value(t, self.reference)

    def gradient(self, t) -> np.ndarray:
        return grad_t(self, t)


def _check_dims(tv: np.ndarray, sigma_hat: np.ndarray):
    if tv.shape != sigma_hat.shape:
        raise DimensionMismatch(
            f"factor dim {tv.shape[0]} vs reference dim {sigma_hat.shape[0]}"
        )


def nll_value(t, sigma_hat) -> float:
    """Negative Gaussian log-likelihood ln det(TT^t) + tr((TT^t)^{-1} S_hat).

    The log-determinant comes from the factor diagonal and the trace term
    from triangular substitution, so only T itself is ever inverted.
    """
    tv = _factor_values(t)
    sh = _as_square(sigma_hat)
    _check_dims(tv, sh)
    tinv = _tri_inv(tv)
    logdet = 2.0 * float(np.log(np.diag(tv)).sum())
    # tr(T^{-t} T^{-1} S) = sum_ij (T^{-1} S)_ij (T^{-1})_ij
    trace = float(((tinv @ sh) * tinv).sum())
    return logdet + trace


def fr_value(t, sigma_hat) -> float:
    """Squared Frobenius distance || T T^t - S_hat ||_F^2."""
    tv = _factor_values(t)
    sh = _as_square(sigma_hat)
    _check_dims(tv, sh)
    diff = tv @ tv.T - sh
    return float((diff * diff).sum())


def grad_t(kind: LossKind, t) -> np.ndarray:
    """Gradient of the loss with respect to the factor entries, restricted
    to the lower triangle (the strictly upper part is structurally fixed
    at zero and therefore discarded).

    Both branches come from the chain rule grad_T = 2 * grad_Sigma * T:
    for the likelihood loss grad_Sigma is S^{-1} - S^{-1} S_hat S^{-1},
    giving 2 T^{-t}(I - T^{-1} S_hat T^{-t}); for the Frobenius loss
    grad_Sigma is 2 (S - S_hat), giving 4 (T T^t - S_hat) T.
    """
    tv = _factor_values(t)
    sh = kind.reference
    _check_dims(tv, sh)
    if kind.tag == FR:
        dense = 4.0 * ((tv @ tv.T - sh) @ tv)
    else:
        tinv = _tri_inv(tv)
        inner = tinv @ sh @ tinv.T
        np.fill_diagonal(inner, np.diag(inner) - 1.0)
        dense = -2.0 * (tinv.T @ inner)
    return np.tril(dense)
