"""Dense matrix kernel: Cholesky factorization, triangular solves, sample
moments and norms.

Everything here is a pure function over immutable inputs; the wrapper types
validate their invariants on construction and expose plain ndarrays for the
numerics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    EmptySample,
    NotPositiveDefinite,
    NotSymmetric,
    ZeroVariance,
)

# Symmetry / positive-definiteness checks use this absolute-to-scale tolerance.
SYMMETRY_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting NaN/Inf entries."""
    if isinstance(a, (DenseMatrix, LowerTriangularFactor)):
        return a.values
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D array, got ndim={arr.ndim}")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError("matrix entries must be finite")
    return arr


def _as_square(a) -> np.ndarray:
    arr = as_matrix(a)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class DenseMatrix:
    """General real matrix with finite entries; carrier for covariance
    matrices and gradients."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionMismatch("DenseMatrix requires a nonempty 2-D array")
        if not np.isfinite(arr).all():
            raise ValueError("DenseMatrix entries must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.values, dtype=dtype)


@dataclass(frozen=True)
class LowerTriangularFactor:
    """Lower-triangular factor T with strictly positive diagonal, so that
    T @ T.T is positive definite.

    Strictly upper entries must be exactly zero: the zero pattern of T is
    the object of interest, so no silent masking is done here.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise DimensionMismatch("factor must be square and nonempty")
        if not np.isfinite(arr).all():
            raise ValueError("factor entries must be finite")
        if np.any(arr[np.triu_indices_from(arr, k=1)] != 0.0):
            raise ValueError("strictly upper entries must be exactly zero")
        if np.any(np.diag(arr) <= 0.0):
            raise NotPositiveDefinite("factor diagonal must be strictly positive")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def p(self) -> int:
        return self.values.shape[0]

    def diagonal(self) -> np.ndarray:
        return np.diag(self.values).copy()

    def unit_lower(self) -> np.ndarray:
        """The unit-diagonal factor L with l_ij = t_ij / t_jj."""
        return self.values / np.diag(self.values)[np.newaxis, :]

    def error_variances(self) -> np.ndarray:
        """Diagonal of D in the L D L^t split: squared factor diagonal."""
        return np.diag(self.values) ** 2

    def reconstruct(self) -> np.ndarray:
        """The positive definite product T @ T.T."""
        return self.values @ self.values.T

    def __array__(self, dtype=None, copy=None):
        return np.array(self.values, dtype=dtype)


@dataclass(frozen=True)
class DataSample:
    """N x p observation matrix with optional class labels.

    ``standardized`` records whether columns have been brought to mean 0,
    variance 1 (population convention).
    """

    values: np.ndarray
    labels: np.ndarray | None = None
    standardized: bool = False

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise DimensionMismatch("DataSample requires a 2-D array with p >= 1")
        if arr.size and not np.isfinite(arr).all():
            raise ValueError("observations must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        if self.labels is not None:
            lab = np.asarray(self.labels)
            if lab.shape != (arr.shape[0],):
                raise DimensionMismatch("labels must have one entry per row")
            object.__setattr__(self, "labels", lab)
        if self.standardized and arr.shape[0] > 0:
            if (
                float(np.abs(arr.mean(axis=0)).max()) > 1e-8
                or float(np.abs(arr.var(axis=0) - 1.0).max()) > 1e-8
            ):
                raise ValueError(
                    "standardized flag set but columns are not mean 0, variance 1"
                )

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def subset(self, rows) -> "DataSample":
        labels = self.labels[rows] if self.labels is not None else None
        return DataSample(self.values[rows], labels, self.standardized)


def _as_sample_values(data) -> np.ndarray:
    if isinstance(data, DataSample):
        return data.values
    return as_matrix(data)


def cholesky_decompose(sigma, *, sym_tol: float = SYMMETRY_TOL) -> LowerTriangularFactor:
    """Lower Cholesky factor T of a symmetric positive definite matrix.

    Raises NotSymmetric if max |sigma - sigma.T| exceeds ``sym_tol`` relative
    to the largest entry magnitude, and NotPositiveDefinite if factorization
    hits a nonpositive pivot.
    """
    a = _as_square(sigma)
    scale = max(1.0, float(np.abs(a).max())) if a.size else 1.0
    if float(np.abs(a - a.T).max()) > sym_tol * scale:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    try:
        t = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    return LowerTriangularFactor(t)


def triangular_solve(t, b) -> np.ndarray:
    """Solve T y = b by forward substitution; b may be a vector or a matrix
    of stacked right-hand sides."""
    tv = t.values if isinstance(t, LowerTriangularFactor) else _as_square(t)
    rhs = np.asarray(b, dtype=float)
    if rhs.shape[0] != tv.shape[0]:
        raise DimensionMismatch(
            f"right-hand side has length {rhs.shape[0]}, factor has dim {tv.shape[0]}"
        )
    return scipy.linalg.solve_triangular(tv, rhs, lower=True)


def sample_covariance(data, *, center: bool = True) -> np.ndarray:
    """Sample covariance with the 1/N divisor.

    With ``center=False`` the columns are taken as already zero-mean and the
    plain second-moment matrix (1/N) X^t X is returned, which is the maximum
    likelihood estimate under a zero-mean Gaussian.
    """
    x = _as_sample_values(data)
    n = x.shape[0]
    if n == 0:
        raise EmptySample("sample covariance of zero observations")
    if center:
        x = x - x.mean(axis=0)
    cov = x.T @ x / n
    return (cov + cov.T) / 2.0


def sample_correlation(data) -> np.ndarray:
    """Sample correlation matrix (unit diagonal), 1/N convention."""
    cov = sample_covariance(data, center=True)
    sd = np.sqrt(np.diag(cov))
    bad = np.flatnonzero(sd == 0.0)
    if bad.size:
        raise ZeroVariance(int(bad[0]))
    corr = cov / np.outer(sd, sd)
    np.fill_diagonal(corr, 1.0)
    return corr


def standardize(data: DataSample) -> DataSample:
    """Bring every column to mean 0, variance 1 (population convention).

    The covariance of the result equals the correlation of the input.
    """
    x = data.values if isinstance(data, DataSample) else _as_sample_values(data)
    mean = x.mean(axis=0)
    sd = x.std(axis=0)
    bad = np.flatnonzero(sd == 0.0)
    if bad.size:
        raise ZeroVariance(int(bad[0]))
    labels = data.labels if isinstance(data, DataSample) else None
    return DataSample((x - mean) / sd, labels, standardized=True)


def standardizer(train_values: np.ndarray):
    """Column mean/sd fitted on training rows, applicable to held-out rows.

    Returns (apply, mean, sd) where ``apply`` maps rows into the training
    folds' standardized coordinates.
    """
    mean = train_values.mean(axis=0)
    sd = train_values.std(axis=0)
    bad = np.flatnonzero(sd == 0.0)
    if bad.size:
        raise ZeroVariance(int(bad[0]))

    def apply(rows: np.ndarray) -> np.ndarray:
        return (rows - mean) / sd

    return apply, mean, sd


def induced_one_norm_diff(a, b) -> float:
    """Induced matrix 1-norm of a - b: the maximum absolute column sum."""
    av, bv = as_matrix(a), as_matrix(b)
    if av.shape != bv.shape:
        raise DimensionMismatch(f"shapes differ: {av.shape} vs {bv.shape}")
    return float(np.abs(av - bv).sum(axis=0).max())
