"""Generators for the simulation studies: fixed covariance targets, random
sparse factors, and Gaussian sampling through the factor."""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .errors import NotPositiveDefinite
from .linalg import DataSample, LowerTriangularFactor, cholesky_decompose

AR1 = "ar1"
BANDED4 = "banded4"
DENSE05 = "dense05"
RANDOM_SPARSE = "random_sparse"

FIXED_KINDS = (AR1, BANDED4, DENSE05)


@dataclass(frozen=True)
class ScenarioSpec:
    """One simulation cell: a truth generator plus sampling parameters.

    ``density_num`` only applies to the random-sparse kind, where the
    expected proportion of nonzero strictly-lower entries is
    density_num / p.
    """

    kind: str
    p: int
    n: int
    density_num: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in FIXED_KINDS + (RANDOM_SPARSE,):
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.p < 2 or self.n < 2:
            raise ValueError("need p >= 2 and n >= 2")
        if self.kind == RANDOM_SPARSE and self.density_num < 1:
            raise ValueError("random_sparse needs density numerator >= 1")

    @property
    def density(self) -> float:
        return self.density_num / self.p if self.kind == RANDOM_SPARSE else 0.0

    def describe(self) -> str:
        if self.kind == RANDOM_SPARSE:
            return f"{self.kind}:{self.density_num}/p"
        return self.kind

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioSpec":
        return cls(**d)


def fixed_sigma(kind: str, p: int) -> np.ndarray:
    """One of the three fixed covariance targets.

    ar1: entries 0.7^|i-j|. banded4: unit diagonal, 0.4 on the first
    off-diagonal, 0.2 on the second and third, 0.1 on the fourth, zero
    beyond. dense05: unit diagonal, 0.5 everywhere else. Positive
    definiteness is verified, not assumed.
    """
    if p < 2:
        raise ValueError("need p >= 2")
    idx = np.arange(p)
    dist = np.abs(idx[:, None] - idx[None, :])
    if kind == AR1:
        sigma = 0.7 ** dist.astype(float)
    elif kind == BANDED4:
        sigma = (
            0.4 * (dist == 1)
            + 0.2 * ((dist >= 2) & (dist <= 3))
            + 0.1 * (dist == 4)
        ).astype(float)
        np.fill_diagonal(sigma, 1.0)
    elif kind == DENSE05:
        sigma = np.full((p, p), 0.5)
        np.fill_diagonal(sigma, 1.0)
    else:
        raise ValueError(f"unknown fixed covariance kind {kind!r}")
    cholesky_decompose(sigma)  # raises NotPositiveDefinite if the spec fails
    return sigma


def random_sparse_cholesky(
    p: int, density: float, rng: np.random.Generator
) -> LowerTriangularFactor:
    """Random lower-triangular factor whose strictly-lower support is an
    i.i.d. Bernoulli(density) pattern (a random layered acyclic digraph).

    Nonzero strictly-lower magnitudes are uniform on [0.1, 1] with random
    sign, bounded away from zero so the support is unambiguous; the
    diagonal is uniform on [0.5, 1.5]. The product T T^t is positive
    definite by construction.
    """
    if p < 2:
        raise ValueError("need p >= 2")
    if not 0.0 < density <= 1.0:
        raise ValueError("density must lie in (0, 1]")
    t = np.zeros((p, p))
    rows, cols = np.tril_indices(p, k=-1)
    mask = rng.random(rows.shape[0]) < density
    magnitudes = rng.uniform(0.1, 1.0, size=int(mask.sum()))
    signs = rng.choice([-1.0, 1.0], size=int(mask.sum()))
    t[rows[mask], cols[mask]] = signs * magnitudes
    t[np.diag_indices(p)] = rng.uniform(0.5, 1.5, size=p)
    return LowerTriangularFactor(t)


def sample_gaussian(
    t: LowerTriangularFactor, n: int, rng: np.random.Generator
) -> DataSample:
    """Draw n rows from the zero-mean Gaussian with covariance T T^t by
    pushing standard normal vectors through the factor."""
    if n < 1:
        raise ValueError("need n >= 1")
    tv = t.values if isinstance(t, LowerTriangularFactor) else np.asarray(t, float)
    z = rng.standard_normal((n, tv.shape[0]))
    return DataSample(z @ tv.T)


def truth_factor(spec: ScenarioSpec, rng: np.random.Generator) -> LowerTriangularFactor:
    """The true factor for one replicate of a scenario."""
    if spec.kind == RANDOM_SPARSE:
        return random_sparse_cholesky(spec.p, spec.density, rng)
    return cholesky_decompose(fixed_sigma(spec.kind, spec.p))
