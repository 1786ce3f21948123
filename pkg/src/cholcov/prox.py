"""Proximal gradient descent with backtracking for the l1-penalized matrix
loss min_T loss(T T^t) + penalty * ||T||_1 over lower-triangular factors.

Each outer iteration takes a gradient step from the current factor, soft
thresholds it at step * penalty, clamps the diagonal to a positive floor,
and backtracks the step size until the candidate passes two acceptance
tests: the composite objective must not increase, and the smooth part must
satisfy the quadratic sufficient-decrease bound

    loss' <= loss + <grad, T' - T> + ||T' - T||_F^2 / (2 step).

Termination: the objective decrease of an accepted step falls below the
tolerance, or the iteration budget runs out.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LineSearchStall
from .linalg import LowerTriangularFactor
from .losses import LossKind, _factor_values

# Below this step size the line search is declared stalled; reaching it from
# a non-stationary point signals an inconsistent gradient or pathological
# input rather than slow progress.
_STEP_UNDERFLOW = 1e-16

CONVERGED = "converged"
MAX_ITERS = "max_iters"


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters of the proximal solver."""

    penalty: float = 0.0
    max_iters: int = 500
    tol: float = 1e-6
    backtrack: float = 0.5
    init_step: float = 1.0
    diag_floor: float = 1e-4

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0.0 < self.backtrack < 1.0:
            raise ValueError("backtrack factor must lie in (0, 1)")
        if not 0.0 < self.tol < 1.0:
            raise ValueError("tol must lie in (0, 1)")
        if self.penalty < 0.0:
            raise ValueError("penalty must be >= 0")
        if self.init_step <= 0.0 or self.diag_floor <= 0.0:
            raise ValueError("init_step and diag_floor must be > 0")


@dataclass
class SolverTrace:
    """Per accepted iteration history of the solver."""

    objectives: list[float] = field(default_factory=list)
    losses: list[float] = field(default_factory=list)
    penalties: list[float] = field(default_factory=list)
    steps: list[float] = field(default_factory=list)
    decreases: list[float] = field(default_factory=list)
    termination: str = MAX_ITERS

    @property
    def n_iters(self) -> int:
        return len(self.objectives)

    def record(self, objective, loss, penalty, step, decrease):
        self.objectives.append(float(objective))
        self.losses.append(float(loss))
        self.penalties.append(float(penalty))
        self.steps.append(float(step))
        self.decreases.append(float(decrease))


def soft_threshold(x, level: float):
    """Proximal map of the scaled l1 norm: sign(x) * max(|x| - level, 0)."""
    if level < 0.0:
        raise ValueError("threshold level must be >= 0")
    return np.sign(x) * np.maximum(np.abs(x) - level, 0.0)


def prox_solve(
    kind: LossKind, init, config: SolverConfig = SolverConfig()
) -> tuple[LowerTriangularFactor, SolverTrace]:
    """Minimize loss(T T^t) + penalty * ||T||_1 from the given factor.

    Returns the final factor (lower triangular, diagonal >= diag_floor)
    and the acceptance trace. Raises LineSearchStall if backtracking
    underflows the step without finding an acceptable candidate.
    """
    lam = config.penalty
    t = _factor_values(init).copy()
    np.fill_diagonal(t, np.maximum(np.diag(t), config.diag_floor))

    f = kind.value(t)
    g = lam * float(np.abs(t).sum())
    trace = SolverTrace()

    for _ in range(config.max_iters):
        grad = kind.gradient(t)
        step = config.init_step
        while True:
            cand = t - step * grad
            if lam > 0.0:
                cand = soft_threshold(cand, step * lam)
            cand = np.tril(cand)
            np.fill_diagonal(cand, np.maximum(np.diag(cand), config.diag_floor))
            f_new = kind.value(cand)
            g_new = lam * float(np.abs(cand).sum())
            delta_t = cand - t
            bound = f + float((grad * delta_t).sum()) + float(
                (delta_t * delta_t).sum()
            ) / (2.0 * step)
            if f_new + g_new <= f + g and f_new <= bound:
                break
            step *= config.backtrack
            if step < _STEP_UNDERFLOW:
                raise LineSearchStall(
                    "no acceptable step above the underflow guard"
                )
        decrease = (f + g) - (f_new + g_new)
        t, f, g = cand, f_new, g_new
        trace.record(f + g, f, g, step, decrease)
        if decrease < config.tol:
            trace.termination = CONVERGED
            break
    else:
        trace.termination = MAX_ITERS

    return LowerTriangularFactor(t), trace


def default_init(sigma_hat, *, jitter: float = 1e-3) -> LowerTriangularFactor:
    """Starting factor: the Cholesky factor of the reference, jittered only
    when the reference is singular or indefinite."""
    from .errors import NotPositiveDefinite
    from .linalg import cholesky_decompose

    sh = np.asarray(sigma_hat, dtype=float)
    try:
        return cholesky_decompose(sh)
    except NotPositiveDefinite:
        return cholesky_decompose(sh + jitter * np.eye(sh.shape[0]))


def penalty_grid(sigma_hat, *, num: int = 20, span: float = 1e-3) -> np.ndarray:
    """Logarithmic penalty grid anchored at the largest absolute off-diagonal
    entry of the reference: beyond that scale the thresholding removes
    essentially every off-diagonal coefficient."""
    sh = np.asarray(sigma_hat, dtype=float)
    off = np.abs(sh - np.diag(np.diag(sh)))
    top = float(off.max()) if off.size and off.max() > 0 else 1.0
    return np.logspace(np.log10(top * span), np.log10(top), num)


def select_penalty(
    tag: str,
    data,
    folds: int = 5,
    grid=None,
    *,
    cv_max_iters: int = 200,
) -> float:
    """Penalty minimizing the mean held-out value of the loss being fitted,
    over contiguous cross-validation folds; ties go to the smaller penalty.

    Scoring each loss by itself keeps selection coherent per method: the
    likelihood loss validates with held-out likelihood, the Frobenius loss
    with held-out Frobenius distance. Within each fold the grid is swept
    from its largest penalty down, warm-starting every solve at the
    previous solution.
    """
    from .linalg import DataSample, sample_covariance
    from .losses import LossKind, fr_value, nll_value

    if folds < 2:
        raise ValueError("folds must be >= 2")
    x = data.values if isinstance(data, DataSample) else np.asarray(data, float)
    n = x.shape[0]
    if n < folds:
        raise ValueError("need at least one observation per fold")
    if grid is None:
        grid = penalty_grid(sample_covariance(x, center=False))
    grid = np.sort(np.asarray(grid, dtype=float))
    score_fn = nll_value if tag == "nll" else fr_value
    scores = np.zeros(grid.shape[0])
    parts = np.array_split(np.arange(n), folds)
    for held in parts:
        mask = np.ones(n, dtype=bool)
        mask[held] = False
        ref_train = sample_covariance(x[mask], center=False)
        ref_test = sample_covariance(x[held], center=False)
        loss = LossKind(tag, ref_train)
        warm = default_init(ref_train)
        for gi in range(grid.shape[0] - 1, -1, -1):
            cfg = SolverConfig(penalty=float(grid[gi]), max_iters=cv_max_iters)
            warm, _ = prox_solve(loss, warm, cfg)
            scores[gi] += score_fn(warm, ref_test)
    return float(grid[int(np.argmin(scores))])
