import numpy as np
import pytest

from cholcov import LossKind, SolverConfig, cholesky_decompose, prox_solve, soft_threshold
from cholcov.prox import default_init, penalty_grid, select_penalty
from cholcov.simulate import random_sparse_cholesky, sample_gaussian
from cholcov.linalg import sample_covariance
from conftest import random_pd


class TestSoftThreshold:
    def test_shrinks(self):
        assert soft_threshold(0.5, 0.2) == pytest.approx(0.3)

    def test_kills_small(self):
        assert soft_threshold(-0.1, 0.2) == 0.0

    def test_zero_level_is_identity(self, rng):
        x = rng.standard_normal(50)
        assert np.array_equal(soft_threshold(x, 0.0), x)

    def test_negative_level_rejected(self):
        with pytest.raises(ValueError):
            soft_threshold(1.0, -0.1)

    def test_odd_in_x(self, rng):
        x = rng.standard_normal(20)
        assert np.allclose(soft_threshold(-x, 0.3), -soft_threshold(x, 0.3))


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(max_iters=0)
        with pytest.raises(ValueError):
            SolverConfig(backtrack=1.0)
        with pytest.raises(ValueError):
            SolverConfig(penalty=-1.0)
        with pytest.raises(ValueError):
            SolverConfig(tol=2.0)


def _sample_cov(rng, p, n):
    truth = random_sparse_cholesky(p, 0.3, rng)
    data = sample_gaussian(truth, n, rng)
    return sample_covariance(data, center=False)


class TestProxSolve:
    def test_unpenalized_fr_matches_cholesky(self, rng):
        s = _sample_cov(rng, 10, 1000)
        kind = LossKind.fr(s)
        config = SolverConfig(penalty=0.0, tol=1e-12, max_iters=5000)
        t, trace = prox_solve(kind, np.eye(10), config)
        assert np.linalg.norm(t.values @ t.values.T - s) <= 1e-4
        assert trace.termination == "converged"

    def test_huge_penalty_gives_diagonal(self, rng):
        s = _sample_cov(rng, 8, 400)
        lam = 10.0 * float(np.abs(s).max())
        t, _ = prox_solve(LossKind.fr(s), default_init(s), SolverConfig(penalty=lam))
        assert np.array_equal(t.values[np.tril_indices(8, k=-1)], np.zeros(28))

    def test_objective_nonincreasing(self, rng):
        s = _sample_cov(rng, 8, 300)
        for tag in ("nll", "fr"):
            _, trace = prox_solve(
                LossKind(tag, s), np.eye(8), SolverConfig(penalty=0.05)
            )
            diffs = np.diff(trace.objectives)
            assert np.all(diffs <= 0.0)

    def test_fixed_point_terminates_fast(self, rng):
        s = random_pd(rng, 6)
        kind = LossKind.fr(s)
        init = cholesky_decompose(s)
        _, trace = prox_solve(kind, init, SolverConfig(penalty=0.0))
        assert trace.termination == "converged"
        assert trace.n_iters <= 2

    def test_output_invariants(self, rng):
        s = _sample_cov(rng, 7, 200)
        floor = 1e-4
        t, _ = prox_solve(
            LossKind.nll(s),
            default_init(s),
            SolverConfig(penalty=0.3, diag_floor=floor),
        )
        assert np.all(np.diag(t.values) >= floor)
        assert np.array_equal(np.triu(t.values, k=1), np.zeros((7, 7)))

    def test_accepted_steps_satisfy_both_conditions(self, rng):
        # Re-verify the recorded trajectory: every accepted objective drops
        # and reported decreases are consistent with the objective sequence.
        s = _sample_cov(rng, 6, 200)
        _, trace = prox_solve(LossKind.fr(s), np.eye(6), SolverConfig(penalty=0.1))
        objs = np.asarray(trace.objectives)
        decs = np.asarray(trace.decreases)
        assert np.allclose(objs[:-1] - objs[1:], decs[1:], atol=1e-12)
        assert np.all(decs >= 0.0)

    def test_support_shrinks_with_penalty(self, rng):
        s = _sample_cov(rng, 10, 300)
        kind = LossKind.fr(s)
        grid = penalty_grid(s, num=12)
        counts = []
        for lam in grid:
            t, _ = prox_solve(kind, default_init(s), SolverConfig(penalty=float(lam)))
            counts.append(int(np.sum(t.values[np.tril_indices(10, -1)] != 0.0)))
        pairs = list(zip(counts, counts[1:]))
        bad = sum(1 for a, b in pairs if b > a)
        assert bad <= 0.1 * len(pairs)


class TestSelectPenalty:
    def test_returns_grid_member(self, rng):
        truth = random_sparse_cholesky(8, 0.25, rng)
        data = sample_gaussian(truth, 150, rng)
        grid = penalty_grid(sample_covariance(data.values, center=False), num=6)
        lam = select_penalty("fr", data.values, folds=3, grid=grid)
        assert lam in grid

    def test_rejects_single_fold(self, rng):
        with pytest.raises(ValueError):
            select_penalty("fr", rng.standard_normal((20, 4)), folds=1)
