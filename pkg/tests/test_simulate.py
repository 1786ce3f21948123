import numpy as np
import pytest

from cholcov import (
    ScenarioSpec,
    cholesky_decompose,
    fixed_sigma,
    random_sparse_cholesky,
    sample_covariance,
    sample_gaussian,
)
from cholcov.simulate import truth_factor


class TestFixedSigma:
    def test_ar1_p3(self):
        expected = np.array(
            [[1.0, 0.7, 0.49], [0.7, 1.0, 0.7], [0.49, 0.7, 1.0]]
        )
        assert np.allclose(fixed_sigma("ar1", 3), expected)

    def test_banded4_first_row(self):
        row = fixed_sigma("banded4", 6)[0]
        assert np.allclose(row, [1.0, 0.4, 0.2, 0.2, 0.1, 0.0])

    def test_dense05_p2(self):
        assert np.allclose(fixed_sigma("dense05", 2), [[1.0, 0.5], [0.5, 1.0]])

    @pytest.mark.parametrize("kind", ["ar1", "banded4", "dense05"])
    @pytest.mark.parametrize("p", [2, 5, 30, 100])
    def test_positive_definite(self, kind, p):
        cholesky_decompose(fixed_sigma(kind, p))  # raises if not PD

    def test_symmetric(self):
        s = fixed_sigma("banded4", 12)
        assert np.array_equal(s, s.T)


class TestRandomSparseCholesky:
    def test_density_calibration(self):
        rng = np.random.default_rng(5)
        p, target = 30, 0.25
        total = p * (p - 1) // 2
        rates = []
        for _ in range(200):
            t = random_sparse_cholesky(p, target, rng).values
            rates.append(np.count_nonzero(t[np.tril_indices(p, -1)]) / total)
        assert abs(np.mean(rates) - target) <= 0.05

    def test_minimal_density_expectation(self):
        rng = np.random.default_rng(6)
        p = 30
        nonzeros = [
            np.count_nonzero(
                random_sparse_cholesky(p, 1 / p, rng).values[np.tril_indices(p, -1)]
            )
            for _ in range(300)
        ]
        # expected nonzeros = density * p(p-1)/2 = (p-1)/2 per factor
        assert np.mean(nonzeros) == pytest.approx((p - 1) / 2, rel=0.15)

    def test_deterministic_under_seed(self):
        a = random_sparse_cholesky(12, 0.3, np.random.default_rng(9)).values
        b = random_sparse_cholesky(12, 0.3, np.random.default_rng(9)).values
        assert np.array_equal(a, b)

    def test_nonzeros_bounded_away_from_zero(self):
        rng = np.random.default_rng(11)
        t = random_sparse_cholesky(20, 0.5, rng).values
        lower = t[np.tril_indices(20, -1)]
        assert np.all((lower == 0.0) | (np.abs(lower) >= 0.1))
        assert np.all(np.diag(t) >= 0.5)

    def test_product_is_pd(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            t = random_sparse_cholesky(10, 0.3, rng)
            cholesky_decompose(t.reconstruct())


class TestSampleGaussian:
    def test_identity_covariance_recovery(self):
        rng = np.random.default_rng(17)
        from cholcov import LowerTriangularFactor

        data = sample_gaussian(LowerTriangularFactor(np.eye(4)), 20_000, rng)
        assert np.abs(sample_covariance(data) - np.eye(4)).max() <= 0.05

    def test_single_row(self):
        rng = np.random.default_rng(19)
        t = random_sparse_cholesky(5, 0.4, rng)
        data = sample_gaussian(t, 1, rng)
        assert data.values.shape == (1, 5)
        assert np.isfinite(data.values).all()

    def test_reproducible(self):
        t = random_sparse_cholesky(6, 0.3, np.random.default_rng(23))
        a = sample_gaussian(t, 50, np.random.default_rng(29)).values
        b = sample_gaussian(t, 50, np.random.default_rng(29)).values
        assert np.array_equal(a, b)

    def test_covariance_convergence(self):
        rng = np.random.default_rng(31)
        t = random_sparse_cholesky(8, 0.4, rng)
        data = sample_gaussian(t, 50_000, rng)
        assert np.abs(sample_covariance(data) - t.reconstruct()).max() <= 0.06


class TestScenarioSpec:
    def test_round_trip(self):
        spec = ScenarioSpec("random_sparse", p=30, n=200, density_num=2, seed=7)
        assert ScenarioSpec.from_dict(spec.to_dict()) == spec

    def test_density(self):
        spec = ScenarioSpec("random_sparse", p=20, n=100, density_num=2)
        assert spec.density == 0.1

    def test_validation(self):
        with pytest.raises(ValueError):
            ScenarioSpec("nope", p=10, n=100)
        with pytest.raises(ValueError):
            ScenarioSpec("ar1", p=1, n=100)
        with pytest.raises(ValueError):
            ScenarioSpec("random_sparse", p=10, n=100, density_num=0)

    def test_truth_factor_fixed_vs_random(self):
        rng = np.random.default_rng(37)
        fixed = truth_factor(ScenarioSpec("ar1", p=6, n=50), rng)
        assert np.allclose(fixed.reconstruct(), fixed_sigma("ar1", 6))
        rand = truth_factor(
            ScenarioSpec("random_sparse", p=6, n=50, density_num=2), rng
        )
        assert rand.p == 6
