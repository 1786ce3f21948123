import math

import numpy as np
import pytest

from cholcov import (
    ClassModel,
    DataSample,
    LowerTriangularFactor,
    ZeroVariance,
    classify,
    evaluate_loocv,
    evaluate_split,
    fit_qda,
    log_joint,
)
from cholcov.qda import ClassFitError, stratified_split
from cholcov.simulate import random_sparse_cholesky, sample_gaussian


def two_class_data(rng, n_per_class=60, p=4, sep=4.0):
    a = rng.standard_normal((n_per_class, p)) + sep
    b = rng.standard_normal((n_per_class, p)) - sep
    values = np.vstack([a, b])
    labels = np.array(["pos"] * n_per_class + ["neg"] * n_per_class)
    return DataSample(values, labels)


class TestFitQda:
    def test_single_class_prior_one(self, rng):
        data = DataSample(rng.standard_normal((20, 3)), np.array(["only"] * 20))
        models = fit_qda(data, "mband", {"only": 0})
        assert len(models) == 1
        assert models[0].prior == 1.0

    def test_banded_k0_gives_diagonal_factors(self, rng):
        data = two_class_data(rng)
        models = fit_qda(data, "mband", {"pos": 0, "neg": 0})
        for m in models:
            v = m.factor.values
            assert np.array_equal(v, np.diag(np.diag(v)))

    def test_priors_sum_to_one(self, rng):
        data = two_class_data(rng, n_per_class=30)
        models = fit_qda(data, "mband", {"pos": 1, "neg": 1})
        assert sum(m.prior for m in models) == pytest.approx(1.0, abs=1e-10)

    def test_monte_carlo_covariance_recovery(self):
        rng = np.random.default_rng(41)
        raw = random_sparse_cholesky(4, 0.5, rng).values
        scale = np.sqrt(np.sum(raw * raw, axis=1))  # unit-diagonal product
        truth = LowerTriangularFactor(raw / scale[:, None])
        rows = sample_gaussian(truth, 5000, rng).values + 2.0
        data = DataSample(rows, np.array(["c"] * 5000))
        models = fit_qda(data, "mband", {"c": 3})
        est = models[0].factor.reconstruct()
        assert np.linalg.norm(est - truth.reconstruct()) <= 0.1

    def test_class_error_annotation(self, rng):
        values = np.vstack([rng.standard_normal((5, 3)), np.zeros((1, 3))])
        labels = np.array(["ok"] * 5 + ["tiny"])
        with pytest.raises(ClassFitError) as info:
            fit_qda(DataSample(values, labels), "mband", {"ok": 0, "tiny": 0})
        assert info.value.label == "tiny"


class TestLogJoint:
    def test_identity_model(self):
        model = ClassModel(
            "c", np.zeros(3), LowerTriangularFactor(np.eye(3)), 1.0
        )
        x = np.array([1.0, 2.0, 2.0])
        assert log_joint(model, x) == pytest.approx(-0.5 * 9.0)

    def test_dense_gaussian_oracle(self, rng):
        p = 5
        t = random_sparse_cholesky(p, 0.5, rng)
        mean = rng.standard_normal(p)
        model = ClassModel("c", mean, t, 0.3)
        x = rng.standard_normal(p)
        sigma = t.reconstruct()
        dense = (
            math.log(0.3)
            - 0.5 * math.log(np.linalg.det(sigma))
            - 0.5 * (x - mean) @ np.linalg.inv(sigma) @ (x - mean)
        )
        assert log_joint(model, x) == pytest.approx(dense, abs=1e-9)

    def test_scaling_factor_shifts_by_logdet(self):
        p = 4
        mean = np.zeros(p)
        base = ClassModel("c", mean, LowerTriangularFactor(np.eye(p)), 1.0)
        doubled = ClassModel("c", mean, LowerTriangularFactor(2 * np.eye(p)), 1.0)
        assert log_joint(base, mean) - log_joint(doubled, mean) == pytest.approx(
            p * math.log(2.0)
        )


class TestClassify:
    def test_single_model(self, rng):
        model = ClassModel("only", np.zeros(2), LowerTriangularFactor(np.eye(2)), 1.0)
        assert classify([model], rng.standard_normal(2)) == "only"

    def test_midpoint_tie_prefers_smaller_label(self):
        eye = LowerTriangularFactor(np.eye(2))
        models = [
            ClassModel("b", np.array([1.0, 0.0]), eye, 0.5),
            ClassModel("a", np.array([-1.0, 0.0]), eye, 0.5),
        ]
        assert classify(models, np.zeros(2)) == "a"

    def test_additive_constant_invariance(self, rng):
        # equal priors vs equal rescaled priors shift all scores equally
        eye = LowerTriangularFactor(np.eye(3))
        m1 = [
            ClassModel("a", np.zeros(3), eye, 0.5),
            ClassModel("b", np.ones(3), eye, 0.5),
        ]
        m2 = [
            ClassModel("a", np.zeros(3), eye, 0.25),
            ClassModel("b", np.ones(3), eye, 0.25),
        ]
        for _ in range(10):
            x = rng.standard_normal(3)
            assert classify(m1, x) == classify(m2, x)

    def test_bayes_consistency_on_separable_data(self):
        rng = np.random.default_rng(43)
        train = two_class_data(rng, n_per_class=200, sep=3.0)
        models = fit_qda(train, "mband", {"pos": 1, "neg": 1})
        test = two_class_data(rng, n_per_class=500, sep=3.0)
        preds = np.asarray(classify(models, test.values))
        assert np.mean(preds == test.labels) >= 0.95


class TestEvaluateLoocv:
    def test_separable_accuracy(self):
        rng = np.random.default_rng(47)
        data = two_class_data(rng, n_per_class=15, p=3, sep=3.0)
        report = evaluate_loocv(data, "mband", {"pos": 0, "neg": 0})
        assert report.accuracy >= 0.95

    def test_constant_feature_raises_zero_variance(self, rng):
        values = np.hstack([rng.standard_normal((12, 2)), np.ones((12, 1))])
        labels = np.array(["a", "b"] * 6)
        data = DataSample(values, labels)
        with pytest.raises(ZeroVariance):
            evaluate_loocv(data, "mband", {"a": 0, "b": 0})

    def test_n3_runs_three_fits(self, rng):
        # 2 classes, 3 rows: every row is held out exactly once
        values = np.array([[0.0, 0.1], [0.2, -0.1], [5.0, 5.2]])
        values = values + rng.standard_normal((3, 2)) * 0.01
        labels = np.array(["a", "a", "b"])
        with pytest.raises(ClassFitError):
            # class b has a single row; the fold leaving out an 'a' row
            # cannot fit class b with one observation either
            evaluate_loocv(DataSample(values, labels), "mband", {"a": 0, "b": 0})


class TestEvaluateSplit:
    def test_same_seed_same_split(self, rng):
        labels = np.array(["a"] * 10 + ["b"] * 14)
        s1 = stratified_split(labels, 0.5, np.random.default_rng(7))
        s2 = stratified_split(labels, 0.5, np.random.default_rng(7))
        assert np.array_equal(s1[0], s2[0]) and np.array_equal(s1[1], s2[1])

    def test_split_is_disjoint_exhaustive_stratified(self, rng):
        labels = np.array(["a"] * 40 + ["b"] * 20)
        train, test = stratified_split(labels, 0.5, rng)
        assert len(set(train) & set(test)) == 0
        assert len(train) + len(test) == 60
        assert np.sum(labels[train] == "a") == 20
        assert np.sum(labels[train] == "b") == 10

    def test_degenerate_fraction_rejected(self, rng):
        data = two_class_data(rng, n_per_class=10)
        with pytest.raises(ValueError):
            evaluate_split(data, "mband", 0.0, seed=1, hypers={"pos": 0, "neg": 0})

    def test_split_accuracy_on_separable_data(self):
        rng = np.random.default_rng(53)
        data = two_class_data(rng, n_per_class=40, sep=3.0)
        report = evaluate_split(
            data, "mband", 0.5, seed=11, hypers={"pos": 0, "neg": 0}
        )
        assert report.accuracy >= 0.95
