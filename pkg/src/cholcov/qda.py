"""Quadratic discriminant analysis through estimated covariance factors.

Each class gets its own Gaussian model (mean, factor, prior); a point is
assigned to the class maximizing the log-joint

    ln prior - sum_i ln t_ii - ||T^{-1}(x - mean)||^2 / 2,

where the quadratic form and log-determinant are both read off the class
factor with one triangular solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ClassMissingInSplit,
    CholcovError,
    DimensionMismatch,
    LabelMismatch,
)
from .linalg import DataSample, LowerTriangularFactor, standardizer
from .metrics import ClassificationReport, classification_metrics
from .methods import fit_method, normalize_method, select_hyper


@dataclass(frozen=True)
class ClassModel:
    """Fitted per-class Gaussian: mean, covariance factor and prior."""

    label: object
    mean: np.ndarray
    factor: LowerTriangularFactor
    prior: float

    def __post_init__(self):
        if not 0.0 < self.prior <= 1.0:
            raise ValueError("prior must lie in (0, 1]")
        if self.mean.shape[0] != self.factor.p:
            raise DimensionMismatch("mean and factor dimensions differ")


class ClassFitError(CholcovError):
    """Estimator failure annotated with the class it happened in."""

    def __init__(self, label, original: Exception):
        self.label = label
        self.original = original
        super().__init__(f"class {label!r}: {original}")


def _classes_of(data: DataSample):
    if data.labels is None:
        raise LabelMismatch("data has no labels")
    return sorted(set(data.labels.tolist()))


def fit_qda(
    data: DataSample,
    method: str,
    hypers: dict | None = None,
    *,
    folds: int = 5,
) -> list[ClassModel]:
    """One ClassModel per label value, sorted by label.

    Class rows are centered at the class mean before the factor fit, so
    the estimators see zero-mean data. Hyperparameters come from ``hypers``
    (label -> value) or are cross-validated per class on its own rows.
    """
    method = normalize_method(method)
    classes = _classes_of(data)
    models = []
    for label in classes:
        rows = data.values[data.labels == label]
        if rows.shape[0] < 2:
            raise ClassFitError(label, ValueError("need >= 2 rows per class"))
        mean = rows.mean(axis=0)
        centered = rows - mean
        try:
            if hypers is not None and label in hypers:
                hyper = hypers[label]
            else:
                hyper = select_hyper(method, centered, folds)
            factor = fit_method(method, centered, hyper)
        except CholcovError as exc:
            raise ClassFitError(label, exc) from exc
        models.append(
            ClassModel(label, mean, factor, rows.shape[0] / data.n)
        )
    return models


def select_class_hypers(
    data: DataSample, method: str, *, folds: int = 5
) -> dict:
    """Cross-validated hyperparameter per class on its centered rows."""
    method = normalize_method(method)
    out = {}
    for label in _classes_of(data):
        rows = data.values[data.labels == label]
        centered = rows - rows.mean(axis=0)
        try:
            out[label] = select_hyper(method, centered, folds)
        except CholcovError as exc:
            raise ClassFitError(label, exc) from exc
    return out


def log_joint(model: ClassModel, x) -> float:
    """ln prior + Gaussian log-density of x under the class model, up to
    the dimension constant."""
    xv = np.asarray(x, dtype=float)
    if xv.shape != model.mean.shape:
        raise DimensionMismatch("point and model dimensions differ")
    y = scipy.linalg.solve_triangular(model.factor.values, xv - model.mean, lower=True)
    logdet = float(np.log(model.factor.diagonal()).sum())
    return float(np.log(model.prior)) - logdet - 0.5 * float(y @ y)


def _score_matrix(models: list[ClassModel], x: np.ndarray) -> np.ndarray:
    """Log-joint of every row of x under every model: shape (n_models, n)."""
    scores = np.empty((len(models), x.shape[0]))
    for mi, model in enumerate(models):
        y = scipy.linalg.solve_triangular(
            model.factor.values, (x - model.mean).T, lower=True
        )
        quad = (y * y).sum(axis=0)
        logdet = float(np.log(model.factor.diagonal()).sum())
        scores[mi] = np.log(model.prior) - logdet - 0.5 * quad
    return scores


def classify(models: list[ClassModel], x):
    """Label of the model with the largest log-joint; exact ties go to the
    smallest label."""
    if not models:
        raise ValueError("need at least one class model")
    models = sorted(models, key=lambda m: m.label)
    xv = np.atleast_2d(np.asarray(x, dtype=float))
    scores = _score_matrix(models, xv)
    picks = scores.argmax(axis=0)  # argmax takes the first, i.e. smallest label
    labels = [models[i].label for i in picks]
    return labels[0] if np.asarray(x).ndim == 1 else labels


def evaluate_loocv(
    data: DataSample,
    method: str,
    hypers: dict | None = None,
    *,
    folds: int = 5,
) -> ClassificationReport:
    """Leave-one-out evaluation: every row is classified by models fitted
    on the other N-1 rows, standardized with those rows' statistics.

    Hyperparameters are selected once per class on the full data unless
    supplied; re-selecting inside every fold would multiply the cost by N
    for no measurable change at these sample sizes.
    """
    classes = _classes_of(data)
    if data.n < len(classes) + 1:
        raise ValueError("need at least one spare row beyond the class count")
    method = normalize_method(method)
    if hypers is None:
        hypers = select_class_hypers(_standardized_copy(data), method, folds=folds)
    preds = []
    for r in range(data.n):
        mask = np.ones(data.n, dtype=bool)
        mask[r] = False
        train = data.subset(mask)
        apply, _, _ = standardizer(train.values)
        strain = DataSample(apply(train.values), train.labels)
        models = fit_qda(strain, method, hypers, folds=folds)
        preds.append(classify(models, apply(data.values[r])))
    return classification_metrics(data.labels, preds, classes)


def _standardized_copy(data: DataSample) -> DataSample:
    apply, _, _ = standardizer(data.values)
    return DataSample(apply(data.values), data.labels)


def stratified_split(
    labels, fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Index split keeping the class proportions; raises if any class would
    lose all rows on either side."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("split fraction must lie strictly between 0 and 1")
    labels = np.asarray(labels)
    train_idx, test_idx = [], []
    for label in sorted(set(labels.tolist())):
        idx = np.flatnonzero(labels == label)
        perm = rng.permutation(idx)
        cut = int(round(fraction * idx.shape[0]))
        if cut == 0 or cut == idx.shape[0]:
            raise ClassMissingInSplit(f"class {label!r} empty on one side")
        train_idx.append(perm[:cut])
        test_idx.append(perm[cut:])
    return np.sort(np.concatenate(train_idx)), np.sort(np.concatenate(test_idx))


def evaluate_split(
    data: DataSample,
    method: str,
    split_fraction: float,
    seed: int,
    hypers: dict | None = None,
    *,
    folds: int = 5,
) -> ClassificationReport:
    """Stratified train/test evaluation: fit on the train side (standardized
    with its own statistics, hyperparameters cross-validated there),
    classify the test side."""
    classes = _classes_of(data)
    rng = np.random.default_rng(seed)
    train_idx, test_idx = stratified_split(data.labels, split_fraction, rng)
    train, test = data.subset(train_idx), data.subset(test_idx)
    apply, _, _ = standardizer(train.values)
    strain = DataSample(apply(train.values), train.labels)
    if hypers is None:
        hypers = select_class_hypers(strain, method, folds=folds)
    models = fit_qda(strain, method, hypers, folds=folds)
    preds = classify(models, apply(test.values))
    return classification_metrics(test.labels, preds, classes)
