"""Support-recovery and classification metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, LabelMismatch, UndefinedMetric
from .linalg import as_matrix

# Estimates coming out of the thresholding solvers carry exact zeros plus
# line-search dust; generator truths carry exact zeros only.
SOLVER_ZERO_TOL = 1e-8


@dataclass(frozen=True)
class SupportComparison:
    """Recovery counts and rates over strictly-lower entries.

    tpr = recovered / true nonzeros, tdr = recovered / estimated nonzeros,
    f1 = their harmonic mean. The diagonal is excluded: it is structurally
    nonzero for every estimator and would inflate all scores uniformly.
    """

    tp: int
    fp: int
    fn: int
    tpr: float
    tdr: float
    f1: float


def support_metrics(truth, estimate, zero_tol: float = 0.0) -> SupportComparison:
    """Compare strictly-lower zero patterns; an entry is nonzero when its
    magnitude exceeds ``zero_tol``.

    Raises UndefinedMetric when the truth has no strictly-lower nonzeros
    (tpr undefined) or the estimate has none (tdr undefined).
    """
    if zero_tol < 0:
        raise ValueError("zero_tol must be >= 0")
    tv, ev = as_matrix(truth), as_matrix(estimate)
    if tv.shape != ev.shape:
        raise DimensionMismatch(f"shapes differ: {tv.shape} vs {ev.shape}")
    rows, cols = np.tril_indices(tv.shape[0], k=-1)
    true_nz = np.abs(tv[rows, cols]) > zero_tol
    est_nz = np.abs(ev[rows, cols]) > zero_tol
    tp = int(np.sum(true_nz & est_nz))
    fp = int(np.sum(~true_nz & est_nz))
    fn = int(np.sum(true_nz & ~est_nz))
    if true_nz.sum() == 0:
        raise UndefinedMetric("truth has no strictly-lower nonzeros: tpr undefined")
    if est_nz.sum() == 0:
        raise UndefinedMetric("estimate has no strictly-lower nonzeros: tdr undefined")
    tpr = tp / int(true_nz.sum())
    tdr = tp / int(est_nz.sum())
    f1 = 2.0 * tpr * tdr / (tpr + tdr) if tpr + tdr > 0 else 0.0
    return SupportComparison(tp, fp, fn, tpr, tdr, f1)


@dataclass(frozen=True)
class ClassificationReport:
    """Per-class one-vs-rest rates plus global accuracy."""

    classes: tuple
    tnr: dict
    f1: dict
    accuracy: float


def classification_metrics(true_labels, predicted_labels, classes) -> ClassificationReport:
    """One-vs-rest true negative rate and F1 per class, global accuracy.

    Zero-denominator conventions: with no negatives of a class, tnr is 1
    (nothing to misclassify); with no true or predicted positives, f1 is 0.
    """
    truth = np.asarray(true_labels)
    pred = np.asarray(predicted_labels)
    if truth.shape != pred.shape:
        raise DimensionMismatch("label vectors differ in length")
    classes = tuple(classes)
    known = set(classes)
    for arr, name in ((truth, "true"), (pred, "predicted")):
        extra = set(arr.tolist()) - known
        if extra:
            raise LabelMismatch(f"{name} labels outside class set: {sorted(extra)!r}")
    tnr, f1 = {}, {}
    for c in classes:
        is_c = truth == c
        said_c = pred == c
        tp = int(np.sum(is_c & said_c))
        fp = int(np.sum(~is_c & said_c))
        fn = int(np.sum(is_c & ~said_c))
        tn = int(np.sum(~is_c & ~said_c))
        tnr[c] = tn / (tn + fp) if tn + fp > 0 else 1.0
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1[c] = (
            2.0 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
    accuracy = float(np.mean(truth == pred)) if truth.size else 0.0
    return ClassificationReport(classes, tnr, f1, accuracy)
