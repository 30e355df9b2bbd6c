"""Imputation and classification metrics: MAE, F1, ROC AUC, MCC."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import rankdata

from .errors import EmptyMask, LengthMismatch, ShapeMismatch, SingleClass


@dataclass(frozen=True)
class MetricBundle:
    f1: float
    auc: float
    mcc: float
    mae: Optional[float] = None


@dataclass(frozen=True)
class Confusion:
    tp: int
    fp: int
    fn: int
    tn: int


def _values(x):
    return getattr(x, "values", x)


def mae(ground_truth, imputed, sim_mask) -> float:
    """Mean absolute error over the artificially hidden positions only.

    Accepts :class:`~tsimpute.core.TimeSeries` or plain arrays.
    """
    truth = np.asarray(_values(ground_truth), float)
    pred = np.asarray(_values(imputed), float)
    mask = np.asarray(sim_mask, bool)
    if truth.ndim == 1:
        truth = truth[:, None]
    if pred.ndim == 1:
        pred = pred[:, None]
    if mask.ndim == 1:
        mask = mask[:, None]
    if truth.shape != pred.shape or truth.shape != mask.shape:
        raise ShapeMismatch(f"shapes differ: {truth.shape}, {pred.shape}, {mask.shape}")
    if not mask.any():
        raise EmptyMask("no masked positions to score")
    return float(np.mean(np.abs(pred[mask] - truth[mask])))


def _pair(y_true, y_pred):
    y_true = np.asarray(y_true).ravel()
    y_pred = np.asarray(y_pred).ravel()
    if y_true.shape != y_pred.shape:
        raise LengthMismatch(f"{y_true.size} labels vs {y_pred.size} predictions")
    if y_true.size == 0:
        raise LengthMismatch("empty label vectors")
    return y_true, y_pred


def confusion_counts(y_true, y_pred, positive_class=1) -> Confusion:
    y_true, y_pred = _pair(y_true, y_pred)
    t = y_true == positive_class
    p = y_pred == positive_class
    return Confusion(int(np.sum(t & p)), int(np.sum(~t & p)), int(np.sum(t & ~p)), int(np.sum(~t & ~p)))


def _f1_from(c: Confusion) -> float:
    denom = 2 * c.tp + c.fp + c.fn
    return 2 * c.tp / denom if denom else 0.0


def f1(y_true, y_pred, averaging: str = "binary_positive", positive_class=1) -> float:
    y_true, y_pred = _pair(y_true, y_pred)
    if averaging == "binary_positive":
        return _f1_from(confusion_counts(y_true, y_pred, positive_class))
    if averaging == "macro":
        classes = np.union1d(y_true, y_pred)
        return float(np.mean([_f1_from(confusion_counts(y_true, y_pred, k)) for k in classes]))
    raise ValueError(f"unknown averaging {averaging!r}")


def roc_auc(y_true, scores) -> float:
    """Binary AUC as the Mann-Whitney statistic, average ranks for ties."""
    y = np.asarray(y_true).ravel()
    s = np.asarray(scores, float).ravel()
    if y.shape != s.shape:
        raise LengthMismatch(f"{y.size} labels vs {s.size} scores")
    pos = y == 1
    n_pos = int(pos.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClass("AUC needs both classes present")
    ranks = rankdata(s, method="average")
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def roc_auc_ovr(y_true, class_scores, classes) -> float:
    """Macro mean of one-vs-rest AUCs; ``class_scores[:, i]`` scores ``classes[i]``."""
    y = np.asarray(y_true).ravel()
    class_scores = np.asarray(class_scores, float)
    present = [i for i, k in enumerate(classes) if 0 < np.sum(y == k) < y.size]
    if not present:
        raise SingleClass("AUC needs at least two classes present")
    return float(np.mean([roc_auc((y == classes[i]).astype(int), class_scores[:, i]) for i in present]))


def mcc(y_true, y_pred) -> float:
    """Matthews correlation; multiclass via the full confusion matrix.

    Returns 0 whenever the denominator vanishes.
    """
    y_true, y_pred = _pair(y_true, y_pred)
    classes, inv = np.unique(np.concatenate([y_true, y_pred]), return_inverse=True)
    k = classes.size
    ti, pi = inv[: y_true.size], inv[y_true.size:]
    C = np.zeros((k, k), dtype=np.int64)
    np.add.at(C, (ti, pi), 1)
    t = C.sum(axis=1).astype(float)
    p = C.sum(axis=0).astype(float)
    n = float(C.sum())
    correct = float(np.trace(C))
    num = correct * n - t @ p
    denom = np.sqrt((n * n - p @ p) * (n * n - t @ t))
    if denom == 0:
        return 0.0
    return float(num / denom)
