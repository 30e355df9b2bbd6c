"""Downstream classification: per-series features, three classifiers, CV.

Logistic regression, discrete AdaBoost over stumps and a KNN vote are
implemented directly on numpy; all three standardise features with
statistics from the training rows only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import TimeSeries
from .errors import ClassTooSmall, EmptyTrainingSet, KTooLarge, MulticlassUnsupported, SingleClass
from .metrics import MetricBundle, f1, mcc, roc_auc, roc_auc_ovr

CLASSIFIERS = ("logreg", "adaboost", "knn")


# ---------------------------------------------------------------------------
# features
# ---------------------------------------------------------------------------


def _mean(v):
    return float(np.mean(v))


def _std(v):
    return float(np.std(v))


def _zero_fraction(v):
    return float(np.mean(v == 0))


FEATURES = {"mean": _mean, "std": _std, "zero_fraction": _zero_fraction}
DEFAULT_FEATURES = ("mean", "std", "zero_fraction")


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    series_id: str
    label: int


def extract_features(series: TimeSeries, names: Sequence[str] = DEFAULT_FEATURES) -> FeatureVector:
    """Per channel, in channel order: mean, population std, fraction of exact zeros."""
    vals = []
    for j in range(series.n_channels):
        col = series.values[:, j]
        vals.extend(FEATURES[n](col) for n in names)
    return FeatureVector(np.array(vals), series.id, series.label)


def feature_matrix(series: Sequence[TimeSeries], names=DEFAULT_FEATURES):
    fvs = [extract_features(s, names) for s in series]
    return np.vstack([f.values for f in fvs]), np.array([f.label for f in fvs])


# ---------------------------------------------------------------------------
# shared pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X):
        X = np.asarray(X, float)
        std = X.std(axis=0)
        # constant features are centred but not scaled
        std = np.where(std > 0, std, 1.0)
        return cls(X.mean(axis=0), std)

    def __call__(self, X):
        return (np.asarray(X, float) - self.mean) / self.std


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, float)))


def _check_binary(y):
    classes = np.unique(y)
    if classes.size < 2:
        raise SingleClass("training labels contain a single class")
    if classes.size > 2 or not set(classes.tolist()) <= {0, 1}:
        raise MulticlassUnsupported(f"binary 0/1 labels required, got classes {classes.tolist()}")


# ---------------------------------------------------------------------------
# logistic regression
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LogReg:
    weights: np.ndarray
    bias: float
    scaler: Standardizer
    n_steps: int = 0
    kind: str = "logreg"

    def margin(self, X):
        return self.scaler(X) @ self.weights + self.bias

    def predict_proba(self, X):
        return _sigmoid(self.margin(X))

    def predict(self, X):
        return (self.margin(X) > 0).astype(int)


def logistic_objective(w, b, Z, y, l2):
    """Mean log-loss plus ``l2 / (2 n) * |w|^2``; the bias is not penalised."""
    z = Z @ w + b
    n = y.size
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w) / n
    r = _sigmoid(z) - y
    return loss, Z.T @ r / n + l2 * w / n, float(np.mean(r))


def fit_logreg(X, y, l2: float = 1.0, max_steps: int = 1000, tol: float = 1e-6) -> LogReg:
    """Gradient descent with Armijo backtracking on the L2-penalised log-loss."""
    X = np.asarray(X, float)
    y = np.asarray(y).astype(float)
    _check_binary(y)
    scaler = Standardizer.fit(X)
    Z = scaler(X)
    w = np.zeros(Z.shape[1])
    b = 0.0
    step = 1.0
    loss, gw, gb = logistic_objective(w, b, Z, y, l2)
    it = 0
    for it in range(1, max_steps + 1):
        gnorm = max(np.max(np.abs(gw), initial=0.0), abs(gb))
        if gnorm < tol:
            break
        g2 = gw @ gw + gb * gb
        step = min(step * 2.0, 1e4)
        while True:
            w_new, b_new = w - step * gw, b - step * gb
            new_loss, new_gw, new_gb = logistic_objective(w_new, b_new, Z, y, l2)
            if new_loss <= loss - 0.5 * step * g2 or step < 1e-12:
                break
            step *= 0.5
        w, b, loss, gw, gb = w_new, b_new, new_loss, new_gw, new_gb
    return LogReg(w, float(b), scaler, it)


# ---------------------------------------------------------------------------
# AdaBoost
# ---------------------------------------------------------------------------

EPS_FLOOR = 1e-10


@dataclass(frozen=True)
class Stump:
    feature: int
    threshold: float
    # +1: predict class 1 when x > threshold; -1: the reverse
    polarity: int

    def vote(self, Z):
        return np.where(Z[:, self.feature] > self.threshold, self.polarity, -self.polarity)


@dataclass(frozen=True, eq=False)
class AdaBoost:
    stumps: list[Stump]
    alphas: list[float]
    scaler: Standardizer
    # label returned where the margin is exactly zero
    tie_label: int
    errors: list[float] = field(default_factory=list)
    kind: str = "adaboost"

    def margin(self, X):
        Z = self.scaler(X)
        out = np.zeros(Z.shape[0])
        for s, a in zip(self.stumps, self.alphas):
            out += a * s.vote(Z)
        return out

    def predict_proba(self, X):
        return _sigmoid(self.margin(X))

    def predict(self, X):
        m = self.margin(X)
        return np.where(m > 0, 1, np.where(m < 0, 0, self.tie_label))


def best_stump(Z, s, w):
    """Lowest weighted-error stump; ties: lowest feature, smallest threshold, polarity +1."""
    best = None
    best_err = np.inf
    for f in range(Z.shape[1]):
        x = Z[:, f]
        distinct = np.unique(x)
        thresholds = np.concatenate([[-np.inf], (distinct[:-1] + distinct[1:]) / 2])
        for thr in thresholds:
            above = x > thr
            for pol in (1, -1):
                pred = np.where(above, pol, -pol)
                err = float(w[pred != s].sum())
                if err < best_err - 1e-12:
                    best, best_err = Stump(f, float(thr), pol), err
    return best, best_err


def fit_adaboost(X, y, rounds: int = 50, learning_rate: float = 1.0) -> AdaBoost:
    X = np.asarray(X, float)
    y = np.asarray(y).astype(int)
    _check_binary(y)
    scaler = Standardizer.fit(X)
    Z = scaler(X)
    s = np.where(y == 1, 1, -1)
    w = np.full(y.size, 1.0 / y.size)
    stumps, alphas, errors = [], [], []
    for _ in range(rounds):
        stump, err = best_stump(Z, s, w)
        if err >= 0.5:
            break
        eps = max(err, EPS_FLOOR)
        alpha = learning_rate * 0.5 * np.log((1 - eps) / eps)
        stumps.append(stump)
        alphas.append(float(alpha))
        errors.append(err)
        if err == 0:
            break
        w = w * np.exp(-alpha * s * stump.vote(Z))
        w /= w.sum()
    n1 = int(y.sum())
    tie_label = 1 if n1 > y.size - n1 else 0
    return AdaBoost(stumps, alphas, scaler, tie_label, errors)


# ---------------------------------------------------------------------------
# KNN
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KNN:
    Z: np.ndarray
    y: np.ndarray
    k: int
    scaler: Standardizer
    classes: np.ndarray
    kind: str = "knn"

    def scores(self, X) -> np.ndarray:
        """Vote fraction per class, columns in ``self.classes`` order."""
        Q = self.scaler(X)
        d2 = ((Q[:, None, :] - self.Z[None, :, :]) ** 2).sum(axis=2)
        nearest = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
        votes = self.y[nearest]
        return np.stack([(votes == c).mean(axis=1) for c in self.classes], axis=1)

    def predict(self, X):
        # argmax returns the first maximum, i.e. the smallest class id
        return self.classes[np.argmax(self.scores(X), axis=1)]

    def predict_proba(self, X):
        sc = self.scores(X)
        if self.classes.size == 2:
            return sc[:, 1]
        return sc


def fit_knn(X, y, k: int = 5) -> KNN:
    X = np.asarray(X, float)
    y = np.asarray(y).astype(int)
    if X.shape[0] == 0:
        raise EmptyTrainingSet("KNN needs at least one training point")
    if k > X.shape[0]:
        raise KTooLarge(f"k={k} exceeds the {X.shape[0]} training points")
    scaler = Standardizer.fit(X)
    return KNN(scaler(X), y, k, scaler, np.unique(y))


def knn_classify(train_X, train_y, query, k: int = 5):
    """Label and per-class vote fractions for a single query point."""
    model = fit_knn(train_X, train_y, k)
    sc = model.scores(np.asarray(query, float)[None, :])[0]
    return int(model.classes[np.argmax(sc)]), dict(zip(model.classes.tolist(), sc.tolist()))


def fit_classifier(kind: str, X, y, **hyper):
    if kind == "logreg":
        return fit_logreg(X, y, **hyper)
    if kind == "adaboost":
        return fit_adaboost(X, y, **hyper)
    if kind == "knn":
        return fit_knn(X, y, **hyper)
    raise ValueError(f"unknown classifier {kind!r}; valid: {', '.join(CLASSIFIERS)}")


# ---------------------------------------------------------------------------
# cross-validation
# ---------------------------------------------------------------------------


def stratified_folds(y, folds: int, seed: int) -> np.ndarray:
    """Fold id per sample: each class is shuffled and dealt round-robin."""
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    fold = np.empty(y.size, dtype=int)
    offset = 0
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        if idx.size < folds:
            raise ClassTooSmall(f"class {c} has {idx.size} members, fewer than {folds} folds")
        idx = rng.permutation(idx)
        # rotating the start keeps fold sizes balanced across classes
        fold[idx] = (np.arange(idx.size) + offset) % folds
        offset += idx.size
    return fold


def score_predictions(y_true, y_pred, scores, classes) -> MetricBundle:
    if len(classes) <= 2:
        return MetricBundle(f1(y_true, y_pred), roc_auc(y_true, scores), mcc(y_true, y_pred))
    return MetricBundle(
        f1(y_true, y_pred, averaging="macro"),
        roc_auc_ovr(y_true, scores, classes),
        mcc(y_true, y_pred),
    )


def cross_validate(X, y, kind: str, folds: int = 5, seed: int = 0,
                   scheme: str = "stratified", **hyper) -> MetricBundle:
    """Mean F1 / AUC / MCC over stratified folds.

    ``scheme="loo"`` runs leave-one-out instead and scores the pooled
    held-out predictions once, since single-sample folds have no AUC.
    """
    X = np.asarray(X, float)
    y = np.asarray(y).astype(int)
    classes = np.unique(y)
    if classes.size < 2:
        raise SingleClass("cross-validation needs at least two classes")
    if scheme == "loo":
        fold = np.arange(y.size)
    elif scheme == "stratified":
        fold = stratified_folds(y, folds, seed)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    pooled_pred = np.empty(y.size, dtype=int)
    pooled_score = np.empty((y.size, classes.size)) if classes.size > 2 else np.empty(y.size)
    bundles = []
    for k in np.unique(fold):
        test = fold == k
        model = fit_classifier(kind, X[~test], y[~test], **hyper)
        pred = model.predict(X[test])
        if classes.size > 2:
            sc = model.scores(X[test]) if kind == "knn" else model.predict_proba(X[test])
            # the training split may lack a class; pad its score column with zeros
            full = np.zeros((test.sum(), classes.size))
            for i, c in enumerate(model.classes):
                full[:, np.searchsorted(classes, c)] = sc[:, i]
            sc = full
        else:
            sc = model.predict_proba(X[test])
        pooled_pred[test] = pred
        pooled_score[test] = sc
        if scheme == "stratified":
            bundles.append(score_predictions(y[test], pred, sc, classes))
    if scheme == "loo":
        return score_predictions(y, pooled_pred, pooled_score, classes)
    return MetricBundle(
        float(np.mean([b.f1 for b in bundles])),
        float(np.mean([b.auc for b in bundles])),
        float(np.mean([b.mcc for b in bundles])),
    )
