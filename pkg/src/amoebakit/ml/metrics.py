"""Confusion matrices, accuracy, MCC and stratified k-fold evaluation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .network import TrainParams, train

UNDEFINED = "nan"


class StratificationError(ValueError):
    pass


def confusion(y_true, y_pred, n_classes: int) -> np.ndarray:
    """Counts indexed [true, predicted]."""
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (np.asarray(y_true, dtype=int), np.asarray(y_pred, dtype=int)), 1)
    return cm


def mcc(cm) -> float | None:
    """Matthews correlation; None when undefined (a zero marginal).

    For a 2x2 matrix [[TN, FP], [FN, TP]] this is
    (TP TN - FP FN) / sqrt((TP+FP)(TP+FN)(TN+FP)(TN+FN)); larger matrices use
    the usual multiclass generalisation.
    """
    cm = np.asarray(cm, dtype=float)
    if np.any(cm < 0):
        raise ValueError("counts must be nonnegative")
    if cm.shape == (2, 2):
        tn, fp, fn, tp = cm[0, 0], cm[0, 1], cm[1, 0], cm[1, 1]
        den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
        if den == 0:
            return None
        return float((tp * tn - fp * fn) / math.sqrt(den))
    t = cm.sum(axis=1)
    p = cm.sum(axis=0)
    n = cm.sum()
    c = np.trace(cm)
    den = math.sqrt((n * n - p @ p) * (n * n - t @ t))
    if den == 0:
        return None
    return float((c * n - t @ p) / den)


@dataclass
class Metrics:
    accuracy: float
    mcc: float | None
    confusion: np.ndarray

    @property
    def mcc_text(self) -> str:
        return UNDEFINED if self.mcc is None else f"{self.mcc:.4f}"


def evaluate_predictions(y_true, y_pred, n_classes: int) -> Metrics:
    cm = confusion(y_true, y_pred, n_classes)
    return Metrics(float(np.trace(cm) / cm.sum()), mcc(cm), cm)


def stratified_folds(y, k: int, seed: int = 0) -> list[np.ndarray]:
    """Test-index arrays; each class is shuffled then dealt round-robin."""
    y = np.asarray(y)
    if k < 2:
        raise ValueError("k must be >= 2")
    if len(y) < k:
        raise StratificationError(f"{len(y)} rows cannot fill {k} folds")
    rng = np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), 0x666F6C64]))
    folds: list[list[int]] = [[] for _ in range(k)]
    offset = 0
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        if len(idx) < k:
            raise StratificationError(f"class {cls} has {len(idx)} rows, fewer than {k} folds")
        idx = rng.permutation(idx)
        for r, i in enumerate(idx):
            folds[(r + offset) % k].append(int(i))
        offset += len(idx)
    return [np.array(sorted(f)) for f in folds]


def mean_halfwidth(values) -> tuple[float, float]:
    """Mean and 1.96 * sample standard error."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return math.nan, math.nan
    if v.size == 1:
        return float(v[0]), 0.0
    return float(v.mean()), float(1.96 * v.std(ddof=1) / math.sqrt(v.size))


@dataclass
class CVResult:
    folds: list[Metrics]
    accuracy: float
    accuracy_hw: float
    mcc: float | None
    mcc_hw: float | None
    mcc_partial: bool
    meta: dict = field(default_factory=dict)

    def summary(self) -> str:
        if self.mcc is None:
            m = UNDEFINED
        else:
            m = f"{self.mcc:.3f}(±{self.mcc_hw:.3f})" + ("*" if self.mcc_partial else "")
        return f"accuracy={self.accuracy:.3f}(±{self.accuracy_hw:.3f}) mcc={m}"


def summarize(folds: list[Metrics], meta=None) -> CVResult:
    acc, acc_hw = mean_halfwidth([f.accuracy for f in folds])
    defined = [f.mcc for f in folds if f.mcc is not None]
    if defined:
        m, m_hw = mean_halfwidth(defined)
    else:
        m, m_hw = None, None
    return CVResult(
        folds, acc, acc_hw, m, m_hw, 0 < len(defined) < len(folds),
        dict(meta or {}, interval="mean ± 1.96·std(ddof=1)/sqrt(k)"),
    )


def kfold_cv(specs, X, y, k: int = 5, hp: TrainParams | None = None, seed: int = 0, n_classes=None) -> CVResult:
    """Stratified k-fold training and evaluation; fold f trains with seed + f."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    n_classes = int(n_classes or (y.max() + 1))
    folds = stratified_folds(y, k, seed)
    results = []
    for f, test in enumerate(folds):
        mask = np.ones(len(y), dtype=bool)
        mask[test] = False
        net = train(specs, X[mask], y[mask], hp, seed=seed + f).network
        results.append(evaluate_predictions(y[test], net.predict(X[test]), n_classes))
    return summarize(results, {"k": k, "seed": seed})
