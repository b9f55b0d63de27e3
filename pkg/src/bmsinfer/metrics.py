"""Confusion matrices, precision/recall/F-scores, cluster purity and entropy."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

import numpy as np

from .errors import EmptyMatrix, LabelOutOfRange, LengthMismatch


def _pair(a, b):
    a = np.asarray(a, dtype=np.int64).ravel()
    b = np.asarray(b, dtype=np.int64).ravel()
    if a.shape != b.shape:
        raise LengthMismatch(f"length mismatch: {a.size} vs {b.size}")
    return a, b


def confusion(y_true, y_pred, K: int) -> np.ndarray:
    """``K x K`` counts; rows are true labels, columns predictions."""
    t, p = _pair(y_true, y_pred)
    if t.size and (min(t.min(), p.min()) < 0 or max(t.max(), p.max()) >= K):
        raise LabelOutOfRange(f"labels must lie in [0, {K})")
    return np.bincount(t * K + p, minlength=K * K).reshape(K, K)


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def f_measure(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    if precision == recall:
        return precision
    return 2.0 * precision * recall / (precision + recall)


@dataclass
class MetricReport:
    precision: list[float]
    recall: list[float]
    f: list[float]
    support: list[int]
    macro_f: float
    micro_f: float
    accuracy: float

    def to_dict(self) -> dict:
        return asdict(self)

    def per_class_csv(self, names=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "precision", "recall", "f_score", "support"])
        for j in range(len(self.f)):
            name = names[j] if names is not None else j
            w.writerow([name, repr(self.precision[j]), repr(self.recall[j]), repr(self.f[j]), self.support[j]])
        return buf.getvalue()


def f_scores(cm) -> MetricReport:
    """Per-class and averaged F-scores; 0/0 counts as 0.

    Macro F is the unweighted mean of per-class F. Micro F pools the
    true-positive, false-positive and false-negative counts over classes.
    """
    cm = np.asarray(cm, dtype=np.int64)
    total = int(cm.sum())
    if total == 0:
        raise EmptyMatrix("confusion matrix is empty")
    tp = np.diag(cm)
    fp = cm.sum(axis=0) - tp
    fn = cm.sum(axis=1) - tp
    prec = [_ratio(float(a), float(a + b)) for a, b in zip(tp, fp)]
    rec = [_ratio(float(a), float(a + b)) for a, b in zip(tp, fn)]
    f = [f_measure(p, r) for p, r in zip(prec, rec)]
    TP, FP, FN = int(tp.sum()), int(fp.sum()), int(fn.sum())
    micro = f_measure(_ratio(TP, TP + FP), _ratio(TP, TP + FN))
    return MetricReport(
        precision=prec,
        recall=rec,
        f=f,
        support=[int(s) for s in cm.sum(axis=1)],
        macro_f=float(np.mean(f)),
        micro_f=micro,
        accuracy=TP / total,
    )


def evaluate(y_true, y_pred, K: int) -> MetricReport:
    return f_scores(confusion(y_true, y_pred, K))


def _contingency(assignments, y_true):
    a = np.asarray(assignments).ravel()
    c = np.asarray(y_true).ravel()
    if a.shape != c.shape:
        raise LengthMismatch(f"length mismatch: {a.size} vs {c.size}")
    if a.size == 0:
        raise EmptyMatrix("no instances")
    a = np.unique(a, return_inverse=True)[1].ravel()
    c = np.unique(c, return_inverse=True)[1].ravel()
    na, nc = a.max() + 1, c.max() + 1
    return np.bincount(a * nc + c, minlength=na * nc).reshape(na, nc)


def purity(assignments, y_true) -> float:
    """Share of instances that belong to the majority class of their cluster."""
    table = _contingency(assignments, y_true)
    return int(table.max(axis=1).sum()) / int(table.sum())


def entropy(assignments, y_true) -> float:
    """Size-weighted mean over clusters of the class entropy in bits."""
    table = _contingency(assignments, y_true).astype(float)
    N = table.sum()
    total = 0.0
    for row in table:
        n_w = row.sum()
        p = row[row > 0] / n_w
        total += float(-(p * np.log2(p)).sum()) * n_w / N
    return float(total)
