from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bmsinfer.errors import EmptyMatrix, LabelOutOfRange, LengthMismatch
from bmsinfer.metrics import confusion, entropy, evaluate, f_scores, purity


def oracle_purity(assign, y):
    clusters: dict[int, Counter] = {}
    for a, c in zip(assign, y):
        clusters.setdefault(a, Counter())[c] += 1
    return Fraction(sum(max(cnt.values()) for cnt in clusters.values()), len(y))


def oracle_entropy(assign, y):
    N = len(y)
    total = 0.0
    for w in set(assign):
        members = [c for a, c in zip(assign, y) if a == w]
        n_w = len(members)
        h = 0.0
        for c in set(members):
            p = members.count(c) / n_w
            h -= p * math.log2(p)
        total += h * n_w / N
    return total


def oracle_f(y_true, y_pred, K):
    def ratio(a, b):
        return Fraction(a, b) if b else Fraction(0)

    def f(p, r):
        return 2 * p * r / (p + r) if p + r else Fraction(0)

    per = []
    TP = FP = FN = 0
    for k in range(K):
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == k and p == k)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != k and p == k)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == k and p != k)
        TP, FP, FN = TP + tp, FP + fp, FN + fn
        per.append(f(ratio(tp, tp + fp), ratio(tp, tp + fn)))
    macro = sum(per) / K
    micro = f(ratio(TP, TP + FP), ratio(TP, TP + FN))
    return per, macro, micro


def test_confusion_examples():
    assert confusion([0, 1, 2], [0, 1, 2], 3).tolist() == np.eye(3, dtype=int).tolist()
    assert confusion([0, 0, 1], [0, 1, 1], 2).tolist() == [[1, 1], [0, 1]]


def test_confusion_row_sums():
    rng = np.random.default_rng(0)
    t, p = rng.integers(0, 6, 1000), rng.integers(0, 6, 1000)
    cm = confusion(t, p, 6)
    assert cm.sum() == 1000
    assert cm.sum(axis=1).tolist() == [int((t == k).sum()) for k in range(6)]
    assert cm.sum(axis=0).tolist() == [int((p == k).sum()) for k in range(6)]


def test_confusion_errors():
    with pytest.raises(LengthMismatch):
        confusion([0, 1], [0], 2)
    with pytest.raises(LabelOutOfRange):
        confusion([0, 2], [0, 1], 2)
    with pytest.raises(LabelOutOfRange):
        confusion([0, -1], [0, 1], 2)


def test_perfect():
    r = evaluate([0, 1, 2, 1], [0, 1, 2, 1], 3)
    assert r.macro_f == r.micro_f == r.accuracy == 1.0
    assert r.precision == r.recall == r.f == [1.0, 1.0, 1.0]


def test_hand_example():
    r = f_scores([[1, 1], [0, 1]])
    assert r.precision == [1.0, 0.5]
    assert r.recall == [0.5, 1.0]
    assert r.f == pytest.approx([2 / 3, 2 / 3], abs=1e-15)
    assert r.macro_f == pytest.approx(2 / 3, abs=1e-15)
    assert r.accuracy == pytest.approx(2 / 3, abs=1e-15)
    assert r.support == [2, 1]


def test_absent_class_counts_zero():
    r = evaluate([0, 0], [0, 0], 3)
    assert r.precision[1:] == [0.0, 0.0] and r.f[1:] == [0.0, 0.0]
    assert r.macro_f == pytest.approx(1 / 3)


def test_empty_matrix():
    with pytest.raises(EmptyMatrix):
        f_scores(np.zeros((2, 2), dtype=int))


def test_random_f_against_oracle():
    rng = np.random.default_rng(1)
    for _ in range(200):
        K = int(rng.integers(2, 9))
        n = int(rng.integers(1, 201))
        t, p = rng.integers(0, K, n), rng.integers(0, K, n)
        r = evaluate(t, p, K)
        per, macro, micro = oracle_f(t.tolist(), p.tolist(), K)
        assert r.f == pytest.approx([float(x) for x in per], abs=1e-12)
        assert r.macro_f == pytest.approx(float(macro), abs=1e-12)
        assert r.micro_f == pytest.approx(float(micro), abs=1e-12)
        assert r.micro_f == r.accuracy
        assert 0.0 <= r.macro_f <= 1.0


def test_purity_examples():
    assert purity([0, 0, 1, 1], [3, 3, 5, 5]) == 1.0
    assert purity([0, 0, 0, 1, 1], ["a", "a", "b", "b", "b"]) == 0.8


def test_entropy_examples():
    assert entropy([0, 0, 1], [1, 1, 2]) == 0.0
    assert entropy([0, 0, 0, 0], [0, 1, 0, 1]) == pytest.approx(1.0, abs=1e-15)
    assert isinstance(entropy([0, 1], [0, 1]), float)


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        purity([0, 1], [0])
    with pytest.raises(LengthMismatch):
        entropy([0], [0, 1])


def test_random_cluster_metrics_against_oracle():
    rng = np.random.default_rng(2)
    for _ in range(200):
        K = int(rng.integers(1, 9))
        n = int(rng.integers(1, 201))
        a, y = rng.integers(0, K, n), rng.integers(0, K, n)
        assert purity(a, y) == float(oracle_purity(a.tolist(), y.tolist()))
        h = entropy(a, y)
        assert h == pytest.approx(oracle_entropy(a.tolist(), y.tolist()), abs=1e-12)
        assert 0.0 <= h <= math.log2(K) + 1e-12


labels = st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=60)


@given(labels, st.permutations(range(5)), st.permutations(range(5)))
def test_purity_entropy_relabel_invariant(pairs, pa, pc):
    a = [x for x, _ in pairs]
    y = [c for _, c in pairs]
    a2 = [pa[x] for x in a]
    y2 = [pc[c] for c in y]
    assert purity(a2, y2) == purity(a, y)
    assert entropy(a2, y2) == pytest.approx(entropy(a, y), abs=1e-12)


@given(labels)
def test_splitting_cluster_along_classes(pairs):
    a = [x for x, _ in pairs]
    y = [c for _, c in pairs]
    refined = [x * 10 + c for x, c in pairs]
    assert entropy(refined, y) <= entropy(a, y) + 1e-12
    assert entropy(refined, y) == 0.0
    assert purity(refined, y) == 1.0
    singletons = list(range(len(y)))
    assert purity(singletons, y) == 1.0 and entropy(singletons, y) == 0.0
