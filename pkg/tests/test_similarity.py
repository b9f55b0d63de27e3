from __future__ import annotations

import logging
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from bmsinfer.errors import EmptyLabel, LengthMismatch, ZeroVector
from bmsinfer.rng import rng_for
from bmsinfer.similarity import (
    build_signatures,
    cd_features,
    cosine_similarity,
    label_polar_table,
    polar_table_csv,
)
from bmsinfer.stats import df_matrix


def _naive_cos(x, y):
    dot = sum(a * b for a, b in zip(x, y))
    return dot / (math.sqrt(sum(a * a for a in x)) * math.sqrt(sum(b * b for b in y)))


def test_cosine_examples():
    assert cosine_similarity([1, 2, 3], [1, 2, 3]) == 1.0
    assert cosine_similarity([1, 0], [0, 1]) == 0.0
    rng = np.random.default_rng(0)
    for _ in range(100):
        x, y = rng.normal(size=6), rng.normal(size=6)
        assert cosine_similarity(x, y) == pytest.approx(_naive_cos(x, y), abs=1e-12)


def test_cosine_errors():
    with pytest.raises(ZeroVector):
        cosine_similarity([0, 0], [1, 1])
    with pytest.raises(LengthMismatch):
        cosine_similarity([1, 2], [1, 2, 3])


vec = st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3)


@given(vec, vec, st.floats(0.01, 100))
def test_cosine_properties(x, y, alpha):
    assume(np.linalg.norm(x) > 1e-3 and np.linalg.norm(y) > 1e-3)
    c = cosine_similarity(x, y)
    assert -1.0 <= c <= 1.0
    assert c == cosine_similarity(y, x)
    assert cosine_similarity(x, x) == pytest.approx(1.0, abs=1e-12)
    ax = [alpha * v for v in x]
    assert cosine_similarity(ax, y) == pytest.approx(c, abs=1e-9)
    assert cosine_similarity([-v for v in ax], y) == pytest.approx(-c, abs=1e-9)


def test_signature_single_and_identical():
    X = np.vstack([np.full((20, 3), 2.0), [[1.0, 5.0, 9.0]]])
    y = np.array([0] * 20 + [1])
    sig = build_signatures(X, y)
    assert sig.signatures[0].tolist() == [2.0, 2.0, 2.0]
    assert sig.signatures[1].tolist() == [1.0, 5.0, 9.0]
    assert sig.sample_counts == (20, 1)


def test_signature_replays_seeded_draw():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(100, 6))
    y = np.repeat([0, 1], 50)
    sig = build_signatures(X, y, 2, 20, seed=9)
    for j in range(2):
        idx = np.flatnonzero(y == j)
        chosen = rng_for(9, "signature", j).choice(idx, size=20, replace=False)
        assert len(set(chosen.tolist())) == 20
        np.testing.assert_allclose(sig.signatures[j], X[np.sort(chosen)].mean(axis=0), rtol=0, atol=0)
    assert np.array_equal(sig.signatures, build_signatures(X, y, 2, 20, seed=9).signatures)
    assert not np.array_equal(sig.signatures, build_signatures(X, y, 2, 20, seed=10).signatures)


def test_signature_all_is_full_mean():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(30, 4))
    y = rng.integers(0, 3, 30)
    sig = build_signatures(X, y, 3, None)
    for j in range(3):
        np.testing.assert_allclose(sig.signatures[j], X[y == j].mean(axis=0), rtol=1e-15)


def test_empty_label():
    with pytest.raises(EmptyLabel):
        build_signatures(np.ones((3, 2)), np.array([0, 0, 2]), 3)


def test_cd_shape_and_self_match():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(5, 6))
    sig = build_signatures(X[:3], np.array([0, 1, 2]))
    F = cd_features(X, sig)
    assert F.shape == (5, 3)
    for j in range(3):
        assert F[j, j] == pytest.approx(1.0, abs=1e-15)


def test_cd_zero_row_warns(caplog):
    sig = build_signatures(np.array([[1.0, 2.0], [2.0, 1.0]]), np.array([0, 1]))
    with caplog.at_level(logging.WARNING):
        F = cd_features(np.array([[0.0, 0.0], [1.0, 2.0]]), sig)
    assert F[0].tolist() == [0.0, 0.0]
    assert "zero" in caplog.text


def test_cd_full_corpus_matches_pairwise_oracle(corpus):
    X = df_matrix(corpus.series)
    y = np.array([s.label_id for s in corpus.series])
    sig = build_signatures(X, y, len(corpus.labels), seed=4)
    F = cd_features(X, sig)
    assert F.shape == (200, 5)
    for i in range(X.shape[0]):
        for j in range(5):
            assert F[i, j] == pytest.approx(_naive_cos(X[i], sig.signatures[j]), abs=1e-12)


def test_polar_table():
    V = np.array([[1.0, 0.0], [0.0, 2.0], [1.0, 1.0]])
    rows = label_polar_table(V, ["a", "b", "c"])
    assert [r[0] for r in rows] == ["a", "c", "b"]
    assert rows[0][3] == 0.0
    assert rows[1][3] == pytest.approx(45.0, abs=1e-9)
    assert rows[2][3] == pytest.approx(90.0, abs=1e-9)
    text = polar_table_csv(rows)
    assert text.splitlines()[0] == "label,reference,similarity,angle_deg"


def test_polar_table_corpus_angles(corpus):
    X = df_matrix(corpus.series)
    y = np.array([s.label_id for s in corpus.series])
    sig = build_signatures(X, y, 5).signatures
    rows = label_polar_table(sig, corpus.labels.names, reference=2)
    assert rows[0][:2] == (corpus.labels.names[2], corpus.labels.names[2])
    by_name = {r[0]: r for r in rows}
    for j, name in enumerate(corpus.labels.names):
        want = math.degrees(math.acos(min(1.0, _naive_cos(sig[j], sig[2]))))
        assert by_name[name][3] == pytest.approx(want, abs=1e-9)
    assert [r[3] for r in rows] == sorted(r[3] for r in rows)
