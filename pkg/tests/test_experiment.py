from __future__ import annotations

import csv
import json
import math
import statistics
from pathlib import Path

import mpmath
import numpy as np
import pytest
from scipy import stats as sps

from bmsinfer.errors import BadSpec, DataError, TooFewSamples
from bmsinfer.experiment import (
    RunConfig,
    cluster_features,
    generate_synthetic_corpus,
    parse_config,
    run_study,
    significance_mark,
    welch_t_test,
)
from bmsinfer.experiment.manifest import verify_manifest, write_manifest
from bmsinfer.ingest import SidecarLabels, interpolate_gaps, load_corpus, parse_series, resample_hourly


# significance

def _oracle_p(a, b):
    a = [mpmath.mpf(x) for x in a]
    b = [mpmath.mpf(x) for x in b]
    ma, mb = sum(a) / len(a), sum(b) / len(b)
    va = sum((x - ma) ** 2 for x in a) / (len(a) - 1) / len(a)
    vb = sum((x - mb) ** 2 for x in b) / (len(b) - 1) / len(b)
    t = (ma - mb) / mpmath.sqrt(va + vb)
    nu = (va + vb) ** 2 / (va ** 2 / (len(a) - 1) + vb ** 2 / (len(b) - 1))
    # two-sided tail of Student's t through the regularized incomplete beta
    return float(mpmath.betainc(nu / 2, mpmath.mpf(1) / 2, 0, nu / (nu + t * t), regularized=True))


def test_identical_samples_not_marked():
    a = [0.5, 0.6, 0.7]
    assert not significance_mark(a, list(a))
    assert welch_t_test(a, a)[0] == 0.0


def test_extreme_separation_is_marked():
    rng = np.random.default_rng(0)
    a = 0.9 + rng.uniform(-1e-6, 1e-6, 5)
    b = 0.5 + rng.uniform(-1e-6, 1e-6, 5)
    assert significance_mark(a, b)
    assert not significance_mark(b, a)
    assert significance_mark([0.9] * 5, [0.5] * 5)


def test_p_value_matches_oracles():
    rng = np.random.default_rng(1)
    for _ in range(30):
        na, nb = int(rng.integers(2, 9)), int(rng.integers(2, 9))
        a = rng.normal(0.7, rng.uniform(0.01, 0.1), na)
        b = rng.normal(0.68, rng.uniform(0.01, 0.1), nb)
        t, dof, p = welch_t_test(a, b)
        assert p == pytest.approx(_oracle_p(a, b), abs=1e-3)
        ref = sps.ttest_ind(a, b, equal_var=False)
        assert t == pytest.approx(ref.statistic, rel=1e-9)
        assert p == pytest.approx(ref.pvalue, abs=1e-9)


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        welch_t_test([1.0], [1.0, 2.0])


# synthetic corpus

def test_synth_counts(corpus_dir):
    files = sorted(p.name for p in corpus_dir.glob("*.csv") if p.name != "labels.csv")
    assert len(files) == 200
    with open(corpus_dir / "labels.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 200
    assert sorted({r["label"] for r in rows}) == ["brightness", "humidity", "motion", "power", "temperature"]


def test_synth_series_long_enough(corpus):
    assert min(len(s) for s in corpus.series) >= 720


def test_synth_deterministic(tmp_path):
    a = generate_synthetic_corpus(tmp_path / "a", 5, 3, 720, seed=11, n_corrupt=2)
    b = generate_synthetic_corpus(tmp_path / "b", 5, 3, 720, seed=11, n_corrupt=2)
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
    c = generate_synthetic_corpus(tmp_path / "c", 5, 3, 720, seed=12)
    assert (a / "power_000.csv").read_bytes() != (c / "power_000.csv").read_bytes()


def test_synth_corrupt_files_skipped(tmp_path):
    out = generate_synthetic_corpus(tmp_path, 2, 4, 720, seed=1, n_corrupt=2)
    corpus = load_corpus(out, SidecarLabels(out / "labels.csv"))
    assert len(corpus.series) == 8 and corpus.skip_count == 2


def test_temperature_daily_period(tmp_path):
    out = generate_synthetic_corpus(tmp_path, ["temperature"], 5, 960, seed=3)
    for path in sorted(out.glob("temperature_*.csv")):
        x = interpolate_gaps(resample_hourly(parse_series(path.read_bytes()))).values
        x = x - x.mean()
        lags = range(2, 49)
        acf = [float(np.dot(x[:-lag], x[lag:]) / np.dot(x, x)) for lag in lags]
        assert list(lags)[int(np.argmax(acf))] == 24


def test_synth_bad_spec(tmp_path):
    with pytest.raises(BadSpec):
        generate_synthetic_corpus(tmp_path, 5, 2, 500)
    with pytest.raises(BadSpec):
        generate_synthetic_corpus(tmp_path, ["sunshine"], 2, 720)
    with pytest.raises(BadSpec):
        generate_synthetic_corpus(tmp_path, 9, 2, 720)


def test_custom_generator(tmp_path):
    out = generate_synthetic_corpus(tmp_path, {"flat": lambda h, rng: np.full(h.size, 3.0)}, 2, 720)
    corpus = load_corpus(out, SidecarLabels(out / "labels.csv"))
    assert corpus.labels.names == ["flat"]
    # duplicated rows carry a little jitter
    np.testing.assert_allclose(corpus.series[0].values, 3.0, atol=0.05)


# manifest

def test_manifest_round_trip(tmp_path):
    out = generate_synthetic_corpus(tmp_path / "c", 2, 2, 720, seed=0)
    manifest = tmp_path / "SHA256SUMS"
    manifest.write_text(write_manifest(out))
    assert verify_manifest(out, manifest) == 5
    (out / "humidity_001.csv").write_text("t,v\n0,1\n")
    with pytest.raises(DataError, match="mismatch"):
        verify_manifest(out, manifest)
    (out / "humidity_001.csv").unlink()
    with pytest.raises(DataError, match="missing"):
        verify_manifest(out, manifest)


# config

def test_parse_config(tmp_path):
    cfg = parse_config(
        "families = df, iets16\n"
        "fractions = 0.2, 0.7\n"
        "repeats = 3\n"
        "cluster = no\n"
        "grid.knn.k = 1, 3  # small\n"
        "corpus = data\n",
        base=tmp_path,
    )
    assert cfg.families == ["df", "iets16"]
    assert cfg.fractions == [0.2, 0.7]
    assert cfg.repeats == 3 and cfg.cluster is False
    assert cfg.grids["knn"] == {"k": [1, 3]}
    assert cfg.corpus == str((tmp_path / "data").resolve())
    assert cfg.algorithms == RunConfig().algorithms


@pytest.mark.parametrize("text", [
    "colour = red\n",
    "repeats = many\n",
    "repeats = 0\n",
    "fractions = 0.2, 1.5\n",
    "families = df, iets12\n",
    "algorithms = lr, xgboost\n",
    "grid.xgb.depth = 3\n",
    "iets_mode = color\n",
])
def test_config_errors(text):
    with pytest.raises(BadSpec):
        parse_config(text)


# studies

def _small_config(tmp_path, **overrides):
    cfg = RunConfig(
        synthetic_types=3, synthetic_files=10, synthetic_length=760, synthetic_seed=2,
        families=["df", "cd", "iets8"], algorithms=["knn", "dt"], fractions=[0.5], repeats=2, folds=3,
        grids={"knn": {"k": [1, 3]}, "dt": {"max_depth": [3]}}, output=str(tmp_path / "out"),
    )
    for k, v in overrides.items():
        setattr(cfg, k, v)
    return cfg


def test_study_outputs(tmp_path):
    report = run_study(_small_config(tmp_path))
    out = tmp_path / "out"
    for name in ("report.json", "runs.csv", "table2_clustering.csv", "table3_macro_f.csv",
                 "table4_accuracy.csv", "polar.csv"):
        assert (out / name).is_file(), name
    assert len(list((out / "pgm").glob("*.pgm"))) == 3
    assert json.loads((out / "report.json").read_text())["seed"] == 0

    fs = report["feature_study"]
    assert len(fs["runs"]) == 3 * 2 * 1 * 2
    for run in fs["runs"]:
        # test sets are balanced, so accuracy and micro F coincide
        assert run["accuracy"] == run["micro_f"]
    for cell in fs["cells"]:
        assert cell["repeats"] == 2
        assert cell["mean_accuracy"] == pytest.approx(statistics.fmean(cell["accuracy"]), abs=1e-15)
        assert cell["std_accuracy"] == pytest.approx(statistics.stdev(cell["accuracy"]), abs=1e-15)
    assert report["corpus"]["n_iets_eligible"] == 30
    assert {r["algorithm"] for r in report["cluster_study"]["rows"]} == {"spectral", "kmedoids", "kmeans"}


def test_study_deterministic(tmp_path):
    cfg = _small_config(tmp_path, families=["df", "iets8"], algorithms=["knn"], cluster=False)
    run_study(cfg)
    first = (tmp_path / "out" / "report.json").read_bytes()
    run_study(cfg)
    assert (tmp_path / "out" / "report.json").read_bytes() == first


def test_single_repeat_has_zero_std(tmp_path):
    report = run_study(_small_config(tmp_path, families=["df"], algorithms=["knn"], repeats=1, cluster=False))
    for cell in report["feature_study"]["cells"]:
        assert cell["std_accuracy"] == 0.0 and cell["std_macro_f"] == 0.0


def test_empty_study(tmp_path):
    with pytest.raises(BadSpec, match="empty study"):
        run_study(_small_config(tmp_path, families=[], cluster=False))


def test_cluster_k1_formulas():
    rng = np.random.default_rng(0)
    y = np.repeat([0, 1, 2], [10, 5, 5])
    rows = cluster_features(rng.normal(size=(20, 3)), y, 1, seed=0)
    share = np.bincount(y) / 20
    for r in rows:
        assert r["purity"] == 0.5
        assert r["entropy"] == pytest.approx(-sum(p * math.log2(p) for p in share), abs=1e-12)


def test_cluster_separated_blobs():
    rng = np.random.default_rng(1)
    centers = np.array([[0, 0, 0], [30, 0, 0], [0, 30, 0], [0, 0, 30]], dtype=float)
    X = np.vstack([rng.normal(c, 1.0, (25, 3)) for c in centers])
    y = np.repeat(np.arange(4), 25)
    for r in cluster_features(X, y, 4, seed=3):
        assert r["purity"] >= 0.99, r


def test_manifest_checked_by_study(tmp_path):
    corpus = generate_synthetic_corpus(tmp_path / "c", 2, 4, 720, seed=0)
    (tmp_path / "sums").write_text(write_manifest(corpus))
    cfg = _small_config(tmp_path, corpus=str(corpus), manifest=str(tmp_path / "sums"),
                        families=["df"], algorithms=["knn"], cluster=False)
    cfg.folds = 2
    assert run_study(cfg)["corpus"]["n_series"] == 8
    (corpus / "humidity_000.csv").write_text("t,v\n0,2\n")
    with pytest.raises(DataError):
        run_study(cfg)
