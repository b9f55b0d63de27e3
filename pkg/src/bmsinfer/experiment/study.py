"""End-to-end studies: feature-family comparison, train-size sweep, clustering."""

from __future__ import annotations

import csv
import io
import itertools
import logging
from dataclasses import dataclass
from functools import partial
from pathlib import Path

import numpy as np

from .. import cluster as clustering
from ..classify import Dataset, ModelSpec, balance_downsample, expand_grid, grid_search, predict, split, train
from ..errors import BadSpec
from ..fileio import atomic_write, dump_json
from ..iets import WINDOW, embed, iets_vectors, recurrence, render_pgm, select_window
from ..ingest import Corpus, FormatSpec, RegexLabels, SidecarLabels, load_corpus
from ..metrics import entropy, evaluate, purity
from ..parallel import pmap
from ..rng import derive_seed
from ..similarity import build_signatures, cd_features, label_polar_table, polar_table_csv, zscore_columns
from ..stats import df_matrix
from .config import RunConfig
from .manifest import verify_manifest
from .significance import significance_mark
from .synth import generate_synthetic_corpus

log = logging.getLogger(__name__)

REPORT_FORMAT = "bmsinfer-study"


@dataclass
class FeatureBank:
    """Per-corpus features computed once and shared by every study cell."""

    ids: list[str]
    y: np.ndarray
    label_names: list[str]
    df: np.ndarray
    iets_index: np.ndarray  # rows of the corpus eligible for IETS
    iets: dict[int, np.ndarray]

    @property
    def n_classes(self) -> int:
        return len(self.label_names)


def _label_rule(config: RunConfig, corpus_dir: Path):
    kind, _, arg = config.label_rule.partition(":")
    if kind == "sidecar":
        return SidecarLabels(corpus_dir / (arg or "labels.csv"))
    if kind == "regex":
        return RegexLabels(arg)
    raise BadSpec(f"label_rule must be 'sidecar:<file>' or 'regex:<pattern>', got {config.label_rule!r}")


def prepare_corpus(config: RunConfig) -> Corpus:
    if config.corpus:
        corpus_dir = Path(config.corpus)
    else:
        corpus_dir = Path(config.output) / "corpus"
        generate_synthetic_corpus(corpus_dir, config.synthetic_types, config.synthetic_files,
                                  config.synthetic_length, config.synthetic_seed)
    if config.manifest:
        n = verify_manifest(corpus_dir, config.manifest)
        log.info("manifest verified for %d files", n)
    fmt = FormatSpec(config.timestamp_col, config.value_col, config.timestamp_kind)
    return load_corpus(corpus_dir, _label_rule(config, corpus_dir), fmt, jobs=config.jobs)


def _encode(values, dims, mode, tau, eps_quantile, offset):
    return iets_vectors(values, dims, mode, tau, eps_quantile, offset)


def iets_dims(families) -> list[int]:
    return sorted({int(f[4:]) for f in families if f.startswith("iets")})


def build_feature_bank(corpus: Corpus, config: RunConfig) -> FeatureBank:
    series = corpus.series
    df = df_matrix(series, config.stationarity_stable, config.stationarity_unstable)
    dims = iets_dims(config.families)
    need = config.window_offset + WINDOW
    eligible = np.array([i for i, s in enumerate(series) if len(s) >= need], dtype=np.int64)
    log.info("IETS: %d of %d series have >= %d hourly points", eligible.size, len(series), need)
    iets = {}
    if dims and eligible.size:
        enc = partial(_encode, dims=dims, mode=config.iets_mode, tau=config.tau,
                      eps_quantile=config.eps_quantile, offset=config.window_offset)
        vecs = pmap(enc, [series[i].values for i in eligible], config.jobs)
        iets = {d: np.vstack([v[d] for v in vecs]) for d in dims}
    return FeatureBank(
        ids=[s.device_id for s in series],
        y=np.array([s.label_id for s in series], dtype=np.int64),
        label_names=list(corpus.labels.names),
        df=df,
        iets_index=eligible,
        iets=iets,
    )


def family_dataset(bank: FeatureBank, family: str) -> Dataset:
    if family in ("df", "cd"):
        return Dataset(bank.df, bank.y, bank.n_classes, bank.label_names, family, bank.ids)
    d = int(family[4:])
    idx = bank.iets_index
    return Dataset(bank.iets[d], bank.y[idx], bank.n_classes, bank.label_names, family, [bank.ids[i] for i in idx])


def _group(family: str) -> str:
    # IETS dims share balanced draws and splits, as do DF and CD
    return "iets" if family.startswith("iets") else "all"


def _to_cd(train_set: Dataset, test_set: Dataset, config: RunConfig, seed: int):
    Xtr, Xte = train_set.X, test_set.X
    if config.cd_standardize:
        Xtr, Xte = zscore_columns(Xtr), zscore_columns(Xte, reference=train_set.X)
    sig = build_signatures(Xtr, train_set.y, train_set.n_classes, config.signature_samples, seed)
    tr = Dataset(cd_features(Xtr, sig), train_set.y, train_set.n_classes, train_set.label_names, "cd", train_set.ids)
    te = Dataset(cd_features(Xte, sig), test_set.y, test_set.n_classes, test_set.label_names, "cd", test_set.ids)
    return tr, te


def run_cell(cell, bank: FeatureBank, config: RunConfig) -> dict:
    """One (family, algorithm, fraction, repeat) run: balance, split, tune, fit, score."""
    family, algorithm, fraction, rep = cell
    seed = config.seed
    grp = _group(family)
    data = family_dataset(bank, family)
    balanced = balance_downsample(data, derive_seed(seed, "balance", grp, rep))
    tr, te = split(balanced, fraction, derive_seed(seed, "split", grp, rep, fraction))
    if family == "cd":
        tr, te = _to_cd(tr, te, config, derive_seed(seed, "signatures", rep, fraction))
    grid = config.grids.get(algorithm) or {}
    folds = min(config.folds, int(tr.class_counts()[tr.class_counts() > 0].min()))
    cv_seed = derive_seed(seed, "cv", family, algorithm, fraction, rep)
    if folds >= 2 and grid:
        spec = grid_search(algorithm, grid, tr, folds, cv_seed).best
    else:
        first = expand_grid(grid)[0] if grid else {}
        spec = ModelSpec(algorithm, first, derive_seed(cv_seed, "model"))
    model = train(spec, tr)
    rep_metrics = evaluate(te.y, predict(model, te.X), te.n_classes)
    return {
        "family": family,
        "algorithm": algorithm,
        "fraction": fraction,
        "repeat": rep,
        "n_train": len(tr),
        "n_test": len(te),
        "folds": folds,
        "params": spec.params,
        "accuracy": rep_metrics.accuracy,
        "macro_f": rep_metrics.macro_f,
        "micro_f": rep_metrics.micro_f,
    }


def _mean_std(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std(ddof=1)) if arr.size > 1 else 0.0


def summarize_runs(runs: list[dict], config: RunConfig) -> dict:
    cells = []
    for (fam, algo, frac), grp in itertools.groupby(runs, key=lambda r: (r["family"], r["algorithm"], r["fraction"])):
        grp = list(grp)
        acc_m, acc_s = _mean_std([g["accuracy"] for g in grp])
        mf_m, mf_s = _mean_std([g["macro_f"] for g in grp])
        cells.append({
            "family": fam, "algorithm": algo, "fraction": frac, "repeats": len(grp),
            "accuracy": [g["accuracy"] for g in grp],
            "macro_f": [g["macro_f"] for g in grp],
            "mean_accuracy": acc_m, "std_accuracy": acc_s,
            "mean_macro_f": mf_m, "std_macro_f": mf_s,
        })

    table4 = []
    for frac in config.fractions:
        best_per_family = []
        for fam in config.families:
            options = [c for c in cells if c["family"] == fam and c["fraction"] == frac]
            if options:
                best_per_family.append(max(options, key=lambda c: c["mean_accuracy"]))
        ranked = sorted(best_per_family, key=lambda c: -c["mean_accuracy"])
        significant = False
        if len(ranked) >= 2 and config.repeats >= 2:
            significant = significance_mark(ranked[0]["accuracy"], ranked[1]["accuracy"])
        for c in best_per_family:
            table4.append({
                "family": c["family"], "fraction": frac, "algorithm": c["algorithm"],
                "mean_accuracy": c["mean_accuracy"], "std_accuracy": c["std_accuracy"],
                "best": c is ranked[0], "second": len(ranked) > 1 and c is ranked[1],
                "significant": significant and c is ranked[0],
            })

    table3 = [{"algorithm": c["algorithm"], "family": c["family"], "fraction": c["fraction"],
               "mean_macro_f": c["mean_macro_f"], "std_macro_f": c["std_macro_f"]} for c in cells]
    return {"cells": cells, "table3": table3, "table4": table4}


def run_feature_study(config: RunConfig, bank: FeatureBank) -> dict:
    """Repeat balance/split/tune/fit/evaluate for every requested cell and aggregate."""
    config.validate()
    if any(f.startswith("iets") for f in config.families) and bank.iets_index.size == 0:
        raise BadSpec("no series is long enough for IETS features")
    order = list(itertools.product(config.families, config.algorithms, config.fractions, range(config.repeats)))
    runs = pmap(partial(run_cell, bank=bank, config=config), order, config.jobs)
    out = summarize_runs(runs, config)
    out["runs"] = runs
    return out


def cluster_features(X, y, k: int, seed: int, algorithms=("spectral", "kmedoids", "kmeans"),
                     standardize: bool = True, sigma="median") -> list[dict]:
    """Purity and entropy of each clustering algorithm against the labels ``y``."""
    X = zscore_columns(X) if standardize else np.asarray(X, dtype=float)
    rows = []
    for algo in algorithms:
        s = derive_seed(seed, "cluster", algo)
        if algo == "spectral":
            result = clustering.spectral(X, k, s, sigma)
        elif algo in clustering.ALGORITHMS:
            result = clustering.ALGORITHMS[algo](X, k, s)
        else:
            raise BadSpec(f"unknown clustering algorithm {algo!r}")
        rows.append({
            "algorithm": algo, "k": k,
            "purity": purity(result.assignments, y),
            "entropy": entropy(result.assignments, y),
            "objective": result.objective,
        })
    return rows


def run_cluster_study(config: RunConfig, bank: FeatureBank) -> dict:
    k = config.cluster_k or bank.n_classes
    sigma = config.spectral_sigma
    sigma = sigma if sigma == "median" else float(sigma)
    rows = cluster_features(bank.df, bank.y, k, config.seed, config.cluster_algorithms,
                            config.cluster_standardize, sigma)
    return {"k": k, "n": int(bank.y.size), "rows": rows}


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(r[h]) if isinstance(r[h], float) else r[h] for h in header])
    return buf.getvalue()


def run_study(config: RunConfig) -> dict:
    """Run every configured study and write the report directory."""
    config.validate()
    if not config.families and not config.cluster:
        raise BadSpec("empty study: no feature families and clustering disabled")
    out = Path(config.output)
    corpus = prepare_corpus(config)
    bank = build_feature_bank(corpus, config)
    counts = np.bincount(bank.y, minlength=bank.n_classes)
    report = {
        "format": REPORT_FORMAT,
        "version": 1,
        "seed": config.seed,
        "config": config.to_dict(),
        "corpus": {
            "n_files": corpus.n_files,
            "n_series": len(corpus.series),
            "skipped": [list(s) for s in corpus.skipped],
            "skipped_rows": corpus.skipped_rows,
            "labels": bank.label_names,
            "class_counts": counts.tolist(),
            "n_iets_eligible": int(bank.iets_index.size),
            "iets_class_counts": np.bincount(bank.y[bank.iets_index], minlength=bank.n_classes).tolist(),
        },
    }
    if config.families:
        report["feature_study"] = run_feature_study(config, bank)
    if config.cluster:
        report["cluster_study"] = run_cluster_study(config, bank)

    sig = build_signatures(bank.df, bank.y, bank.n_classes, config.signature_samples, derive_seed(config.seed, "polar"))
    polar = label_polar_table(sig.signatures, bank.label_names) if bank.n_classes >= 2 else []

    atomic_write(out / "report.json", dump_json(report))
    if "feature_study" in report:
        fs = report["feature_study"]
        atomic_write(out / "runs.csv", _csv(["family", "algorithm", "fraction", "repeat", "n_train", "n_test",
                                             "accuracy", "macro_f", "micro_f"], fs["runs"]))
        atomic_write(out / "table3_macro_f.csv", _csv(["algorithm", "family", "fraction", "mean_macro_f",
                                                       "std_macro_f"], fs["table3"]))
        atomic_write(out / "table4_accuracy.csv", _csv(["family", "fraction", "algorithm", "mean_accuracy",
                                                        "std_accuracy", "best", "second", "significant"], fs["table4"]))
    if "cluster_study" in report:
        atomic_write(out / "table2_clustering.csv", _csv(["algorithm", "k", "purity", "entropy"],
                                                         report["cluster_study"]["rows"]))
    if polar:
        atomic_write(out / "polar.csv", polar_table_csv(polar))
    _write_pgms(out / "pgm", corpus, config)
    return report


def _write_pgms(directory: Path, corpus: Corpus, config: RunConfig) -> None:
    if config.pgm_samples <= 0:
        return
    written = {}
    for s in corpus.series:
        if written.get(s.label_id, 0) >= config.pgm_samples or len(s) < config.window_offset + WINDOW:
            continue
        window = select_window(s, WINDOW, config.window_offset)
        img = recurrence(embed(window, config.tau), config.iets_mode, config.eps_quantile)
        atomic_write(directory / f"{s.label_name}_{s.device_id}.pgm", render_pgm(img))
        written[s.label_id] = written.get(s.label_id, 0) + 1


def summary_lines(report: dict) -> list[str]:
    lines = []
    fs = report.get("feature_study")
    if fs:
        lines.append(f"{'family':<8} {'frac':>5} {'algorithm':<9} {'accuracy':>15}  mark")
        for r in fs["table4"]:
            mark = "*" if r["significant"] else ("best" if r["best"] else ("2nd" if r["second"] else ""))
            lines.append(f"{r['family']:<8} {r['fraction']:>5.2f} {r['algorithm']:<9} "
                         f"{r['mean_accuracy']:>7.3f} +/- {r['std_accuracy']:.3f}  {mark}")
    cs = report.get("cluster_study")
    if cs:
        lines.append(f"{'clustering':<10} {'purity':>7} {'entropy':>8}   (k={cs['k']})")
        for r in cs["rows"]:
            lines.append(f"{r['algorithm']:<10} {r['purity']:>7.3f} {r['entropy']:>8.3f}")
    return lines
