"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from . import cluster as clustering
from .classify import DEFAULT_GRIDS, Dataset, ModelSpec, grid_search, load_model, predict, save_model, train
from .errors import BadSpec, DataError
from .experiment import generate_synthetic_corpus, load_config, run_study
from .experiment.study import summary_lines
from .fileio import atomic_write, dump_json, features_to_csv, read_features_csv
from .iets import DIMS, downsample, embed, iets_vectors, recurrence, render_pgm, select_window
from .ingest import FormatSpec, RegexLabels, SidecarLabels, interpolate_gaps, load_corpus, parse_series, resample_hourly
from .metrics import entropy, evaluate, purity
from .parallel import default_jobs
from .similarity import build_signatures, cd_features
from .stats import df_matrix

log = logging.getLogger("bmsinfer")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _header(cmd: str, args: argparse.Namespace, seed=None) -> None:
    conf = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in ("func", "usage")}
    print(f"# bmsinfer {__version__} {cmd} seed={seed} config={json.dumps(conf, sort_keys=True, default=str)}",
          file=sys.stderr)


def _format(args) -> FormatSpec:
    return FormatSpec(args.timestamp_col, args.value_col, args.timestamp_kind)


def _label_rule(args):
    corpus = Path(args.corpus)
    if args.label_regex:
        return RegexLabels(args.label_regex)
    return SidecarLabels(corpus / args.sidecar)


def _load(args):
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise DataError(f"corpus directory {corpus} is not readable")
    return load_corpus(corpus, _label_rule(args), _format(args), jobs=args.jobs)


def cmd_ingest(args) -> int:
    _header("ingest", args)
    corpus = _load(args)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance_id", "label", "hour", "value"])
    for s in corpus.series:
        for h, v in enumerate(s.values):
            w.writerow([s.device_id, s.label_name, s.start_hour + h, repr(float(v))])
    atomic_write(args.out, buf.getvalue())
    print(f"ingested {len(corpus.series)} series, skipped {corpus.skip_count} of {corpus.n_files} files",
          file=sys.stderr)
    return EXIT_OK


def cmd_featurize(args) -> int:
    _header("featurize", args, args.seed)
    corpus = _load(args)
    series = corpus.series
    names = [s.label_name for s in series]
    ids = [s.device_id for s in series]
    if args.family == "df":
        X = df_matrix(series)
    elif args.family == "cd":
        df = df_matrix(series)
        y = np.array([s.label_id for s in series])
        sig = build_signatures(df, y, len(corpus.labels), args.signature_samples, args.seed)
        X = cd_features(df, sig)
    else:
        keep = [i for i, s in enumerate(series) if len(s) >= args.offset + 720]
        dropped = len(series) - len(keep)
        if dropped:
            log.warning("excluded %d series shorter than %d hours from IETS", dropped, args.offset + 720)
        if not keep:
            raise DataError("no series is long enough for IETS features")
        X = np.vstack([iets_vectors(series[i], (args.dim,), args.mode, args.tau, args.eps_quantile,
                                    args.offset)[args.dim] for i in keep])
        ids = [ids[i] for i in keep]
        names = [names[i] for i in keep]
    atomic_write(args.out, features_to_csv(ids, names, X))
    print(f"wrote {X.shape[0]} x {X.shape[1]} {args.family} features to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_encode(args) -> int:
    _header("encode", args)
    raw = parse_series(Path(args.input).read_bytes(), _format(args), device_id=Path(args.input).stem)
    series = interpolate_gaps(resample_hourly(raw))
    window = select_window(series, 720, args.offset)
    image = recurrence(embed(window, args.tau), args.mode, args.eps_quantile)
    matrix = downsample(image, args.dim) if args.dim else image.cells
    atomic_write(args.out, render_pgm(matrix))
    print(f"wrote {matrix.shape[0]}x{matrix.shape[1]} PGM to {args.out}", file=sys.stderr)
    return EXIT_OK


def _dataset_from_csv(path, label_names=None) -> Dataset:
    ids, labels, X = read_features_csv(path)
    names = label_names if label_names is not None else sorted(set(labels))
    lookup = {n: i for i, n in enumerate(names)}
    try:
        y = np.array([lookup[lab] for lab in labels], dtype=np.int64)
    except KeyError as exc:
        raise DataError(f"{path}: label {exc.args[0]!r} unknown to the model") from None
    return Dataset(X, y, len(names), list(names), ids=ids)


def cmd_cluster(args) -> int:
    _header("cluster", args, args.seed)
    data = _dataset_from_csv(args.features)
    X = data.X
    if not args.no_standardize:
        from .similarity import zscore_columns

        X = zscore_columns(X)
    k = args.k or data.n_classes
    if args.algorithm == "spectral":
        sigma = "median" if args.sigma == "median" else float(args.sigma)
        result = clustering.spectral(X, k, args.seed, sigma)
    else:
        result = clustering.ALGORITHMS[args.algorithm](X, k, args.seed)
    atomic_write(args.out, result.to_csv(data.ids))
    summary = {"algorithm": args.algorithm, "k": k, "purity": purity(result.assignments, data.y),
               "entropy": entropy(result.assignments, data.y), "objective": result.objective}
    print(json.dumps(summary))
    return EXIT_OK


def _parse_value(text: str):
    low = text.lower()
    if low == "none":
        return None
    if low in ("true", "false"):
        return low == "true"
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def cmd_train(args) -> int:
    _header("train", args, args.seed)
    data = _dataset_from_csv(args.features)
    params = {}
    for item in args.param or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        params[key] = _parse_value(val)
    if args.grid_search:
        spec = grid_search(args.algorithm, DEFAULT_GRIDS[args.algorithm], data, args.folds, args.seed).best
    else:
        spec = ModelSpec(args.algorithm, params, args.seed)
    model = train(spec, data)
    atomic_write(args.out, save_model(model, data.label_names))
    print(f"trained {args.algorithm} with {json.dumps(model.params, sort_keys=True)}", file=sys.stderr)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    _header("evaluate", args)
    doc = json.loads(Path(args.model).read_text())
    model = load_model(json.dumps(doc))
    data = _dataset_from_csv(args.features, doc.get("label_names"))
    report = evaluate(data.y, predict(model, data.X), model.n_classes)
    atomic_write(args.out, dump_json(report.to_dict()))
    if args.per_class:
        atomic_write(args.per_class, report.per_class_csv(data.label_names))
    print(f"accuracy {report.accuracy:.4f}  macro-F {report.macro_f:.4f}  micro-F {report.micro_f:.4f}")
    return EXIT_OK


def cmd_study(args) -> int:
    path = Path(args.config)
    if not path.is_file():
        sys.stderr.write(args.usage)
        raise UsageError(f"config file {path} not found")
    cfg = load_config(path)
    if args.out:
        cfg.output = str(Path(args.out).resolve())
    if args.jobs:
        cfg.jobs = args.jobs
    if not cfg.families:
        raise UsageError("empty study: the config selects no feature families")
    print(f"# bmsinfer {__version__} study seed={cfg.seed} config={json.dumps(asdict(cfg), sort_keys=True)}",
          file=sys.stderr)
    report = run_study(cfg)
    for line in summary_lines(report):
        print(line)
    print(f"report written to {cfg.output}", file=sys.stderr)
    return EXIT_OK


def cmd_synth(args) -> int:
    _header("synth", args, args.seed)
    if args.length < 720:
        raise UsageError(f"--length must be at least 720 hours, got {args.length}")
    out = Path(args.out)
    try:
        generate_synthetic_corpus(out, args.types, args.files, args.length, args.seed, args.corrupt)
    except OSError as exc:
        raise DataError(f"cannot write corpus to {out}: {exc}") from exc
    print(f"wrote {args.types * args.files + args.corrupt} files to {out}", file=sys.stderr)
    return EXIT_OK


def _corpus_flags(p) -> None:
    p.add_argument("--corpus", required=True, help="directory of per-device CSV files")
    p.add_argument("--sidecar", default="labels.csv", help="filename,label CSV inside the corpus")
    p.add_argument("--label-regex", help="take labels from this regex's first group on file names instead")
    _format_flags(p)


def _format_flags(p) -> None:
    p.add_argument("--timestamp-col", default="t")
    p.add_argument("--value-col", default="v")
    p.add_argument("--timestamp-kind", choices=["auto", "epoch", "iso"], default="auto")


def _iets_flags(p, dim_default) -> None:
    p.add_argument("--dim", type=int, choices=DIMS, default=dim_default)
    p.add_argument("--mode", choices=["gray", "binary"], default="gray")
    p.add_argument("--tau", type=int, default=1)
    p.add_argument("--eps-quantile", type=float, default=0.1)
    p.add_argument("--offset", type=int, default=0, help="first hour of the 720-hour window")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bmsinfer", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--jobs", type=int, default=default_jobs(), help="worker processes (default: cores)")
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker processes (default: cores)")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    p = sub.add_parser("ingest", help="regularize a corpus to hourly series (long CSV)")
    _corpus_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("featurize", help="write a feature CSV (df, cd or iets)")
    _corpus_flags(p)
    p.add_argument("--family", choices=["df", "cd", "iets"], required=True)
    _iets_flags(p, 48)
    p.add_argument("--signature-samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("encode", help="render one series' recurrence image as PGM")
    p.add_argument("--input", required=True)
    _format_flags(p)
    _iets_flags(p, None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("cluster", help="cluster a feature CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--algorithm", choices=sorted(clustering.ALGORITHMS), default="spectral")
    p.add_argument("--k", type=int, default=0, help="cluster count (default: number of labels)")
    p.add_argument("--sigma", default="median")
    p.add_argument("--no-standardize", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("train", help="fit a classifier on a feature CSV")
    p.add_argument("--features", required=True)
    p.add_argument("--algorithm", choices=sorted(DEFAULT_GRIDS), required=True)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--grid-search", action="store_true", help="tune over the default grid by CV")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a saved model on a feature CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--per-class")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("study", help="run the configured studies")
    p.add_argument("config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_study, usage=p.format_usage())

    p = sub.add_parser("synth", help="write a synthetic corpus")
    p.add_argument("--types", type=int, default=5)
    p.add_argument("--files", type=int, default=40)
    p.add_argument("--length", type=int, default=960)
    p.add_argument("--corrupt", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except BadSpec as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
