"""``swdetect`` command line.

Every subcommand exits 0 on success. Failures print one line,
``error: <Code>: <message>``, to stderr and exit non-zero. Set
``SWDETECT_LOG`` (DEBUG, INFO, ...) for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import classifier, features, harness, signal, synthgen
from .errors import EmptyFile, SwdError

EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_BELOW_THRESHOLD = 3

SCATTER_PAIRS = (("sigma", "variance"), ("sigma", "median"), ("variance", "median"))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_feature_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("feature extraction")
    g.add_argument("--sample-rate", type=float, default=256.0, help="expected sampling rate in Hz")
    g.add_argument("--window-s", type=float, default=2.0, help="window length in seconds")
    g.add_argument("--overlap-s", type=float, default=1.0, help="window overlap in seconds")
    g.add_argument("--f-min", type=float, default=1.0, help="lowest pseudo-frequency in Hz")
    g.add_argument("--f-max", type=float, default=3.0, help="highest pseudo-frequency in Hz")
    g.add_argument("--n-scales", type=int, default=21, help="number of log-spaced wavelet scales")


def _feature_config(args) -> harness.FeatureConfig:
    if not 0 <= args.overlap_s < args.window_s:
        raise UsageError("--overlap-s must satisfy 0 <= overlap < window")
    if not 0 < args.f_min < args.f_max < args.sample_rate / 2:
        raise UsageError("need 0 < --f-min < --f-max < sample_rate/2")
    if args.n_scales < 1:
        raise UsageError("--n-scales must be positive")
    return harness.FeatureConfig(args.sample_rate, args.window_s, args.overlap_s, args.f_min, args.f_max, args.n_scales)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="swdetect", description="Spike-and-wave discharge detection in EEG.", formatter_class=fmt)
    parser.add_argument("--config", type=Path, default=None, help="JSON file of flag defaults; explicit flags win")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a synthetic labelled dataset", formatter_class=fmt)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--n-swd", type=_positive_int, default=106, help="number of SWD recordings")
    p.add_argument("--n-bg", type=_positive_int, default=106, help="number of background recordings")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--duration-s", type=float, default=2.0, help="length of each recording in seconds")
    p.add_argument("--sample-rate", type=float, default=256.0, help="sampling rate in Hz")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("featurize", help="extract [sigma, variance, median] per window", formatter_class=fmt)
    p.add_argument("inputs", nargs="+", type=Path, help="recording CSVs or dataset manifest.json files")
    p.add_argument("--annotations", type=Path, default=None, help="annotation JSON (single recording input only)")
    p.add_argument("--out", type=Path, required=True, help="feature CSV to write")
    _add_feature_flags(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="fit a k-NN model from a labelled feature CSV", formatter_class=fmt)
    p.add_argument("--features", type=Path, required=True, help="labelled feature CSV")
    p.add_argument("--out", type=Path, required=True, help="model JSON to write")
    p.add_argument("--k", type=_positive_int, default=10, help="number of neighbours")
    p.add_argument("--scaling", choices=("zscore", "raw"), default="zscore", help="feature scaling mode")
    _add_feature_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("augment", help="add a patient's SWD exemplars to a model", formatter_class=fmt)
    p.add_argument("--model", type=Path, required=True, help="model JSON")
    p.add_argument("--features", type=Path, required=True, help="feature CSV; rows labelled SWD are added")
    p.add_argument("--out", type=Path, required=True, help="augmented model JSON to write")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("predict", help="label every window of a recording", formatter_class=fmt)
    p.add_argument("--model", type=Path, required=True, help="model JSON")
    p.add_argument("--recording", type=Path, required=True, help="recording CSV")
    p.add_argument("--out", type=Path, default=None, help="label stream CSV (default: stdout)")
    p.add_argument("--workers", type=_positive_int, default=1, help="channels processed concurrently")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a model on a labelled feature CSV", formatter_class=fmt)
    p.add_argument("--model", type=Path, required=True, help="model JSON")
    p.add_argument("--features", type=Path, required=True, help="labelled test feature CSV")
    p.add_argument("--out", type=Path, default=None, help="report JSON (default: stdout)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("scatter", help="pairwise scatter data of a feature CSV", formatter_class=fmt)
    p.add_argument("--features", type=Path, required=True, help="labelled feature CSV")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--svg", action="store_true", help="also draw an SVG per pair")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("end-to-end", help="synthetic train/test reproduction; prints the report", formatter_class=fmt)
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--threshold", type=float, default=0.95, help="exit 0 only if accuracy reaches this")
    p.add_argument("--k", type=_positive_int, default=10, help="number of neighbours")
    p.add_argument("--scaling", choices=("zscore", "raw"), default="zscore", help="feature scaling mode")
    p.add_argument("--n-train", type=_positive_int, nargs=2, default=(106, 106), metavar=("SWD", "BG"), help="training counts")
    p.add_argument("--n-test", type=_positive_int, nargs=2, default=(35, 34), metavar=("SWD", "BG"), help="test counts")
    p.set_defaults(func=cmd_end_to_end)
    return parser


# subcommands


def cmd_generate(args) -> int:
    spec = synthgen.SynthSpec(sample_rate_hz=args.sample_rate, duration_s=args.duration_s)
    dataset = synthgen.gen_dataset(args.n_swd, args.n_bg, args.seed, spec)
    manifest = synthgen.write_dataset(dataset, args.out)
    print(manifest)
    return 0


def _manifest_items(path: Path):
    entries = json.loads(path.read_text())["recordings"]
    for e in entries:
        yield path.parent / e["recording"], path.parent / e["annotations"]


def _inputs(args):
    if args.annotations is not None and len(args.inputs) != 1:
        raise UsageError("--annotations requires exactly one recording input")
    for path in args.inputs:
        if path.suffix == ".json":
            yield from _manifest_items(path)
        else:
            sidecar = path.with_suffix(".json")
            yield path, args.annotations or (sidecar if sidecar.exists() else None)


def cmd_featurize(args) -> int:
    config = _feature_config(args)
    vectors = []
    for rec_path, ann_path in _inputs(args):
        rec = signal.load_recording_csv(rec_path)
        ann = signal.load_annotations_json(ann_path, rec) if ann_path else None
        vectors.extend(harness.featurize_recording(rec, ann, config))
    features.save_features_csv(vectors, args.out)
    return 0


def _load_features(path: Path, require_labels: bool = True):
    vectors = features.load_features_csv(path, require_labels)
    if not vectors:
        raise EmptyFile(f"{path}: no feature rows")
    return vectors


def cmd_train(args) -> int:
    model = harness.train(_load_features(args.features), args.k, args.scaling, _feature_config(args))
    classifier.save_model(model, args.out)
    return 0


def cmd_augment(args) -> int:
    model = classifier.load_model(args.model)
    swd = [v for v in _load_features(args.features) if v.label is signal.ClassLabel.SWD]
    classifier.save_model(harness.augment_patient(model, swd), args.out)
    return 0


def _open_out(path):
    return path.open("w", newline="") if path else None


def cmd_predict(args) -> int:
    model = classifier.load_model(args.model)
    rec = signal.load_recording_csv(args.recording)
    results = harness.run_pipeline(rec, model, workers=args.workers)
    fh = _open_out(args.out)
    try:
        writer = csv.writer(fh or sys.stdout, lineterminator="\n")
        writer.writerow(["channel", "start_index", "start_s", "label", "votes_non_swd", "votes_swd", "status"])
        for r in results:
            if r.label is None:
                writer.writerow([r.channel, r.start_index, repr(r.start_s), "", "", "", "skipped"])
            else:
                writer.writerow([r.channel, r.start_index, repr(r.start_s), int(r.label), r.votes[0], r.votes[1], "ok"])
    finally:
        if fh:
            fh.close()
    return 0


def cmd_evaluate(args) -> int:
    model = classifier.load_model(args.model)
    report = harness.evaluate(model, _load_features(args.features))
    text = report.dumps() + "\n"
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _svg(points, xname: str, yname: str) -> str:
    width, height, pad = 480, 360, 50
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    sx = (width - 2 * pad) / ((x1 - x0) or 1.0)
    sy = (height - 2 * pad) / ((y1 - y0) or 1.0)
    colors = {0: "#1f4fd1", 1: "#d11f1f"}
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" fill="none" stroke="#444"/>',
        f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" font-size="13">{xname}</text>',
        f'<text x="14" y="{height / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 14 {height / 2})">{yname}</text>',
    ]
    for x, y, c in points:
        cx = pad + (x - x0) * sx
        cy = height - pad - (y - y0) * sy
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="2.5" fill="{colors[c]}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_scatter(args) -> int:
    vectors = _load_features(args.features)
    args.out.mkdir(parents=True, exist_ok=True)
    columns = dict(zip(features.FEATURE_NAMES, range(3)))
    for xname, yname in SCATTER_PAIRS:
        pts = [(v.values()[columns[xname]], v.values()[columns[yname]], int(v.label)) for v in vectors]
        with (args.out / f"{xname}_vs_{yname}.csv").open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "y", "class"])
            for x, y, c in pts:
                writer.writerow([repr(x), repr(y), c])
        if args.svg:
            (args.out / f"{xname}_vs_{yname}.svg").write_text(_svg(pts, xname, yname))
    return 0


def cmd_end_to_end(args) -> int:
    if not 0 <= args.threshold <= 1:
        raise UsageError("--threshold must lie in [0, 1]")
    report = harness.end_to_end(args.seed, tuple(args.n_train), tuple(args.n_test), args.k, args.scaling)
    sys.stdout.write(report.dumps() + "\n")
    return 0 if report.accuracy >= args.threshold else EXIT_BELOW_THRESHOLD


# entry point


def _apply_config(parser: argparse.ArgumentParser, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path, default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config is None:
        return
    try:
        values = json.loads(known.config.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {known.config}: {exc}") from None
    if not isinstance(values, dict):
        raise UsageError("config file must hold a JSON object")
    values = {key.replace("-", "_"): v for key, v in values.items()}
    for action in parser._subparsers._group_actions:
        for sub in action.choices.values():
            dests = {a.dest for a in sub._actions}
            sub.set_defaults(**{k: v for k, v in values.items() if k in dests})


def _fail(code: str, message: str, status: int) -> int:
    message = " ".join(str(message).split())
    print(f"error: {code}: {message}", file=sys.stderr)
    return status


def main(argv=None) -> int:
    level = os.environ.get("SWDETECT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _fail("UsageError", exc, EXIT_USAGE)
    except SwdError as exc:
        return _fail(exc.code, exc, EXIT_FAILURE)
    except (ValueError, KeyError) as exc:
        return _fail(type(exc).__name__, exc, EXIT_FAILURE)
    except OSError as exc:
        return _fail("IOError", f"{exc.strerror or exc}: {exc.filename or ''}", EXIT_FAILURE)


if __name__ == "__main__":
    sys.exit(main())
