"""Command-line interface: ``scoot {score,batch,meta,features}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace

from . import __version__
from .errors import ImageLoadError, ScootError
from .imageio import load_gray
from .measures import MEASURE_IDS, build_config, get_measure
from .meta import (
    LIGHT_THRESHOLD,
    META_MEASURES,
    _map,
    load_manifest,
    load_pairs,
)
from .style import EXTRACTORS, ScootConfig, psi


class CLIError(Exception):
    pass


def _measure_choice(value: str) -> str:
    if value not in MEASURE_IDS:
        raise argparse.ArgumentTypeError(
            f"unknown measure {value!r}; valid ids: {', '.join(MEASURE_IDS)}"
        )
    return value


def _positive_int(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return n


def _add_measure_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--measure", type=_measure_choice, default="scoot-ce",
                   help=f"measure id ({', '.join(MEASURE_IDS)})")
    p.add_argument("--levels", type=int, default=6, help="quantization levels (default 6)")
    p.add_argument("--grid", type=_positive_int, default=4, help="block grid size k (default 4)")
    p.add_argument("--stats", default=None,
                   help="GLCM statistics subset, e.g. 'ce' or 'h,c,e' (default: per measure)")
    p.add_argument("--no-quantize", action="store_true",
                   help="feed raw 256-level intensities to the GLCM")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scoot", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score one GT/synthesis pair")
    p.add_argument("gt")
    p.add_argument("syn")
    _add_measure_flags(p)

    p = sub.add_parser("batch", help="score every synthesis in a manifest against its GT")
    p.add_argument("--manifest", required=True)
    p.add_argument("--jobs", type=_positive_int, default=1)
    _add_measure_flags(p)

    p = sub.add_parser("meta", help="run a meta-measure")
    p.add_argument("meta_id", choices=sorted(META_MEASURES))
    p.add_argument("--manifest", help="dataset manifest (mm1-mm3)")
    p.add_argument("--pairs", help="ranked pair set (mm4)")
    p.add_argument("--threshold", type=int, default=LIGHT_THRESHOLD,
                   help="light-stroke threshold for mm3 (default 170)")
    p.add_argument("--jobs", type=_positive_int, default=1)
    _add_measure_flags(p)

    p = sub.add_parser("features", help="dump the averaged style feature vector of one image")
    p.add_argument("image")
    _add_measure_flags(p)
    return parser


def _config(args) -> ScootConfig:
    try:
        base = ScootConfig(n_levels=args.levels, grid_k=args.grid,
                           quantize_enabled=not args.no_quantize)
        return build_config(args.measure, base, args.stats)
    except ValueError as exc:
        raise CLIError(str(exc)) from None


def _measure(args):
    return get_measure(args.measure, _config(args), args.stats)


def _config_echo(args, measure) -> dict:
    echo = {"measure": measure.id, "params": measure.params}
    if getattr(args, "meta_id", None) == "mm3":
        echo["threshold"] = args.threshold
    return echo


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _score_records(measure, pairs, jobs):
    def one(pair):
        gt_path, syn_path = pair
        score, warnings = measure.evaluate(load_gray(gt_path), load_gray(syn_path))
        return {"gt": gt_path, "syn": syn_path, "score": score, "warnings": list(warnings)}

    return _map(one, pairs, jobs)


def cmd_score(args) -> str:
    measure = _measure(args)
    (rec,) = _score_records(measure, [(args.gt, args.syn)], 1)
    if args.format == "csv":
        return _dump_csv(["gt", "syn", "measure", "score"],
                         [[rec["gt"], rec["syn"], measure.id, rec["score"]]])
    doc = {"measure": measure.id, "gt": rec["gt"], "syn": rec["syn"], "score": rec["score"],
           "warnings": rec["warnings"], "config": _config_echo(args, measure),
           "version": __version__}
    return _dump_json(doc)


def cmd_batch(args) -> str:
    measure = _measure(args)
    ds = load_manifest(args.manifest)
    pairs = [(ds.gt[p], ds.synthesis(a, p)) for p in ds.photo_ids for a in ds.algorithm_ids]
    records = _score_records(measure, pairs, args.jobs)
    if args.format == "csv":
        return _dump_csv(["gt", "syn", "measure", "score"],
                         [[r["gt"], r["syn"], measure.id, r["score"]] for r in records])
    doc = {"measure": measure.id, "config": _config_echo(args, measure),
           "records": records, "version": __version__}
    return _dump_json(doc)


def cmd_meta(args) -> str:
    measure = _measure(args)
    run = META_MEASURES[args.meta_id]
    if args.meta_id == "mm4":
        if not args.pairs:
            raise CLIError("mm4 needs --pairs")
        result = run(load_pairs(args.pairs), measure, jobs=args.jobs)
    else:
        if not args.manifest:
            raise CLIError(f"{args.meta_id} needs --manifest")
        ds = load_manifest(args.manifest)
        if args.meta_id == "mm3":
            result = run(ds, measure, threshold=args.threshold, jobs=args.jobs)
        else:
            result = run(ds, measure, jobs=args.jobs)
    if args.format == "csv":
        rows = [[item["id"], item["value"]] for item in result.items]
        rows.append(["aggregate", result.aggregate])
        return _dump_csv(["id", "value"], rows)
    doc = result.to_dict()
    doc["config"] = _config_echo(args, measure)
    doc["version"] = __version__
    return _dump_json(doc)


def cmd_features(args) -> str:
    measure = _measure(args)
    if measure.id in ("ssim", "gmsd"):
        raise CLIError(f"measure {measure.id} has no style features")
    config = _config(args)
    extractor = EXTRACTORS[measure.params["extractor"]]
    vec = psi(load_gray(args.image), config, extractor)
    layout = vec.layout
    if args.format == "csv":
        return _dump_csv(["index", "block", "component", "value"],
                         [[i, i // layout.block_dim, i % layout.block_dim, float(v)]
                          for i, v in enumerate(vec.values)])
    doc = {
        "image": args.image,
        "measure": measure.id,
        "layout": {
            "extractor": layout.extractor,
            "grid_k": layout.grid_k,
            "block_dim": layout.block_dim,
            "length": layout.length,
            "levels": layout.levels,
            "statistics": list(layout.statistics),
            "directions": [[d.dx, d.dy] for d in layout.directions],
        },
        "values": [float(v) for v in vec.values],
        "warnings": list(vec.warnings),
        "config": _config_echo(args, measure),
        "version": __version__,
    }
    return _dump_json(doc)


COMMANDS = {"score": cmd_score, "batch": cmd_batch, "meta": cmd_meta, "features": cmd_features}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = COMMANDS[args.command](args)
    except (ScootError, CLIError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"scoot: error: {msg}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
