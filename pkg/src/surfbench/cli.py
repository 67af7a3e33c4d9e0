"""Batch command-line front end.

Subcommands: build-code, build-lut, compare, merge-stats, report,
estimate, threshold.  Every command writes a JSON run manifest next to
its primary output (``<out>.manifest.json``) listing the arguments and
the SHA-256 digest of each written file; identical arguments and seeds
reproduce byte-identical outputs, so manifest digests are stable.

Exit codes: 0 success, 1 usage error, 2 I/O or file-format error,
3 internal assertion failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from .bposd import BposdDecoder
from .code_model import build_code, code_to_dict
from .decoder_api import DecoderConfig
from .feasibility import (
    LUMI_CORES,
    extrapolate_multicore,
    feasibility_report,
    measure_rates,
)
from .harness import (
    STATS_COLUMNS,
    failure_ratio,
    is_full_exhaustive,
    merge_stats,
    read_stats_csv,
    run_exhaustive,
    run_sampled,
    stats_to_dict,
    venn_counts,
    write_stats_csv,
)
from .lut import LutError, build_lut, save_lut
from .mwpm import MwpmDecoder
from .svgplot import render_chart
from .threshold import DecoderParityCache, find_crossing, sweep


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we map to 1
        raise UsageError(message)


def _utc_now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(command: str, argv: list[str], out_path: str,
                    outputs: list[str], started: str, extra: dict) -> str:
    manifest = {
        "format": "run-manifest/1",
        "command": command,
        "argv": argv,
        "started_at": started,
        "finished_at": _utc_now(),
        **extra,
        "outputs": [
            {
                "path": os.path.basename(p),
                "sha256": _sha256(p),
                "bytes": os.path.getsize(p),
            }
            for p in outputs
        ],
    }
    path = out_path + ".manifest.json"
    _write_json(path, manifest)
    return path


def _decoder_config(args) -> DecoderConfig:
    try:
        return DecoderConfig(
            error_probability=args.p,
            bp_max_iterations=args.bp_iters,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _build_code_checked(distance: int):
    try:
        return build_code(distance)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_range(text: str, num_errors: int) -> tuple[int, int]:
    try:
        lo_text, hi_text = text.split(":", 1)
        lo, hi = int(lo_text, 0), int(hi_text, 0)
    except ValueError as exc:
        raise UsageError(f"bad --range {text!r}; expected LO:HI") from exc
    if not (0 <= lo < hi <= num_errors):
        raise UsageError(
            f"range [{lo}, {hi}) outside [0, {num_errors})"
        )
    return lo, hi


def cmd_build_code(args, argv):
    started = _utc_now()
    code = _build_code_checked(args.distance)
    _write_json(args.out, code_to_dict(code))
    _write_manifest("build-code", argv, args.out, [args.out], started,
                    {"distance": args.distance})


def cmd_build_lut(args, argv):
    started = _utc_now()
    code = _build_code_checked(args.distance)
    table = build_lut(code)
    save_lut(table, args.out)
    _write_manifest("build-lut", argv, args.out, [args.out], started, {
        "distance": args.distance,
        "entries": table.num_entries,
    })


def cmd_compare(args, argv):
    started = _utc_now()
    code = _build_code_checked(args.distance)
    config = _decoder_config(args)
    if args.mode == "exhaustive":
        if args.samples is not None:
            raise UsageError("--samples applies to --mode sample only")
        if args.range is None:
            if code.num_data > 30:
                raise UsageError(
                    f"distance {args.distance} has 2**{code.num_data} errors; "
                    "pass an explicit --range LO:HI"
                )
            lo, hi = 0, code.num_errors
        else:
            lo, hi = _parse_range(args.range, code.num_errors)
        stats = run_exhaustive(code, lo=lo, hi=hi, config=config,
                               workers=args.workers,
                               sample_cap=args.fail_sample_cap)
    else:
        if args.samples is None:
            raise UsageError("--mode sample requires --samples")
        if args.range is not None:
            raise UsageError("--range applies to --mode exhaustive only")
        stats = run_sampled(code, num_samples=args.samples, seed=args.seed,
                            config=config, workers=args.workers,
                            sample_cap=args.fail_sample_cap,
                            fixed_weight=args.weight)
    write_stats_csv(stats, args.out)
    _write_manifest("compare", argv, args.out, [args.out], started, {
        "distance": args.distance,
        "stats": stats_to_dict(stats),
        "seed": args.seed,
        "workers": args.workers,
    })


def cmd_merge_stats(args, argv):
    started = _utc_now()
    parts = []
    for path in args.inputs:
        try:
            parts.append(read_stats_csv(path, mode=args.mode))
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    try:
        merged = merge_stats(*parts)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    write_stats_csv(merged, args.out)
    _write_manifest("merge-stats", argv, args.out, [args.out], started, {
        "inputs": [
            {"path": p, "sha256": _sha256(p)} for p in args.inputs
        ],
        "stats": stats_to_dict(merged),
    })


def _read_stats_for_report(args):
    path = args.stats
    mode = None
    manifest_path = args.manifest or path + ".manifest.json"
    if os.path.exists(manifest_path):
        try:
            with open(manifest_path) as fh:
                mode = json.load(fh).get("stats", {}).get("mode")
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"{manifest_path}: {exc}") from exc
    try:
        with open(path, newline="") as fh:
            non_header_rows = sum(1 for _ in fh) - 1
        if non_header_rows <= 0:
            return None
        return read_stats_csv(path, mode=mode)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_report(args, argv):
    started = _utc_now()
    stats = _read_stats_for_report(args)
    outputs = []
    if args.venn:
        counts = venn_counts(stats) if stats is not None else {
            "mwpm_only": 0, "bposd_only": 0, "both": 0,
        }
        _write_json(args.venn, counts)
        outputs.append(args.venn)
    if args.hist:
        if stats is not None:
            weights = list(range(stats.totals.size))
            series = [
                ("mwpm only", weights, stats.mwpm_only_fail.tolist()),
                ("bposd only", weights, stats.bposd_only_fail.tolist()),
                ("both", weights, stats.both_fail.tolist()),
            ]
            rows = zip(weights, stats.mwpm_only_fail.tolist(),
                       stats.bposd_only_fail.tolist(), stats.both_fail.tolist())
        else:
            series, rows = [], []
        svg = render_chart(
            series, title="Exclusive decoder failures by error weight",
            xlabel="error weight", ylabel="failing errors", kind="bars",
            log_y=True, data_header="weight,mwpm_only,bposd_only,both",
            data_rows=rows,
        )
        with open(args.hist, "w") as fh:
            fh.write(svg)
        outputs.append(args.hist)
    if args.ratio:
        if stats is not None:
            if stats.mode != "exhaustive":
                raise UsageError(
                    "ratio curves need exhaustive stats (exact denominators)"
                )
            weights = list(range(stats.totals.size))
            mwpm_ratio = failure_ratio(stats, "mwpm")
            bposd_ratio = failure_ratio(stats, "bposd")
            series = [
                ("mwpm only / total", weights, mwpm_ratio.tolist()),
                ("bposd only / total", weights, bposd_ratio.tolist()),
            ]
            rows = zip(weights, mwpm_ratio.tolist(), bposd_ratio.tolist())
        else:
            series, rows = [], []
        svg = render_chart(
            series, title="Exclusive failure ratio by error weight",
            xlabel="error weight", ylabel="failure ratio",
            data_header="weight,mwpm_ratio,bposd_ratio", data_rows=rows,
        )
        with open(args.ratio, "w") as fh:
            fh.write(svg)
        outputs.append(args.ratio)
    anchor = args.venn or args.hist or args.ratio or args.stats
    _write_manifest("report", argv, anchor, outputs, started, {
        "stats_input": {"path": args.stats, "sha256": _sha256(args.stats)},
    })


def cmd_estimate(args, argv):
    started = _utc_now()
    code = _build_code_checked(args.distance)
    config = _decoder_config(args)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if args.cores < 1:
        raise UsageError("--cores must be >= 1")
    mwpm = MwpmDecoder(code, config)
    bposd = BposdDecoder(code, config)
    profile = measure_rates(code, mwpm, bposd, args.samples, args.seed)
    project = _parse_int_list(args.project) if args.project else []
    rows = feasibility_report(profile, cores=args.cores,
                              probability=args.p, project_distances=project)
    _write_report_csv(args.out, rows)
    outputs = [args.out]
    if args.svg:
        core_grid = [10 ** e for e in range(0, 7)]
        series = []
        for row in rows:
            if row["distance"] != args.distance:
                continue
            label = f"{row['decoder']} d={row['distance']}"
            ys = [extrapolate_multicore(row["seconds_single_core"], c)
                  for c in core_grid]
            series.append((label, core_grid, ys))
        svg = render_chart(
            series, title=f"Projected exhaustive decode time, distance {args.distance}",
            xlabel="cores", ylabel="seconds", log_x=True, log_y=True,
            vlines=[(args.cores, f"{args.cores} cores")],
            data_header="cores," + ",".join(label for label, _, _ in series),
            data_rows=[
                [c] + [s[2][i] for s in series] for i, c in enumerate(core_grid)
            ],
        )
        with open(args.svg, "w") as fh:
            fh.write(svg)
        outputs.append(args.svg)
    _write_manifest("estimate", argv, args.out, outputs, started, {
        "distance": args.distance,
        "seed": args.seed,
        "samples": args.samples,
        "cores": args.cores,
        "profile": profile.to_dict(),
    })


_REPORT_COLUMNS = (
    "distance", "num_errors", "decoder", "probability",
    "seconds_per_million", "seconds_single_core", "cores",
    "seconds_multicore", "measured_distance",
)


def _write_report_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(_REPORT_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(row[c]) for c in _REPORT_COLUMNS) + "\n")


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cmd_threshold(args, argv):
    started = _utc_now()
    distances = _parse_int_list(args.distances)
    if not distances:
        raise UsageError("--distances must list at least one distance")
    ps = _parse_grid(args.grid)
    if args.shots < 1:
        raise UsageError("--shots must be >= 1")
    config = _decoder_config(args)
    points = []
    for distance in distances:
        code = _build_code_checked(distance)
        if args.decoder == "mwpm":
            decoder = MwpmDecoder(code, config)
        else:
            decoder = BposdDecoder(code, config)
        cache = DecoderParityCache(code, decoder)
        points.extend(
            sweep(code, decoder, ps, args.shots,
                  args.seed + 100_000 * distance, workers=args.workers,
                  cache=cache)
        )
    with open(args.out, "w", newline="") as fh:
        fh.write("distance,p,shots,failures,rate,lo,hi\n")
        for pt in points:
            lo, hi = pt.interval
            fh.write(
                f"{pt.distance},{pt.p!r},{pt.shots},{pt.failures},"
                f"{pt.rate!r},{lo!r},{hi!r}\n"
            )
    crossing = None
    if len(distances) >= 2:
        result = find_crossing(points)
        crossing = {
            "found": result.found,
            "estimate": result.estimate,
            "spread": result.spread,
            "per_pair": {
                f"{a}-{b}": value for (a, b), value in result.per_pair.items()
            },
        }
    _write_manifest("threshold", argv, args.out, [args.out], started, {
        "distances": distances,
        "p_grid": ps,
        "shots": args.shots,
        "seed": args.seed,
        "decoder": args.decoder,
        "workers": args.workers,
        "crossing": crossing,
    })


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad integer list {text!r}") from exc


def _parse_grid(text: str) -> list[float]:
    parts = text.split(":")
    try:
        if len(parts) == 3:
            lo, hi, step = (float(x) for x in parts)
            if step <= 0 or hi < lo:
                raise ValueError
            count = int(round((hi - lo) / step)) + 1
            return [round(lo + i * step, 10) for i in range(count)]
        return [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(
            f"bad --grid {text!r}; expected LO:HI:STEP or a comma list"
        ) from exc


def build_parser() -> _Parser:
    parser = _Parser(prog="surfbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add_decoder_flags(p):
        p.add_argument("--p", type=float, default=0.1,
                       help="physical error probability (default 0.1)")
        p.add_argument("--bp-iters", type=int, default=32,
                       help="BP iteration cap (default 32)")

    p = sub.add_parser("build-code", help="write a code description JSON")
    p.add_argument("--distance", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_code)

    p = sub.add_parser("build-lut", help="build and save a lookup table")
    p.add_argument("--distance", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_lut)

    p = sub.add_parser("compare", help="run the decoder comparison harness")
    p.add_argument("--distance", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "sample"),
                   default="exhaustive")
    p.add_argument("--range", help="error integer range LO:HI (exhaustive)")
    p.add_argument("--samples", type=int, help="sample count (sample mode)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weight", type=int, default=None,
                   help="sample errors of one fixed weight (sample mode)")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel shards; never changes the counters")
    p.add_argument("--fail-sample-cap", type=int, default=1000)
    p.add_argument("--out", required=True, help="stats CSV path")
    add_decoder_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("merge-stats", help="merge shard stats CSVs")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--mode", choices=("exhaustive", "sampled"),
                   default="exhaustive",
                   help="mode recorded for the merged stats")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_merge_stats)

    p = sub.add_parser("report", help="emit venn counts and SVG plots")
    p.add_argument("--stats", required=True)
    p.add_argument("--manifest", help="stats manifest (defaults to sidecar)")
    p.add_argument("--venn")
    p.add_argument("--hist")
    p.add_argument("--ratio")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("estimate", help="measure rates and project run times")
    p.add_argument("--distance", type=int, required=True)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cores", type=int, default=LUMI_CORES)
    p.add_argument("--project",
                   help="comma list of distances to project with this rate")
    p.add_argument("--svg", help="optional time-vs-cores SVG")
    p.add_argument("--out", required=True, help="report CSV path")
    add_decoder_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("threshold", help="Monte Carlo rate curves")
    p.add_argument("--distances", default="3,5,7")
    p.add_argument("--grid", default="0.06:0.16:0.02")
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--decoder", choices=("mwpm", "bposd"), default="mwpm")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="points CSV path")
    add_decoder_flags(p)
    p.set_defaults(func=cmd_threshold)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "func", None) is None:
            raise UsageError("missing command (see --help)")
        args.func(args, argv)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (InputError, LutError, OSError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
