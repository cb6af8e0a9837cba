"""Command-line entry point: ``cellifps <subcommand> ...``."""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import bench
from .core import normalize
from .dataio import crop_missing, format_cloud, infer_format, read_cloud, write_cloud, write_text_atomic, write_transform
from .metrics import chamfer
from .sampling import CellIfpsConfig, cell_ifps, cell_sample, ifps


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"seed must be nonnegative, got {text}")
    return v


def _sizes(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_sample(args) -> int:
    cloud = read_cloud(args.input)
    if args.algorithm == "cell":
        if args.radius is None:
            raise ValueError("--radius is required for cell sampling")
        t0 = time.perf_counter()
        sel = cell_sample(cloud, args.radius)
    else:
        if args.n is None:
            raise ValueError(f"--n is required for {args.algorithm}")
        t0 = time.perf_counter()
        if args.algorithm == "ifps":
            sel = ifps(cloud, args.n, args.seed)
        else:
            sel = cell_ifps(cloud, args.n, CellIfpsConfig(rng_seed=args.seed))
    elapsed = time.perf_counter() - t0
    write_cloud(sel.apply(cloud), args.output)
    print(f"selected {len(sel)} points in {elapsed * 1e3:.3f} ms", file=sys.stderr)
    return 0


def cmd_metrics(args) -> int:
    report = chamfer(read_cloud(args.pred), read_cloud(args.gt))
    for v in (report.pred_to_gt, report.gt_to_pred, report.chamfer):
        print(f"{v:.12g}")
    return 0


def cmd_crop(args) -> int:
    pair = crop_missing(read_cloud(args.input), (args.cx, args.cy, args.cz), args.fraction)
    # Render both before writing either, so a formatting error leaves no files.
    partial = format_cloud(pair.partial, infer_format(args.partial_out, None))
    missing = format_cloud(pair.missing, infer_format(args.missing_out, None))
    write_text_atomic(args.partial_out, partial)
    try:
        write_text_atomic(args.missing_out, missing)
    except BaseException:
        _remove_quietly(args.partial_out)
        raise
    return 0


def cmd_normalize(args) -> int:
    cloud, transform = normalize(read_cloud(args.input))
    write_cloud(cloud, args.output)
    try:
        write_transform(transform, args.transform_out)
    except BaseException:
        _remove_quietly(args.output)
        raise
    return 0


def cmd_bench(args) -> int:
    records = bench.run_sampling_bench(args.sizes, args.repeats, args.seed)
    if args.out_csv:
        bench.emit_report(records, args.out_csv)
    sys.stdout.write(bench.format_summary(bench.summarize(records)))
    return 0


def _remove_quietly(path) -> None:
    try:
        os.unlink(path)
    except OSError:
        pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cellifps", description="Point-cloud downsampling and completion metrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="downsample a point cloud file")
    p.add_argument("input", help="input .xyz or .ply file")
    p.add_argument("output", help="output .xyz or .ply file")
    p.add_argument("--algorithm", choices=("ifps", "cell", "cell_ifps"), default="cell_ifps")
    p.add_argument("--n", type=_positive_int, help="number of points to keep (ifps, cell_ifps)")
    p.add_argument("--radius", type=float, help="sphere radius for cell sampling")
    p.add_argument("--seed", type=_seed, default=0, help="random seed (default 0)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("metrics", help="print pred->gt, gt->pred and Chamfer distance")
    p.add_argument("pred", help="predicted cloud")
    p.add_argument("gt", help="ground-truth cloud")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("crop", help="split off the points nearest a center")
    p.add_argument("input")
    p.add_argument("partial_out", help="file for the remaining points")
    p.add_argument("missing_out", help="file for the cropped points")
    for axis in ("cx", "cy", "cz"):
        p.add_argument(f"--{axis}", type=float, required=True, help=f"crop center {axis[1]}")
    p.add_argument("--fraction", type=float, required=True, help="share of points to crop, in (0, 1)")
    p.set_defaults(func=cmd_crop)

    p = sub.add_parser("normalize", help="center and scale into the unit sphere")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("transform_out", help="text file receiving translation and scale")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("bench", help="time ifps against cell_ifps on the 1024/512 pyramid")
    p.add_argument("--sizes", type=_sizes, default=list(bench.DEFAULT_SIZES),
                   help="comma-separated input sizes (default 2048,4048,6048,8048,10048)")
    p.add_argument("--repeats", type=int, default=5, help="timed repeats per size, at least 3")
    p.add_argument("--seed", type=_seed, default=0, help="random seed (default 0)")
    p.add_argument("--out-csv", help="write every record and the summary here")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError, IndexError) as exc:
        print(f"cellifps {args.command}: error: {exc}", file=sys.stderr)
        return 1
