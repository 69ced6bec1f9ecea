"""Command line interface: fill, genmask, metrics."""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .core import FseParams
from .metrics import quality_report
from .patterns import gen_diagonal_bars, gen_lenses, gen_linear_bars, hole_ratio
from .scheduler import export_order_map, run_fill
from .video_io import (
    PIXEL_FORMATS,
    RawVideoSpec,
    read_mask,
    read_volume,
    write_mask,
    write_order_map,
    write_volume,
)


def _add_dims(parser: argparse.ArgumentParser, frames_required: bool) -> None:
    parser.add_argument("--w", "--width", dest="width", type=int, required=True,
                        help="frame width in samples")
    parser.add_argument("--h", "--height", dest="height", type=int, required=True,
                        help="frame height in samples")
    parser.add_argument("--frames", type=int, required=frames_required,
                        default=None, help="frame count (fill/metrics default: until EOF)")


def _add_fse_params(parser: argparse.ArgumentParser) -> None:
    d = FseParams()
    parser.add_argument("--cube-edge", type=int, default=d.cube_edge,
                        help=f"reconstruction cube edge (default {d.cube_edge})")
    parser.add_argument("--border", type=int, default=d.border,
                        help=f"support border width (default {d.border})")
    parser.add_argument("--decay", type=float, default=d.decay,
                        help=f"weight decay base (default {d.decay})")
    parser.add_argument("--recon-weight", type=float, default=d.recon_weight,
                        help=f"weight discount for refilled samples (default {d.recon_weight})")
    parser.add_argument("--compensation", type=float, default=d.compensation,
                        help=f"coefficient shrinkage (default {d.compensation})")
    parser.add_argument("--iterations", type=int, default=d.max_iterations,
                        help=f"basis selections per cube (default {d.max_iterations})")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fse3d",
        description="Fill 3D holes in video volumes by frequency selective extrapolation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fill = sub.add_parser("fill", help="fill the holes of a video volume")
    fill.add_argument("--in", dest="input", required=True, help="input raw video file")
    fill.add_argument("--mask", required=True, help="raw tri-state mask file")
    fill.add_argument("--out", dest="output", required=True, help="output raw video file")
    _add_dims(fill, frames_required=False)
    fill.add_argument("--pix-fmt", choices=PIXEL_FORMATS, default="y8")
    fill.add_argument("--order", choices=("opt", "ls"), default="opt",
                      help="cube processing order (default opt)")
    fill.add_argument("--threads", type=int, default=None,
                      help="worker threads per batch (default: all CPUs)")
    _add_fse_params(fill)
    fill.add_argument("--order-map", metavar="DIR", default=None,
                      help="write per-frame processing-order images (PGM) into DIR")
    fill.add_argument("--report", metavar="PATH", default=None,
                      help="write the fill report as JSON")
    fill.add_argument("--mask-out", metavar="PATH", default=None,
                      help="write the post-fill mask")

    gen = sub.add_parser("genmask", help="generate a synthetic hole mask")
    gen.add_argument("kind", choices=("lenses", "bars-linear", "bars-diagonal"))
    gen.add_argument("--out", required=True, help="output raw mask file")
    _add_dims(gen, frames_required=True)
    gen.add_argument("--count", type=int, default=None,
                     help="number of shapes (default: 30 lenses/linear bars, 8 diagonal)")
    gen.add_argument("--seed", type=int, default=None, help="RNG seed")
    gen.add_argument("--rs", type=float, default=24.0, help="lens spatial radius (default 24)")
    gen.add_argument("--rt", type=float, default=4.0, help="lens temporal radius (default 4)")
    gen.add_argument("--sx", type=int, default=32, help="bar width (default 32)")
    gen.add_argument("--sy", type=int, default=32, help="bar height (default 32)")
    gen.add_argument("--st", type=int, default=12, help="linear bar frame span (default 12)")

    met = sub.add_parser("metrics", help="evaluate a reconstruction")
    met.add_argument("--original", required=True)
    met.add_argument("--reconstructed", required=True)
    met.add_argument("--mask", required=True)
    _add_dims(met, frames_required=False)
    met.add_argument("--pix-fmt", choices=PIXEL_FORMATS, default="y8")
    met.add_argument("--json", metavar="PATH", default=None,
                     help="also write the report as JSON")
    return parser


def _params_from_args(args: argparse.Namespace) -> FseParams:
    return FseParams(
        cube_edge=args.cube_edge,
        border=args.border,
        decay=args.decay,
        recon_weight=args.recon_weight,
        compensation=args.compensation,
        max_iterations=args.iterations,
    )


def _cmd_fill(args: argparse.Namespace) -> int:
    spec = RawVideoSpec(path=args.input, width=args.width, height=args.height,
                        frames=args.frames, pixel_format=args.pix_fmt)
    volume = read_volume(spec)
    mask = read_mask(args.mask, args.width, args.height, frames=volume.shape[0])
    result = run_fill(volume, mask, params=_params_from_args(args),
                      order=args.order, workers=args.threads)
    out_spec = RawVideoSpec(path=args.output, width=args.width, height=args.height,
                            pixel_format=args.pix_fmt)
    chroma = args.input if args.pix_fmt == "yuv420p" else None
    write_volume(result.volume, out_spec, chroma_from=chroma)

    report = result.report
    print(f"filled {report.hole_samples} samples in {report.hole_cubes} cubes "
          f"({report.n_batches} batches, order {report.order})")
    if report.no_support_cubes:
        print(f"warning: {len(report.no_support_cubes)} cubes had no support; "
              f"fallback value used", file=sys.stderr)
    if args.mask_out:
        write_mask(result.mask, args.mask_out)
    if args.order_map:
        write_order_map(export_order_map(result.state), args.order_map)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    return 0


def _cmd_genmask(args: argparse.Namespace) -> int:
    shape = (args.frames, args.height, args.width)
    if args.kind == "lenses":
        count = 30 if args.count is None else args.count
        mask = gen_lenses(shape, count=count, spatial_radius=args.rs,
                          temporal_radius=args.rt, seed=args.seed)
    elif args.kind == "bars-linear":
        count = 30 if args.count is None else args.count
        mask = gen_linear_bars(shape, count=count, spatial_size=(args.sx, args.sy),
                               temporal_size=args.st, seed=args.seed)
    else:
        count = 8 if args.count is None else args.count
        mask = gen_diagonal_bars(shape, count=count,
                                 cross_section=(args.sx, args.sy), seed=args.seed)
    write_mask(mask, args.out)
    print(f"{args.kind}: {mask.size} samples, hole ratio {hole_ratio(mask):.4f}")
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    orig_spec = RawVideoSpec(path=args.original, width=args.width, height=args.height,
                             frames=args.frames, pixel_format=args.pix_fmt)
    original = read_volume(orig_spec)
    rec_spec = RawVideoSpec(path=args.reconstructed, width=args.width, height=args.height,
                            frames=original.shape[0], pixel_format=args.pix_fmt)
    reconstructed = read_volume(rec_spec)
    mask = read_mask(args.mask, args.width, args.height, frames=original.shape[0])
    report = quality_report(original, reconstructed, mask)
    print(report.format_text())
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    return 0


_COMMANDS = {
    "fill": _cmd_fill,
    "genmask": _cmd_genmask,
    "metrics": _cmd_metrics,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as err:
        print(f"fse3d {args.command}: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
