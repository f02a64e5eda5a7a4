"""Script entry point: jellium2d-figures --input ... --manifest ... --kind ... --out ..."""

import argparse
import sys

from .render import KINDS, FigureInputError, FigureSpec, render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="jellium2d-figures",
        description="Render figures from jellium2d CSV/JSON outputs")
    parser.add_argument("--input", required=True, help="primary data CSV")
    parser.add_argument("--manifest", required=True, help="run manifest JSON")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--overlay", help="law grid CSV (edge_cdf_overlay)")
    parser.add_argument("--bins", type=int, help="histogram bins (default: Freedman-Diaconis)")
    parser.add_argument("--title")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(input=args.input, manifest=args.manifest, kind=args.kind,
                      out=args.out, overlay=args.overlay, bins=args.bins,
                      title=args.title)
    try:
        render(spec)
    except FigureInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
