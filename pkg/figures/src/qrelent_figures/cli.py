"""Batch plotting entry point: sweep CSV in, image file out."""

from __future__ import annotations

import argparse
import sys

from .figures import EmptyDataError, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qrelent-figures",
        description="Render a sweep CSV as a figure (PNG or SVG).",
    )
    parser.add_argument("--input", required=True, help="sweep CSV path")
    parser.add_argument("--out", required=True, help="output image path (.png/.svg)")
    parser.add_argument("--pair", help="only plot rows with this pair value")
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)

    spec = FigureSpec(
        input_csv=args.input,
        output_path=args.out,
        pair=args.pair,
        title=args.title,
    )
    try:
        render(spec)
    except (SchemaError, EmptyDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
