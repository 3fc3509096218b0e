"""Render sweep CSVs as figures: exact curves, limit horizontals, and
Monte Carlo markers with error bars.

This package deliberately knows nothing about the formulas: it consumes
the sweep CSV schema and draws exactly the numbers found there.  The
producing library is the single source of numerical truth; nothing is
recomputed, rescaled, or smoothed here.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

# The producer's column contract, matched byte-for-byte.
EXPECTED_COLUMNS = (
    "pair",
    "m",
    "n1",
    "n2",
    "c1",
    "c2",
    "exact",
    "limit",
    "mc_mean",
    "mc_stderr",
    "n_samples",
    "seed",
    "z",
)


class SchemaError(ValueError):
    """The CSV header does not match the sweep schema."""


class EmptyDataError(ValueError):
    """The CSV has a valid header but no usable rows."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    output_path: str
    pair: str | None = None
    title: str = ""
    xlabel: str = "m"
    ylabel: str = "average relative entropy (nats)"


@dataclass(frozen=True)
class Series:
    """One (c1, c2) curve: everything needed for its panel entries,
    in CSV row order."""

    pair: str
    c1: float
    c2: float
    m: tuple[int, ...] = field(default_factory=tuple)
    exact: tuple[float, ...] = field(default_factory=tuple)
    limit: float | None = None
    mc_mean: tuple[float, ...] = field(default_factory=tuple)
    mc_stderr: tuple[float, ...] = field(default_factory=tuple)


def _check_header(header: list[str]) -> None:
    expected = list(EXPECTED_COLUMNS)
    if header == expected:
        return
    missing = [name for name in expected if name not in header]
    if missing:
        raise SchemaError(f"missing column: {missing[0]!r}")
    raise SchemaError(
        f"header does not match the sweep schema: got {header!r}, "
        f"expected {expected!r}"
    )


def extract_series(input_csv: str, pair: str | None = None) -> list[Series]:
    """Parse a sweep CSV into per-(c1, c2) series, preserving row order.

    `pair` filters rows when the file mixes pairs; None takes everything.
    """
    with open(input_csv, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("missing column: 'pair' (file is empty)") from None
        _check_header(header)
        rows = [row for row in reader if row]

    if pair is not None:
        rows = [row for row in rows if row[0] == pair]
    if not rows:
        raise EmptyDataError(
            "no data rows" + (f" for pair {pair!r}" if pair is not None else "")
        )

    grouped: dict[tuple[float, float], dict] = {}
    for row in rows:
        if len(row) != len(EXPECTED_COLUMNS):
            raise SchemaError(
                f"row has {len(row)} cells, expected {len(EXPECTED_COLUMNS)}: {row!r}"
            )
        key = (float(row[4]), float(row[5]))
        bucket = grouped.setdefault(
            key,
            {"pair": row[0], "m": [], "exact": [], "limit": None, "mean": [], "stderr": []},
        )
        bucket["m"].append(int(row[1]))
        bucket["exact"].append(float(row[6]))
        if row[7] != "" and bucket["limit"] is None:
            bucket["limit"] = float(row[7])
        bucket["mean"].append(float(row[8]))
        bucket["stderr"].append(float(row[9]))

    return [
        Series(
            pair=bucket["pair"],
            c1=c1,
            c2=c2,
            m=tuple(bucket["m"]),
            exact=tuple(bucket["exact"]),
            limit=bucket["limit"],
            mc_mean=tuple(bucket["mean"]),
            mc_stderr=tuple(bucket["stderr"]),
        )
        for (c1, c2), bucket in grouped.items()
    ]


def build_figure(spec: FigureSpec) -> tuple["plt.Figure", list[Series]]:
    """Construct the figure without saving it; render() adds the save.

    Split out so tests can compare the plotted artists against the CSV.
    """
    series = extract_series(spec.input_csv, pair=spec.pair)
    fig, ax = plt.subplots(figsize=(7.0, 4.8))
    for i, s in enumerate(series):
        color = f"C{i}"
        label = f"c1={s.c1:g}, c2={s.c2:g}"
        ax.plot(s.m, s.exact, "-", color=color, label=f"exact, {label}")
        ax.errorbar(
            s.m,
            s.mc_mean,
            yerr=s.mc_stderr,
            fmt="o",
            color=color,
            markersize=4,
            linestyle="none",
            capsize=2,
            label=f"MC, {label}",
        )
        if s.limit is not None:
            ax.axhline(s.limit, linestyle="-.", color=color, linewidth=1.0)
    ax.set_xscale("log", base=2)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)
    elif series:
        ax.set_title(series[0].pair)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig, series


def render(spec: FigureSpec) -> str:
    """Write the figure to spec.output_path (format from the extension,
    e.g. .png or .svg) and return the path."""
    fig, _ = build_figure(spec)
    try:
        fig.savefig(spec.output_path)
    finally:
        plt.close(fig)
    return spec.output_path
