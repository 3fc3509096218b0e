"""Plotting companion for qrelent sweep CSVs."""

from .figures import (
    EXPECTED_COLUMNS,
    EmptyDataError,
    FigureSpec,
    SchemaError,
    Series,
    build_figure,
    extract_series,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "EXPECTED_COLUMNS",
    "EmptyDataError",
    "FigureSpec",
    "SchemaError",
    "Series",
    "build_figure",
    "extract_series",
    "render",
    "__version__",
]
