"""Shared CSV intake and deterministic SVG output for the render scripts.

The scripts consume only the CSV files written by the `microrev` command
line tool; nothing here imports the simulation package.
"""

import csv
import sys

import matplotlib

matplotlib.use("Agg")
# Stable element ids so identical inputs render byte-identical SVG.
matplotlib.rcParams["svg.hashsalt"] = "microrev-figures"

EXIT_NO_DATA = 1
EXIT_BAD_INPUT = 2


def fail(code: int, message: str):
    print(f"error: {message}", file=sys.stderr)
    sys.exit(code)


def load_rows(path: str, required) -> list:
    """All CSV rows as dicts; exits naming any missing required column."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in required if c not in header]
            if missing:
                fail(EXIT_BAD_INPUT, f"{path}: missing columns {missing}")
            return list(reader)
    except OSError as exc:
        fail(EXIT_BAD_INPUT, f"cannot read {path}: {exc}")


def number(cell):
    """Float of a CSV cell, None for the empty cell."""
    return float(cell) if cell not in (None, "") else None


def save_svg(fig, path: str):
    # Dropping the Date keeps repeated renders byte-identical.
    fig.savefig(path, format="svg", metadata={"Date": None})
