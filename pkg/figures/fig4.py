#!/usr/bin/env python3
"""Quantum correction against total amplitude square, one line per bath.

Scatter of log Upsilon over |alpha_i|^2 + |alpha_f|^2 coloured by inverse
temperature; through each bath's cloud runs the line fitted from its
equal-amplitude rows (delta = 0), where the correction is exactly linear.
Input: CSV from `microrev sweep-upsilon`.
"""

import argparse
import sys

import matplotlib.pyplot as plt

from common import EXIT_NO_DATA, fail, load_rows, number, save_svg

REQUIRED = ["status", "beta", "alpha_sq_tot", "delta_alpha_sq", "log_upsilon"]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", required=True, help="sweep-upsilon CSV")
    parser.add_argument("--output", required=True, help="SVG path")
    args = parser.parse_args(argv)

    rows = [r for r in load_rows(args.input, REQUIRED) if r["status"] == "ok"]
    if not rows:
        fail(EXIT_NO_DATA, f"{args.input}: no rows with status ok")

    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    for beta in sorted({r["beta"] for r in rows}, key=float, reverse=True):
        group = [r for r in rows if r["beta"] == beta]
        xs = [number(r["alpha_sq_tot"]) for r in group]
        ys = [number(r["log_upsilon"]) for r in group]
        line = ax.plot([], [])[0]  # reserve the cycle colour
        ax.scatter(xs, ys, s=10, color=line.get_color(),
                   label=f"beta = {beta}")
        # slope from the equal-amplitude rows, where log Upsilon is exactly
        # proportional to the total
        anchors = [(number(r["alpha_sq_tot"]), number(r["log_upsilon"]))
                   for r in group
                   if number(r["delta_alpha_sq"]) == 0.0
                   and number(r["alpha_sq_tot"]) > 0.0]
        if anchors:
            slope = sum(y / x for x, y in anchors) / len(anchors)
            hi = max(xs)
            ax.plot([0.0, hi], [0.0, slope * hi], lw=0.9,
                    color=line.get_color())
    ax.set_xlabel("total amplitude square")
    ax.set_ylabel("log Upsilon")
    ax.legend(fontsize=7)
    fig.tight_layout()
    save_svg(fig, args.output)
    print(f"wrote {args.output} ({len(rows)} points)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
