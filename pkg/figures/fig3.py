#!/usr/bin/env python3
"""Monte Carlo log-ratio estimates against the closed-form prediction.

One marker per sweep row with a one-standard-error bar, coloured by bath
occupation, plus the identity line.  Input: CSV from `microrev sweep-fig3`
(rows without Monte Carlo columns, e.g. from --skip-mc, are not plottable).
"""

import argparse
import sys

import matplotlib.pyplot as plt

from common import EXIT_NO_DATA, fail, load_rows, number, save_svg

REQUIRED = ["status", "n_th", "predicted_log_ratio",
            "mc_point", "mc_std_error"]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", required=True, help="sweep-fig3 CSV")
    parser.add_argument("--output", required=True, help="SVG path")
    args = parser.parse_args(argv)

    rows = load_rows(args.input, REQUIRED)
    points = [
        (number(r["predicted_log_ratio"]), number(r["mc_point"]),
         number(r["mc_std_error"]), r["n_th"])
        for r in rows
        if r["status"] == "ok" and r["mc_point"] not in (None, "")
    ]
    if not points:
        fail(EXIT_NO_DATA,
             f"{args.input}: no plottable rows (status ok with Monte Carlo "
             f"columns filled)")

    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    for n_th in sorted({p[3] for p in points}, key=float):
        xs = [p[0] for p in points if p[3] == n_th]
        ys = [p[1] for p in points if p[3] == n_th]
        es = [p[2] for p in points if p[3] == n_th]
        ax.errorbar(xs, ys, yerr=es, fmt="o", markersize=3.5, lw=0.8,
                    capsize=2, label=f"n_th = {n_th}")
    lo = min(min(p[0] for p in points), min(p[1] for p in points))
    hi = max(max(p[0] for p in points), max(p[1] for p in points))
    ax.plot([lo, hi], [lo, hi], "k--", lw=1, label="identity")
    ax.set_xlabel("predicted log ratio")
    ax.set_ylabel("measured log ratio (Monte Carlo)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    save_svg(fig, args.output)
    print(f"wrote {args.output} ({len(points)} points)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
