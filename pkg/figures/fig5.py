#!/usr/bin/env python3
"""Correction per unit amplitude square over inverse temperature.

Log-log scatter of log Upsilon / (|alpha_i|^2 + |alpha_f|^2) against beta,
with the quadratic reference beta^2 / 2 drawn through the swept points; the
spread at fixed beta comes from the amplitude asymmetry.  Input: CSV from
`microrev sweep-upsilon`.
"""

import argparse
import sys

import matplotlib.pyplot as plt

from common import EXIT_NO_DATA, fail, load_rows, number, save_svg

REQUIRED = ["status", "beta", "log_upsilon_per_alpha_sq_tot", "half_beta_sq"]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", required=True, help="sweep-upsilon CSV")
    parser.add_argument("--output", required=True, help="SVG path")
    args = parser.parse_args(argv)

    rows = load_rows(args.input, REQUIRED)
    points = [
        (number(r["beta"]), number(r["log_upsilon_per_alpha_sq_tot"]),
         number(r["half_beta_sq"]))
        for r in rows
        if r["status"] == "ok"
        and r["log_upsilon_per_alpha_sq_tot"] not in (None, "")
    ]
    if not points:
        fail(EXIT_NO_DATA,
             f"{args.input}: no rows with a per-total correction value")

    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    ax.scatter([p[0] for p in points], [p[1] for p in points], s=10,
               label="swept transitions")
    reference = sorted({(p[0], p[2]) for p in points})
    ax.plot([b for b, _ in reference], [h for _, h in reference], "k--",
            lw=1, label="beta^2 / 2")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("beta")
    ax.set_ylabel("log Upsilon per total amplitude square")
    ax.legend(fontsize=8)
    fig.tight_layout()
    save_svg(fig, args.output)
    print(f"wrote {args.output} ({len(points)} points)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
