#!/usr/bin/env python3
"""Render canard-lab CSV artifacts as PNG plots.

Every canard-lab CSV starts with a header row, carries one `# config: ...`
provenance comment, and may end with trailing `# key = value` comments.  This
script picks a plot layout from the header columns:

  n,x,y[,H[,Hbar]]   phase portrait (x, y); invariant traces vs n if present
  n,H,Hbar           conservation traces vs n
  n,v,w,Hhat         canonical-coordinates orbit and Hhat trace
  h,N,d_lambda,...   log-log error-vs-h convergence plot
  h1,alpha,...       entry-chart contraction factor vs h1

Usage:
  python3 tools/plot_figures.py out/fig5-kahan-periodic.csv [more.csv ...]
  python3 tools/plot_figures.py --output-dir plots out/*.csv

Generate inputs with, e.g.:
  ./build/canard-lab reproduce --figure fig5-kahan-periodic --output-dir out
  ./build/canard-lab simulate --map k2-kahan --y0 -0.4 --steps 10000 --output out/orbit.csv
"""

import argparse
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_artifact(path):
    """Return (columns, rows, comments) from a canard-lab CSV."""
    columns, rows, comments = [], [], []
    with open(path) as f:
        for line in f:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line.lstrip("# "))
            elif not columns:
                columns = line.split(",")
            else:
                rows.append([float(cell) for cell in line.split(",")])
    if not columns:
        raise ValueError(f"{path}: no header row found")
    return columns, rows, comments


def column(rows, idx):
    return [r[idx] for r in rows]


def plot_phase(ax_phase, ax_trace, columns, rows):
    x, y = column(rows, 1), column(rows, 2)
    ax_phase.plot(x, y, lw=0.4)
    ax_phase.set_xlabel(columns[1])
    ax_phase.set_ylabel(columns[2])
    ax_phase.set_title("orbit")
    if ax_trace is None:
        return
    n = column(rows, 0)
    for idx in range(3, len(columns)):
        ax_trace.plot(n, column(rows, idx), lw=0.6, label=columns[idx])
    ax_trace.set_xlabel(columns[0])
    ax_trace.legend()
    ax_trace.set_title("invariants along the orbit")


def plot_traces(ax, columns, rows):
    n = column(rows, 0)
    for idx in range(1, len(columns)):
        ax.plot(n, column(rows, idx), lw=0.6, label=columns[idx])
    ax.set_xlabel(columns[0])
    ax.legend()
    ax.set_title("traces")


def plot_convergence(ax, columns, rows):
    h = column(rows, 0)
    for name, idx in (("err_lambda", columns.index("err_lambda")),
                      ("err_r", columns.index("err_r"))):
        errs = column(rows, idx)
        if any(e > 0 for e in errs):
            ax.loglog(h, errs, "o-", label=name)
    ax.set_xlabel("h")
    ax.set_ylabel("absolute error")
    ax.legend()
    ax.set_title("splitting-sum errors vs step size")


def plot_blowup(ax, columns, rows):
    h1, alpha = column(rows, 0), column(rows, 1)
    ax.plot(h1, alpha, "o-", label="measured")
    ax.plot(h1, [(1 - h) / (1 + h) for h in h1], "--", label="(1-h1)/(1+h1)")
    ax.set_xlabel("h1")
    ax.set_ylabel("contraction factor")
    ax.legend()
    ax.set_title("entry-chart fixed-point derivative")


def render(path, output_dir):
    columns, rows, _ = read_artifact(path)
    out = (output_dir or path.parent) / (path.stem + ".png")

    if columns[:3] == ["n", "x", "y"] or columns[:3] == ["n", "v", "w"]:
        if len(columns) > 3:
            fig, (a, b) = plt.subplots(1, 2, figsize=(11, 4.5))
            plot_phase(a, b, columns, rows)
        else:
            fig, a = plt.subplots(figsize=(5.5, 4.5))
            plot_phase(a, None, columns, rows)
    elif columns[0] == "n":
        fig, a = plt.subplots(figsize=(7, 4.5))
        plot_traces(a, columns, rows)
    elif columns[0] == "h" and "err_lambda" in columns:
        fig, a = plt.subplots(figsize=(5.5, 4.5))
        plot_convergence(a, columns, rows)
    elif columns[0] == "h1":
        fig, a = plt.subplots(figsize=(5.5, 4.5))
        plot_blowup(a, columns, rows)
    else:
        raise ValueError(f"{path}: unrecognized column set {columns}")

    fig.suptitle(path.stem)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csvs", nargs="+", type=pathlib.Path)
    ap.add_argument("--output-dir", type=pathlib.Path, default=None,
                    help="directory for the PNGs (default: next to each CSV)")
    args = ap.parse_args()

    if args.output_dir:
        args.output_dir.mkdir(parents=True, exist_ok=True)
    status = 0
    for path in args.csvs:
        try:
            out = render(path, args.output_dir)
            print(f"wrote {out}")
        except (OSError, ValueError) as e:
            print(f"error: {e}", file=sys.stderr)
            status = 1
    return status


if __name__ == "__main__":
    sys.exit(main())
