#!/usr/bin/env python3
"""Render the reproduced figure datasets as PNGs.

Usage:
    ftr-secrecy reproduce fig1 --seed 42 --out-dir out/
    ftr-secrecy reproduce fig2 --out-dir out/
    python scripts/plot_figures.py out/

Needs matplotlib, which the package itself does not depend on.
"""

import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def plot_fig1(rows, out):
    fig, ax = plt.subplots(figsize=(5, 4))
    curves = sorted({(r["m"], r["k"]) for r in rows})
    for m, k in curves:
        pts = [r for r in rows if (r["m"], r["k"]) == (m, k)]
        db = [float(r["gamma_bar_d_db"]) for r in pts]
        ax.semilogy(db, [float(r["sop_exact"]) for r in pts], "-", label=f"m={m}, K={k}")
        ax.semilogy(db, [float(r["sop_asymptotic"]) for r in pts], "--", color="gray")
        ax.semilogy(db, [float(r["sop_mc"]) for r in pts], "o", ms=3, mfc="none")
    ax.set_xlabel("average destination SNR (dB)")
    ax.set_ylabel("secrecy outage probability")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


def plot_fig2(rows, out):
    fig, ax = plt.subplots(figsize=(5, 4))
    for mu in sorted({r["mu"] for r in rows}):
        pts = [r for r in rows if r["mu"] == mu]
        db = [float(r["gamma_bar_d_db"]) for r in pts]
        ax.semilogy(db, [float(r["sop_exact"]) for r in pts], "-", label=f"modified, mu={mu}")
        ax.semilogy(db, [float(r["sop_conventional"]) for r in pts], "--", label=f"conventional, mu={mu}")
    ax.set_xlabel("average destination SNR (dB)")
    ax.set_ylabel("secrecy outage probability")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(".")
    fig1, fig2 = out_dir / "fig1.csv", out_dir / "fig2.csv"
    if fig1.exists():
        plot_fig1(load(fig1), out_dir / "fig1.png")
    if fig2.exists():
        plot_fig2(load(fig2), out_dir / "fig2.png")
    if not fig1.exists() and not fig2.exists():
        print(f"no fig1.csv or fig2.csv under {out_dir}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
