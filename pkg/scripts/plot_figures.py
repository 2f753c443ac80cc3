#!/usr/bin/env python3
"""Render PNG plots from the CSVs produced by run_figure_sweeps.py
(or by `groupform sweep` / `groupform primitive`).

Requires matplotlib, which is not a package dependency:
    pip install matplotlib
    python scripts/plot_figures.py --results results --out plots
"""

import argparse
import csv
import os
import sys
from collections import defaultdict

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is required: pip install matplotlib")

SIZE_COLORS = {1: "red", 2: "green", 3: "blue", 4: "darkgreen"}


def read_sweep(path):
    """Sweep CSV -> {r: [(p, mean_Q)]} for r = 1..4 plus the total per p."""
    curves = defaultdict(list)
    totals = defaultdict(float)
    with open(path) as fh:
        for row in csv.DictReader(fh):
            p = float(row["p"])
            if row["r"] in ("1", "2", "3", "4", "tail"):
                q = float(row["mean_Q"])
                totals[p] += q
                if row["r"] != "tail":
                    curves[int(row["r"])].append((p, q))
    return curves, sorted(totals.items())


def plot_density_curves(path, out_path, title):
    curves, totals = read_sweep(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for r, series in sorted(curves.items()):
        ps, qs = zip(*series)
        ax.plot(ps, qs, color=SIZE_COLORS[r], label=f"size {r}")
    ax.plot(*zip(*totals), "k.", markersize=3, label="all sizes")
    ax.set_xlabel("initial one-element density p")
    ax.set_ylabel("steady-state density")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    print(f"wrote {out_path}")


def plot_relaxation(path, out_path):
    series = defaultdict(list)
    with open(path) as fh:
        for row in csv.DictReader(fh):
            series[float(row["p"])].append((int(row["m"]), float(row["mean_n_st"])))
    fig, ax = plt.subplots(figsize=(6, 4))
    for p, points in sorted(series.items()):
        ms, ns = zip(*sorted(points))
        ax.plot(ms, ns, marker="o", label=f"p = {p}")
    ax.set_xlabel("torus size M")
    ax.set_ylabel("mean settling time")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    print(f"wrote {out_path}")


def plot_onestep(path, out_path):
    rows = list(csv.DictReader(open(path)))
    ps = [float(r["p"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    for r in (1, 2, 3):
        ax.plot(ps, [float(row[f"q{r}_analytic"]) for row in rows], color=SIZE_COLORS[r],
                label=f"size {r} closed form")
        ax.plot(ps, [float(row[f"q{r}_mc"]) for row in rows], ".", color=SIZE_COLORS[r],
                markersize=3)
    totals = [sum(float(row[f"q{r}_analytic"]) for r in (1, 2, 3)) for row in rows]
    ax.plot(ps, totals, "k.", markersize=3, label="all sizes")
    ax.set_xlabel("initial one-element density p")
    ax.set_ylabel("steady-state density")
    ax.set_title("one-step model: closed forms vs Monte Carlo")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    print(f"wrote {out_path}")


def plot_dense_2d(path, out_path):
    groups = defaultdict(list)
    with open(path) as fh:
        for row in csv.DictReader(fh):
            groups[float(row["p"])].append((int(row["r"]), float(row["mean_Q"])))
    fig, axes = plt.subplots(1, len(groups), figsize=(5 * len(groups), 4))
    for ax, (p, bars) in zip(axes, sorted(groups.items())):
        rs, qs = zip(*sorted(bars))
        ax.bar(rs, qs)
        ax.set_title(f"200x200, p = {p}")
        ax.set_xlabel("group size")
        ax.set_ylabel("mean steady-state density")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    print(f"wrote {out_path}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--results", default="results")
    parser.add_argument("--out", default="plots")
    args = parser.parse_args()
    os.makedirs(args.out, exist_ok=True)

    jobs = [
        ("density_1d_m3000.csv", lambda src, dst: plot_density_curves(src, dst, "1D, M = 3000"),
         "density_1d_m3000.png"),
        ("density_1d_m4000.csv", lambda src, dst: plot_density_curves(src, dst, "1D, M = 4000"),
         "density_1d_m4000.png"),
        ("relaxation_times.csv", plot_relaxation, "relaxation_times.png"),
        ("onestep_densities.csv", plot_onestep, "onestep_densities.png"),
        ("density_2d_100x150.csv", lambda src, dst: plot_density_curves(src, dst, "2D, 100x150"),
         "density_2d_100x150.png"),
        ("density_2d_200x200.csv", lambda src, dst: plot_density_curves(src, dst, "2D, 200x200"),
         "density_2d_200x200.png"),
        ("dense_2d_histograms.csv", plot_dense_2d, "dense_2d_histograms.png"),
    ]
    for name, renderer, out_name in jobs:
        src = os.path.join(args.results, name)
        if os.path.exists(src):
            renderer(src, os.path.join(args.out, out_name))
        else:
            print(f"skipping {name} (not found in {args.results})")


if __name__ == "__main__":
    main()
