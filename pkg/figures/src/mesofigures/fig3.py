"""Saturation figure: optimal rate versus resonance count, boxcar asymptote.

Accepts either a single resonance-count CSV or a directory holding one per
temperature (fig3_*.csv).  Each table contributes one solid curve plus a
dashed horizontal line at its boxcar row, labelled with the temperature
echoed in the JSON sidecar when available.  An inset sketches the three
transmission shapes named by the table's model descriptors; the sketch is
illustrative only, every plotted rate comes from the CSV.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import load_nd_sweep, model_field, sidecar_temperature


def _sources(path: Path) -> list[Path]:
    if path.is_dir():
        found = sorted(path.glob("fig3_*.csv"))
        if not found:
            raise ValueError(f"{path}: no fig3_*.csv tables found")
        return found
    return [path]


def _shape_sketch(ax, comb_rows, box_row):
    delta = model_field(box_row["model"], "delta") or 1.0
    gamma = model_field(comb_rows[0]["model"], "gamma") or 0.1 * delta
    nd = max(r["n_d"] for r in comb_rows)
    e = np.linspace(-1.6 * delta, 1.6 * delta, 1500)
    box = ((e > -delta) & (e < delta)).astype(float)
    lone = gamma**2 / (gamma**2 + e**2)
    centres = np.linspace(-delta, delta, nd)
    comb = sum(gamma**2 / (gamma**2 + (c - e) ** 2) for c in centres)
    comb = comb / comb.max()
    ax.plot(e / delta, box, "k--", lw=1.0)
    ax.plot(e / delta, lone, color="tab:orange", lw=1.0)
    ax.plot(e / delta, comb, color="tab:green", lw=1.0)
    ax.set_xlabel(r"$\epsilon/\delta$", fontsize=6)
    ax.tick_params(labelsize=5)


def render_fig3(sources: list[Path]):
    fig, ax = plt.subplots(figsize=(6.0, 4.2), constrained_layout=True)
    first_table = None
    for i, src in enumerate(sources):
        comb_rows, box_row = load_nd_sweep(src)
        if first_table is None:
            first_table = (comb_rows, box_row)
        temp = sidecar_temperature(src)
        label = f"$k_BT = {temp:g}$" if temp is not None else src.stem
        colour = f"C{i}"
        ax.plot(
            [r["n_d"] for r in comb_rows],
            [r["gamma_max"] for r in comb_rows],
            "o-",
            ms=3.5,
            lw=1.3,
            color=colour,
            label=label,
        )
        ax.axhline(box_row["gamma_max"], ls="--", lw=1.1, color=colour)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"number of resonances $N_d$")
    ax.set_ylabel(r"$\gamma_{\max}$ [$E_0/h$]")
    ax.legend(fontsize=8, loc="lower right")
    inset = ax.inset_axes([0.08, 0.62, 0.34, 0.33])
    _shape_sketch(inset, *first_table)
    return fig


def plot_fig3(source, out_path):
    """Render the saturation plot to a vector file; returns the output path."""
    out = Path(out_path)
    if out.suffix == "":
        out = out.with_suffix(".svg")
    fig = render_fig3(_sources(Path(source)))
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-fig3",
        description="Optimal rate versus resonance count with boxcar asymptotes",
    )
    parser.add_argument("source", help="a fig3 CSV or a directory holding fig3_*.csv")
    parser.add_argument("out", help="output image path (vector formats preferred)")
    args = parser.parse_args(argv)
    try:
        out = plot_fig3(args.source, args.out)
    except (OSError, ValueError) as exc:
        print(f"plot-fig3: error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
