"""Rate-versus-level-position figure: 2x3 panel grid from preset sweeps.

Expects a directory holding the six preset CSVs fig2{a,b,c}_{cold,hot}.csv
(single resonance, 21-resonance comb, boxcar; top row cold, bottom row hot).
Solid curves are the exact rates; where the linear-response column is
populated (hot presets) it is overlaid dashed, with conductance and
relative-sensitivity insets fed from the decomposition columns.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from mpl_toolkits.axes_grid1.inset_locator import inset_axes

from .io import load_theta_sweep, model_field

PANELS = ["fig2a", "fig2b", "fig2c"]
ROWS = ["cold", "hot"]
PANEL_TITLES = ["single resonance", "21-resonance comb", "boxcar"]


@dataclass(frozen=True)
class FigureSpec:
    """Input tables and layout for the panel grid."""

    csv_dir: Path
    output: Path
    log_y: bool = True
    panels: tuple = tuple(PANELS)
    rows: tuple = tuple(ROWS)

    def csv_path(self, panel: str, row: str) -> Path:
        return self.csv_dir / f"{panel}_{row}.csv"


def _floor(values, log_y):
    if not log_y:
        return values
    positive = [v for v in values if v > 0]
    tiny = min(positive) * 1e-3 if positive else 1e-300
    return [max(v, tiny) for v in values]


def render_fig2(spec: FigureSpec):
    fig, axes = plt.subplots(2, 3, figsize=(12, 6.5), constrained_layout=True)
    for i_row, row_name in enumerate(spec.rows):
        for i_col, panel in enumerate(spec.panels):
            ax = axes[i_row][i_col]
            curves = load_theta_sweep(spec.csv_path(panel, row_name))
            lr_present = False
            for descriptor, rows in curves.items():
                theta = [r["theta"] for r in rows]
                gamma = _floor([r["gamma_exact"] for r in rows], spec.log_y)
                width = model_field(descriptor, "gamma") or model_field(descriptor, "delta")
                (line,) = ax.plot(theta, gamma, lw=1.4, label=f"width {width:g}")
                if all(r["gamma_lr"] is not None for r in rows):
                    lr_present = True
                    ax.plot(
                        theta,
                        _floor([r["gamma_lr"] for r in rows], spec.log_y),
                        ls="--",
                        lw=1.1,
                        color=line.get_color(),
                    )
            if spec.log_y:
                ax.set_yscale("log")
            ax.set_xlabel(r"$\theta$ [$E_0$]")
            if i_col == 0:
                ax.set_ylabel(r"$\gamma$ [$E_0/h$]")
            if i_row == 0:
                ax.set_title(PANEL_TITLES[i_col])
            if lr_present:
                _decomposition_insets(ax, curves)
            if i_row == 0 and i_col == 0:
                ax.legend(fontsize=7, loc="upper right")
    return fig


def _decomposition_insets(ax, curves):
    left = inset_axes(ax, width="28%", height="30%", loc="upper left")
    right = inset_axes(ax, width="28%", height="30%", loc="upper right")
    for rows in curves.values():
        theta = [r["theta"] for r in rows]
        g = [r["conductance"] for r in rows]
        s = [r["rel_sensitivity"] for r in rows]
        if all(v is not None for v in g):
            left.plot(theta, g, lw=0.8)
        if all(v is not None for v in s):
            right.plot(theta, _floor(s, True), lw=0.8)
    left.set_title("G", fontsize=6)
    right.set_title(r"$(\partial_\theta \ln G)^2$", fontsize=6)
    right.set_yscale("log")
    for ins in (left, right):
        ins.tick_params(labelsize=5)


def plot_fig2(csv_dir, out_path):
    """Render the panel grid to a vector file; returns the output path."""
    out = Path(out_path)
    if out.suffix == "":
        out = out.with_suffix(".svg")
    spec = FigureSpec(csv_dir=Path(csv_dir), output=out)
    fig = render_fig2(spec)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-fig2", description="Panel grid of precision-rate sweeps from preset CSVs"
    )
    parser.add_argument("csv_dir", help="directory holding fig2{a,b,c}_{cold,hot}.csv")
    parser.add_argument("out", help="output image path (vector formats preferred)")
    args = parser.parse_args(argv)
    try:
        out = plot_fig2(args.csv_dir, args.out)
    except (OSError, ValueError) as exc:
        print(f"plot-fig2: error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
