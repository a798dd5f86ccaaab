"""The figure scripts consume the numerics package only through its CLI.

The fixture below shells out to `mesometry` to produce the preset CSVs the
plots are defined over (with a coarse grid override to keep the run short),
then the tests drive the plotting entry points on those files.
"""

import subprocess
import sys
from pathlib import Path

import pytest

from mesofigures.fig2 import main as fig2_main, plot_fig2, render_fig2, FigureSpec
from mesofigures.fig3 import main as fig3_main, plot_fig3, render_fig3
from mesofigures.io import load_nd_sweep, load_theta_sweep

FIG2_PRESETS = [
    "fig2a_cold",
    "fig2a_hot",
    "fig2b_cold",
    "fig2b_hot",
    "fig2c_cold",
    "fig2c_hot",
]


def run_mesometry(args):
    proc = subprocess.run(
        [sys.executable, "-m", "mesometry.cli", *args], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def preset_csv_dir(tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("sweeps")
    for preset in FIG2_PRESETS:
        run_mesometry(
            ["sweep-theta", "--preset", preset, "--points", "9", "--out", str(out_dir / preset)]
        )
    run_mesometry(["sweep-nd", "--preset", "fig3_hot", "--out", str(out_dir / "fig3_hot")])
    return out_dir


def test_plot_fig2_from_preset_csvs(preset_csv_dir, tmp_path):
    out = plot_fig2(preset_csv_dir, tmp_path / "fig2.svg")
    assert out.exists() and out.stat().st_size > 10_000
    assert out.read_text().lstrip().startswith("<?xml")


def test_fig2_cli_round_trip(preset_csv_dir, tmp_path):
    out = tmp_path / "fig2_cli"
    assert fig2_main([str(preset_csv_dir), str(out)]) == 0
    assert out.with_suffix(".svg").exists()


def test_fig2_hot_panels_carry_lr_overlay(preset_csv_dir):
    fig = render_fig2(FigureSpec(csv_dir=Path(preset_csv_dir), output=Path("unused.svg")))
    axes = fig.get_axes()
    grid = [ax for ax in axes if not ax.get_label() == "<colorbar>"]
    # 6 panels plus 2 insets per hot panel
    assert len(grid) == 6 + 6
    top_row = grid[0:3]
    bottom_row = grid[3:6]
    for ax in top_row:
        assert all(line.get_linestyle() == "-" for line in ax.get_lines())
        assert len(ax.get_lines()) == 3
    for ax in bottom_row:
        styles = [line.get_linestyle() for line in ax.get_lines()]
        assert styles.count("--") == 3 and styles.count("-") == 3


def test_plot_fig3_from_preset_csv(preset_csv_dir, tmp_path):
    out = plot_fig3(preset_csv_dir / "fig3_hot.csv", tmp_path / "fig3.svg")
    assert out.exists() and out.stat().st_size > 5_000


def test_fig3_monotone_table_and_asymptote(preset_csv_dir):
    comb_rows, box_row = load_nd_sweep(preset_csv_dir / "fig3_hot.csv")
    values = [r["gamma_max"] for r in comb_rows]
    assert values == sorted(values)
    assert box_row["gamma_max"] >= values[-1]


def test_fig3_single_temperature_single_curve(preset_csv_dir):
    fig = render_fig3([preset_csv_dir / "fig3_hot.csv"])
    ax = fig.get_axes()[0]
    solid = [l for l in ax.get_lines() if l.get_linestyle() == "-"]
    dashed = [l for l in ax.get_lines() if l.get_linestyle() == "--"]
    assert len(solid) == 1
    assert len(dashed) == 1


def test_fig3_directory_source(preset_csv_dir, tmp_path):
    assert fig3_main([str(preset_csv_dir), str(tmp_path / "fig3_dir.svg")]) == 0


def test_empty_csv_is_an_error(tmp_path):
    empty = tmp_path / "fig3_empty.csv"
    empty.write_text("n_d,model,gamma_max,theta_star\r\n")
    with pytest.raises(ValueError, match="no data rows"):
        load_nd_sweep(empty)
    assert fig3_main([str(empty), str(tmp_path / "out.svg")]) == 1


def test_missing_column_is_descriptive(tmp_path):
    bad = tmp_path / "fig2a_cold.csv"
    bad.write_text("model,theta\r\nlorentzian:gamma=1,0.0\r\n")
    with pytest.raises(ValueError, match="gamma_exact"):
        load_theta_sweep(bad)
    assert fig2_main([str(tmp_path), str(tmp_path / "out.svg")]) == 1


def test_missing_file_is_an_error(tmp_path):
    assert fig2_main([str(tmp_path / "nowhere"), str(tmp_path / "out.svg")]) == 1
