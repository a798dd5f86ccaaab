import csv
import json

import pytest

from mesometry import transmission
from mesometry.cli import SWEEP_COLUMNS, main
from mesometry.quadrature import QuadratureSpec
from mesometry.validate import check_theta_derivative, run_validation


def run_cli(args):
    return main(list(args))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_eval_boxcar_covering_window(capsys, tmp_path):
    out = tmp_path / "res"
    code = run_cli(
        [
            "eval",
            "--model",
            "boxcar:delta=1,theta=0",
            "--temp",
            "0",
            "--bias",
            "0.5",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    printed = capsys.readouterr().out
    rows = read_csv(out.with_suffix(".csv"))
    header, values = rows
    record = dict(zip(header, values))
    assert float(record["current"]) == pytest.approx(1.0, rel=1e-12)
    assert float(record["noise"]) == 0.0
    assert "current = 1" in printed


def test_eval_wide_resonance_rate(capsys):
    # gamma = 100 eV at theta near the exact zero-T optimum: the rate is
    # within 1% of the 2 G0 V / gamma^2 benchmark
    code = run_cli(
        [
            "eval",
            "--model",
            "lorentzian:gamma=100,theta=4.5",
            "--temp",
            "0",
            "--bias",
            "1",
        ]
    )
    assert code == 0
    printed = capsys.readouterr().out
    rate = float(next(l for l in printed.splitlines() if l.startswith("precision_rate")).split("=")[1])
    assert rate == pytest.approx(4e-4, rel=0.01)


def test_missing_required_flag_exits_2(tmp_path):
    out = tmp_path / "never"
    with pytest.raises(SystemExit) as excinfo:
        run_cli(["eval", "--model", "lorentzian:gamma=1,theta=0", "--out", str(out)])
    assert excinfo.value.code == 2
    assert not out.with_suffix(".csv").exists()


def test_bad_model_grammar_exits_2(capsys):
    with pytest.raises(SystemExit) as excinfo:
        run_cli(["eval", "--model", "lorentzian:gamma=1,width=3,theta=0", "--temp", "1"])
    assert excinfo.value.code == 2
    assert "width" in capsys.readouterr().err


def test_sweep_csv_schema_and_formats(tmp_path):
    out = tmp_path / "sweep"
    code = run_cli(
        [
            "sweep-theta",
            "--model",
            "lorentzian:gamma=0.2,theta=0",
            "--theta-min",
            "-1",
            "--theta-max",
            "1",
            "--points",
            "5",
            "--methods",
            "exact,lr,zero_t",
            "--temp",
            "1.0",
            "--bias",
            "0.5",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    rows = read_csv(out.with_suffix(".csv"))
    assert rows[0] == SWEEP_COLUMNS
    assert len(rows) == 1 + 5
    record = dict(zip(rows[0], rows[1]))
    # 17 significant digits round-trip exactly
    assert float(record["gamma_exact"]) == float(format(float(record["gamma_exact"]), ".17g"))
    assert record["divergent"] == "false"
    with open(out.with_suffix(".csv"), "rb") as fh:
        assert b"\r\n" in fh.read()
    payload = json.loads(out.with_suffix(".json").read_text())
    assert payload["metadata"]["config"]["subcommand"] == "sweep-theta"
    assert payload["columns"] == SWEEP_COLUMNS
    assert len(payload["records"]) == 5


def test_sweep_preset_produces_three_curves(tmp_path):
    out = tmp_path / "fig2a"
    code = run_cli(
        ["sweep-theta", "--preset", "fig2a_hot", "--points", "7", "--out", str(out)]
    )
    assert code == 0
    rows = read_csv(out.with_suffix(".csv"))
    models = {r[0] for r in rows[1:]}
    assert len(models) == 3
    assert len(rows) == 1 + 3 * 7
    # hot presets carry the linear-response companion columns for the insets
    record = dict(zip(rows[0], rows[1]))
    assert record["gamma_lr"] != ""
    assert record["conductance"] != ""
    assert record["rel_sensitivity"] != ""


def test_sweep_json_round_trip_reproduces_csv(tmp_path):
    first = tmp_path / "first"
    run_cli(
        [
            "sweep-theta",
            "--model",
            "comb:nd=3,gamma=0.1,delta=1,theta=0",
            "--theta-min",
            "-2",
            "--theta-max",
            "2",
            "--points",
            "9",
            "--temp",
            "0.7",
            "--bias",
            "1.0",
            "--out",
            str(first),
        ]
    )
    second = tmp_path / "second"
    code = run_cli(
        [
            "sweep-theta",
            "--config-json",
            str(first.with_suffix(".json")),
            "--out",
            str(second),
        ]
    )
    assert code == 0
    assert first.with_suffix(".csv").read_bytes() == second.with_suffix(".csv").read_bytes()


def test_mc_deterministic_files(tmp_path):
    args = [
        "mc",
        "--model",
        "lorentzian:gamma=0.1,theta=0.2",
        "--theta-ref",
        "0.2",
        "--theta-true",
        "0.2001",
        "--tau",
        "2e5",
        "--trials",
        "1000",
        "--seed",
        "42",
        "--temp",
        "0.1",
        "--bias",
        "1",
    ]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli(args + ["--out", str(a)]) == 0
    assert run_cli(args + ["--out", str(b)]) == 0
    assert a.with_suffix(".csv").read_bytes() == b.with_suffix(".csv").read_bytes()
    rows = read_csv(a.with_suffix(".csv"))
    record = dict(zip(rows[0], rows[1]))
    assert record["crb_satisfied"] == "true"


def test_mc_config_json_round_trip(tmp_path):
    first = tmp_path / "mc1"
    run_cli(
        [
            "mc",
            "--model",
            "lorentzian:gamma=0.1,theta=0.2",
            "--theta-ref",
            "0.2",
            "--tau",
            "2e5",
            "--trials",
            "1000",
            "--seed",
            "7",
            "--temp",
            "0.1",
            "--bias",
            "1",
            "--out",
            str(first),
        ]
    )
    second = tmp_path / "mc2"
    code = run_cli(["mc", "--config-json", str(first.with_suffix(".json")),
                    "--model", "ignored", "--theta-ref", "0", "--tau", "1",
                    "--temp", "9", "--out", str(second)])
    assert code == 0
    assert first.with_suffix(".csv").read_bytes() == second.with_suffix(".csv").read_bytes()


def test_sweep_nd_preset_and_explicit(tmp_path):
    out = tmp_path / "nd"
    code = run_cli(
        [
            "sweep-nd",
            "--nd-list",
            "1,3",
            "--gamma",
            "0.1",
            "--delta",
            "1",
            "--temp",
            "1.0",
            "--bias",
            "1",
            "--coarse-points",
            "51",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    rows = read_csv(out.with_suffix(".csv"))
    assert rows[0] == ["n_d", "model", "gamma_max", "theta_star"]
    assert [r[0] for r in rows[1:]] == ["1", "3", ""]


def test_optimize_prints_and_writes(tmp_path, capsys):
    out = tmp_path / "opt"
    code = run_cli(
        [
            "optimize",
            "--model",
            "lorentzian:gamma=100,theta=0",
            "--method",
            "sommerfeld",
            "--temp",
            "1e-4",
            "--bias",
            "1",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    printed = capsys.readouterr().out
    assert "gamma_max" in printed
    rows = read_csv(out.with_suffix(".csv"))
    record = dict(zip(rows[0], rows[1]))
    assert abs(float(record["theta_star"])) < 1e-3
    assert float(record["gamma_max"]) == pytest.approx(4e-4, rel=1e-9)


def test_validate_passes_and_loosened_tolerance_fails(capsys):
    assert run_cli(["validate"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 10 and "FAIL" not in out
    assert run_cli(["validate", "--rel-tol", "1e-2", "--abs-tol", "1e-4"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_validate_json_listing(capsys):
    assert run_cli(["validate", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert all(entry["passed"] for entry in payload)
    assert {"name", "passed", "detail"} <= set(payload[0])


def test_validate_catches_injected_derivative_sign_error(monkeypatch):
    # a flipped analytic derivative leaves every squared quantity alone, so
    # the finite-difference consistency check is what must catch it
    true_deriv = transmission.theta_derivative

    def flipped(model, energy):
        return -true_deriv(model, energy)

    monkeypatch.setattr(transmission, "theta_derivative", flipped)
    result = check_theta_derivative(QuadratureSpec())
    assert not result.passed
    results = run_validation()
    assert any(not r.passed for r in results)


def test_unwritable_output_exits_1(tmp_path):
    target = tmp_path / "blocked"
    target.mkdir()
    (target / "out.csv").mkdir()
    code = run_cli(
        [
            "eval",
            "--model",
            "lorentzian:gamma=1,theta=0",
            "--temp",
            "1",
            "--out",
            str(target / "out"),
        ]
    )
    assert code == 1
