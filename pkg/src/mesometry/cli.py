"""Command-line front end: evaluation, sweeps, optimisation, MC, validation.

Exit codes: 0 on success, 1 on runtime/numerical/IO failures, 2 on usage
errors (including malformed model specifications).  File-producing
subcommands write a CSV table plus a JSON mirror carrying a metadata
object with the full resolved configuration; re-feeding that JSON via
--config-json reproduces the CSV byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from . import presets as presets_mod
from . import transmission as tm
from .fermi import ReservoirSetup
from .limits import DegenerateInputError, DivergenceError
from .montecarlo import EstimatorUndefinedError, McConfig, run_mc
from .quadrature import QuadratureError, QuadratureSpec
from .sweeps import AllDivergentError, optimize_theta, sweep_nd, sweep_theta
from .transport import transport
from .validate import run_validation

SWEEP_COLUMNS = [
    "model",
    "temperature",
    "bias",
    "fermi_energy",
    "theta",
    "gamma_exact",
    "gamma_lr",
    "gamma_zero_t",
    "conductance",
    "rel_sensitivity",
    "divergent",
    "note",
]
ND_COLUMNS = ["n_d", "model", "gamma_max", "theta_star"]
OPT_COLUMNS = ["theta_star", "gamma_max", "n_evals", "refined"]
MC_COLUMNS = [
    "estimator_mean",
    "estimator_variance",
    "predicted_variance",
    "bias",
    "crb_satisfied",
    "fisher_information",
    "bootstrap_sigma",
    "n_trials",
]
EVAL_COLUMNS = ["current", "noise", "dcurrent_dtheta", "precision_rate", "quad_error", "divergent"]

RUNTIME_ERRORS = (
    QuadratureError,
    DivergenceError,
    DegenerateInputError,
    EstimatorUndefinedError,
    AllDivergentError,
    OSError,
)


def _fmt(value) -> str:
    """Serialise one CSV cell; floats with 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path: Path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in columns])


def write_json(path: Path, config: dict, columns, rows):
    payload = {
        "metadata": {"version": __version__, "config": config},
        "columns": list(columns),
        "records": rows,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(args, config, columns, rows) -> None:
    base = Path(args.out)
    base.parent.mkdir(parents=True, exist_ok=True)
    fmt = args.format
    if fmt in ("csv", "both"):
        write_csv(base.with_suffix(".csv"), columns, rows)
    if fmt in ("json", "both"):
        write_json(base.with_suffix(".json"), config, columns, rows)


# --------------------------------------------------------------------------
# configuration assembly


def _setup_from(config) -> ReservoirSetup:
    return ReservoirSetup(
        temperature=config["temperature"],
        bias=config["bias"],
        fermi_energy=config["fermi_energy"],
        biased_lead=config["biased_lead"],
    )


def _quad_from(config) -> QuadratureSpec:
    return QuadratureSpec(
        rel_tol=config["rel_tol"],
        abs_tol=config["abs_tol"],
        tail_multiplier=config["tail_multiplier"],
        max_subdivisions=config["max_subdivisions"],
    )


def _common_config(args) -> dict:
    return {
        "temperature": args.temp,
        "bias": args.bias,
        "fermi_energy": args.fermi_energy,
        "biased_lead": args.biased_lead,
        "rel_tol": args.rel_tol,
        "abs_tol": args.abs_tol,
        "tail_multiplier": args.tail_multiplier,
        "max_subdivisions": args.max_subdivisions,
    }


def _load_config_json(path: str, expected_subcommand: str) -> dict:
    with open(path) as fh:
        payload = json.load(fh)
    config = payload["metadata"]["config"]
    if config.get("subcommand") != expected_subcommand:
        raise ValueError(
            f"config file is for subcommand {config.get('subcommand')!r}, not {expected_subcommand!r}"
        )
    return config


def _sweep_grid(model, temperature, bias, fermi_energy, points):
    """Theta range centred on the bias window, wide enough to clear the model."""
    centre = fermi_energy + bias / 2.0
    if isinstance(model, tm.Lorentzian):
        half = abs(bias) + max(6.0 * temperature, 20.0 * model.gamma, 2.0)
    else:
        half = model.half_width + abs(bias) + max(4.0 * temperature, 2.0)
    return centre - half, centre + half, points


def _curves_from_preset(preset: dict, points_override=None) -> tuple[dict, list[dict]]:
    family = preset["family"]
    temperature = float(preset["temperature"])
    bias = float(preset["bias"])
    fermi_energy = float(preset.get("fermi_energy", "0"))
    points = points_override or int(preset.get("points", "801"))
    methods = presets_mod.split_names(preset.get("methods", "exact"))
    delta_factor = float(preset.get("delta_factor", "100"))
    curves = []
    for g in presets_mod.split_floats(preset["gammas"]):
        if family == "lorentzian":
            model = tm.Lorentzian(gamma=g, theta=0.0)
        elif family == "comb":
            model = tm.LorentzianComb(
                n_dots=int(preset["n_dots"]), gamma=g, half_width=delta_factor * g, theta=0.0
            )
        elif family == "boxcar":
            model = tm.Boxcar(half_width=delta_factor * g, theta=0.0)
        else:
            raise ValueError(f"unknown preset family {family!r}")
        lo, hi, n = _sweep_grid(model, temperature, bias, fermi_energy, points)
        curves.append(
            {"model": tm.format_model(model), "theta_min": lo, "theta_max": hi, "points": n}
        )
    header = {
        "temperature": temperature,
        "bias": bias,
        "fermi_energy": fermi_energy,
        "methods": methods,
    }
    return header, curves


# --------------------------------------------------------------------------
# subcommand runners (operate on resolved config dicts only)


def run_eval_cmd(config) -> list[dict]:
    model = tm.parse_model(config["model"])
    result = transport(model, _setup_from(config), _quad_from(config))
    return [
        {
            "current": result.current,
            "noise": result.noise,
            "dcurrent_dtheta": result.dcurrent_dtheta,
            "precision_rate": result.precision_rate,
            "quad_error": result.quad_error,
            "divergent": result.divergent,
        }
    ]


def run_sweep_theta_cmd(config) -> list[dict]:
    import numpy as np

    setup = _setup_from(config)
    quad = _quad_from(config)
    rows = []
    for curve in config["curves"]:
        model = tm.parse_model(curve["model"])
        grid = np.linspace(curve["theta_min"], curve["theta_max"], int(curve["points"]))
        for rec in sweep_theta(model, setup, grid, methods=config["methods"], quad=quad):
            rows.append(
                {
                    "model": rec.model,
                    "temperature": rec.temperature,
                    "bias": rec.bias,
                    "fermi_energy": rec.fermi_energy,
                    "theta": rec.theta,
                    "gamma_exact": rec.gamma_exact,
                    "gamma_lr": rec.gamma_lr,
                    "gamma_zero_t": rec.gamma_zero_t,
                    "conductance": rec.conductance,
                    "rel_sensitivity": rec.rel_sensitivity,
                    "divergent": rec.divergent,
                    "note": rec.note,
                }
            )
    return rows


def run_optimize_cmd(config) -> list[dict]:
    model = tm.parse_model(config["model"])
    interval = None
    if config["theta_min"] is not None and config["theta_max"] is not None:
        interval = (config["theta_min"], config["theta_max"])
    opt = optimize_theta(
        model,
        _setup_from(config),
        search_interval=interval,
        quad=_quad_from(config),
        method=config["method"],
        coarse_points=config["coarse_points"],
    )
    return [
        {
            "theta_star": opt.theta_star,
            "gamma_max": opt.gamma_max,
            "n_evals": opt.n_evals,
            "refined": opt.refined,
        }
    ]


def run_sweep_nd_cmd(config) -> list[dict]:
    records = sweep_nd(
        config["nd_list"],
        config["gamma"],
        config["delta"],
        _setup_from(config),
        quad=_quad_from(config),
        weighting=config["weighting"],
        coarse_points=config["coarse_points"],
    )
    return [
        {"n_d": r.n_d, "model": r.model, "gamma_max": r.gamma_max, "theta_star": r.theta_star}
        for r in records
    ]


def run_mc_cmd(config) -> list[dict]:
    model = tm.parse_model(config["model"])
    mc = McConfig(
        tau=config["tau"],
        n_trials=config["trials"],
        seed=config["seed"],
        theta_true=config["theta_true"],
        theta_ref=config["theta_ref"],
    )
    report = run_mc(model, _setup_from(config), mc, _quad_from(config))
    return [
        {
            "estimator_mean": report.estimator_mean,
            "estimator_variance": report.estimator_variance,
            "predicted_variance": report.predicted_variance,
            "bias": report.bias,
            "crb_satisfied": report.crb_satisfied,
            "fisher_information": report.fisher_information,
            "bootstrap_sigma": report.bootstrap_sigma,
            "n_trials": report.n_trials,
        }
    ]


# --------------------------------------------------------------------------
# argument parsing


def _add_setup_args(p: argparse.ArgumentParser, temp_required=True):
    g = p.add_argument_group("reservoirs")
    g.add_argument("--temp", type=float, required=temp_required, help="k_B T in E0 units")
    g.add_argument("--bias", type=float, default=0.0, help="bias energy eV in E0 units")
    g.add_argument("--fermi-energy", type=float, default=0.0, dest="fermi_energy")
    g.add_argument(
        "--biased-lead",
        choices=["R", "L"],
        default="R",
        dest="biased_lead",
        help="which lead carries mu = fermi_energy + bias",
    )


def _add_quad_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("quadrature")
    g.add_argument("--rel-tol", type=float, default=1e-9, dest="rel_tol")
    g.add_argument("--abs-tol", type=float, default=1e-12, dest="abs_tol")
    g.add_argument("--tail-multiplier", type=float, default=40.0, dest="tail_multiplier")
    g.add_argument("--max-subdivisions", type=int, default=10_000, dest="max_subdivisions")


def _add_out_args(p: argparse.ArgumentParser, required=True):
    p.add_argument("--out", required=required, help="output base path (suffix is replaced)")
    p.add_argument("--format", choices=["csv", "json", "both"], default="both")
    p.add_argument(
        "--config-json",
        dest="config_json",
        help="re-run from the metadata.config of a previous JSON output (other flags ignored)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mesometry",
        description="Transport-based parameter estimation for two-terminal conductors",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_eval = sub.add_parser("eval", help="current, noise, sensitivity and rate at one point")
    p_eval.add_argument("--model", required=True, help="e.g. lorentzian:gamma=0.1,theta=0")
    _add_setup_args(p_eval)
    _add_quad_args(p_eval)
    _add_out_args(p_eval, required=False)

    p_sweep = sub.add_parser("sweep-theta", help="tabulate gamma along a theta grid")
    p_sweep.add_argument("--preset", help="bundled preset name or .cfg path")
    p_sweep.add_argument("--model")
    p_sweep.add_argument("--theta-min", type=float, dest="theta_min")
    p_sweep.add_argument("--theta-max", type=float, dest="theta_max")
    p_sweep.add_argument("--points", type=int, default=None)
    p_sweep.add_argument(
        "--methods", default="exact", help="comma list from: exact, lr, zero_t"
    )
    _add_setup_args(p_sweep, temp_required=False)
    _add_quad_args(p_sweep)
    _add_out_args(p_sweep)

    p_opt = sub.add_parser("optimize", help="maximise gamma over theta")
    p_opt.add_argument("--model", required=True)
    p_opt.add_argument("--theta-min", type=float, dest="theta_min")
    p_opt.add_argument("--theta-max", type=float, dest="theta_max")
    p_opt.add_argument(
        "--method", choices=["exact", "lr", "zero_t", "sommerfeld"], default="exact"
    )
    p_opt.add_argument("--coarse-points", type=int, default=201, dest="coarse_points")
    _add_setup_args(p_opt)
    _add_quad_args(p_opt)
    _add_out_args(p_opt, required=False)

    p_nd = sub.add_parser("sweep-nd", help="gamma_max versus resonance count, with boxcar reference")
    p_nd.add_argument("--preset", help="bundled nd-sweep preset name or .cfg path")
    p_nd.add_argument("--nd-list", dest="nd_list", help="comma list, strictly increasing")
    p_nd.add_argument("--gamma", type=float, help="resonance width")
    p_nd.add_argument("--delta", type=float, help="window half-width")
    p_nd.add_argument("--weighting", choices=["uniform", "trapezoid"], default="uniform")
    p_nd.add_argument("--coarse-points", type=int, default=201, dest="coarse_points")
    _add_setup_args(p_nd, temp_required=False)
    _add_quad_args(p_nd)
    _add_out_args(p_nd)

    p_mc = sub.add_parser("mc", help="Monte-Carlo check of the estimator variance")
    p_mc.add_argument("--model", required=True)
    p_mc.add_argument("--theta-ref", type=float, required=True, dest="theta_ref")
    p_mc.add_argument("--theta-true", type=float, dest="theta_true")
    p_mc.add_argument("--tau", type=float, required=True)
    p_mc.add_argument("--trials", type=int, default=10_000)
    p_mc.add_argument("--seed", type=int, default=0)
    _add_setup_args(p_mc)
    _add_quad_args(p_mc)
    _add_out_args(p_mc)

    p_val = sub.add_parser("validate", help="run the cross-check suite")
    p_val.add_argument("--json", action="store_true", help="machine-readable check list")
    _add_quad_args(p_val)

    return parser


def _print_eval(rows):
    for key in EVAL_COLUMNS:
        print(f"{key} = {_fmt(rows[0][key])}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.subcommand == "validate":
            results = run_validation(
                QuadratureSpec(args.rel_tol, args.abs_tol, args.tail_multiplier, args.max_subdivisions)
            )
            if args.json:
                print(
                    json.dumps(
                        [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results],
                        indent=2,
                    )
                )
            else:
                for r in results:
                    print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
            return 0 if all(r.passed for r in results) else 1

        if args.subcommand == "eval":
            config = {"subcommand": "eval", "model": args.model, **_common_config(args)}
            rows = run_eval_cmd(config)
            _print_eval(rows)
            if args.out:
                _emit(args, config, EVAL_COLUMNS, rows)
            return 0

        if args.subcommand == "sweep-theta":
            if args.config_json:
                config = _load_config_json(args.config_json, "sweep-theta")
            else:
                if args.preset:
                    preset = presets_mod.load_preset(args.preset)
                    if preset.get("kind") == "nd_sweep":
                        parser.error(f"preset {args.preset!r} is an nd-sweep preset; use sweep-nd")
                    header, curves = _curves_from_preset(preset, args.points)
                    config = {
                        "subcommand": "sweep-theta",
                        "preset": args.preset,
                        **_common_config(args),
                        **header,
                        "curves": curves,
                    }
                else:
                    if args.model is None or args.theta_min is None or args.theta_max is None:
                        parser.error("sweep-theta needs --preset or (--model, --theta-min, --theta-max)")
                    if args.temp is None:
                        parser.error("--temp is required without a preset")
                    model = tm.parse_model(args.model)
                    config = {
                        "subcommand": "sweep-theta",
                        **_common_config(args),
                        "methods": presets_mod.split_names(args.methods),
                        "curves": [
                            {
                                "model": tm.format_model(model),
                                "theta_min": args.theta_min,
                                "theta_max": args.theta_max,
                                "points": args.points or 201,
                            }
                        ],
                    }
            rows = run_sweep_theta_cmd(config)
            _emit(args, config, SWEEP_COLUMNS, rows)
            return 0

        if args.subcommand == "optimize":
            config = {
                "subcommand": "optimize",
                "model": args.model,
                "theta_min": args.theta_min,
                "theta_max": args.theta_max,
                "method": args.method,
                "coarse_points": args.coarse_points,
                **_common_config(args),
            }
            if args.config_json:
                config = _load_config_json(args.config_json, "optimize")
            rows = run_optimize_cmd(config)
            for key in OPT_COLUMNS:
                print(f"{key} = {_fmt(rows[0][key])}")
            if args.out:
                _emit(args, config, OPT_COLUMNS, rows)
            return 0

        if args.subcommand == "sweep-nd":
            if args.config_json:
                config = _load_config_json(args.config_json, "sweep-nd")
            elif args.preset:
                preset = presets_mod.load_preset(args.preset)
                if preset.get("kind") != "nd_sweep":
                    parser.error(f"preset {args.preset!r} is not an nd-sweep preset")
                g = float(preset["gamma"])
                config = {
                    "subcommand": "sweep-nd",
                    "preset": args.preset,
                    **_common_config(args),
                    "temperature": float(preset["temperature"]),
                    "bias": float(preset["bias"]),
                    "fermi_energy": float(preset.get("fermi_energy", "0")),
                    "nd_list": presets_mod.split_ints(preset["nd_list"]),
                    "gamma": g,
                    "delta": float(preset["delta_factor"]) * g,
                    "weighting": preset.get("weighting", "uniform"),
                    "coarse_points": args.coarse_points,
                }
            else:
                if args.nd_list is None or args.gamma is None or args.delta is None:
                    parser.error("sweep-nd needs --preset or (--nd-list, --gamma, --delta)")
                if args.temp is None:
                    parser.error("--temp is required without a preset")
                config = {
                    "subcommand": "sweep-nd",
                    **_common_config(args),
                    "nd_list": presets_mod.split_ints(args.nd_list),
                    "gamma": args.gamma,
                    "delta": args.delta,
                    "weighting": args.weighting,
                    "coarse_points": args.coarse_points,
                }
            rows = run_sweep_nd_cmd(config)
            _emit(args, config, ND_COLUMNS, rows)
            return 0

        if args.subcommand == "mc":
            if args.config_json:
                config = _load_config_json(args.config_json, "mc")
            else:
                theta_true = args.theta_true if args.theta_true is not None else args.theta_ref
                config = {
                    "subcommand": "mc",
                    "model": args.model,
                    "theta_ref": args.theta_ref,
                    "theta_true": theta_true,
                    "tau": args.tau,
                    "trials": args.trials,
                    "seed": args.seed,
                    **_common_config(args),
                }
            rows = run_mc_cmd(config)
            _emit(args, config, MC_COLUMNS, rows)
            return 0

    except RUNTIME_ERRORS as exc:
        print(f"mesometry: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # anything else malformed in the resolved configuration is a usage error
        parser.error(str(exc))

    parser.error(f"unhandled subcommand {args.subcommand!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
