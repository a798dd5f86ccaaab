"""CSV readers for the sweep tables written by the mesometry CLI.

These scripts are read-only consumers of the documented CSV columns; all
numbers plotted here were computed by the numerics package.  Readers fail
loudly on missing columns or empty tables.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

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


def _maybe_float(cell: str):
    return float(cell) if cell != "" else None


def _read_rows(path: Path, required: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise ValueError(f"{path}: missing required column(s) {missing}; header was {header}")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def load_theta_sweep(path) -> dict[str, list[dict]]:
    """Sweep rows grouped by curve (the model descriptor), in file order."""
    path = Path(path)
    curves: dict[str, list[dict]] = {}
    for row in _read_rows(path, SWEEP_COLUMNS):
        parsed = {
            "theta": float(row["theta"]),
            "gamma_exact": float(row["gamma_exact"]),
            "gamma_lr": _maybe_float(row["gamma_lr"]),
            "conductance": _maybe_float(row["conductance"]),
            "rel_sensitivity": _maybe_float(row["rel_sensitivity"]),
            "divergent": row["divergent"] == "true",
        }
        curves.setdefault(row["model"], []).append(parsed)
    return curves


def load_nd_sweep(path) -> tuple[list[dict], dict]:
    """Resonance-count rows plus the boxcar saturation row."""
    path = Path(path)
    comb_rows = []
    box_row = None
    for row in _read_rows(path, ND_COLUMNS):
        parsed = {
            "n_d": int(row["n_d"]) if row["n_d"] != "" else None,
            "model": row["model"],
            "gamma_max": float(row["gamma_max"]),
        }
        if parsed["n_d"] is None:
            box_row = parsed
        else:
            comb_rows.append(parsed)
    if not comb_rows:
        raise ValueError(f"{path}: no resonance-count rows")
    if box_row is None:
        raise ValueError(f"{path}: missing the boxcar saturation row (empty n_d)")
    return comb_rows, box_row


def sidecar_temperature(path) -> float | None:
    """Temperature echoed in the JSON mirror next to a CSV, if present."""
    sidecar = Path(path).with_suffix(".json")
    if not sidecar.exists():
        return None
    try:
        payload = json.loads(sidecar.read_text())
        return float(payload["metadata"]["config"]["temperature"])
    except (KeyError, TypeError, ValueError):
        return None


def model_field(descriptor: str, key: str) -> float | None:
    """Pull one numeric field out of a model descriptor string."""
    body = descriptor.partition(":")[2]
    for token in body.split(","):
        k, _, v = token.partition("=")
        if k.strip() == key:
            try:
                return float(v)
            except ValueError:
                return None
    return None
