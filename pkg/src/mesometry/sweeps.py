"""Parameter sweeps over the level position and resonance count.

`sweep_theta` tabulates the precision rate along a theta grid with the
exact transport integrals and, optionally, the linear-response and
zero-temperature limits.  `optimize_theta` maximises the rate with a
coarse global scan followed by golden-section refinement (the rate can
have several peaks, so purely local search is not enough).  `sweep_nd`
repeats the optimisation for growing numbers of comb resonances inside a
fixed energy window and appends the boxcar result as the saturation
reference.

Grid points are evaluated independently (pure functions); set the
MESO_THREADS environment variable above 1 to evaluate sweeps in a thread
pool.  Results are collected in input order either way.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import transmission as tm
from .fermi import ReservoirSetup
from .limits import precision_linear_response, precision_zero_t_integral, precision_zero_t_lorentzian, precision_zero_t_sommerfeld
from .quadrature import DEFAULT_QUAD, QuadratureError, QuadratureSpec
from .transport import gamma_exact

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

METHODS = ("exact", "lr", "zero_t")
OBJECTIVES = ("exact", "lr", "zero_t", "sommerfeld")


class AllDivergentError(RuntimeError):
    """Every scanned point diverged; reports the first divergent theta."""

    def __init__(self, theta: float):
        super().__init__(f"precision rate diverges over the whole scan (first at theta = {theta:.6g})")
        self.theta = theta


@dataclass(frozen=True)
class SweepRecord:
    """One theta grid point of a sweep."""

    model: str
    temperature: float
    bias: float
    fermi_energy: float
    theta: float
    gamma_exact: float
    gamma_lr: float | None
    gamma_zero_t: float | None
    conductance: float | None
    rel_sensitivity: float | None
    divergent: bool
    note: str = ""


@dataclass(frozen=True)
class OptResult:
    theta_star: float
    gamma_max: float
    n_evals: int
    refined: bool


@dataclass(frozen=True)
class NdRecord:
    """One resonance-count point of a saturation sweep (n_d None = boxcar)."""

    n_d: int | None
    model: str
    gamma_max: float
    theta_star: float


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("MESO_THREADS", "1")))
    except ValueError:
        return 1


def _map_ordered(fn, items):
    workers = _worker_count()
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def sweep_theta(
    model,
    setup: ReservoirSetup,
    theta_grid,
    methods=("exact",),
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> list[SweepRecord]:
    """Evaluate the requested methods at every grid point.

    The exact method is always included.  Per-point failures are recorded
    in the note field and the sweep continues.
    """
    grid = np.asarray(theta_grid, dtype=float)
    if grid.size < 2:
        raise ValueError("theta grid needs at least 2 points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("theta grid must be strictly increasing")
    methods = tuple(dict.fromkeys(("exact",) + tuple(methods)))
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ValueError(f"unknown sweep method(s) {sorted(unknown)}; choose from {METHODS}")

    descriptor = tm.format_model(model)

    def one(theta: float) -> SweepRecord:
        m = replace(model, theta=float(theta))
        notes = []
        try:
            gamma, divergent = gamma_exact(m, setup, quad)
        except QuadratureError as exc:
            gamma, divergent = math.nan, False
            notes.append(f"exact: {exc}")
        g_lr = cond = rel_sens = None
        if "lr" in methods:
            try:
                lr = precision_linear_response(m, setup, quad)
                g_lr = lr.value
                cond = lr.details["conductance"]
                rel_sens = lr.details["rel_sensitivity"]
            except (ValueError, QuadratureError) as exc:
                notes.append(f"lr: {exc}")
        g_zt = None
        if "zero_t" in methods:
            try:
                zt = precision_zero_t_integral(m, setup, quad)
                g_zt = zt.value
            except (ValueError, QuadratureError) as exc:
                notes.append(f"zero_t: {exc}")
        return SweepRecord(
            model=descriptor,
            temperature=setup.temperature,
            bias=setup.bias,
            fermi_energy=setup.fermi_energy,
            theta=float(theta),
            gamma_exact=gamma,
            gamma_lr=g_lr,
            gamma_zero_t=g_zt,
            conductance=cond,
            rel_sensitivity=rel_sens,
            divergent=divergent,
            note="; ".join(notes),
        )

    return _map_ordered(one, grid)


def _objective(method: str, model, setup: ReservoirSetup, quad: QuadratureSpec):
    """Wrap a gamma evaluator as theta -> (value, divergent); failures -> (nan, False)."""

    def value(theta: float):
        m = replace(model, theta=float(theta))
        try:
            if method == "exact":
                return gamma_exact(m, setup, quad)
            if method == "lr":
                return precision_linear_response(m, setup, quad).value, False
            if method == "zero_t":
                r = precision_zero_t_integral(m, setup, quad)
                return r.value, r.divergent
            if isinstance(m, tm.Lorentzian):
                return precision_zero_t_lorentzian(m, setup).value, False
            return precision_zero_t_sommerfeld(m, setup).value, False
        except (ValueError, QuadratureError):
            return math.nan, False

    return value


def optimize_theta(
    model,
    setup: ReservoirSetup,
    search_interval=None,
    quad: QuadratureSpec = DEFAULT_QUAD,
    method: str = "exact",
    coarse_points: int = 201,
    theta_tol: float = 1e-6,
) -> OptResult:
    """Maximise gamma over theta: coarse scan, then golden-section refinement.

    Divergent points are excluded from the maximisation; if every scanned
    point diverges an AllDivergentError names the first such theta.  Grid
    ties break towards the smallest theta.
    """
    if method not in OBJECTIVES:
        raise ValueError(f"unknown objective {method!r}; choose from {OBJECTIVES}")
    if coarse_points < 3:
        raise ValueError("coarse_points must be >= 3")
    if search_interval is None:
        span = 2.0 * (tm.model_extent(model) + abs(setup.bias))
        search_interval = (setup.fermi_energy - span, setup.fermi_energy + span)
    lo, hi = map(float, search_interval)
    if not lo < hi:
        raise ValueError(f"empty search interval ({lo}, {hi})")

    f = _objective(method, model, setup, quad)
    grid = np.linspace(lo, hi, coarse_points)
    pairs = _map_ordered(f, grid)
    values = np.array([v for v, _ in pairs])
    divergent = np.array([d for _, d in pairs])
    n_evals = grid.size

    usable = np.isfinite(values)
    if not usable.any():
        if divergent.any():
            raise AllDivergentError(float(grid[np.argmax(divergent)]))
        raise ValueError("gamma could not be evaluated anywhere in the search interval")
    masked = np.where(usable, values, -math.inf)
    i0 = int(np.argmax(masked))
    best_theta, best_gamma = float(grid[i0]), float(values[i0])

    if best_gamma <= 0.0:
        return OptResult(best_theta, best_gamma, n_evals, refined=False)

    a = float(grid[max(i0 - 1, 0)])
    b = float(grid[min(i0 + 1, grid.size - 1)])

    def safe(theta: float) -> float:
        v, d = f(theta)
        return -math.inf if (d or not math.isfinite(v)) else v

    # golden-section maximisation on the bracket around the best grid point
    h = b - a
    c = a + (1.0 - _GOLDEN) * h
    d_ = a + _GOLDEN * h
    yc, yd = safe(c), safe(d_)
    n_evals += 2
    while h > theta_tol:
        if yc >= yd:
            b, d_, yd = d_, c, yc
            h = b - a
            c = a + (1.0 - _GOLDEN) * h
            yc = safe(c)
        else:
            a, c, yc = c, d_, yd
            h = b - a
            d_ = a + _GOLDEN * h
            yd = safe(d_)
        n_evals += 1
        for t, y in ((c, yc), (d_, yd)):
            if y > best_gamma:
                best_theta, best_gamma = t, y
    return OptResult(best_theta, best_gamma, n_evals, refined=True)


def sweep_nd(
    nd_list,
    gamma_width: float,
    half_width: float,
    setup: ReservoirSetup,
    quad: QuadratureSpec = DEFAULT_QUAD,
    weighting: str = tm.UNIFORM,
    coarse_points: int = 201,
) -> list[NdRecord]:
    """gamma_max for each resonance count, plus the boxcar saturation record."""
    nd_list = [int(n) for n in nd_list]
    if any(b <= a for a, b in zip(nd_list, nd_list[1:])):
        raise ValueError("nd_list must be strictly increasing")
    records = []
    for nd in nd_list:
        model = tm.LorentzianComb(nd, gamma_width, half_width, 0.0, weighting)
        opt = optimize_theta(model, setup, quad=quad, coarse_points=coarse_points)
        records.append(NdRecord(nd, tm.format_model(model), opt.gamma_max, opt.theta_star))
    box = tm.Boxcar(half_width, 0.0)
    opt = optimize_theta(box, setup, quad=quad, coarse_points=coarse_points)
    records.append(NdRecord(None, tm.format_model(box), opt.gamma_max, opt.theta_star))
    return records
