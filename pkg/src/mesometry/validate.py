"""Self-contained cross-check suite wired to the `validate` subcommand.

Each check exercises an identity the implementation must satisfy (closed
form versus quadrature, limit chains, symmetries, estimator bounds) and
returns a pass/fail verdict with a one-line detail.  The checks read the
quadrature spec they are given, so loosening the tolerances makes the
agreement checks fail, as they should.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import transmission as tm
from .fermi import ReservoirSetup
from .limits import (
    boxcar_closed_current,
    boxcar_closed_noise,
    boxcar_closed_precision,
    precision_linear_response,
    precision_zero_t_integral,
    precision_zero_t_lorentzian,
)
from .montecarlo import McConfig, run_mc
from .quadrature import DEFAULT_QUAD, QuadratureSpec
from .transport import (
    conductance,
    conductance_by_parts,
    current_lb,
    dcurrent_dtheta,
    gamma_exact,
    noise_lb,
    transport,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rel(a: float, b: float, atol: float = 0.0) -> float:
    scale = max(abs(a), abs(b))
    if scale <= atol:
        return 0.0
    return abs(a - b) / scale


def check_boxcar_closed_forms(quad: QuadratureSpec) -> CheckResult:
    """Closed-form boxcar current/noise/rate against quadrature, rel 1e-8."""
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(10):
        kT = rng.uniform(0.1, 5.0)
        bias = rng.uniform(0.2, 2.0)
        delta = rng.uniform(0.3, 4.0)
        theta = rng.uniform(-delta - 4 * kT, bias + delta + 4 * kT)
        setup = ReservoirSetup(kT, bias)
        box = tm.Boxcar(delta, theta)
        atol = 4.0 * quad.abs_tol
        worst = max(
            worst,
            _rel(current_lb(box, setup, quad)[0], boxcar_closed_current(setup, delta, theta), atol),
            _rel(noise_lb(box, setup, quad)[0], boxcar_closed_noise(setup, delta, theta), atol),
            _rel(
                gamma_exact(box, setup, quad)[0],
                boxcar_closed_precision(setup, delta, theta),
                atol,
            ),
        )
    return CheckResult(
        "boxcar-closed-forms", worst < 1e-8, f"max rel deviation {worst:.3g} (tolerance 1e-8)"
    )


def check_johnson_nyquist(quad: QuadratureSpec) -> CheckResult:
    """Equilibrium noise equals 4 kT G for all three families, rel 1e-7."""
    setup = ReservoirSetup(temperature=0.4, bias=0.0, fermi_energy=0.1)
    models = [
        tm.Lorentzian(0.25, 0.3),
        tm.LorentzianComb(5, 0.2, 1.5, -0.2),
        tm.Boxcar(1.2, 0.5),
    ]
    worst = 0.0
    for model in models:
        s, _ = noise_lb(model, setup, quad)
        g, _ = conductance(model, setup, quad)
        worst = max(worst, _rel(s, 4.0 * setup.temperature * g))
    return CheckResult(
        "johnson-nyquist", worst < 1e-7, f"max rel deviation {worst:.3g} (tolerance 1e-7)"
    )


def check_conductance_forms(quad: QuadratureSpec) -> CheckResult:
    """Kernel and integrated-by-parts conductance agree, rel 1e-8."""
    setup = ReservoirSetup(temperature=0.7, bias=0.0, fermi_energy=-0.3)
    models = [
        tm.Lorentzian(0.4, 0.6),
        tm.LorentzianComb(7, 0.15, 2.0, 0.4),
        tm.Boxcar(0.8, -0.5),
    ]
    worst = 0.0
    for model in models:
        g1, _ = conductance(model, setup, quad)
        g2, _ = conductance_by_parts(model, setup, quad)
        worst = max(worst, _rel(g1, g2))
    return CheckResult(
        "conductance-two-forms", worst < 1e-8, f"max rel deviation {worst:.3g} (tolerance 1e-8)"
    )


def check_gamma_symmetry(quad: QuadratureSpec) -> CheckResult:
    """gamma(centre + x) equals gamma(centre - x), rel 1e-6."""
    setup = ReservoirSetup(temperature=0.5, bias=1.0, fermi_energy=0.2)
    centre = setup.fermi_energy + setup.bias / 2.0
    models = [
        tm.Lorentzian(0.2, 0.0),
        tm.LorentzianComb(5, 0.1, 1.0, 0.0),
        tm.Boxcar(0.9, 0.0),
    ]
    worst = 0.0
    for model in models:
        for x in (0.3, 0.8, 1.7):
            gp, _ = gamma_exact(replace(model, theta=centre + x), setup, quad)
            gm, _ = gamma_exact(replace(model, theta=centre - x), setup, quad)
            worst = max(worst, _rel(gp, gm))
    return CheckResult(
        "gamma-symmetry", worst < 1e-6, f"max rel deviation {worst:.3g} (tolerance 1e-6)"
    )


def check_theta_derivative(quad: QuadratureSpec) -> CheckResult:
    """Analytic dI/dtheta matches a central difference of the current, rel 1e-5."""
    setup = ReservoirSetup(temperature=0.3, bias=0.8, fermi_energy=0.0)
    worst = 0.0
    for model in [tm.Lorentzian(0.2, 0.45), tm.LorentzianComb(5, 0.1, 1.0, 0.6)]:
        step = 1e-5 * max(tm.energy_scale(model), 1.0)
        analytic, _ = dcurrent_dtheta(model, setup, quad)
        ip, _ = current_lb(replace(model, theta=model.theta + step), setup, quad)
        im, _ = current_lb(replace(model, theta=model.theta - step), setup, quad)
        fd = (ip - im) / (2.0 * step)
        worst = max(worst, _rel(analytic, fd))
    return CheckResult(
        "theta-derivative-consistency",
        worst < 1e-5,
        f"max rel deviation from finite difference {worst:.3g} (tolerance 1e-5)",
    )


def check_convention_swap(quad: QuadratureSpec) -> CheckResult:
    """Swapping the biased lead flips the current sign and leaves gamma alone."""
    setup = ReservoirSetup(temperature=0.6, bias=1.2, fermi_energy=0.1)
    model = tm.Lorentzian(0.3, 0.7)
    r1 = transport(model, setup, quad)
    r2 = transport(model, setup.swapped(), quad)
    current_flips = _rel(r1.current, -r2.current) < 1e-9
    gamma_same = _rel(r1.precision_rate, r2.precision_rate) < 1e-9
    noise_same = _rel(r1.noise, r2.noise) < 1e-9
    ok = current_flips and gamma_same and noise_same
    return CheckResult(
        "convention-swap",
        ok,
        f"current flip {current_flips}, noise invariant {noise_same}, gamma invariant {gamma_same}",
    )


def check_lr_chain(quad: QuadratureSpec) -> CheckResult:
    """Exact gamma approaches the linear-response rate at bias = 0.01 kT, rel 2%."""
    worst = 0.0
    for gamma_w, theta, kT in [(0.1, 0.35, 1.0), (0.3, -0.5, 0.8), (0.05, 0.2, 1.5)]:
        setup = ReservoirSetup(temperature=kT, bias=0.01 * kT)
        model = tm.Lorentzian(gamma_w, theta)
        exact, _ = gamma_exact(model, setup, quad)
        lr = precision_linear_response(model, setup, quad).value
        worst = max(worst, _rel(exact, lr))
    return CheckResult("lr-limit-chain", worst < 0.02, f"max rel deviation {worst:.3g} (tolerance 2%)")


def check_zero_t_chain(quad: QuadratureSpec) -> CheckResult:
    """Exact gamma at kT = 1e-6 approaches the zero-T window form, rel 0.1%."""
    worst = 0.0
    for gamma_w, theta in [(0.2, 0.3), (0.5, 1.2), (0.1, -0.15)]:
        cold = ReservoirSetup(temperature=1e-6, bias=1.0)
        frozen = ReservoirSetup(temperature=0.0, bias=1.0)
        model = tm.Lorentzian(gamma_w, theta)
        exact, _ = gamma_exact(model, cold, quad)
        zt = precision_zero_t_integral(model, frozen, quad).value
        worst = max(worst, _rel(exact, zt))
    return CheckResult("zero-t-chain", worst < 1e-3, f"max rel deviation {worst:.3g} (tolerance 0.1%)")


def check_sommerfeld(quad: QuadratureSpec) -> CheckResult:
    """Lorentzian weak-energy-dependence form vs the window integral at gamma = 100 eV."""
    setup = ReservoirSetup(temperature=0.0, bias=1.0)
    model = tm.Lorentzian(100.0, 10.0)
    integral = precision_zero_t_integral(model, setup, quad).value
    reduced = precision_zero_t_lorentzian(model, setup).value
    rel = _rel(integral, reduced)
    return CheckResult("sommerfeld-vs-integral", rel < 0.01, f"rel deviation {rel:.3g} (tolerance 1%)")


def check_estimator(quad: QuadratureSpec) -> CheckResult:
    """Quick Monte-Carlo: variance tracks 1/(gamma tau) and respects the CRB."""
    setup = ReservoirSetup(temperature=0.1, bias=1.0)
    model = tm.Lorentzian(0.1, 0.2)
    g, _ = gamma_exact(model, setup, quad)
    config = McConfig(tau=100.0 / g, n_trials=2000, seed=11, theta_true=0.2001, theta_ref=0.2)
    report = run_mc(model, setup, config, quad)
    ratio = report.estimator_variance / report.predicted_variance
    ok = 0.85 < ratio < 1.15 and report.crb_satisfied
    return CheckResult(
        "estimator-variance",
        ok,
        f"variance/prediction = {ratio:.4f}, CRB satisfied = {report.crb_satisfied}",
    )


ALL_CHECKS = [
    check_boxcar_closed_forms,
    check_johnson_nyquist,
    check_conductance_forms,
    check_gamma_symmetry,
    check_theta_derivative,
    check_convention_swap,
    check_lr_chain,
    check_zero_t_chain,
    check_sommerfeld,
    check_estimator,
]


def run_validation(quad: QuadratureSpec = DEFAULT_QUAD) -> list[CheckResult]:
    results = []
    for check in ALL_CHECKS:
        try:
            results.append(check(quad))
        except Exception as exc:  # a crash is a failure, not an abort
            name = check.__name__.removeprefix("check_").replace("_", "-")
            results.append(CheckResult(name, False, f"raised {type(exc).__name__}: {exc}"))
    return results
