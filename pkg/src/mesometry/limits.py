"""Closed-form and limiting expressions for the precision rate.

Covers the linear-response rate V^2 (dG/dtheta)^2 / (4 kT G), the
zero-temperature window integrals, the weak-energy-dependence (Sommerfeld)
form, its Lorentzian reduction, the boxcar closed forms for current, noise
and precision, and the Fisher information of the long-time Gaussian charge
distribution.  All hyperbolic closed forms are evaluated in the log domain
so that width/temperature ratios up to ~1e4 do not overflow.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from . import transmission as tm
from .fermi import G0, ReservoirSetup, fermi_window
from .quadrature import DEFAULT_QUAD, QuadratureSpec, adaptive_quad
from .transport import (
    TransportResult,
    conductance,
    dconductance_dtheta,
    noise_lb,
)

_LOG2 = math.log(2.0)


class DegenerateInputError(ValueError):
    """Inputs for which the requested limit expression is ill defined."""


class PerfectTransmissionError(ValueError):
    """The Sommerfeld form contains 1/(1 - T_F) and T_F = 1 here."""


class DivergenceError(RuntimeError):
    """The noise vanished while the signal did not; the rate diverges."""


@dataclass(frozen=True)
class LimitResult:
    """A limit-expression value plus an explicit statement of its validity.

    ``regime_valid`` is computed from concrete inequalities on the supplied
    parameters, never silently assumed; ``details`` carries the factor
    decompositions used by the figure insets.
    """

    value: float
    regime_valid: bool
    validity_note: str
    divergent: bool = False
    details: dict = field(default_factory=dict)


def _logsinh(t: float) -> float:
    # valid for t > 0
    return t + math.log1p(-math.exp(-2.0 * t)) - _LOG2


def _logcosh(t: float) -> float:
    t = abs(t)
    return t + math.log1p(math.exp(-2.0 * t)) - _LOG2


def _softplus(x: float) -> float:
    return float(np.logaddexp(0.0, x))


def _check_identity(direct: float, recombined: float):
    if direct == 0.0 and recombined == 0.0:
        return
    if abs(direct - recombined) > 1e-12 * max(abs(direct), abs(recombined)):
        raise AssertionError(
            f"factor decomposition mismatch: {direct!r} vs {recombined!r}"
        )


# --------------------------------------------------------------------------
# linear response


def precision_linear_response(
    model,
    setup: ReservoirSetup,
    quad: QuadratureSpec = DEFAULT_QUAD,
    reference: float | None = None,
) -> LimitResult:
    """Linear-response precision rate V^2 (dG/dtheta)^2 / (4 kT G).

    ``reference`` is the equilibrium chemical potential about which the
    conductance is evaluated.  The default is the bias-window midpoint
    fermi_energy + bias/2, which cancels the leading O(eV/kT) error of the
    expansion; pass ``reference=setup.fermi_energy`` to reproduce the
    unshifted textbook forms.
    """
    kT = setup.temperature
    if kT <= 0:
        raise ValueError("linear response requires temperature > 0")
    ref = setup.fermi_energy + 0.5 * setup.bias if reference is None else reference
    g, _ = conductance(model, setup, quad, mu=ref)
    if g <= quad.abs_tol:
        raise DegenerateInputError(
            f"conductance underflow ({g:.3g}) at reference {ref:.6g}; "
            "transmission has no weight near the equilibrium window"
        )
    dg, _ = dconductance_dtheta(model, setup, quad, mu=ref)
    v = setup.bias
    value = v * v * dg * dg / (4.0 * kT * g)
    thermal_ratio = v / (4.0 * kT)
    rel_sensitivity = (dg / g) ** 2
    particle_current = g * v
    _check_identity(value, thermal_ratio * rel_sensitivity * particle_current)
    valid = abs(v) <= 0.1 * kT
    return LimitResult(
        value=value,
        regime_valid=valid,
        validity_note=f"requires |bias| << kT; here |bias|/kT = {abs(v) / kT:.3g}",
        details={
            "conductance": g,
            "dconductance_dtheta": dg,
            "thermal_ratio": thermal_ratio,
            "rel_sensitivity": rel_sensitivity,
            "particle_current": particle_current,
            "reference": ref,
        },
    )


# --------------------------------------------------------------------------
# zero temperature


def _edge_weight(x: float, lo: float, hi: float) -> float:
    """Indicator of the open window with the symmetric 1/2 edge convention."""
    if lo < x < hi:
        return 1.0
    if x == lo or x == hi:
        return 0.5
    return 0.0


def precision_zero_t_integral(
    model, setup: ReservoirSetup, quad: QuadratureSpec = DEFAULT_QUAD
) -> LimitResult:
    """Zero-temperature rate (int dT/dtheta)^2 / (int T(1-T)) over the bias window.

    The boxcar numerator reduces to boundary terms (+-1 per edge inside the
    window) and its denominator vanishes identically, which is reported as a
    divergence when the numerator survives and as a degenerate zero
    (theta-independent current) otherwise.
    """
    lo = min(setup.fermi_energy, setup.fermi_energy + setup.bias)
    hi = max(setup.fermi_energy, setup.fermi_energy + setup.bias)
    width = tm.energy_scale(model)
    valid = setup.temperature <= 0.01 * min(abs(setup.bias), width) if setup.bias else False
    note = "exact at T = 0; requires kT << |bias| and kT << model width"
    if hi == lo:
        return LimitResult(0.0, valid, "zero bias window", details={"numerator": 0.0, "denominator": 0.0})
    if isinstance(model, tm.Boxcar):
        a = model.theta - model.half_width
        b = model.theta + model.half_width
        num = (_edge_weight(b, lo, hi) - _edge_weight(a, lo, hi)) ** 2
        den = 0.0
    else:
        pts = [p for p in tm.breakpoints(model) if lo < p < hi]
        dnum, _ = adaptive_quad(
            lambda e: tm.theta_derivative(model, e),
            lo,
            hi,
            breakpoints=pts,
            rel_tol=quad.rel_tol,
            abs_tol=quad.abs_tol,
            max_subdivisions=quad.max_subdivisions,
        )
        num = dnum * dnum
        den, _ = adaptive_quad(
            lambda e: tm.evaluate(model, e) * (1.0 - tm.evaluate(model, e)),
            lo,
            hi,
            breakpoints=pts,
            rel_tol=quad.rel_tol,
            abs_tol=quad.abs_tol,
            max_subdivisions=quad.max_subdivisions,
        )
    details = {"numerator": num, "denominator": den}
    if den > quad.abs_tol:
        return LimitResult(num / den, valid, note, details=details)
    if num > quad.abs_tol:
        return LimitResult(
            math.inf, valid, note + "; noise-free window, rate diverges", divergent=True, details=details
        )
    return LimitResult(
        0.0, valid, note + "; theta-independent current in window (degenerate)", details=details
    )


def precision_zero_t_sommerfeld(model, setup: ReservoirSetup) -> LimitResult:
    """Weak-energy-dependence zero-T rate |eV| T_F (d ln T_F/dtheta)^2 / (1 - T_F).

    Requires 0 < T_F < 1; T_F = 1 raises PerfectTransmissionError since the
    formula contains 1/(1 - T_F) (for the Lorentzian the singularity is
    removable, see `precision_zero_t_lorentzian`).
    """
    ef = setup.fermi_energy
    tf = float(tm.evaluate(model, ef))
    if tf >= 1.0:
        raise PerfectTransmissionError(
            "T(fermi_energy) = 1: the 1/(1 - T_F) factor is singular"
        )
    if tf <= 0.0:
        raise DegenerateInputError("T(fermi_energy) = 0: no transmission at the Fermi energy")
    dtf = float(tm.theta_derivative(model, ef))
    v = abs(setup.bias)
    value = v * dtf * dtf / (tf * (1.0 - tf))
    snr = tf / (1.0 - tf)
    rel_sensitivity = (dtf / tf) ** 2
    attempt_rate = G0 * v / 2.0
    _check_identity(value, 0.5 * snr * rel_sensitivity * G0 * v)
    slope = float(tm.energy_derivative(model, ef))
    valid = abs(setup.bias * slope) <= 0.1 * tf
    return LimitResult(
        value=value,
        regime_valid=valid,
        validity_note=(
            "requires weak energy dependence over the bias window; "
            f"|eV dT/de| / T_F = {abs(setup.bias * slope) / tf:.3g}"
        ),
        details={
            "transmission_at_fermi": tf,
            "bernoulli_snr": snr,
            "rel_sensitivity": rel_sensitivity,
            "attempt_rate": attempt_rate,
        },
    )


def precision_zero_t_lorentzian(model: tm.Lorentzian, setup: ReservoirSetup) -> LimitResult:
    """Lorentzian reduction of the Sommerfeld rate: 2 G0 |V| (T_F / gamma)^2.

    Regular for all theta (the 1/(1 - T_F) singularity cancels); maximal at
    theta = fermi_energy with value 2 G0 |V| / gamma^2.
    """
    if not isinstance(model, tm.Lorentzian):
        raise TypeError("this reduction only applies to a single Lorentzian resonance")
    tf = float(tm.evaluate(model, setup.fermi_energy))
    value = 2.0 * G0 * abs(setup.bias) * (tf / model.gamma) ** 2
    valid = abs(setup.bias) <= 0.1 * model.gamma
    return LimitResult(
        value=value,
        regime_valid=valid,
        validity_note=(
            f"strong-coupling form, requires |bias| << gamma; ratio = {abs(setup.bias) / model.gamma:.3g}"
        ),
        details={"transmission_at_fermi": tf},
    )


# --------------------------------------------------------------------------
# boxcar closed forms


def _box_edges(delta: float, theta: float):
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    return theta - delta, theta + delta


def _thermal_edge_ratio(delta_beta: float, dist_beta: float) -> float:
    """sinh(d b) / (cosh(d b) + cosh(x b)), overflow safe."""
    return math.exp(
        _logsinh(delta_beta) - np.logaddexp(_logcosh(delta_beta), _logcosh(dist_beta))
    )


def boxcar_closed_current(setup: ReservoirSetup, delta: float, theta: float) -> float:
    """Closed-form boxcar current; exact window overlap at T = 0."""
    a, b = _box_edges(delta, theta)
    kT = setup.temperature
    mu_r, mu_l = setup.mu_right, setup.mu_left
    if kT == 0:
        seg = lambda mu: max(0.0, min(b, mu) - a)
        return 2.0 * (seg(mu_r) - seg(mu_l))
    beta = 1.0 / kT
    return 2.0 * kT * (
        _softplus(beta * (mu_r - a))
        - _softplus(beta * (mu_r - b))
        - _softplus(beta * (mu_l - a))
        + _softplus(beta * (mu_l - b))
    )


def boxcar_closed_noise(setup: ReservoirSetup, delta: float, theta: float) -> float:
    """Closed-form boxcar DC noise; identically zero at T = 0."""
    _box_edges(delta, theta)
    kT = setup.temperature
    if kT == 0:
        return 0.0
    beta = 1.0 / kT
    return 4.0 * kT * (
        _thermal_edge_ratio(delta * beta, (theta - setup.mu_left) * beta)
        + _thermal_edge_ratio(delta * beta, (theta - setup.mu_right) * beta)
    )


def boxcar_closed_precision(setup: ReservoirSetup, delta: float, theta: float) -> float:
    """Closed-form boxcar precision rate.

    At T = 0 the Appendix-style window-overlap analysis applies: the rate is
    inf when exactly one boxcar edge lies inside the bias window (finite
    sensitivity, zero noise) and 0 otherwise.
    """
    a, b = _box_edges(delta, theta)
    kT = setup.temperature
    if kT == 0:
        didt = 2.0 * (fermi_window(b, setup) - fermi_window(a, setup))
        return math.inf if didt != 0.0 else 0.0
    if setup.bias == 0.0:
        return 0.0
    beta = 1.0 / kT
    centre = 0.5 * (setup.mu_left + setup.mu_right)
    if theta == centre:
        return 0.0
    m_l = _logcosh((theta - setup.mu_left) * beta)
    m_r = _logcosh((theta - setup.mu_right) * beta)
    ld = _logcosh(delta * beta)
    log_num = (
        math.log(4.0 / kT)
        + _logsinh(delta * beta)
        + 2.0 * _logsinh(abs(setup.bias) * beta / 2.0)
        + 2.0 * _logsinh(abs(centre - theta) * beta)
    )
    log_den = (
        np.logaddexp(ld, m_l)
        + np.logaddexp(ld, m_r)
        + np.logaddexp.reduce([m_l, _LOG2 + ld, m_r])
    )
    return math.exp(log_num - log_den)


def boxcar_lr_current(
    setup: ReservoirSetup, delta: float, theta: float, mu: float | None = None
) -> float:
    """Linear-response boxcar current G * V (kT >> |eV| regime).

    Carries the sign convention of `current_lb`: positive for bias > 0 when
    the right lead is biased.
    """
    sign = 1.0 if setup.biased_lead == "R" else -1.0
    return sign * setup.bias * boxcar_lr_conductance(setup, delta, theta, mu)


def boxcar_lr_conductance(
    setup: ReservoirSetup, delta: float, theta: float, mu: float | None = None
) -> float:
    """Closed-form boxcar conductance 2 sinh(d/kT) / (cosh(d/kT) + cosh((theta-mu)/kT))."""
    _box_edges(delta, theta)
    kT = setup.temperature
    if kT <= 0:
        raise ValueError("linear response requires temperature > 0")
    if mu is None:
        mu = setup.fermi_energy
    beta = 1.0 / kT
    return 2.0 * _thermal_edge_ratio(delta * beta, (theta - mu) * beta)


def boxcar_lr_noise(
    setup: ReservoirSetup, delta: float, theta: float, mu: float | None = None
) -> float:
    """Johnson-Nyquist boxcar noise 4 kT G."""
    return 4.0 * setup.temperature * boxcar_lr_conductance(setup, delta, theta, mu)


def boxcar_lr_precision(
    setup: ReservoirSetup, delta: float, theta: float, mu: float | None = None
) -> float:
    """Linear-response boxcar rate, the sinh/cosh^3 closed form."""
    _box_edges(delta, theta)
    kT = setup.temperature
    if kT <= 0:
        raise ValueError("linear response requires temperature > 0")
    if mu is None:
        mu = setup.fermi_energy
    if theta == mu or setup.bias == 0.0:
        return 0.0
    beta = 1.0 / kT
    log_num = (
        2.0 * math.log(abs(setup.bias))
        + _logsinh(delta * beta)
        + 2.0 * _logsinh(abs(theta - mu) * beta)
    )
    log_den = (
        _LOG2
        + 3.0 * math.log(kT)
        + 3.0 * np.logaddexp(_logcosh(delta * beta), _logcosh((theta - mu) * beta))
    )
    return math.exp(log_num - log_den)


# --------------------------------------------------------------------------
# Fisher information of the Gaussian charge distribution


def fisher_gaussian(
    result: TransportResult,
    tau: float,
    model,
    setup: ReservoirSetup,
    quad: QuadratureSpec = DEFAULT_QUAD,
    step: float | None = None,
) -> float:
    """Fisher information tau (dI/dtheta)^2 / S + (d ln S / dtheta / 2)^2.

    The logarithmic noise derivative is taken by a central finite difference
    of the noise integral in theta (it only enters the subleading term).
    """
    if tau <= 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    if result.noise <= 0:
        raise DivergenceError("zero noise: Fisher information diverges")
    if step is None:
        step = 1e-5 * max(tm.energy_scale(model), setup.temperature, 1.0)
    s_plus, _ = noise_lb(dataclasses.replace(model, theta=model.theta + step), setup, quad)
    s_minus, _ = noise_lb(dataclasses.replace(model, theta=model.theta - step), setup, quad)
    dlog_noise = (s_plus - s_minus) / (2.0 * step * result.noise)
    gamma = result.dcurrent_dtheta**2 / result.noise
    return tau * gamma + 0.25 * dlog_noise**2
