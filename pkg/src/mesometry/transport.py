"""Exact two-terminal transport integrals: current, DC noise, conductance.

Everything here evaluates the scattering-theory expressions

    I        = 2 * integral T(e) [f_R - f_L] de
    <<I^2>>  = 4 * integral [T(1-T)(f_R-f_L)^2 + T (f_L(1-f_L)+f_R(1-f_R))] de
    G        = (2/kT) * integral T(e) f(1-f)|_mu de          (kT > 0)

in units e = h = k_B = 1 (current in e*E0/h, noise in e^2*E0/h, G in units
where G0 = 2).  At zero temperature the Fermi windows collapse and the
integrals are taken exactly over the bias window instead of being smeared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import transmission as tm
from .fermi import ReservoirSetup, f1_kernel, f2_kernel, fermi, fermi_fluctuation, fermi_window
from .quadrature import DEFAULT_QUAD, QuadratureSpec, adaptive_quad


@dataclass(frozen=True)
class TransportResult:
    """Bundle of the four transport scalars at one parameter point.

    ``divergent`` is set when the noise underflows while the current
    sensitivity does not (the zero-temperature boxcar situation), in which
    case ``precision_rate`` is reported as inf alongside the flag.
    """

    current: float
    noise: float
    dcurrent_dtheta: float
    precision_rate: float
    quad_error: float
    divergent: bool


def _window_sign(setup: ReservoirSetup) -> float:
    """Sign of f_R - f_L inside the bias window."""
    if setup.mu_right > setup.mu_left:
        return 1.0
    if setup.mu_right < setup.mu_left:
        return -1.0
    return 0.0


def _bias_window(setup: ReservoirSetup):
    return min(setup.mu_left, setup.mu_right), max(setup.mu_left, setup.mu_right)


def _thermal_guards(mus, kT: float, lo: float, hi: float) -> list[float]:
    """Segment edges bracketing each exponential Fermi feature.

    A feature of width kT sitting at the edge of a segment much wider than
    kT falls between the Kronrod nodes and is silently missed, so each
    chemical potential gets shells at +-4, +-12 and +-32 kT that confine
    the feature to segments of its own scale.  Beyond 32 kT the integrands
    are dead to below any supported tolerance.
    """
    if kT <= 0:
        return []
    guards = []
    for mu in mus:
        for shell in (4.0, 12.0, 32.0):
            for sign in (-1.0, 1.0):
                g = mu + sign * shell * kT
                if lo < g < hi:
                    guards.append(g)
    return guards


def _integration_bounds(model, setup: ReservoirSetup, quad: QuadratureSpec):
    """Breakpoints plus exponential-tail padding.

    Tails extend tail_multiplier * max(kT, width) beyond the outermost
    breakpoint; when kT is small compared to a Lorentzian width the window
    is widened to 1000 widths so the power-law flanks are fully covered.
    """
    pts = tm.breakpoints(model, setup)
    width = tm.energy_scale(model)
    tail = quad.tail_multiplier * max(setup.temperature, width)
    if not isinstance(model, tm.Boxcar) and setup.temperature < 0.1 * width:
        tail = max(tail, 1000.0 * width)
    lo, hi = pts[0] - tail, pts[-1] + tail
    pts = sorted(pts + _thermal_guards([setup.mu_left, setup.mu_right], setup.temperature, lo, hi))
    return lo, hi, pts


def _quad(f, lo, hi, pts, quad: QuadratureSpec):
    return adaptive_quad(
        f,
        lo,
        hi,
        breakpoints=pts,
        rel_tol=quad.rel_tol,
        abs_tol=quad.abs_tol,
        max_subdivisions=quad.max_subdivisions,
    )


def _box_clip(model, lo, hi, pts):
    """Boxcar integrands vanish outside the box; restrict the window."""
    a = model.theta - model.half_width
    b = model.theta + model.half_width
    lo, hi = max(lo, a), min(hi, b)
    if hi <= lo:
        return None
    return lo, hi, [p for p in pts if lo < p < hi]


def current_lb(model, setup: ReservoirSetup, quad: QuadratureSpec = DEFAULT_QUAD):
    """Mean steady-state current, with its quadrature error estimate.

    Returns (value, error).  At T = 0 the integral runs exactly over the
    bias window.
    """
    if setup.temperature == 0:
        lo, hi = _bias_window(setup)
        sign = _window_sign(setup)
        if sign == 0.0:
            return 0.0, 0.0
        pts = [p for p in tm.breakpoints(model) if lo < p < hi]
        val, err = _quad(lambda e: tm.evaluate(model, e), lo, hi, pts, quad)
        return 2.0 * sign * val, 2.0 * err
    lo, hi, pts = _integration_bounds(model, setup, quad)
    if isinstance(model, tm.Boxcar):
        clipped = _box_clip(model, lo, hi, pts)
        if clipped is None:
            return 0.0, 0.0
        lo, hi, pts = clipped
    val, err = _quad(
        lambda e: tm.evaluate(model, e) * fermi_window(e, setup), lo, hi, pts, quad
    )
    return 2.0 * val, 2.0 * err


def noise_lb(model, setup: ReservoirSetup, quad: QuadratureSpec = DEFAULT_QUAD):
    """Zero-frequency current noise, with its quadrature error estimate."""
    if setup.temperature == 0:
        lo, hi = _bias_window(setup)
        if hi <= lo:
            return 0.0, 0.0
        if isinstance(model, tm.Boxcar):
            # T(1-T) vanishes identically and F2 = 0 at T = 0
            return 0.0, 0.0
        pts = [p for p in tm.breakpoints(model) if lo < p < hi]

        def shot(e):
            t = tm.evaluate(model, e)
            return t * (1.0 - t)

        val, err = _quad(shot, lo, hi, pts, quad)
        return 4.0 * val, 4.0 * err
    lo, hi, pts = _integration_bounds(model, setup, quad)
    if isinstance(model, tm.Boxcar):
        clipped = _box_clip(model, lo, hi, pts)
        if clipped is None:
            return 0.0, 0.0
        lo, hi, pts = clipped

        def thermal(e):
            return tm.evaluate(model, e) * f2_kernel(e, setup)

        val, err = _quad(thermal, lo, hi, pts, quad)
        return 4.0 * val, 4.0 * err

    def integrand(e):
        t = tm.evaluate(model, e)
        return t * (1.0 - t) * f1_kernel(e, setup) + t * f2_kernel(e, setup)

    val, err = _quad(integrand, lo, hi, pts, quad)
    return 4.0 * val, 4.0 * err


def dcurrent_dtheta(model, setup: ReservoirSetup, quad: QuadratureSpec = DEFAULT_QUAD):
    """Sensitivity of the current to the level position theta.

    Smooth families differentiate the transmission under the integral;
    the boxcar uses the exact boundary terms
    dI/dtheta = 2 [(f_R - f_L)(theta + delta) - (f_R - f_L)(theta - delta)].
    """
    if isinstance(model, tm.Boxcar):
        hi_edge = model.theta + model.half_width
        lo_edge = model.theta - model.half_width
        return (
            2.0 * (fermi_window(hi_edge, setup) - fermi_window(lo_edge, setup)),
            0.0,
        )
    if setup.temperature == 0:
        lo, hi = _bias_window(setup)
        sign = _window_sign(setup)
        if sign == 0.0:
            return 0.0, 0.0
        pts = [p for p in tm.breakpoints(model) if lo < p < hi]
        val, err = _quad(lambda e: tm.theta_derivative(model, e), lo, hi, pts, quad)
        return 2.0 * sign * val, 2.0 * err
    lo, hi, pts = _integration_bounds(model, setup, quad)
    val, err = _quad(
        lambda e: tm.theta_derivative(model, e) * fermi_window(e, setup), lo, hi, pts, quad
    )
    return 2.0 * val, 2.0 * err


def conductance(model, setup: ReservoirSetup, quad: QuadratureSpec = DEFAULT_QUAD, mu=None):
    """Linear-response conductance about the equilibrium potential mu.

    Defaults to mu = fermi_energy.  At T = 0 this is G0 * T(mu); at finite
    temperature it is the thermally smeared kernel integral
    (2/kT) * integral T(e) f(1-f) de.  Returns (value, error).
    """
    if mu is None:
        mu = setup.fermi_energy
    T = setup.temperature
    if T == 0:
        return 2.0 * float(tm.evaluate(model, mu)), 0.0
    pts = sorted(set(tm.breakpoints(model)) | {mu})
    width = tm.energy_scale(model)
    tail = quad.tail_multiplier * max(T, width)
    lo, hi = pts[0] - tail, pts[-1] + tail
    pts = sorted(pts + _thermal_guards([mu], T, lo, hi))
    if isinstance(model, tm.Boxcar):
        clipped = _box_clip(model, lo, hi, pts)
        if clipped is None:
            return 0.0, 0.0
        lo, hi, pts = clipped
    val, err = _quad(
        lambda e: tm.evaluate(model, e) * fermi_fluctuation(e, mu, T), lo, hi, pts, quad
    )
    return 2.0 * val / T, 2.0 * err / T


def conductance_by_parts(model, setup: ReservoirSetup, quad: QuadratureSpec = DEFAULT_QUAD, mu=None):
    """Conductance from the integrated-by-parts form 2 * integral dT/de f de.

    Algebraically identical to `conductance`; kept as an independent route
    for consistency checks.  The slowly decaying part of the integrand is
    removed analytically: with Theta the T = 0 step,
    integral dT/de f = T(mu) + integral dT/de (f - Theta(mu - e)) de,
    leaving an exponentially localised integrand.  For the boxcar the
    derivative collapses to boundary terms, 2 [f(a) - f(b)].
    """
    if mu is None:
        mu = setup.fermi_energy
    T = setup.temperature
    if isinstance(model, tm.Boxcar):
        a = model.theta - model.half_width
        b = model.theta + model.half_width
        return 2.0 * (fermi(a, mu, T) - fermi(b, mu, T)), 0.0
    if T == 0:
        return 2.0 * float(tm.evaluate(model, mu)), 0.0
    pts = sorted(set(tm.breakpoints(model)) | {mu})
    width = tm.energy_scale(model)
    tail = quad.tail_multiplier * max(T, width)
    lo, hi = pts[0] - tail, pts[-1] + tail
    pts = sorted(pts + _thermal_guards([mu], T, lo, hi))

    def integrand(e):
        step = np.where(e < mu, 1.0, np.where(e > mu, 0.0, 0.5))
        return tm.energy_derivative(model, e) * (fermi(e, mu, T) - step)

    val, err = _quad(integrand, lo, hi, pts, quad)
    return 2.0 * (float(tm.evaluate(model, mu)) + val), 2.0 * err


def dconductance_dtheta(model, setup: ReservoirSetup, quad: QuadratureSpec = DEFAULT_QUAD, mu=None):
    """Analytic theta-derivative of the conductance (boundary terms for the boxcar)."""
    if mu is None:
        mu = setup.fermi_energy
    T = setup.temperature
    if isinstance(model, tm.Boxcar):
        if T == 0:
            raise tm.DistributionalDerivativeError(
                "boxcar conductance is a step in theta at T = 0"
            )
        a = model.theta - model.half_width
        b = model.theta + model.half_width
        val = 2.0 * (fermi_fluctuation(b, mu, T) - fermi_fluctuation(a, mu, T)) / T
        return val, 0.0
    if T == 0:
        return 2.0 * float(tm.theta_derivative(model, mu)), 0.0
    pts = sorted(set(tm.breakpoints(model)) | {mu})
    width = tm.energy_scale(model)
    tail = quad.tail_multiplier * max(T, width)
    lo, hi = pts[0] - tail, pts[-1] + tail
    pts = sorted(pts + _thermal_guards([mu], T, lo, hi))
    val, err = _quad(
        lambda e: tm.theta_derivative(model, e) * fermi_fluctuation(e, mu, T), lo, hi, pts, quad
    )
    return 2.0 * val / T, 2.0 * err / T


def precision_from(noise: float, didtheta: float, abs_tol: float):
    """(gamma, divergent) from the noise and current sensitivity."""
    if noise > abs_tol:
        return didtheta * didtheta / noise, False
    if didtheta * didtheta > abs_tol:
        return math.inf, True
    return 0.0, False


def transport(model, setup: ReservoirSetup, quad: QuadratureSpec = DEFAULT_QUAD) -> TransportResult:
    """Current, noise, sensitivity and precision rate gamma = (dI/dtheta)^2 / noise."""
    current, e1 = current_lb(model, setup, quad)
    noise, e2 = noise_lb(model, setup, quad)
    didt, e3 = dcurrent_dtheta(model, setup, quad)
    gamma, divergent = precision_from(noise, didt, quad.abs_tol)
    return TransportResult(
        current=current,
        noise=noise,
        dcurrent_dtheta=didt,
        precision_rate=gamma,
        quad_error=e1 + e2 + e3,
        divergent=divergent,
    )


def gamma_exact(model, setup: ReservoirSetup, quad: QuadratureSpec = DEFAULT_QUAD):
    """(gamma, divergent) without the current integral; used by sweeps."""
    noise, _ = noise_lb(model, setup, quad)
    didt, _ = dcurrent_dtheta(model, setup, quad)
    return precision_from(noise, didt, quad.abs_tol)
