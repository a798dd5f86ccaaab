import math

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad

from mesometry.quadrature import QuadratureError, QuadratureSpec, adaptive_quad


def test_polynomial_exact():
    val, err = adaptive_quad(lambda x: x**4, 0.0, 1.0)
    assert val == pytest.approx(0.2, rel=1e-14)
    assert err < 1e-12


def test_lorentzian_against_arctan():
    g = 0.05
    f = lambda x: g * g / (g * g + x * x)
    val, _ = adaptive_quad(f, -10.0, 10.0, breakpoints=[0.0], rel_tol=1e-12, abs_tol=1e-15)
    truth = 2 * g * math.atan(10.0 / g)
    assert val == pytest.approx(truth, rel=1e-11)


def test_kink_with_and_without_breakpoint():
    f = lambda x: np.abs(x)
    with_bp, _ = adaptive_quad(f, -1.0, 2.0, breakpoints=[0.0])
    without_bp, _ = adaptive_quad(f, -1.0, 2.0)
    assert with_bp == pytest.approx(2.5, rel=1e-13)
    assert without_bp == pytest.approx(2.5, rel=1e-9)


def test_step_discontinuity():
    f = lambda x: np.where(x < 0.25, 1.0, 3.0)
    val, _ = adaptive_quad(f, 0.0, 1.0, breakpoints=[0.25])
    assert val == pytest.approx(0.25 + 3 * 0.75, rel=1e-13)


def test_error_estimate_is_honest():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = rng.uniform(0.3, 3.0)
        b = rng.uniform(0.5, 4.0)
        f = lambda x: np.exp(-a * x * x) * np.cos(b * x)
        val, err = adaptive_quad(f, -8.0, 8.0, rel_tol=1e-10)
        truth, _ = scipy_quad(lambda x: math.exp(-a * x * x) * math.cos(b * x), -8, 8, limit=200)
        assert abs(val - truth) <= max(err, 1e-10 * abs(truth)) + 1e-14


def test_matches_scipy_on_fermi_like_integrand():
    f = lambda x: 1.0 / (1.0 + np.exp(np.clip((x - 0.3) / 0.05, -700, 700))) * np.cos(x)
    val, _ = adaptive_quad(f, -5.0, 5.0, breakpoints=[0.3], rel_tol=1e-11)
    truth, _ = scipy_quad(
        lambda x: 1.0 / (1.0 + math.exp(min(max((x - 0.3) / 0.05, -700), 700))) * math.cos(x),
        -5,
        5,
        points=[0.3],
        limit=400,
        epsabs=1e-13,
        epsrel=1e-13,
    )
    assert val == pytest.approx(truth, rel=1e-10)


def test_reversed_and_empty_intervals():
    f = lambda x: x
    assert adaptive_quad(f, 1.0, 1.0) == (0.0, 0.0)
    v_fwd, _ = adaptive_quad(f, 0.0, 2.0)
    v_rev, _ = adaptive_quad(f, 2.0, 0.0)
    assert v_rev == -v_fwd


def test_nonconvergence_carries_estimate():
    # an oscillation too fast for 8 segments keeps the error estimate large
    f = lambda x: np.cos(3e5 * x)
    with pytest.raises(QuadratureError) as excinfo:
        adaptive_quad(f, 0.0, 1.0, rel_tol=1e-12, abs_tol=1e-15, max_subdivisions=8)
    assert math.isfinite(excinfo.value.estimate)
    assert excinfo.value.error_bound >= 0.0


def test_breakpoints_outside_interval_ignored():
    val, _ = adaptive_quad(lambda x: x * x, 0.0, 1.0, breakpoints=[-5.0, 0.5, 7.0])
    assert val == pytest.approx(1.0 / 3.0, rel=1e-13)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=-1e-9)
    with pytest.raises(ValueError):
        QuadratureSpec(tail_multiplier=5.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=0)
    spec = QuadratureSpec()
    assert spec.rel_tol == 1e-9 and spec.abs_tol == 1e-12
    assert spec.tail_multiplier == 40.0 and spec.max_subdivisions == 10_000
