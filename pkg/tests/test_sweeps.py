import math

import numpy as np
import pytest

from mesometry.fermi import ReservoirSetup
from mesometry.sweeps import AllDivergentError, optimize_theta, sweep_nd, sweep_theta
from mesometry.transmission import Boxcar, Lorentzian, LorentzianComb, format_model
from mesometry.transport import gamma_exact


def test_grid_validation():
    model = Lorentzian(0.1, 0.0)
    setup = ReservoirSetup(1.0, bias=1.0)
    with pytest.raises(ValueError):
        sweep_theta(model, setup, [0.0])
    with pytest.raises(ValueError):
        sweep_theta(model, setup, [0.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        sweep_theta(model, setup, [0.0, 1.0], methods=("exact", "bogus"))


def test_exact_method_always_present():
    model = Lorentzian(0.2, 0.0)
    setup = ReservoirSetup(1.0, bias=0.1)
    records = sweep_theta(model, setup, np.linspace(-1, 1, 5), methods=("lr",))
    assert all(math.isfinite(r.gamma_exact) for r in records)
    assert all(r.gamma_lr is not None for r in records)


def test_lr_tracks_exact_at_high_temperature():
    # hot leads: dashed linear-response curve overlays the exact one to 5%
    model = Lorentzian(0.1, 0.0)
    setup = ReservoirSetup(temperature=3.0, bias=1.0)
    grid = np.linspace(-8.0, 9.0, 35)
    records = sweep_theta(model, setup, grid, methods=("exact", "lr"))
    for r in records:
        if r.gamma_exact > 1e-12:
            assert abs(r.gamma_lr - r.gamma_exact) / r.gamma_exact < 0.05, r.theta


def test_two_maxima_near_chemical_potentials_cold():
    # narrow resonance, cold leads: two peaks flanking the chemical
    # potentials; their offset is set by the thermal scale once kT >> gamma
    # (measured 0.045 = 0.45 kT here)
    gamma_w = 0.01
    kT = 0.1
    model = Lorentzian(gamma_w, 0.0)
    setup = ReservoirSetup(temperature=kT, bias=1.0)
    grid = np.linspace(-0.6, 1.6, 441)
    records = sweep_theta(model, setup, grid)
    g = np.array([r.gamma_exact for r in records])
    interior_max = np.flatnonzero((g[1:-1] > g[:-2]) & (g[1:-1] > g[2:])) + 1
    assert len(interior_max) == 2
    bound = 2 * gamma_w + 0.5 * kT
    for pos in grid[interior_max]:
        assert min(abs(pos - 0.0), abs(pos - 1.0)) < bound
    assert grid[interior_max][0] == pytest.approx(-0.045, abs=0.006)
    assert grid[interior_max][1] == pytest.approx(1.045, abs=0.006)


def test_records_symmetric_about_centre():
    model = Boxcar(0.8, 0.0)
    setup = ReservoirSetup(temperature=0.5, bias=1.0)
    centre = 0.5
    x = np.array([0.3, 0.9, 1.4])
    grid = np.sort(np.concatenate([centre - x, centre + x]))
    records = sweep_theta(model, setup, grid)
    by_theta = {round(r.theta, 12): r.gamma_exact for r in records}
    for xi in x:
        assert by_theta[round(centre + xi, 12)] == pytest.approx(
            by_theta[round(centre - xi, 12)], rel=1e-6
        )


def test_sweep_records_carry_descriptors():
    model = LorentzianComb(3, 0.1, 1.0, 0.0)
    setup = ReservoirSetup(0.5, bias=1.0, fermi_energy=0.25)
    records = sweep_theta(model, setup, np.linspace(-1, 1, 3))
    assert records[0].model.startswith("comb:nd=3")
    assert records[0].temperature == 0.5
    assert records[0].fermi_energy == 0.25
    assert records[1].theta == 0.0


def test_optimizer_finds_local_maximum():
    model = Lorentzian(0.1, 0.0)
    setup = ReservoirSetup(temperature=0.5, bias=1.0)
    opt = optimize_theta(model, setup)
    assert opt.refined
    g_star, _ = gamma_exact(
        Lorentzian(0.1, opt.theta_star), setup
    )
    for h in (-1e-5, 1e-5):
        g_near, _ = gamma_exact(Lorentzian(0.1, opt.theta_star + h), setup)
        assert g_near <= g_star * (1 + 1e-9)


def test_optimizer_gamma_max_bounds_grid():
    model = Lorentzian(0.2, 0.0)
    setup = ReservoirSetup(temperature=0.5, bias=1.0)
    opt = optimize_theta(model, setup, coarse_points=51)
    grid = np.linspace(-2.4, 2.4, 51)
    for theta in grid:
        g, _ = gamma_exact(Lorentzian(0.2, theta), setup)
        assert opt.gamma_max >= g * (1 - 1e-12)


def test_optimizer_symmetric_pair():
    model = Lorentzian(0.1, 0.0)
    setup = ReservoirSetup(temperature=0.5, bias=1.0)
    opt = optimize_theta(model, setup)
    centre = setup.fermi_energy + setup.bias / 2
    mirrored = 2 * centre - opt.theta_star
    g_m, _ = gamma_exact(Lorentzian(0.1, mirrored), setup)
    assert g_m == pytest.approx(opt.gamma_max, rel=1e-6)


def test_optimizer_interval_and_method_validation():
    model = Lorentzian(0.1, 0.0)
    setup = ReservoirSetup(0.5, bias=1.0)
    with pytest.raises(ValueError):
        optimize_theta(model, setup, search_interval=(1.0, -1.0))
    with pytest.raises(ValueError):
        optimize_theta(model, setup, method="newton")
    with pytest.raises(ValueError):
        optimize_theta(model, setup, coarse_points=2)


def test_optimizer_all_divergent_reports_first_theta():
    frozen = ReservoirSetup(temperature=0.0, bias=1.0)
    model = Boxcar(5.0, 0.0)
    with pytest.raises(AllDivergentError) as excinfo:
        optimize_theta(model, frozen, search_interval=(5.05, 5.95), coarse_points=10)
    assert excinfo.value.theta == pytest.approx(5.05)


def test_optimizer_sommerfeld_objective():
    setup = ReservoirSetup(temperature=1e-4, bias=1.0)
    opt = optimize_theta(Lorentzian(100.0, 0.0), setup, method="sommerfeld")
    assert abs(opt.theta_star) < 1e-3
    assert opt.gamma_max == pytest.approx(4e-4, rel=1e-10)


def test_nd_sweep_single_resonance_matches_lorentzian():
    # the one-resonance comb reduces bitwise to the Lorentzian, so with the
    # same search interval the optimiser takes the same path
    setup = ReservoirSetup(temperature=1.0, bias=1.0)
    records = sweep_nd([1], 0.1, 1.0, setup, coarse_points=101)
    interval = (setup.fermi_energy - 2 * (1.0 + 1.0), setup.fermi_energy + 2 * (1.0 + 1.0))
    lone = optimize_theta(
        Lorentzian(0.1, 0.0), setup, search_interval=interval, coarse_points=101
    )
    assert records[0].n_d == 1
    assert records[0].gamma_max == lone.gamma_max
    assert records[0].theta_star == lone.theta_star
    assert records[-1].n_d is None
    assert records[-1].model == format_model(Boxcar(1.0, 0.0))


def test_nd_sweep_validation():
    setup = ReservoirSetup(1.0, bias=1.0)
    with pytest.raises(ValueError):
        sweep_nd([3, 3], 0.1, 1.0, setup)
    with pytest.raises(ValueError):
        sweep_nd([5, 1], 0.1, 1.0, setup)


def test_sweep_thread_pool_matches_serial(monkeypatch):
    model = Lorentzian(0.15, 0.0)
    setup = ReservoirSetup(0.7, bias=1.0)
    grid = np.linspace(-1.5, 2.0, 13)
    serial = sweep_theta(model, setup, grid, methods=("exact", "lr"))
    monkeypatch.setenv("MESO_THREADS", "4")
    threaded = sweep_theta(model, setup, grid, methods=("exact", "lr"))
    assert serial == threaded
