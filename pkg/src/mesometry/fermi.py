"""Reservoir description and numerically stable Fermi-Dirac statistics.

Unit convention used throughout the package: e = h = k_B = 1 and every
energy (temperature, bias, level positions, widths) is expressed in one
reference energy unit E0.  Currents then come out in units of e*E0/h,
noise in e^2*E0/h and precision rates in E0/h.  The conductance quantum
is G0 = 2e^2/h = 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

G0 = 2.0  # conductance quantum, 2 e^2/h in our units

LEFT = "L"
RIGHT = "R"


@dataclass(frozen=True)
class ReservoirSetup:
    """Pair of fermionic leads at equal temperature with a voltage bias.

    Parameters
    ----------
    temperature : float
        k_B*T in units of E0.  ``temperature == 0`` selects the exact
        Heaviside code paths everywhere downstream.
    bias : float
        The energy e*V by which the chemical potential of the biased lead
        is raised above the Fermi energy.  May be negative.
    fermi_energy : float
        Common Fermi energy of both leads.
    biased_lead : str
        Which lead carries mu = fermi_energy + bias; ``"R"`` or ``"L"``.
        The default follows the convention of the exact transport
        integrals (right lead biased); the precision rate does not depend
        on this choice, the current's sign does.
    """

    temperature: float
    bias: float = 0.0
    fermi_energy: float = 0.0
    biased_lead: str = RIGHT

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if self.biased_lead not in (LEFT, RIGHT):
            raise ValueError(f"biased_lead must be 'L' or 'R', got {self.biased_lead!r}")

    @property
    def mu_left(self) -> float:
        if self.biased_lead == LEFT:
            return self.fermi_energy + self.bias
        return self.fermi_energy

    @property
    def mu_right(self) -> float:
        if self.biased_lead == RIGHT:
            return self.fermi_energy + self.bias
        return self.fermi_energy

    def swapped(self) -> "ReservoirSetup":
        """Same leads with the bias moved to the other side."""
        other = LEFT if self.biased_lead == RIGHT else RIGHT
        return ReservoirSetup(self.temperature, self.bias, self.fermi_energy, other)


def _as_array(energy):
    e = np.asarray(energy, dtype=float)
    return e, e.ndim == 0


def fermi(energy, mu, temperature):
    """Fermi-Dirac occupation f = 1/(exp((e-mu)/kT) + 1).

    Overflow safe for arbitrarily large |e-mu|/kT: the exponential is only
    ever taken of a non-positive argument.  At temperature zero this is the
    Heaviside step Theta(mu - e), with f = 1/2 exactly at e = mu so that
    the T = 0 function is the pointwise limit of the finite-T one.

    Accepts scalars or arrays of energies.
    """
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    e, scalar = _as_array(energy)
    e = np.atleast_1d(e)
    if temperature == 0:
        out = np.where(e < mu, 1.0, np.where(e > mu, 0.0, 0.5))
    else:
        x = (e - mu) / temperature
        out = np.empty_like(x)
        neg = x < 0
        out[neg] = 1.0 / (1.0 + np.exp(x[neg]))
        expmx = np.exp(-x[~neg])
        out[~neg] = expmx / (1.0 + expmx)
    return float(out[0]) if scalar else out


def fermi_fluctuation(energy, mu, temperature):
    """Occupation variance f(1-f), evaluated without cancellation.

    Equal to -kT * df/de for kT > 0.  Returns 0 identically at kT = 0.
    """
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    e, scalar = _as_array(energy)
    e = np.atleast_1d(e)
    if temperature == 0:
        out = np.zeros_like(e)
    else:
        x = np.abs((e - mu) / temperature)
        expmx = np.exp(-x)
        out = expmx / (1.0 + expmx) ** 2
    return float(out[0]) if scalar else out


def fermi_window(energy, setup: ReservoirSetup):
    """Difference of lead occupations f_R - f_L.

    Positive inside the bias window when the right lead is biased with
    bias > 0; flips sign exactly when the convention is swapped.
    """
    return fermi(energy, setup.mu_right, setup.temperature) - fermi(
        energy, setup.mu_left, setup.temperature
    )


def f1_kernel(energy, setup: ReservoirSetup):
    """Shot-noise weight (f_R - f_L)^2, in [0, 1]."""
    w = fermi_window(energy, setup)
    return w * w


def f2_kernel(energy, setup: ReservoirSetup):
    """Thermal-noise weight f_L(1-f_L) + f_R(1-f_R), in [0, 1/2].

    Vanishes identically at zero temperature.
    """
    T = setup.temperature
    return fermi_fluctuation(energy, setup.mu_left, T) + fermi_fluctuation(
        energy, setup.mu_right, T
    )
