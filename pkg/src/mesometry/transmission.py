"""Transmission-function families with analytic level-position derivatives.

Three families are supported, all parameterised by a level position theta
that rigidly translates the whole profile:

* ``Lorentzian`` -- a single resonance of half width gamma (FWHM 2*gamma),
  peaked at exactly 1.
* ``LorentzianComb`` -- n_dots identical resonances evenly spaced across
  [theta - half_width, theta + half_width], normalised so the peak of the
  sum is 1.  With ``weighting="trapezoid"`` the two edge resonances enter
  with weight 1/2.
* ``Boxcar`` -- 1 on the open interval (theta - half_width,
  theta + half_width), 0 outside, 1/2 at the two edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

UNIFORM = "uniform"
TRAPEZOID = "trapezoid"

# energies closer than this (in E0) are treated as the same breakpoint
_DEDUP_TOL = 1e-12


class DistributionalDerivativeError(ValueError):
    """Raised when an analytic theta-derivative does not exist as a function.

    The boxcar transmission has a distributional derivative (a pair of delta
    functions at its edges); callers must use the boundary-term code paths
    instead of integrating a pointwise derivative.
    """


@dataclass(frozen=True)
class Lorentzian:
    gamma: float
    theta: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")


@dataclass(frozen=True)
class LorentzianComb:
    n_dots: int
    gamma: float
    half_width: float
    theta: float
    weighting: str = UNIFORM

    def __post_init__(self):
        if self.n_dots < 1:
            raise ValueError(f"n_dots must be >= 1, got {self.n_dots}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.half_width <= 0:
            raise ValueError(f"half_width must be > 0, got {self.half_width}")
        if self.weighting not in (UNIFORM, TRAPEZOID):
            raise ValueError(f"weighting must be 'uniform' or 'trapezoid', got {self.weighting!r}")


@dataclass(frozen=True)
class Boxcar:
    half_width: float
    theta: float

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError(f"half_width must be > 0, got {self.half_width}")


TransmissionModel = Union[Lorentzian, LorentzianComb, Boxcar]


def energy_scale(model: TransmissionModel) -> float:
    """Width of the model's sharpest feature, used for quadrature tails."""
    if isinstance(model, Lorentzian):
        return model.gamma
    if isinstance(model, LorentzianComb):
        return model.gamma
    return model.half_width


def model_extent(model: TransmissionModel) -> float:
    """Overall half-extent of the transmission profile around theta."""
    if isinstance(model, Lorentzian):
        return model.gamma
    return model.half_width


def comb_offsets(n_dots: int, half_width: float) -> np.ndarray:
    """Resonance centres relative to theta: -delta + i*Delta, Delta = 2*delta/(n_dots-1)."""
    if n_dots == 1:
        # degenerate comb: a single resonance sitting at theta
        return np.zeros(1)
    return -half_width + (2.0 * half_width / (n_dots - 1)) * np.arange(n_dots)


def comb_weights(n_dots: int, weighting: str) -> np.ndarray:
    w = np.ones(n_dots)
    if weighting == TRAPEZOID and n_dots >= 2:
        w[0] = w[-1] = 0.5
    return w


def _lorentz_sum(x, offsets, weights, gamma):
    """sum_i w_i * gamma^2 / (gamma^2 + (x - c_i)^2), accumulated per resonance."""
    out = np.zeros_like(x)
    g2 = gamma * gamma
    for c, w in zip(offsets, weights):
        d = x - c
        out += w * g2 / (g2 + d * d)
    return out


def _lorentz_sum_deriv(x, offsets, weights, gamma):
    """d/dx of _lorentz_sum."""
    out = np.zeros_like(x)
    g2 = gamma * gamma
    for c, w in zip(offsets, weights):
        d = x - c
        out += w * (-2.0 * g2 * d) / (g2 + d * d) ** 2
    return out


@lru_cache(maxsize=256)
def _comb_normalization(n_dots: int, gamma: float, half_width: float, weighting: str) -> float:
    """Peak value of the raw (unnormalised) resonance sum.

    For an odd number of resonances the sum peaks at the comb centre, where
    it equals sum_i w_i gamma^2/(gamma^2 + c_i^2) in closed form.  An even
    count has no central resonance and the closed form would under-normalise
    (the peak then sits at the innermost pair), so the peak is located
    numerically over one central spacing.
    """
    offsets = comb_offsets(n_dots, half_width)
    weights = comb_weights(n_dots, weighting)
    centre_value = float(_lorentz_sum(np.zeros(1), offsets, weights, gamma)[0])
    if n_dots % 2 == 1:
        return centre_value

    def s(x):
        return float(_lorentz_sum(np.atleast_1d(float(x)), offsets, weights, gamma)[0])

    coarse = np.linspace(-half_width - 2 * gamma, half_width + 2 * gamma, max(4096, 8 * n_dots))
    candidates = np.concatenate([coarse, offsets])
    values = _lorentz_sum(candidates, offsets, weights, gamma)
    x0 = float(candidates[int(np.argmax(values))])
    h = max(2.0 * (coarse[1] - coarse[0]), gamma)
    a, b = x0 - h, x0 + h
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    yc, yd = s(c), s(d)
    while b - a > 1e-13 * max(1.0, abs(x0)):
        if yc >= yd:
            b, d, yd = d, c, yc
            c = b - invphi * (b - a)
            yc = s(c)
        else:
            a, c, yc = c, d, yd
            d = a + invphi * (b - a)
            yd = s(d)
    return max(centre_value, float(values.max()), yc, yd)


def evaluate(model: TransmissionModel, energy):
    """Transmission probability in [0, 1] at the given energy (scalar or array)."""
    e = np.asarray(energy, dtype=float)
    scalar = e.ndim == 0
    e = np.atleast_1d(e)
    if isinstance(model, Lorentzian):
        g2 = model.gamma**2
        d = model.theta - e
        out = g2 / (g2 + d * d)
    elif isinstance(model, LorentzianComb):
        offsets = comb_offsets(model.n_dots, model.half_width)
        weights = comb_weights(model.n_dots, model.weighting)
        norm = _comb_normalization(model.n_dots, model.gamma, model.half_width, model.weighting)
        out = _lorentz_sum(e - model.theta, offsets, weights, model.gamma) / norm
    else:
        lo = model.theta - model.half_width
        hi = model.theta + model.half_width
        out = np.where((e > lo) & (e < hi), 1.0, 0.0)
        out = np.where((e == lo) | (e == hi), 0.5, out)
    return float(out[0]) if scalar else out


def theta_derivative(model: TransmissionModel, energy):
    """Analytic d(transmission)/d(theta) at fixed energy.

    Because theta translates the profile rigidly this equals minus the
    energy derivative.  Raises for the boxcar, whose derivative is a pair
    of delta functions handled by boundary terms downstream.
    """
    if isinstance(model, Boxcar):
        raise DistributionalDerivativeError(
            "boxcar transmission has a distributional theta-derivative; "
            "use the boundary-term code paths instead"
        )
    e = np.asarray(energy, dtype=float)
    scalar = e.ndim == 0
    e = np.atleast_1d(e)
    if isinstance(model, Lorentzian):
        g2 = model.gamma**2
        d = model.theta - e
        out = -2.0 * g2 * d / (g2 + d * d) ** 2
    else:
        offsets = comb_offsets(model.n_dots, model.half_width)
        weights = comb_weights(model.n_dots, model.weighting)
        norm = _comb_normalization(model.n_dots, model.gamma, model.half_width, model.weighting)
        # d/dtheta = -d/dx of the sum at x = e - theta
        out = -_lorentz_sum_deriv(e - model.theta, offsets, weights, model.gamma) / norm
    return float(out[0]) if scalar else out


def energy_derivative(model: TransmissionModel, energy):
    """Analytic d(transmission)/d(energy); equals -theta_derivative here."""
    d = theta_derivative(model, energy)
    return -d if np.isscalar(d) else -np.asarray(d)


def breakpoints(model: TransmissionModel, setup=None) -> list[float]:
    """Sorted energies where transport integrands can kink or peak.

    Includes both chemical potentials (when a setup is given) and the
    model's own structure: the resonance centre(s) or the boxcar edges.
    Deduplicated to within 1e-12 E0.
    """
    pts: list[float] = []
    if setup is not None:
        pts.extend([setup.mu_left, setup.mu_right])
    if isinstance(model, Lorentzian):
        pts.append(model.theta)
    elif isinstance(model, LorentzianComb):
        pts.extend(model.theta + comb_offsets(model.n_dots, model.half_width))
    else:
        pts.extend([model.theta - model.half_width, model.theta + model.half_width])
    pts.sort()
    dedup = [pts[0]]
    for p in pts[1:]:
        if p - dedup[-1] > _DEDUP_TOL:
            dedup.append(p)
    return dedup


def comb_sup_error(
    n_dots: int,
    gamma: float,
    half_width: float,
    grid_points: int = 10_000,
    weighting: str = UNIFORM,
) -> float:
    """Sup-norm distance between the comb and the ideal boxcar.

    Evaluated on a uniform grid over [-2*half_width, 2*half_width] with the
    profiles centred at theta = 0.  Small only for gamma << half_width and
    n_dots >> half_width/gamma.
    """
    if n_dots < 2:
        raise ValueError(f"n_dots must be >= 2, got {n_dots}")
    if grid_points < 1000:
        raise ValueError(f"grid_points must be >= 1000, got {grid_points}")
    comb = LorentzianComb(n_dots, gamma, half_width, 0.0, weighting)
    box = Boxcar(half_width, 0.0)
    grid = np.linspace(-2.0 * half_width, 2.0 * half_width, grid_points)
    return float(np.max(np.abs(evaluate(box, grid) - evaluate(comb, grid))))


# --- model specification grammar -------------------------------------------
#
#   lorentzian:gamma=..,theta=..
#   comb:nd=..,gamma=..,delta=..,theta=..[,weighting=uniform|trapezoid]
#   boxcar:delta=..,theta=..

_FAMILIES = {
    "lorentzian": ({"gamma", "theta"}, set()),
    "comb": ({"nd", "gamma", "delta", "theta"}, {"weighting"}),
    "boxcar": ({"delta", "theta"}, set()),
}


def parse_model(text: str) -> TransmissionModel:
    """Parse a model specification string; raises ValueError naming the bad token."""
    head, sep, body = text.partition(":")
    family = head.strip().lower()
    if family not in _FAMILIES:
        raise ValueError(f"unknown model family {head!r} in {text!r}")
    if not sep or not body.strip():
        raise ValueError(f"missing parameters after {head!r} in {text!r}")
    required, optional = _FAMILIES[family]
    fields: dict[str, str] = {}
    for token in body.split(","):
        key, eq, value = token.partition("=")
        key = key.strip()
        if not eq or not value.strip():
            raise ValueError(f"malformed parameter {token!r} in {text!r}")
        if key not in required | optional:
            raise ValueError(f"unknown parameter {key!r} for {family} in {text!r}")
        if key in fields:
            raise ValueError(f"duplicate parameter {key!r} in {text!r}")
        fields[key] = value.strip()
    missing = required - fields.keys()
    if missing:
        raise ValueError(f"missing parameter(s) {sorted(missing)} in {text!r}")

    def num(key):
        try:
            return float(fields[key])
        except ValueError:
            raise ValueError(f"non-numeric value for {key!r}: {fields[key]!r}") from None

    if family == "lorentzian":
        return Lorentzian(gamma=num("gamma"), theta=num("theta"))
    if family == "boxcar":
        return Boxcar(half_width=num("delta"), theta=num("theta"))
    try:
        nd = int(fields["nd"])
    except ValueError:
        raise ValueError(f"non-integer value for 'nd': {fields['nd']!r}") from None
    return LorentzianComb(
        n_dots=nd,
        gamma=num("gamma"),
        half_width=num("delta"),
        theta=num("theta"),
        weighting=fields.get("weighting", UNIFORM),
    )


def format_model(model: TransmissionModel) -> str:
    """Inverse of parse_model, suitable for CSV descriptors."""
    if isinstance(model, Lorentzian):
        return f"lorentzian:gamma={model.gamma:.17g},theta={model.theta:.17g}"
    if isinstance(model, LorentzianComb):
        return (
            f"comb:nd={model.n_dots},gamma={model.gamma:.17g},"
            f"delta={model.half_width:.17g},theta={model.theta:.17g},weighting={model.weighting}"
        )
    return f"boxcar:delta={model.half_width:.17g},theta={model.theta:.17g}"
