"""Monte-Carlo verification of the charge-based estimator statistics.

The long-time charge transferred in a window tau is Gaussian with mean
tau*<I> and variance tau*<<I^2>>; the locally unbiased estimator
theta = theta0 + [Q - Phi(theta0)] / Phi'(theta0) then has variance
1/(gamma*tau).  This module samples that model, applies the estimator and
checks the variance prediction and the Cramer-Rao inequality, with
bootstrap error bars on the variance of the variance.

Reproducibility contract: trial i draws from numpy's default generator
seeded with the pair [seed, i] (SeedSequence spawning), so serial and
parallel execution produce identical samples; the bootstrap uses the
stream [seed, n_trials].
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .limits import DivergenceError, fisher_gaussian
from .quadrature import DEFAULT_QUAD, QuadratureSpec
from .transport import TransportResult, transport


class EstimatorUndefinedError(ValueError):
    """The current does not respond to theta at the reference point."""


@dataclass(frozen=True)
class McConfig:
    """Monte-Carlo run description.

    tau is the charge-integration window in units h/E0; theta_ref is the
    known reference point theta0 of the local estimator and theta_true the
    value the samples are drawn at.
    """

    tau: float
    n_trials: int
    seed: int
    theta_true: float
    theta_ref: float

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau}")
        if self.n_trials < 1000:
            raise ValueError(f"n_trials must be >= 1000, got {self.n_trials}")


@dataclass(frozen=True)
class McReport:
    estimator_mean: float
    estimator_variance: float
    predicted_variance: float
    crb_satisfied: bool
    bias: float
    fisher_information: float
    bootstrap_sigma: float
    n_trials: int


def sample_charge(result: TransportResult, tau: float, rng: np.random.Generator) -> float:
    """One Gaussian charge outcome Q ~ N(tau*<I>, tau*<<I^2>>)."""
    if result.noise <= 0:
        raise DivergenceError("transport noise is zero; the Gaussian charge model is degenerate")
    if tau <= 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    return float(rng.normal(tau * result.current, math.sqrt(tau * result.noise)))


def estimate_theta(charge: float, phi_ref: float, dphi_ref: float, theta_ref: float) -> float:
    """Locally unbiased estimate theta_ref + (Q - Phi(theta0)) / Phi'(theta0)."""
    if dphi_ref == 0:
        raise EstimatorUndefinedError("Phi'(theta0) = 0: charge carries no local information")
    return theta_ref + (charge - phi_ref) / dphi_ref


def trial_stream(seed: int, index: int) -> np.random.Generator:
    """Per-trial random stream; (seed, index) fully determines the draws."""
    return np.random.default_rng([seed, index])


def _bootstrap_variance_sigma(samples: np.ndarray, rng: np.random.Generator, resamples: int = 1000) -> float:
    n = samples.size
    variances = np.empty(resamples)
    block = 100
    for start in range(0, resamples, block):
        stop = min(start + block, resamples)
        idx = rng.integers(0, n, size=(stop - start, n))
        variances[start:stop] = samples[idx].var(axis=1, ddof=1)
    return float(variances.std(ddof=1))


def run_mc(model, setup, config: McConfig, quad: QuadratureSpec = DEFAULT_QUAD) -> McReport:
    """Run the full estimator experiment and compare against 1/(gamma*tau)."""
    model_ref = dataclasses.replace(model, theta=config.theta_ref)
    model_true = dataclasses.replace(model, theta=config.theta_true)
    tr_ref = transport(model_ref, setup, quad)
    tr_true = transport(model_true, setup, quad)
    if tr_ref.noise <= 0 or tr_true.noise <= 0:
        raise DivergenceError("zero noise: sample variance is degenerate, rate diverges")
    if tr_ref.dcurrent_dtheta == 0:
        raise EstimatorUndefinedError("Phi'(theta0) = 0: charge carries no local information")

    gamma_ref = tr_ref.dcurrent_dtheta**2 / tr_ref.noise
    if config.tau * gamma_ref < 10:
        warnings.warn(
            f"tau*gamma = {config.tau * gamma_ref:.3g} < 10: outside the long-time "
            "Gaussian regime the variance prediction is unreliable",
            stacklevel=2,
        )

    phi_ref = config.tau * tr_ref.current
    dphi_ref = config.tau * tr_ref.dcurrent_dtheta
    estimates = np.empty(config.n_trials)
    for i in range(config.n_trials):
        q = sample_charge(tr_true, config.tau, trial_stream(config.seed, i))
        estimates[i] = estimate_theta(q, phi_ref, dphi_ref, config.theta_ref)

    est_mean = float(estimates.mean())
    est_var = float(estimates.var(ddof=1))
    boot_sigma = _bootstrap_variance_sigma(estimates, trial_stream(config.seed, config.n_trials))
    fisher = fisher_gaussian(tr_ref, config.tau, model_ref, setup, quad)
    rel_sigma = boot_sigma / est_var if est_var > 0 else math.inf
    crb_satisfied = est_var >= (1.0 - 3.0 * rel_sigma) / fisher
    return McReport(
        estimator_mean=est_mean,
        estimator_variance=est_var,
        predicted_variance=1.0 / (gamma_ref * config.tau),
        crb_satisfied=crb_satisfied,
        bias=est_mean - config.theta_true,
        fisher_information=fisher,
        bootstrap_sigma=boot_sigma,
        n_trials=config.n_trials,
    )
