"""Transport-based parameter estimation for two-terminal coherent conductors.

Computes the mean current, DC noise and the precision rate
gamma = (dI/dtheta)^2 / <<I^2>> of charge-based estimation within the
scattering (Landauer-Buttiker) description, together with its
linear-response and zero-temperature limits, Monte-Carlo verification of
the estimator statistics, and sweep/optimisation drivers.

Units: e = h = k_B = 1, all energies in one reference unit E0.
"""

from .fermi import G0, ReservoirSetup, f1_kernel, f2_kernel, fermi, fermi_fluctuation, fermi_window
from .limits import (
    DegenerateInputError,
    DivergenceError,
    LimitResult,
    PerfectTransmissionError,
    boxcar_closed_current,
    boxcar_closed_noise,
    boxcar_closed_precision,
    boxcar_lr_conductance,
    boxcar_lr_current,
    boxcar_lr_noise,
    boxcar_lr_precision,
    fisher_gaussian,
    precision_linear_response,
    precision_zero_t_integral,
    precision_zero_t_lorentzian,
    precision_zero_t_sommerfeld,
)
from .quadrature import QuadratureError, QuadratureSpec, adaptive_quad
from .transmission import (
    Boxcar,
    DistributionalDerivativeError,
    Lorentzian,
    LorentzianComb,
    TransmissionModel,
    breakpoints,
    comb_sup_error,
    evaluate,
    format_model,
    parse_model,
    theta_derivative,
)
from .transport import (
    TransportResult,
    conductance,
    conductance_by_parts,
    current_lb,
    dconductance_dtheta,
    dcurrent_dtheta,
    gamma_exact,
    noise_lb,
    transport,
)

__version__ = "0.1.0"

__all__ = [
    "G0",
    "ReservoirSetup",
    "fermi",
    "fermi_window",
    "fermi_fluctuation",
    "f1_kernel",
    "f2_kernel",
    "Lorentzian",
    "LorentzianComb",
    "Boxcar",
    "TransmissionModel",
    "evaluate",
    "theta_derivative",
    "breakpoints",
    "comb_sup_error",
    "parse_model",
    "format_model",
    "DistributionalDerivativeError",
    "QuadratureSpec",
    "QuadratureError",
    "adaptive_quad",
    "TransportResult",
    "current_lb",
    "noise_lb",
    "dcurrent_dtheta",
    "conductance",
    "conductance_by_parts",
    "dconductance_dtheta",
    "transport",
    "gamma_exact",
    "LimitResult",
    "precision_linear_response",
    "precision_zero_t_integral",
    "precision_zero_t_sommerfeld",
    "precision_zero_t_lorentzian",
    "boxcar_closed_current",
    "boxcar_closed_noise",
    "boxcar_closed_precision",
    "boxcar_lr_conductance",
    "boxcar_lr_current",
    "boxcar_lr_noise",
    "boxcar_lr_precision",
    "fisher_gaussian",
    "DegenerateInputError",
    "PerfectTransmissionError",
    "DivergenceError",
    "__version__",
]
