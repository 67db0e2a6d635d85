"""Tail bounds for sums of i.i.d. variables via deformed exponentials.

The package covers both ends of the tail-weight spectrum: compact-support
sources, where a deformed Chernoff-style bound comes out in closed form,
and fat-tailed sources, where the classical bound collapses and upper and
lower estimates decay only polynomially in the number of summands.  A
seeded Monte Carlo harness provides the ground truth everything is checked
against, and a CLI exports bounds, rates and estimates as CSV.
"""

from .deformed import Deformation, duality_product, exp_q, ln_q
from .distributions import (
    Distribution,
    QExponential,
    SampleBatch,
    StudentT,
    Uniform,
    derive_seed,
    q_exp_mean,
    q_exp_pdf,
    q_exp_tail,
    sample,
    student_t_tail,
)
from .errors import (
    ConfigError,
    DivergenceError,
    DomainError,
    QTailsError,
    QuadratureError,
    RangeError,
)
from .moments import (
    Regime,
    ThetaPoint,
    ThetaRange,
    classical_log_mgf,
    deformed_mgf,
    deformed_power_moment,
    invert_theta,
    mgf_pole,
    phi_from_mgf,
    phi_of_theta,
    theta_of_a,
    theta_point,
    theta_range,
)
from .bounds import (
    BoundCurve,
    BoundKind,
    LDPUnavailableWarning,
    RateResult,
    bound_curve,
    chernoff_standard,
    classical_rate,
    compact_deformed_bound,
    eta_n_asymptotic,
    fat_change_of_variable,
    fat_fixed_a_bound,
    fixed_a_asymptotic,
    lower_bound_sum,
    markov_fixed_a_bound,
    rate_function,
    xi_asymptotic,
)
from .montecarlo import MCEstimate, estimate_curve, estimate_tail_of_mean

__version__ = "0.1.0"

__all__ = [
    "Deformation", "ln_q", "exp_q", "duality_product",
    "Distribution", "QExponential", "Uniform", "StudentT", "SampleBatch",
    "sample", "derive_seed",
    "q_exp_tail", "q_exp_pdf", "q_exp_mean", "student_t_tail",
    "Regime", "ThetaPoint", "ThetaRange",
    "deformed_mgf", "classical_log_mgf", "deformed_power_moment",
    "theta_of_a", "phi_from_mgf", "phi_of_theta", "theta_point",
    "theta_range", "invert_theta", "mgf_pole",
    "RateResult", "BoundKind", "BoundCurve", "LDPUnavailableWarning",
    "rate_function", "classical_rate", "chernoff_standard",
    "compact_deformed_bound", "markov_fixed_a_bound", "fat_fixed_a_bound",
    "lower_bound_sum", "fat_change_of_variable", "eta_n_asymptotic",
    "xi_asymptotic", "fixed_a_asymptotic", "bound_curve",
    "MCEstimate", "estimate_tail_of_mean", "estimate_curve",
    "QTailsError", "DomainError", "RangeError", "DivergenceError",
    "QuadratureError", "ConfigError",
    "__version__",
]
