"""Numerical toolkit for state-dependent jump processes: symbol models,
frequency envelopes, heat-kernel and characteristic-function bounds,
path-property criteria, and Monte Carlo validation."""

__version__ = "0.1.0"

from .criteria import (
    CriterionReport,
    bump_constant,
    char_fn_bound,
    exit_time_bound,
    heat_exponent_fit,
    heat_kernel_sup_bound,
    local_time_fourier_bound,
    occupation_bound,
    small_time_horizon,
    stable_like_tail_transience,
    test_local_times,
    test_transience,
    test_ultracontractivity,
)
from .empirics import (
    empirical_char_fn,
    estimate_local_time,
    exit_frequency,
    generator_finite_difference,
    occupation_fourier_check,
    transience_diagnostic,
    validate_char_bound,
    validate_small_t_approx,
)
from .ensemble_io import export_csv, file_checksum, read_ensemble, write_ensemble
from .envelopes import Envelope, build_envelope
from .errors import ConfigError, NumericalError
from .quadrature import IntegralResult, classify_improper, integrate_radial
from .simulate import (
    PathEnsemble,
    sample_positive_stable,
    sample_stable,
    simulate_levy,
    simulate_stable_like,
    symmetrize_paths,
)
from .symbol_checks import (
    check_bounded_coefficients,
    check_feller_decay,
    check_sector_condition,
    check_sqrt_subadditivity,
)
from .symbols import (
    BernsteinSpec,
    LevyCharacteristics,
    StableLikeSpec,
    SymbolModel,
    alpha_stable,
    brownian,
    cauchy,
    closed_form_symbol,
    compound_poisson,
    eval_symbol,
    levy_symbol,
    stable_like_constant,
    stable_like_symbol,
    subordinate,
    symmetrize,
    validate_model,
    zero_symbol,
)

__all__ = [
    "__version__",
    "ConfigError",
    "NumericalError",
    "SymbolModel",
    "LevyCharacteristics",
    "StableLikeSpec",
    "BernsteinSpec",
    "eval_symbol",
    "closed_form_symbol",
    "brownian",
    "alpha_stable",
    "cauchy",
    "compound_poisson",
    "zero_symbol",
    "stable_like_symbol",
    "stable_like_constant",
    "levy_symbol",
    "subordinate",
    "symmetrize",
    "validate_model",
    "check_bounded_coefficients",
    "check_sector_condition",
    "check_feller_decay",
    "check_sqrt_subadditivity",
    "Envelope",
    "build_envelope",
    "IntegralResult",
    "integrate_radial",
    "classify_improper",
    "CriterionReport",
    "char_fn_bound",
    "heat_kernel_sup_bound",
    "test_ultracontractivity",
    "test_transience",
    "test_local_times",
    "occupation_bound",
    "small_time_horizon",
    "exit_time_bound",
    "bump_constant",
    "heat_exponent_fit",
    "local_time_fourier_bound",
    "stable_like_tail_transience",
    "PathEnsemble",
    "sample_stable",
    "sample_positive_stable",
    "simulate_levy",
    "simulate_stable_like",
    "symmetrize_paths",
    "write_ensemble",
    "read_ensemble",
    "export_csv",
    "file_checksum",
    "empirical_char_fn",
    "validate_char_bound",
    "generator_finite_difference",
    "validate_small_t_approx",
    "estimate_local_time",
    "occupation_fourier_check",
    "exit_frequency",
    "transience_diagnostic",
]
