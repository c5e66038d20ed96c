"""Lyapunov feedback control for closed quantum systems.

Thin wrapper over the compiled extension: system and controller
construction, closed-loop simulation, structural checks, weight-operator
design, and the config-driven experiment pipeline.
"""

from qlyap._core import (
    Controller,
    ExperimentConfig,
    NumericError,
    System,
    ValidationError,
    __version__,
    build_commuting_p,
    build_spectral_p,
    check_assumptions,
    check_offdiagonal,
    classify_case,
    compare_modes,
    control_law,
    control_terms,
    drift_sampling_oracle,
    equivalence_class_min_value,
    generate_random_p,
    load_config,
    lyapunov_derivative,
    lyapunov_value,
    run_experiment,
    simulate,
    step_doubling_check,
)

__all__ = [
    "Controller",
    "ExperimentConfig",
    "NumericError",
    "System",
    "ValidationError",
    "__version__",
    "build_commuting_p",
    "build_spectral_p",
    "check_assumptions",
    "check_offdiagonal",
    "classify_case",
    "compare_modes",
    "control_law",
    "control_terms",
    "drift_sampling_oracle",
    "equivalence_class_min_value",
    "generate_random_p",
    "load_config",
    "lyapunov_derivative",
    "lyapunov_value",
    "run_experiment",
    "simulate",
    "step_doubling_check",
]
