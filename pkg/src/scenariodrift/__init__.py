"""Scenario-approach chance-constrained optimization under drifting distributions.

The package couples time-varying scenario-generating distributions through
the 1-Wasserstein metric, solves the two robust scenario problem classes
(interval covering and quantized-input control), extracts a-posteriori
invariant sets, and computes every violation-probability certificate with
Monte Carlo validation.
"""

from .bounds import (
    EpsilonSchedule,
    ModelACertificates,
    RiskCertificate,
    RiskQuery,
    SampleSizes,
    complement_product_sum,
    coupling_factors,
    coupling_gap,
    epsilon_schedule_constant_r,
    epsilon_schedule_general,
    log_comb,
    min_samples_static,
    modelA_beta,
    modelB_beta,
    solve_epsilon_entry,
    static_beta,
)
from .control import (
    ControlInstance,
    ControlSolution,
    build_reachability,
    control_objective,
    solve_control,
)
from .covering import CoverSolution, solve_cover
from .drift import (
    DriftSpec,
    GaussianDrift1D,
    MatrixGaussian,
    MatrixGaussianDrift,
    constant_matrix_family,
    drift_family_from_config,
    drift_spec_of,
    linear_gaussian_family,
    parse_config_text,
    sample_control_scenarios,
    sample_sequence,
    static_gaussian_family,
)
from .errors import (
    CapacityError,
    ConfigError,
    ConsistencyError,
    HorizonError,
    QuadratureError,
)
from .experiments import CsvTable, ExperimentConfig, run_experiment
from .invariant import InvariantSet, control_invariant_set, cover_invariant_set, invariant_set
from .montecarlo import (
    CouplingCheckResult,
    ViolationEstimate,
    coupling_check,
    estimate_violation,
    wilson_interval,
)
from .scenarios import ScenarioSet, load_scenarios, save_scenarios
from .wasserstein import Dist1D, Empirical, Gaussian, w1_cdf_integral, w1_empirical, w1_gaussian

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConfigError",
    "ConsistencyError",
    "ControlInstance",
    "ControlSolution",
    "CouplingCheckResult",
    "CoverSolution",
    "CsvTable",
    "Dist1D",
    "DriftSpec",
    "Empirical",
    "EpsilonSchedule",
    "ExperimentConfig",
    "Gaussian",
    "GaussianDrift1D",
    "HorizonError",
    "InvariantSet",
    "MatrixGaussian",
    "MatrixGaussianDrift",
    "ModelACertificates",
    "QuadratureError",
    "RiskCertificate",
    "RiskQuery",
    "SampleSizes",
    "ScenarioSet",
    "ViolationEstimate",
    "build_reachability",
    "complement_product_sum",
    "constant_matrix_family",
    "control_invariant_set",
    "control_objective",
    "coupling_check",
    "coupling_factors",
    "coupling_gap",
    "cover_invariant_set",
    "drift_family_from_config",
    "drift_spec_of",
    "epsilon_schedule_constant_r",
    "epsilon_schedule_general",
    "estimate_violation",
    "invariant_set",
    "linear_gaussian_family",
    "load_scenarios",
    "log_comb",
    "min_samples_static",
    "modelA_beta",
    "modelB_beta",
    "parse_config_text",
    "run_experiment",
    "sample_control_scenarios",
    "sample_sequence",
    "save_scenarios",
    "solve_control",
    "solve_cover",
    "solve_epsilon_entry",
    "static_beta",
    "static_gaussian_family",
    "w1_cdf_integral",
    "w1_empirical",
    "w1_gaussian",
    "wilson_interval",
]
