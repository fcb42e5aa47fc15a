"""Seeded experiment runners emitting CSV tables.

Every run is fully determined by (experiment, seed, parameters): reruns are
bit-identical, floats are written with repr (full precision, round-trip,
locale-independent), and line endings are always "\\n".  Plotting is left
to external tools; the README carries one-line recipes.

Table schemas (version 1):
  cover        r0, gamma_static, gamma_robust, beta_modelB, beta_static
  schedule     rho, r0, k, epsilon_k, realized
  solution     objective, cardinality, input_sequence (space separated)
  validation   repetition, violation_estimate, exceeded
  summary      repetitions, exceedance_rate, certified_beta, threshold, vacuous, passed
  wasserstein  i, w1_exact, w1_quadrature, mean_gap
  bounds       r0, beta_modelB
  samplesize   epsilon, n_explicit, n_prop1
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import (
    epsilon_schedule_constant_r,
    min_samples_static,
    modelB_beta,
    static_beta,
)
from .control import ControlInstance, solve_control
from .covering import solve_cover
from .drift import (
    drift_spec_of,
    linear_gaussian_family,
    constant_matrix_family,
    sample_control_scenarios,
    sample_sequence,
    static_gaussian_family,
)
from .errors import ConfigError
from .invariant import control_invariant_set
from .montecarlo import estimate_violation
from .scenarios import ScenarioSet
from .wasserstein import w1_cdf_integral, w1_gaussian

__all__ = [
    "ExperimentConfig",
    "CsvTable",
    "render_csv",
    "write_tables",
    "run_cover_experiment",
    "run_control_experiment",
    "run_validation",
    "run_wasserstein_curve",
    "run_bounds_curve",
    "run_experiment",
    "EXPERIMENTS",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 0
    parameters: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CsvTable:
    name: str
    header: tuple[str, ...]
    rows: tuple[tuple, ...]


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def render_csv(table: CsvTable) -> str:
    out = io.StringIO()
    out.write(",".join(table.header) + "\n")
    for row in table.rows:
        if len(row) != len(table.header):
            raise ValueError(f"row width {len(row)} != header width {len(table.header)}")
        out.write(",".join(_cell(v) for v in row) + "\n")
    return out.getvalue()


def write_tables(tables: list[CsvTable], out_path: str | None) -> None:
    """Primary table at out_path, extra tables beside it as <stem>_<name>.csv."""
    if out_path is None:
        import sys

        for table in tables:
            sys.stdout.write(f"# table: {table.name} (schema v{SCHEMA_VERSION})\n")
            sys.stdout.write(render_csv(table))
        return
    primary = Path(out_path)
    primary.write_text(render_csv(tables[0]))
    for table in tables[1:]:
        side = primary.with_name(f"{primary.stem}_{table.name}{primary.suffix or '.csv'}")
        side.write_text(render_csv(table))


def _get(config: ExperimentConfig, key: str, default, cast):
    raw = config.parameters.get(key, default)
    try:
        if cast is float or cast is int:
            return cast(raw)
        return cast(raw) if not isinstance(raw, cast) else raw
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {key!r} has invalid value {raw!r}") from None


def _get_list(config: ExperimentConfig, key: str, default) -> list[float]:
    raw = config.parameters.get(key, default)
    if isinstance(raw, str):
        parts = [p for p in raw.replace(",", " ").split() if p]
    elif isinstance(raw, (list, tuple, np.ndarray)):
        parts = list(raw)
    else:
        raise ConfigError(f"parameter {key!r} must be a list, got {raw!r}")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"parameter {key!r} has non-numeric entries: {raw!r}") from None
    if not values:
        raise ConfigError(f"parameter {key!r} must be nonempty")
    return values


def _cover_family(config: ExperimentConfig, n: int):
    preset = str(config.parameters.get("drift_preset", "linear_gaussian"))
    if preset == "linear_gaussian":
        return linear_gaussian_family(
            n,
            mean_slope=_get(config, "mean_slope", 0.2, float),
            std_base=_get(config, "std_base", 1.0, float),
            std_slope=_get(config, "std_slope", 0.2, float),
        )
    if preset == "static_gaussian":
        return static_gaussian_family(
            n, mean=_get(config, "mean", 0.0, float), std=_get(config, "std", 1.0, float)
        )
    raise ConfigError(f"unknown drift_preset {preset!r}")


def run_cover_experiment(config: ExperimentConfig) -> list[CsvTable]:
    """Covering benchmark: same drawn scenarios, sweep of constant radii r0.

    For each r0 the static (radius 0) and robust solutions are solved on the
    same scenarios and certified: gamma_robust - gamma_static == r0 exactly
    since both bind the same extreme observations.
    """
    n = _get(config, "n_scenarios", 309, int)
    epsilon = _get(config, "epsilon", 0.1, float)
    complexity = _get(config, "complexity", 2, int)
    r0_list = _get_list(config, "r0_list", (1.8, 2.0, 2.2, 2.4))
    family = _cover_family(config, n)
    spec = drift_spec_of(family)

    observations = sample_sequence(family, n, config.seed)
    static_solution = solve_cover(
        ScenarioSet(observations, np.zeros(n))
    )
    beta_static = static_beta(n, complexity, epsilon).beta
    rows = []
    for r0 in r0_list:
        robust = solve_cover(ScenarioSet.with_constant_radius(observations, r0))
        cert = modelB_beta(n, complexity, epsilon, spec, r0)
        rows.append(
            (r0, static_solution.half_width, robust.half_width, cert.beta, beta_static)
        )
    header = ("r0", "gamma_static", "gamma_robust", "beta_modelB", "beta_static")
    return [CsvTable(name="cover", header=header, rows=tuple(rows))]


def run_control_experiment(config: ExperimentConfig) -> list[CsvTable]:
    """Control benchmark: risk schedules per (rho, r0) plus one solved instance.

    The solved instance (and hence the realized invariant-set cardinality)
    does not depend on (rho, r0): drift enters only through the schedule.
    Default horizon is the desk-scale 4 (exhaustive verification); the
    benchmark horizon 8 needs strategy branch_and_bound.
    """
    n = _get(config, "n_scenarios", 1000, int)
    beta = _get(config, "beta", 1e-2, float)
    horizon = _get(config, "horizon", 4, int)
    strategy = str(config.parameters.get("strategy", "exhaustive"))
    entry_std = _get(config, "entry_std", 0.02, float)
    rho_list = _get_list(config, "rho_list", (0.0, 0.02, 0.1))
    r0_list = _get_list(config, "r0_list", (2.0,))
    if len(r0_list) == 1:
        r0_list = r0_list * len(rho_list)
    if len(r0_list) != len(rho_list):
        raise ConfigError("rho_list and r0_list must have equal length (or one r0)")

    family = constant_matrix_family(n, entry_std=entry_std, rho=max(rho_list))
    matrices = sample_control_scenarios(family, n, config.seed)
    instance = ControlInstance(scenarios=matrices, horizon=horizon)
    solution = solve_control(instance, strategy)
    invariants = control_invariant_set(instance, strategy)
    k_realized = invariants.cardinality

    schedule_rows = []
    for rho, r0 in zip(rho_list, r0_list):
        schedule = epsilon_schedule_constant_r(n, beta, rho, r0)
        for k, eps_k in enumerate(schedule.values):
            schedule_rows.append((rho, r0, k, eps_k, k == k_realized))
    sequence = " ".join(repr(v) for v in solution.input_sequence)
    solution_rows = ((solution.objective, k_realized, sequence),)
    return [
        CsvTable(
            name="schedule",
            header=("rho", "r0", "k", "epsilon_k", "realized"),
            rows=tuple(schedule_rows),
        ),
        CsvTable(
            name="solution",
            header=("objective", "cardinality", "input_sequence"),
            rows=solution_rows,
        ),
    ]


def run_validation(config: ExperimentConfig) -> list[CsvTable]:
    """Repeated draw-solve-evaluate pipeline against the certified beta.

    mode "drifted": robust covering on the drifting preset, certified by the
    exact per-index bound.  mode "static": plain covering (radius 0) on a
    fixed distribution with N from the explicit sample-size bound, certified
    by the static certificate.  The summary asserts that the empirical
    frequency of estimated violation above epsilon stays within
    certified beta + 3 binomial standard errors.
    """
    mode = str(config.parameters.get("mode", "drifted"))
    repetitions = _get(config, "repetitions", 500, int)
    if repetitions < 100:
        raise ConfigError("validation needs at least 100 repetitions")
    epsilon = _get(config, "epsilon", 0.1, float)
    complexity = _get(config, "complexity", 2, int)
    eval_samples = _get(config, "eval_samples", 10000, int)

    if mode == "drifted":
        n = _get(config, "n_scenarios", 309, int)
        r0 = _get(config, "r0", 2.0, float)
        family = _cover_family(config, n)
        certified = modelB_beta(n, complexity, epsilon, drift_spec_of(family), r0).beta
    elif mode == "static":
        beta_target = _get(config, "beta", 1e-4, float)
        n = _get(
            config,
            "n_scenarios",
            min_samples_static(epsilon, beta_target, complexity).explicit_bound,
            int,
        )
        r0 = 0.0
        family = static_gaussian_family(n, mean=0.0, std=1.0)
        certified = static_beta(n, complexity, epsilon).beta
    else:
        raise ConfigError(f"mode must be 'drifted' or 'static', got {mode!r}")

    eval_dist = family.distribution_at(n + 1)
    rows = []
    exceed = 0
    for rep in range(repetitions):
        rep_seed = config.seed * 1_000_003 + rep
        observations = sample_sequence(family, n, rep_seed)
        solution = solve_cover(ScenarioSet(observations, np.full(n, r0)))
        estimate = estimate_violation(solution, eval_dist, eval_samples, rep_seed + 7)
        exceeded = estimate.estimate > epsilon
        exceed += int(exceeded)
        rows.append((rep, estimate.estimate, exceeded))

    rate = exceed / repetitions
    vacuous = certified >= 1.0
    se = math.sqrt(max(certified, 1e-300) * max(1.0 - certified, 0.0) / repetitions)
    threshold = certified + 3.0 * se
    passed = vacuous or rate <= threshold
    summary = CsvTable(
        name="summary",
        header=(
            "repetitions",
            "exceedance_rate",
            "certified_beta",
            "threshold",
            "vacuous",
            "passed",
        ),
        rows=((repetitions, rate, certified, threshold, vacuous, passed),),
    )
    validation = CsvTable(
        name="validation",
        header=("repetition", "violation_estimate", "exceeded"),
        rows=tuple(rows),
    )
    return [validation, summary]


def run_wasserstein_curve(config: ExperimentConfig) -> list[CsvTable]:
    """Distance of each step distribution to the evaluation distribution.

    Emits the exact closed form, the CDF-integral quadrature value, and the
    mean-gap line |mu_i - mu_{N+1}| (exact only in the equal-std case, and
    a lower bound otherwise).
    """
    n = _get(config, "n_scenarios", 309, int)
    tol = _get(config, "tol", 1e-8, float)
    family = _cover_family(config, n)
    eval_dist = family.distribution_at(n + 1)
    rows = []
    for i in range(1, n + 2):
        dist = family.distribution_at(i)
        exact = w1_gaussian(dist, eval_dist)
        quadrature = w1_cdf_integral(dist, eval_dist, tol=tol)
        rows.append((i, exact, quadrature, abs(dist.mu - eval_dist.mu)))
    header = ("i", "w1_exact", "w1_quadrature", "mean_gap")
    return [CsvTable(name="wasserstein", header=header, rows=tuple(rows))]


def run_bounds_curve(config: ExperimentConfig) -> list[CsvTable]:
    """Certificate sweep over r0 and sample-size sweep over epsilon."""
    n = _get(config, "n_scenarios", 309, int)
    epsilon = _get(config, "epsilon", 0.1, float)
    beta = _get(config, "beta", 1e-4, float)
    complexity = _get(config, "complexity", 2, int)
    r0_list = _get_list(config, "r0_list", (1.8, 2.0, 2.2, 2.4))
    eps_list = _get_list(config, "epsilon_list", (0.05, 0.1, 0.15, 0.2))
    family = _cover_family(config, n)
    spec = drift_spec_of(family)
    bounds_rows = [
        (r0, modelB_beta(n, complexity, epsilon, spec, r0).beta) for r0 in r0_list
    ]
    size_rows = []
    for eps in eps_list:
        sizes = min_samples_static(eps, beta, complexity)
        size_rows.append((eps, sizes.explicit_bound, sizes.prop1_inversion))
    return [
        CsvTable(name="bounds", header=("r0", "beta_modelB"), rows=tuple(bounds_rows)),
        CsvTable(
            name="samplesize",
            header=("epsilon", "n_explicit", "n_prop1"),
            rows=tuple(size_rows),
        ),
    ]


EXPERIMENTS = {
    "cover": run_cover_experiment,
    "control": run_control_experiment,
    "validate": run_validation,
    "wasserstein": run_wasserstein_curve,
    "bounds": run_bounds_curve,
}


def run_experiment(config: ExperimentConfig) -> list[CsvTable]:
    try:
        runner = EXPERIMENTS[config.experiment]
    except KeyError:
        raise ConfigError(
            f"unknown experiment {config.experiment!r}; choose from {sorted(EXPERIMENTS)}"
        ) from None
    return runner(config)
