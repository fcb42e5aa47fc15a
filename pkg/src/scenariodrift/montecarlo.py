"""Monte Carlo estimation of violation probabilities and coupling checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bounds import coupling_gap
from .control import ControlInstance, ControlSolution, scenario_terms
from .covering import CoverSolution
from .drift import GaussianDrift1D, MatrixGaussian, drift_spec_of

__all__ = [
    "ViolationEstimate",
    "CouplingCheckResult",
    "wilson_interval",
    "estimate_violation",
    "coupling_check",
]

# two-sided 95% normal quantile
_Z95 = 1.959963984540054


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValueError("n must be >= 1")
    center = (successes + z * z / 2.0) / (n + z * z)
    half = (z / (n + z * z)) * np.sqrt(successes * (n - successes) / n + z * z / 4.0)
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class ViolationEstimate:
    estimate: float
    lower: float
    upper: float
    n_samples: int
    n_violations: int

    @property
    def half_width(self) -> float:
        return (self.upper - self.lower) / 2.0


def _rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream,)))


def estimate_violation(
    decision,
    eval_distribution,
    n_samples: int,
    seed: int,
    instance: ControlInstance | None = None,
) -> ViolationEstimate:
    """Estimated violation probability of a decision under the evaluation measure.

    For a `CoverSolution`, a draw violates when it falls outside the
    interval; ``eval_distribution`` is a 1-D distribution.  For a
    `ControlSolution`, a draw is a scenario matrix (``eval_distribution`` a
    `MatrixGaussian`) and violates when the terminal norm exceeds the
    solved objective; ``instance`` supplies x0, B and the horizon.  The
    95% confidence bounds are the Wilson score interval.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = _rng(seed)
    if isinstance(decision, CoverSolution):
        draws = eval_distribution.sample(n_samples, rng)
        violated = ~decision.contains(draws)
    elif isinstance(decision, ControlSolution):
        if instance is None:
            raise ValueError("control violation estimation needs the ControlInstance")
        if not isinstance(eval_distribution, MatrixGaussian):
            raise TypeError("control violation estimation needs a MatrixGaussian")
        draws = eval_distribution.sample(n_samples, rng)
        base, reach = scenario_terms(
            draws, instance.initial_state, instance.input_matrix, instance.horizon
        )
        u = np.asarray(decision.input_sequence)
        norms = np.abs(base + reach @ u).max(axis=1)
        violated = norms > decision.objective
    else:
        raise TypeError(f"unsupported decision type {type(decision).__name__}")
    k = int(np.count_nonzero(violated))
    lower, upper = wilson_interval(k, n_samples)
    return ViolationEstimate(
        estimate=k / n_samples,
        lower=lower,
        upper=upper,
        n_samples=n_samples,
        n_violations=k,
    )


@dataclass(frozen=True)
class CouplingCheckResult:
    passed: bool
    vacuous: bool
    p_step: float
    p_eval: float
    slack: float
    se_combined: float


def coupling_check(
    family: GaussianDrift1D,
    region: Callable[[np.ndarray], np.ndarray],
    i: int,
    r_i: float,
    n_samples: int,
    seed: int,
) -> CouplingCheckResult:
    """Monte Carlo check of the coupling inequality for one step index.

    Estimates P_i(region) and P_{N+1}(region) and passes iff
    P_i <= P_{N+1} + rho(i, N+1)/r_i + 3 * combined standard error.  A slack
    of 1 or more makes the bound vacuous: it passes by construction and is
    flagged.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    eval_index = family.n_steps + 1
    slack = coupling_gap(drift_spec_of(family), r_i, i, eval_index)
    draws_i = family.distribution_at(i).sample(n_samples, _rng(seed, stream=0))
    draws_eval = family.distribution_at(eval_index).sample(n_samples, _rng(seed, stream=1))
    p_i = float(np.mean(region(draws_i)))
    p_eval = float(np.mean(region(draws_eval)))
    se = float(
        np.sqrt(p_i * (1 - p_i) / n_samples + p_eval * (1 - p_eval) / n_samples)
    )
    passed = p_i <= p_eval + slack + 3.0 * se
    return CouplingCheckResult(
        passed=passed,
        vacuous=slack >= 1.0,
        p_step=p_i,
        p_eval=p_eval,
        slack=slack,
        se_combined=se,
    )
