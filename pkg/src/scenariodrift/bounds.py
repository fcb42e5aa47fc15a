"""Violation-probability certificates and risk schedules.

Every bound is computed in log space (binomial coefficients via log-gamma)
and returned as a `RiskCertificate` carrying its provenance tag.  Vacuous
certificates (beta >= 1) are representable and flagged, never raised as
errors: sweeping into weak-certificate regimes is a supported use.

Indices are 1-based on the mathematical side: scenario steps are 1..N and
the evaluation distribution sits at step N+1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np
from scipy.special import gammaln

from .drift import DriftSpec
from .errors import CapacityError

__all__ = [
    "RiskQuery",
    "RiskCertificate",
    "EpsilonSchedule",
    "ModelACertificates",
    "SampleSizes",
    "static_beta",
    "min_samples_static",
    "modelA_beta",
    "modelB_beta",
    "epsilon_schedule_constant_r",
    "epsilon_schedule_general",
    "solve_epsilon_entry",
    "coupling_gap",
    "coupling_factors",
    "complement_product_sum",
    "log_comb",
]

# Hard cap on the number of enumerated index subsets.
ENUMERATION_GUARD = 10**8

_SOURCES = frozenset(
    {"static_prop1", "modelA_exp", "modelA_product", "modelB_exact", "nonconvex_schedule"}
)

DriftLike = Union[DriftSpec, Callable[[int, int], float]]


def log_comb(n: int, k: int) -> float:
    """log of the binomial coefficient C(n, k), via log-gamma."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


@dataclass(frozen=True)
class RiskQuery:
    """Inputs of a violation-probability bound."""

    n_scenarios: int
    complexity: int
    epsilon: float
    radii: float | tuple[float, ...] | None = None
    drift: DriftSpec | None = None

    def __post_init__(self):
        if self.n_scenarios < 1:
            raise ValueError(f"n_scenarios must be >= 1, got {self.n_scenarios}")
        if not 0 <= self.complexity <= self.n_scenarios:
            raise ValueError(
                f"complexity must lie in 0..{self.n_scenarios}, got {self.complexity}"
            )
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.radii is not None:
            radii = (self.radii,) if isinstance(self.radii, float) else self.radii
            if any(r <= 0 for r in radii):
                raise ValueError("all radii must be positive")


@dataclass(frozen=True)
class RiskCertificate:
    """A bound beta on the probability of drawing a bad scenario multisample."""

    beta: float
    source: str
    query: RiskQuery

    def __post_init__(self):
        if self.source not in _SOURCES:
            raise ValueError(f"unknown source tag {self.source!r}")
        if not self.beta >= 0.0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")

    @property
    def vacuous(self) -> bool:
        """True when the certificate asserts nothing (beta >= 1)."""
        return self.beta >= 1.0


class ModelACertificates(NamedTuple):
    product: RiskCertificate
    exponential: RiskCertificate


class SampleSizes(NamedTuple):
    """The two sample-size branches; they genuinely differ (explicit bound is looser)."""

    explicit_bound: int
    prop1_inversion: int


@dataclass(frozen=True)
class EpsilonSchedule:
    """Risk level per observed invariant-set cardinality k = 0..N.

    ``values[k]`` is the certified risk after observing cardinality k,
    clamped to [0, 1]; ``raw_values`` keeps the unclamped roots and
    ``clamped[k]`` marks entries that were clamped.  ``values[N]`` is 1.
    """

    values: tuple[float, ...]
    beta: float
    rho_over_r: float | tuple[float, ...]
    raw_values: tuple[float, ...]
    clamped: tuple[bool, ...]

    def __post_init__(self):
        n = len(self.values) - 1
        if n < 1:
            raise ValueError("schedule needs entries for k = 0..N with N >= 1")
        if len(self.raw_values) != n + 1 or len(self.clamped) != n + 1:
            raise ValueError("values, raw_values and clamped must have equal length")
        if self.values[n] != 1.0:
            raise ValueError("schedule must end at epsilon(N) = 1")
        if any(not 0.0 <= v <= 1.0 for v in self.values):
            raise ValueError("schedule values must lie in [0, 1]")

    @property
    def n_scenarios(self) -> int:
        return len(self.values) - 1


def static_beta(n_scenarios: int, complexity: int, epsilon: float) -> RiskCertificate:
    """Static convex certificate: beta = C(N, h) (1 - eps)^(N - h)."""
    query = RiskQuery(n_scenarios, complexity, epsilon)
    log_beta = log_comb(n_scenarios, complexity) + (n_scenarios - complexity) * math.log1p(
        -epsilon
    )
    return RiskCertificate(beta=math.exp(log_beta), source="static_prop1", query=query)


def min_samples_static(epsilon: float, beta: float, complexity: int) -> SampleSizes:
    """Sample sizes guaranteeing the static convex certificate at (epsilon, beta).

    ``explicit_bound`` is the closed-form requirement
    N >= (2/eps) ln(1/beta) + 2d + (2d/eps) ln(2/eps); ``prop1_inversion``
    is the smallest N whose direct certificate already satisfies
    static_beta <= beta.  The explicit bound is the quotable number, the
    inversion the sharper one.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    if complexity < 1:
        raise ValueError(f"complexity must be >= 1, got {complexity}")
    d = complexity
    explicit = (
        (2.0 / epsilon) * math.log(1.0 / beta)
        + 2.0 * d
        + (2.0 * d / epsilon) * math.log(2.0 / epsilon)
    )
    explicit_n = max(d, math.ceil(explicit))

    log_beta = math.log(beta)
    log_one_minus = math.log1p(-epsilon)
    n = d
    while log_comb(n, d) + (n - d) * log_one_minus > log_beta:
        n += 1
    return SampleSizes(explicit_bound=explicit_n, prop1_inversion=n)


def modelA_beta(
    n_scenarios: int, complexity: int, epsilon: float, rho: float, r_min: float
) -> ModelACertificates:
    """Convex certificate under uniform drift rho and minimal radius r_min.

    Returns the product form C(N,d) (1 - eps + rho/r_min)^(N+1-d) with the
    base clamped into [0, 1], and the looser exponential form
    C(N,d) exp((rho/r_min - eps)(N+1-d)).  The product form never exceeds
    the exponential form.  When rho/r_min >= eps the certificate is vacuous
    (beta >= 1) and flagged through `RiskCertificate.vacuous`.
    """
    if r_min <= 0:
        raise ValueError(f"r_min must be positive, got {r_min}")
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    query = RiskQuery(
        n_scenarios, complexity, epsilon, radii=float(r_min), drift=DriftSpec.model_a(rho)
    )
    lc = log_comb(n_scenarios, complexity)
    exponent = n_scenarios + 1 - complexity
    gap = rho / r_min
    base = min(1.0 - epsilon + gap, 1.0)
    product = math.exp(lc + exponent * math.log(base))
    exponential = math.exp(lc + exponent * (gap - epsilon))
    assert product <= exponential * (1 + 1e-12)
    return ModelACertificates(
        product=RiskCertificate(beta=product, source="modelA_product", query=query),
        exponential=RiskCertificate(beta=exponential, source="modelA_exp", query=query),
    )


def coupling_factors(epsilon: float, gaps: np.ndarray) -> np.ndarray:
    """Per-scenario factors 1 - (epsilon - gap_i)_+, clamped into [0, 1].

    gap_i = rho(i, N+1)/r_i is the additive coupling slack.  The lower clamp
    only engages for epsilon > 1, which the schedule root-finder probes.
    """
    lower_violation = np.maximum(np.asarray(epsilon) - gaps, 0.0)
    return np.clip(1.0 - lower_violation, 0.0, 1.0)


def complement_product_sum(factors: np.ndarray, k: int) -> float:
    """Sum over all index subsets I of size k of prod_{i not in I} factors[i].

    Enumerates complements by dividing member factors out of one global
    product: O(C(n,k) k + n) instead of O(C(n,k) n).  Zero factors are
    tracked by count, so a subset contributes only if its complement is
    zero-free (it must contain every zero index).  Terms are accumulated
    with compensated summation so the result does not depend on how the
    enumeration might be partitioned.
    """
    factors = np.asarray(factors, dtype=float)
    n = factors.size
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if math.comb(n, k) > ENUMERATION_GUARD:
        raise CapacityError(
            f"C({n},{k}) subsets exceed the enumeration guard {ENUMERATION_GUARD:.0e}; "
            "consider the model-A bound (modelA_beta) as a fallback"
        )
    zero_count = int(np.count_nonzero(factors == 0.0))
    spare = k - zero_count
    if spare < 0:
        # Some zero factor is outside every size-k subset: all terms vanish.
        return 0.0
    logs = np.log(factors[factors != 0.0])
    total = math.fsum(logs.tolist())
    if spare == 0:
        return math.exp(total)
    log_list = logs.tolist()
    return math.fsum(
        math.exp(total - sum(chosen)) for chosen in combinations(log_list, spare)
    )


def _drift_gaps(
    n_scenarios: int, drift: DriftLike, radii: float | Sequence[float]
) -> np.ndarray:
    rho_at = drift.rho_at if isinstance(drift, DriftSpec) else drift
    r = np.broadcast_to(np.asarray(radii, dtype=float), (n_scenarios,))
    if not np.all(r > 0):
        raise ValueError("all radii must be positive")
    eval_index = n_scenarios + 1
    rho = np.array([float(rho_at(i, eval_index)) for i in range(1, n_scenarios + 1)])
    if np.any(rho < 0):
        raise ValueError("drift distances must be nonnegative")
    return rho / r


def modelB_beta(
    n_scenarios: int,
    complexity: int,
    epsilon: float,
    drift: DriftLike,
    radii: float | Sequence[float],
) -> RiskCertificate:
    """Convex certificate under per-index drift: exact subset-sum evaluation.

    beta = sum over subsets I of size d of prod_{i not in I}
    (1 - (eps - rho(i, N+1)/r_i)_+).  ``drift`` is a `DriftSpec` or a bare
    ``rho(i, j)`` callable; ``radii`` a scalar or per-scenario sequence.
    """
    gaps = _drift_gaps(n_scenarios, drift, radii)
    factors = coupling_factors(epsilon, gaps)
    beta = complement_product_sum(factors, complexity)
    radii_field = float(radii) if np.isscalar(radii) else tuple(float(r) for r in radii)
    query = RiskQuery(
        n_scenarios,
        complexity,
        epsilon,
        radii=radii_field,
        drift=drift if isinstance(drift, DriftSpec) else DriftSpec.model_b(drift),
    )
    return RiskCertificate(beta=beta, source="modelB_exact", query=query)


def epsilon_schedule_constant_r(
    n_scenarios: int, beta: float, rho: float, r0: float
) -> EpsilonSchedule:
    """Closed-form risk schedule for constant radii (beta split evenly over k).

    epsilon(N) = 1 and otherwise
    epsilon(k) = 1 + rho/r0 - (beta / (N C(N,k)))^(1/(N-k)), clamped into
    [0, 1] with clamping flagged per entry.
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    if r0 <= 0:
        raise ValueError(f"r0 must be positive, got {r0}")
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    n = n_scenarios
    log_beta_over_n = math.log(beta) - math.log(n)
    raw = []
    for k in range(n):
        root = math.exp((log_beta_over_n - log_comb(n, k)) / (n - k))
        raw.append(1.0 + rho / r0 - root)
    raw.append(1.0)
    values = [min(max(v, 0.0), 1.0) for v in raw]
    clamped = [v != r for v, r in zip(values, raw)]
    return EpsilonSchedule(
        values=tuple(values),
        beta=beta,
        rho_over_r=rho / r0,
        raw_values=tuple(raw),
        clamped=tuple(clamped),
    )


def solve_epsilon_entry(
    n_scenarios: int,
    k: int,
    beta: float,
    gaps: np.ndarray,
    tol: float = 1e-10,
) -> float:
    """Root of the per-k failure sum: epsilon with subset-sum value beta/N.

    Monotone bisection of sum_{|I|=k} prod_{i not in I}
    (1 - (eps - gap_i)_+) = beta/N over eps in [0, 1 + max gap], to absolute
    tolerance ``tol``.  The sum is C(N,k) at eps = 0 and 0 at the upper
    bracket end, so a root always exists for beta/N < C(N,k).
    """
    n = n_scenarios
    target = beta / n
    lo, hi = 0.0, 1.0 + float(np.max(gaps))
    if complement_product_sum(coupling_factors(hi, gaps), k) > target:
        raise ArithmeticError("no root in bracket")  # unreachable for beta < 1
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if complement_product_sum(coupling_factors(mid, gaps), k) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def epsilon_schedule_general(
    n_scenarios: int,
    beta: float,
    drift: DriftLike,
    radii: float | Sequence[float],
    tol: float = 1e-10,
) -> EpsilonSchedule:
    """Risk schedule for heterogeneous drift/radii, entry by entry by bisection.

    Each k = 0..N-1 is guarded by the subset enumeration cap, so this is a
    small-N tool; large-N constant-radius schedules should use
    `epsilon_schedule_constant_r`.  Entries whose root exceeds 1 are clamped
    to 1 and flagged (the schedule statement at risk 1 is vacuous but true).
    """
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    gaps = _drift_gaps(n_scenarios, drift, radii)
    raw, values, clamped = [], [], []
    for k in range(n_scenarios):
        try:
            root = solve_epsilon_entry(n_scenarios, k, beta, gaps, tol=tol)
        except ArithmeticError:
            raw.append(1.0)
            values.append(1.0)
            clamped.append(True)
            continue
        raw.append(root)
        values.append(min(root, 1.0))
        clamped.append(root > 1.0)
    raw.append(1.0)
    values.append(1.0)
    clamped.append(False)
    return EpsilonSchedule(
        values=tuple(values),
        beta=beta,
        rho_over_r=tuple(gaps.tolist()),
        raw_values=tuple(raw),
        clamped=tuple(clamped),
    )


def coupling_gap(
    drift: DriftSpec,
    r_i: float,
    i: int | None = None,
    eval_index: int | None = None,
) -> float:
    """Additive slack rho/r_i (model A) or rho(i, eval_index)/r_i (model B).

    This is the term by which the step-i measure of any region may exceed
    the evaluation measure of that region.  Model B requires both indices;
    model A ignores them except that a matching pair yields slack 0.
    """
    if r_i <= 0:
        raise ValueError(f"r_i must be positive, got {r_i}")
    if drift.model == "A":
        if i is not None and i == eval_index:
            return 0.0
        return drift.rho / r_i
    if i is None or eval_index is None:
        raise ValueError("model B coupling_gap needs both i and eval_index")
    return drift.rho_at(i, eval_index) / r_i
