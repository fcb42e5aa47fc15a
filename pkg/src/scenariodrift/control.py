"""Quantized-input control: the non-convex scenario problem class.

The decision is a length-T input sequence u from a finite input set; the
objective is the worst case over scenario matrices of the terminal-state
infinity norm ||A_(i)^T x0 + R_(i) u||_inf, with R_(i) = [B  A_(i)B  ...
A_(i)^(T-1)B] and u = [u(T-1) ... u(0)].  Two solvers are provided:
exhaustive enumeration (guarded) and branch and bound with interval-
arithmetic lower bounds; they return identical results wherever both run.

Ties between input sequences with equal objective break to the
lexicographically smallest sequence, which makes both solvers
deterministic and invariant-set extraction well defined.

Every terminal value in this module is accumulated level by level in the
same order (base, then column 0, 1, ...), so exhaustive search, branch and
bound, invariant-set re-solves and Monte Carlo evaluation agree bitwise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError

__all__ = [
    "ControlInstance",
    "ControlSolution",
    "build_reachability",
    "scenario_terms",
    "terminal_values",
    "control_objective",
    "solve_control",
    "EXHAUSTIVE_GUARD",
]

EXHAUSTIVE_GUARD = 10**7
_CHUNK = 1 << 14

# Scenario counts above this use exact outer constraint generation around
# branch and bound (see _solve_branch_and_bound_large).
_DIRECT_BNB_SCENARIOS = 32

DEFAULT_INPUT_SET = tuple(float(v) for v in range(-5, 6))


@dataclass(frozen=True, eq=False)
class ControlInstance:
    scenarios: np.ndarray
    horizon: int = 8
    initial_state: np.ndarray | None = None
    input_set: tuple[float, ...] = DEFAULT_INPUT_SET
    input_matrix: np.ndarray | None = None

    def __post_init__(self):
        scen = np.asarray(self.scenarios, dtype=float)
        if scen.ndim != 3 or scen.shape[1:] != (2, 2) or scen.shape[0] == 0:
            raise ValueError(f"scenarios must have shape (N, 2, 2), got {scen.shape}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        x0 = np.array([1.0, 1.0]) if self.initial_state is None else np.asarray(
            self.initial_state, dtype=float
        )
        b = np.array([0.0, 0.5]) if self.input_matrix is None else np.asarray(
            self.input_matrix, dtype=float
        )
        if x0.shape != (2,) or b.shape != (2,):
            raise ValueError("initial_state and input_matrix must be 2-vectors")
        if len(self.input_set) == 0:
            raise ValueError("input_set must be nonempty")
        u = tuple(sorted(float(v) for v in self.input_set))
        scen.setflags(write=False)
        x0.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "scenarios", scen)
        object.__setattr__(self, "initial_state", x0)
        object.__setattr__(self, "input_matrix", b)
        object.__setattr__(self, "input_set", u)

    @property
    def n_scenarios(self) -> int:
        return self.scenarios.shape[0]

    @property
    def n_candidates(self) -> int:
        return len(self.input_set) ** self.horizon

    def subset(self, indices) -> "ControlInstance":
        idx = np.asarray(indices, dtype=int)
        return ControlInstance(
            scenarios=self.scenarios[idx],
            horizon=self.horizon,
            initial_state=self.initial_state,
            input_set=self.input_set,
            input_matrix=self.input_matrix,
        )


@dataclass(frozen=True)
class ControlSolution:
    input_sequence: tuple[float, ...]
    objective: float

    def decision_key(self) -> tuple[float, tuple[float, ...]]:
        return (self.objective, self.input_sequence)


def scenario_terms(
    matrices: np.ndarray, x0: np.ndarray, b: np.ndarray, horizon: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-matrix constant term A^T x0 and reachability matrix, batched.

    Returns (base, reach) with shapes (n, 2) and (n, 2, T); reach columns
    are B, AB, ..., A^(T-1)B.
    """
    mats = np.asarray(matrices, dtype=float)
    n = mats.shape[0]
    power = np.broadcast_to(np.eye(2), (n, 2, 2)).copy()
    cols = []
    for _ in range(horizon):
        cols.append(power @ b)
        power = mats @ power
    base = power @ x0
    return base, np.stack(cols, axis=2)


def terminal_values(base: np.ndarray, reach: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Terminal states base + R u, accumulated column by column, shape (n, 2).

    The fixed accumulation order is the bitwise contract shared by all
    solvers and estimators in this module.
    """
    values = base.copy()
    for t in range(u.shape[0]):
        values += reach[:, :, t] * u[t]
    return values


def build_reachability(instance: ControlInstance, scenario_index: int) -> np.ndarray:
    """Reachability matrix [B  AB ... A^(T-1)B] of one scenario, shape (2, T)."""
    if not 0 <= scenario_index < instance.n_scenarios:
        raise IndexError(f"scenario index {scenario_index} out of range")
    _, reach = scenario_terms(
        instance.scenarios[scenario_index : scenario_index + 1],
        instance.initial_state,
        instance.input_matrix,
        instance.horizon,
    )
    return reach[0]


def control_objective(instance: ControlInstance, u) -> float:
    """Worst case over scenarios of ||A^T x0 + R u||_inf at input sequence u."""
    u = np.asarray(u, dtype=float)
    if u.shape != (instance.horizon,):
        raise ValueError(f"input sequence must have length {instance.horizon}")
    base, reach = scenario_terms(
        instance.scenarios, instance.initial_state, instance.input_matrix, instance.horizon
    )
    return float(np.abs(terminal_values(base, reach, u)).max())


def _iter_candidate_chunks(input_set, horizon: int):
    gen = itertools.product(input_set, repeat=horizon)
    start = 0
    while True:
        block = list(itertools.islice(gen, _CHUNK))
        if not block:
            return
        yield start, np.asarray(block, dtype=float)
        start += len(block)


def _chunk_values(block: np.ndarray, base_i: np.ndarray, reach_i: np.ndarray) -> np.ndarray:
    """Per-candidate scenario value max|base_i + R_i u| for one scenario."""
    acc = np.tile(base_i, (block.shape[0], 1))
    for t in range(block.shape[1]):
        acc += np.multiply.outer(block[:, t], reach_i[:, t])
    return np.abs(acc).max(axis=1)


def _solve_exhaustive(instance: ControlInstance) -> ControlSolution:
    if instance.n_candidates > EXHAUSTIVE_GUARD:
        raise CapacityError(
            f"{instance.n_candidates} candidate sequences exceed the exhaustive guard "
            f"{EXHAUSTIVE_GUARD:.0e}; use strategy='branch_and_bound'"
        )
    base, reach = scenario_terms(
        instance.scenarios, instance.initial_state, instance.input_matrix, instance.horizon
    )
    best_obj = np.inf
    best_seq = None
    for _, block in _iter_candidate_chunks(instance.input_set, instance.horizon):
        worst = np.zeros(block.shape[0])
        for i in range(base.shape[0]):
            np.maximum(worst, _chunk_values(block, base[i], reach[i]), out=worst)
        j = int(np.argmin(worst))
        # Strict improvement keeps the first (lexicographically smallest) optimum:
        # chunks enumerate sequences in lexicographic order.
        if worst[j] < best_obj:
            best_obj = float(worst[j])
            best_seq = tuple(float(v) for v in block[j])
    return ControlSolution(input_sequence=best_seq, objective=best_obj)


def _solve_branch_and_bound_direct(
    instance: ControlInstance, warm_start=None
) -> ControlSolution:
    base, reach = scenario_terms(
        instance.scenarios, instance.initial_state, instance.input_matrix, instance.horizon
    )
    horizon = instance.horizon
    inputs = np.asarray(instance.input_set)
    u_lo, u_hi = inputs[0], inputs[-1]
    col_lo = np.minimum(reach * u_lo, reach * u_hi)
    col_hi = np.maximum(reach * u_lo, reach * u_hi)
    # Suffix interval sums over undecided positions t >= L, shape (n, 2, T+1).
    suffix_lo = np.zeros(reach.shape[:2] + (horizon + 1,))
    suffix_hi = np.zeros_like(suffix_lo)
    for level in reversed(range(horizon)):
        suffix_lo[:, :, level] = suffix_lo[:, :, level + 1] + col_lo[:, :, level]
        suffix_hi[:, :, level] = suffix_hi[:, :, level + 1] + col_hi[:, :, level]

    inc_obj = np.inf
    inc_seq: tuple[float, ...] | None = None
    if warm_start is not None:
        seq0 = tuple(float(v) for v in warm_start)
        if len(seq0) != horizon:
            raise ValueError("warm_start must have length equal to the horizon")
        inc_obj = control_objective(instance, seq0)
        inc_seq = seq0

    # The last levels are enumerated as one vectorized tail instead of
    # recursed; value accumulation order stays level by level.
    tail_depth = min(2, horizon)
    tail_start = horizon - tail_depth
    tail_grid = np.asarray(
        list(itertools.product(inputs, repeat=tail_depth)), dtype=float
    )
    prefix = [0.0] * tail_start

    def finish_tail(fixed: np.ndarray, head: tuple[float, ...]) -> None:
        nonlocal inc_obj, inc_seq
        acc = np.tile(fixed, (tail_grid.shape[0], 1, 1))
        for t in range(tail_depth):
            acc += np.multiply.outer(tail_grid[:, t], reach[:, :, tail_start + t])
        worst = np.abs(acc).max(axis=(1, 2))
        j = int(np.argmin(worst))
        obj = float(worst[j])
        seq = head + tuple(float(v) for v in tail_grid[j])
        if obj < inc_obj or (obj == inc_obj and (inc_seq is None or seq < inc_seq)):
            inc_obj = obj
            inc_seq = seq

    def descend(level: int, fixed: np.ndarray) -> None:
        nonlocal inc_obj, inc_seq
        if level == tail_start:
            finish_tail(fixed, tuple(prefix))
            return
        # Evaluate all children at once: value intervals of the completed
        # objective, pruned when even the best completion exceeds the incumbent.
        children = fixed[None, :, :] + reach[None, :, :, level] * inputs[:, None, None]
        lo = children + suffix_lo[None, :, :, level + 1]
        hi = children + suffix_hi[None, :, :, level + 1]
        dist0 = np.maximum(np.maximum(lo, -hi), 0.0)
        lower_bounds = dist0.max(axis=(1, 2))
        # Most promising child first; stable sort keeps ascending-u order on
        # ties, and the incumbent update rule makes the result order-independent.
        for j in np.argsort(lower_bounds, kind="stable"):
            if lower_bounds[j] > inc_obj:
                break  # bounds are sorted and the incumbent only improves
            prefix[level] = float(inputs[j])
            descend(level + 1, children[j])

    descend(0, base.copy())
    return ControlSolution(input_sequence=inc_seq, objective=float(inc_obj))


def _solve_branch_and_bound_large(
    instance: ControlInstance, warm_start=None
) -> ControlSolution:
    """Exact constraint generation around the direct branch and bound.

    Solves on a small working set of scenarios, checks the candidate on the
    full set, and adds the worst violating scenario until the working-set
    objective is attained on the full set.  Any full-problem optimum is
    also optimal for the working set (its working-set value cannot be
    smaller than the working-set optimum and cannot exceed its full value),
    so the optimal set of the working-set problem contains the full optimal
    set; the returned lexicographic minimum is therefore the full problem's
    lexicographic-minimal optimum, bitwise identical to a direct solve.
    """
    base, reach = scenario_terms(
        instance.scenarios, instance.initial_state, instance.input_matrix, instance.horizon
    )
    start = int(np.argmax(np.abs(base).max(axis=1)))
    working = [start]
    while True:
        sub = instance.subset(working)
        solution = _solve_branch_and_bound_direct(sub, warm_start=warm_start)
        u = np.asarray(solution.input_sequence)
        per_scenario = np.abs(terminal_values(base, reach, u)).max(axis=1)
        worst_idx = int(np.argmax(per_scenario))
        full_value = float(per_scenario[worst_idx])
        if full_value == solution.objective:
            return solution
        working.append(worst_idx)
        warm_start = solution.input_sequence


def solve_control(
    instance: ControlInstance,
    strategy: str = "exhaustive",
    warm_start=None,
) -> ControlSolution:
    """Global minimizer of the worst-case terminal norm over the input lattice.

    strategy "exhaustive" enumerates all |U|^T sequences (guarded); strategy
    "branch_and_bound" prunes with admissible interval bounds and returns
    exactly the same objective and tie-broken sequence.  ``warm_start`` (an
    input sequence) may seed the branch-and-bound incumbent; it is
    re-evaluated on this instance so the result is unchanged.
    """
    if strategy == "exhaustive":
        return _solve_exhaustive(instance)
    if strategy == "branch_and_bound":
        if instance.n_scenarios > _DIRECT_BNB_SCENARIOS:
            return _solve_branch_and_bound_large(instance, warm_start=warm_start)
        return _solve_branch_and_bound_direct(instance, warm_start=warm_start)
    raise ValueError(f"unknown strategy {strategy!r}")
