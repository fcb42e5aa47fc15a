"""A-posteriori invariant sets: minimal index subsets that pin the solution.

An invariant set I satisfies solve(I) == solve(S) exactly, and removing any
single index of I changes the solution.  Extraction is greedy descent:
iterate over indices in ascending order, tentatively remove each, re-solve,
keep the removal iff decision and objective are unchanged, and repeat
passes until a fixed point.  All comparisons are exact; both solvers are
deterministic arithmetic over identical inputs, so no tolerance is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

import numpy as np

from .control import (
    ControlInstance,
    EXHAUSTIVE_GUARD,
    _chunk_values,
    _iter_candidate_chunks,
    scenario_terms,
    solve_control,
)
from .covering import solve_cover
from .errors import ConsistencyError
from .scenarios import ScenarioSet

__all__ = ["InvariantSet", "invariant_set", "cover_invariant_set", "control_invariant_set"]

# Largest candidate-by-scenario value table kept in memory for the
# incremental exhaustive path (float64 entries, so 160 MB at the cap).
_VALUE_TABLE_GUARD = 2 * 10**7


@dataclass(frozen=True)
class InvariantSet:
    indices: tuple[int, ...]
    cardinality: int

    def __post_init__(self):
        if tuple(sorted(self.indices)) != self.indices:
            raise ValueError("indices must be sorted ascending")
        if self.cardinality != len(self.indices):
            raise ValueError("cardinality must equal the number of indices")


def invariant_set(n_scenarios: int, solve: Callable[[Sequence[int]], Hashable]) -> InvariantSet:
    """Greedy minimal subset with solve(subset) == solve(all), exact comparison.

    ``solve`` maps a tuple of active (0-based) indices to a hashable
    solution key; it must be deterministic, which is checked by solving the
    full set twice.
    """
    full = tuple(range(n_scenarios))
    reference = solve(full)
    if solve(full) != reference:
        raise ConsistencyError("solver returned different results for identical inputs")
    active = list(full)
    changed = True
    while changed:
        changed = False
        for idx in list(active):
            if len(active) == 1:
                break  # never empty the set; a singleton is its own invariant set
            trial = tuple(i for i in active if i != idx)
            if solve(trial) == reference:
                active.remove(idx)
                changed = True
    return InvariantSet(indices=tuple(active), cardinality=len(active))


def cover_invariant_set(scenarios: ScenarioSet) -> InvariantSet:
    """Invariant set of the robust covering problem (cardinality <= 2)."""

    def solve(indices):
        return solve_cover(scenarios.subset(indices)).decision_key()

    return invariant_set(scenarios.n, solve)


def control_invariant_set(instance: ControlInstance, strategy: str = "exhaustive") -> InvariantSet:
    """Invariant set of the quantized-input control problem.

    With the exhaustive strategy and a value table that fits in memory, the
    per-removal re-solve reuses the fixed candidate-by-scenario values (a
    removal only drops one column from the scenario maximum), which is
    arithmetically identical to a fresh exhaustive solve.  Otherwise each
    tentative removal re-solves from scratch, warm started for branch and
    bound.
    """
    n = instance.n_scenarios
    if (
        strategy == "exhaustive"
        and instance.n_candidates <= EXHAUSTIVE_GUARD
        and instance.n_candidates * n <= _VALUE_TABLE_GUARD
    ):
        return _control_invariant_exhaustive(instance)

    full_solution = solve_control(instance, strategy)

    def solve(indices):
        warm = full_solution.input_sequence if strategy == "branch_and_bound" else None
        return solve_control(instance.subset(indices), strategy, warm_start=warm).decision_key()

    return invariant_set(n, solve)


def _control_invariant_exhaustive(instance: ControlInstance) -> InvariantSet:
    base, reach = scenario_terms(
        instance.scenarios, instance.initial_state, instance.input_matrix, instance.horizon
    )
    n = instance.n_scenarios
    values = np.empty((instance.n_candidates, n))
    for start, block in _iter_candidate_chunks(instance.input_set, instance.horizon):
        for i in range(n):
            values[start : start + block.shape[0], i] = _chunk_values(block, base[i], reach[i])

    # Per-candidate maximum over active scenario columns, maintained under
    # column deletion: removing a column only touches rows whose current
    # argmax is that column, and those rows are recomputed exactly.
    active = np.arange(n)
    worst = values.max(axis=1)
    argmax_col = active[np.argmax(values, axis=1)]
    row0 = int(np.argmin(worst))
    reference = (float(worst[row0]), row0)

    changed = True
    while changed:
        changed = False
        for idx in active.tolist():
            if active.size == 1:
                break
            remaining = active[active != idx]
            affected = np.flatnonzero(argmax_col == idx)
            if affected.size:
                sub = values[np.ix_(affected, remaining)]
                patch_arg = np.argmax(sub, axis=1)
                patch_val = sub[np.arange(affected.size), patch_arg]
                trial = worst.copy()
                trial[affected] = patch_val
            else:
                trial = worst
            row = int(np.argmin(trial))
            if (float(trial[row]), row) == reference:
                active = remaining
                if affected.size:
                    worst = trial
                    argmax_col[affected] = remaining[patch_arg]
                changed = True
    return InvariantSet(indices=tuple(int(i) for i in active), cardinality=int(active.size))
