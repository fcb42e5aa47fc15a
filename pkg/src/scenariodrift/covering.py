"""Robust interval covering: the convex scenario problem class.

The decision is an interval [center - half_width, center + half_width]
covering every inflated observation [eta_i - r_i, eta_i + r_i]; the
smallest such interval is the exact solution of the robust scenario
problem for this class, determined by the two binding scenarios.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenarios import ScenarioSet

__all__ = ["CoverSolution", "solve_cover"]


@dataclass(frozen=True)
class CoverSolution:
    center: float
    half_width: float
    binding_low: int
    binding_high: int

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.abs(x - self.center) <= self.half_width

    def decision_key(self) -> tuple[float, float]:
        """Decision identity for exact invariance comparisons."""
        return (self.center, self.half_width)


def solve_cover(scenarios: ScenarioSet) -> CoverSolution:
    """Smallest interval covering all inflated observations.

    Ties in the binding scenarios break to the lowest index, making the
    solver deterministic.  For constant radii the arithmetic is arranged so
    that half_width(r0) == half_width(0) + r0 holds exactly in floating
    point (the binding scenarios are the same either way; note the sum
    form: the difference half_width(r0) - half_width(0) may be one ulp off
    r0 because that subtraction rounds).
    """
    eta = scenarios.observations
    if eta.ndim != 1:
        raise ValueError("covering expects scalar observations")
    r = scenarios.radii
    if r.size and np.all(r == r[0]):
        binding_low = int(np.argmin(eta))
        binding_high = int(np.argmax(eta))
        lo = float(eta[binding_low])
        hi = float(eta[binding_high])
        return CoverSolution(
            center=(lo + hi) / 2.0,
            half_width=(hi - lo) / 2.0 + float(r[0]),
            binding_low=binding_low,
            binding_high=binding_high,
        )
    low_edges = eta - r
    high_edges = eta + r
    binding_low = int(np.argmin(low_edges))
    binding_high = int(np.argmax(high_edges))
    lo = float(low_edges[binding_low])
    hi = float(high_edges[binding_high])
    return CoverSolution(
        center=(lo + hi) / 2.0,
        half_width=(hi - lo) / 2.0,
        binding_low=binding_low,
        binding_high=binding_high,
    )
