"""Observed scenario sets and their plain-text serialization.

Observations are either scalars (interval covering) with shape (N,) or 2x2
matrices (quantized-input control) with shape (N, 2, 2); each observation
carries a tolerable observation radius r_i > 0.  Radius 0 is permitted only
as the degenerate non-robust mode and is flagged through `degenerate`.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["ScenarioSet", "save_scenarios", "load_scenarios"]


@dataclass(frozen=True, eq=False)
class ScenarioSet:
    observations: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        obs = np.asarray(self.observations, dtype=float)
        radii = np.asarray(self.radii, dtype=float)
        if obs.ndim not in (1, 3) or (obs.ndim == 3 and obs.shape[1:] != (2, 2)):
            raise ValueError(
                f"observations must have shape (N,) or (N, 2, 2), got {obs.shape}"
            )
        if obs.shape[0] == 0:
            raise ValueError("scenario set must be nonempty")
        if radii.shape != (obs.shape[0],):
            raise ValueError(
                f"radii length {radii.shape} does not match {obs.shape[0]} observations"
            )
        if np.any(radii < 0):
            raise ValueError("radii must be nonnegative")
        obs.setflags(write=False)
        radii.setflags(write=False)
        object.__setattr__(self, "observations", obs)
        object.__setattr__(self, "radii", radii)

    @classmethod
    def with_constant_radius(cls, observations, r0: float) -> "ScenarioSet":
        obs = np.asarray(observations, dtype=float)
        return cls(observations=obs, radii=np.full(obs.shape[0], float(r0)))

    @property
    def n(self) -> int:
        return self.observations.shape[0]

    @property
    def degenerate(self) -> bool:
        """True in the non-robust mode (some radius is zero)."""
        return bool(np.any(self.radii == 0.0))

    def subset(self, indices) -> "ScenarioSet":
        idx = np.asarray(indices, dtype=int)
        return ScenarioSet(self.observations[idx], self.radii[idx])


def save_scenarios(path, scenarios: ScenarioSet) -> None:
    """Write a columnar text file: index, observation component(s), radius."""
    obs = scenarios.observations
    lines = []
    if obs.ndim == 1:
        lines.append("# index eta radius")
        for i in range(scenarios.n):
            lines.append(f"{i} {obs[i]!r} {scenarios.radii[i]!r}")
    else:
        lines.append("# index a11 a12 a21 a22 radius")
        for i in range(scenarios.n):
            flat = " ".join(repr(v) for v in obs[i].ravel())
            lines.append(f"{i} {flat} {scenarios.radii[i]!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_scenarios(path) -> ScenarioSet:
    """Read a scenario set written by `save_scenarios` (round-trips exactly)."""
    rows = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        rows.append([float(p) for p in parts[1:]])
    if not rows:
        raise ValueError(f"no scenario rows found in {path}")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"inconsistent column count in {path}")
    data = np.asarray(rows)
    if width == 2:
        return ScenarioSet(observations=data[:, 0], radii=data[:, 1])
    if width == 5:
        return ScenarioSet(
            observations=data[:, :4].reshape(-1, 2, 2), radii=data[:, 4]
        )
    raise ValueError(f"unsupported column count {width} in {path}")
