"""Time-varying scenario-generating distribution families.

A family defines one distribution per step index i = 1..N+1; the (N+1)-th
distribution is always materialized because violation is evaluated under
it.  Drift between steps is summarized by a `DriftSpec`: either a single
scalar bound on the 1-Wasserstein distance between any two steps
(model "A") or a per-index-pair function with zero diagonal (model "B").

Sampling is reproducible and splittable: scenario index i draws from an
independent substream derived from (seed, i), so parallel sampling yields
the same sequence as serial sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, HorizonError
from .wasserstein import Gaussian, w1_gaussian

__all__ = [
    "DriftSpec",
    "GaussianDrift1D",
    "MatrixGaussian",
    "MatrixGaussianDrift",
    "sample_sequence",
    "sample_control_scenarios",
    "drift_spec_of",
    "linear_gaussian_family",
    "static_gaussian_family",
    "constant_matrix_family",
    "parse_config_text",
    "drift_family_from_config",
]


def _substream(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


@dataclass(frozen=True)
class DriftSpec:
    """Declared coupling between scenario-generating distributions.

    model "A": a single scalar ``rho`` bounds the distance for every index
    pair.  model "B": ``rho_fn(i, j)`` gives a per-pair bound with
    ``rho_fn(i, i) == 0``.
    """

    model: str
    rho: float | None = None
    rho_fn: Callable[[int, int], float] | None = None

    def __post_init__(self):
        if self.model == "A":
            if self.rho is None or self.rho < 0:
                raise ValueError(f"model A needs a scalar rho >= 0, got {self.rho}")
        elif self.model == "B":
            if self.rho_fn is None:
                raise ValueError("model B needs a rho_fn(i, j)")
            if self.rho_fn(1, 1) != 0.0:
                raise ValueError("model B requires rho_fn(i, i) == 0")
        else:
            raise ValueError(f"model must be 'A' or 'B', got {self.model!r}")

    def rho_at(self, i: int, j: int) -> float:
        """Drift bound between step distributions i and j (1-based indices)."""
        if i == j:
            return 0.0
        if self.model == "A":
            return self.rho
        value = float(self.rho_fn(i, j))
        if value < 0:
            raise ValueError(f"rho_fn({i}, {j}) returned a negative value {value}")
        return value

    @classmethod
    def model_a(cls, rho: float) -> "DriftSpec":
        return cls(model="A", rho=float(rho))

    @classmethod
    def model_b(cls, rho_fn: Callable[[int, int], float]) -> "DriftSpec":
        return cls(model="B", rho_fn=rho_fn)

    def as_model_b(self) -> "DriftSpec":
        """Wrap a model-A spec as the equivalent model-B spec (zero diagonal)."""
        if self.model == "B":
            return self
        rho = self.rho
        return DriftSpec.model_b(lambda i, j: 0.0 if i == j else rho)


@dataclass(frozen=True, eq=False)
class GaussianDrift1D:
    """Family of N+1 one-dimensional normal step distributions.

    ``means[i-1]`` / ``stds[i-1]`` hold the parameters of step i, so both
    arrays have length ``n_steps + 1`` (the evaluation distribution at step
    N+1 included).  Instances are immutable and shareable across threads.
    """

    n_steps: int
    means: np.ndarray
    stds: np.ndarray

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        means = np.asarray(self.means, dtype=float)
        stds = np.asarray(self.stds, dtype=float)
        if means.shape != (self.n_steps + 1,) or stds.shape != (self.n_steps + 1,):
            raise ValueError(
                f"means and stds must have length n_steps + 1 = {self.n_steps + 1}"
            )
        if not np.all(stds > 0):
            raise ValueError("all standard deviations must be positive")
        means.setflags(write=False)
        stds.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "stds", stds)

    @classmethod
    def from_functions(cls, n_steps: int, mean_fn, std_fn) -> "GaussianDrift1D":
        idx = np.arange(1, n_steps + 2)
        return cls(
            n_steps=n_steps,
            means=np.array([float(mean_fn(i)) for i in idx]),
            stds=np.array([float(std_fn(i)) for i in idx]),
        )

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= self.n_steps + 1:
            raise HorizonError(
                f"step index {i} outside defined horizon 1..{self.n_steps + 1}"
            )

    def mean_at(self, i: int) -> float:
        self._check_index(i)
        return float(self.means[i - 1])

    def std_at(self, i: int) -> float:
        self._check_index(i)
        return float(self.stds[i - 1])

    def distribution_at(self, i: int) -> Gaussian:
        self._check_index(i)
        return Gaussian(float(self.means[i - 1]), float(self.stds[i - 1]))


@dataclass(frozen=True)
class MatrixGaussian:
    """2x2 random matrix with independent normal entries of common std."""

    mean: np.ndarray
    entry_std: float

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        if mean.shape != (2, 2):
            raise ValueError(f"mean must be 2x2, got shape {mean.shape}")
        if self.entry_std < 0:
            raise ValueError(f"entry_std must be >= 0, got {self.entry_std}")
        mean.setflags(write=False)
        object.__setattr__(self, "mean", mean)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(self.mean, self.entry_std, size=(n, 2, 2))


@dataclass(frozen=True, eq=False)
class MatrixGaussianDrift:
    """Family of 2x2 matrix distributions with drifting entry means.

    Entries are independent normals with shared standard deviation
    ``entry_std``; ``mean_matrices[i-1]`` is the entrywise mean at step i
    (length ``n_steps + 1`` along the first axis).  With equal entry stds,
    the per-entry 1-Wasserstein distance between steps equals the absolute
    mean gap, so a declared model-A ``rho`` must dominate the largest such
    gap over all step pairs.
    """

    n_steps: int
    mean_matrices: np.ndarray
    entry_std: float
    rho: float = 0.0

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        means = np.asarray(self.mean_matrices, dtype=float)
        if means.shape != (self.n_steps + 1, 2, 2):
            raise ValueError(
                f"mean_matrices must have shape ({self.n_steps + 1}, 2, 2), got {means.shape}"
            )
        if self.entry_std < 0:
            raise ValueError(f"entry_std must be >= 0, got {self.entry_std}")
        if self.rho < 0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        means.setflags(write=False)
        object.__setattr__(self, "mean_matrices", means)
        drift = self.max_mean_drift()
        if drift > self.rho:
            raise ValueError(
                f"mean drift {drift} exceeds declared model-A bound rho={self.rho}"
            )

    @classmethod
    def constant(
        cls, mean: np.ndarray, entry_std: float, n_steps: int, rho: float = 0.0
    ) -> "MatrixGaussianDrift":
        means = np.broadcast_to(np.asarray(mean, dtype=float), (n_steps + 1, 2, 2)).copy()
        return cls(n_steps=n_steps, mean_matrices=means, entry_std=entry_std, rho=rho)

    def max_mean_drift(self) -> float:
        """Largest per-entry mean gap over all step pairs (= per-entry W1)."""
        spans = self.mean_matrices.max(axis=0) - self.mean_matrices.min(axis=0)
        return float(spans.max())

    def _check_index(self, i: int) -> None:
        if not 1 <= i <= self.n_steps + 1:
            raise HorizonError(
                f"step index {i} outside defined horizon 1..{self.n_steps + 1}"
            )

    def mean_matrix_at(self, i: int) -> np.ndarray:
        self._check_index(i)
        return self.mean_matrices[i - 1]

    def distribution_at(self, i: int) -> MatrixGaussian:
        self._check_index(i)
        return MatrixGaussian(self.mean_matrices[i - 1], self.entry_std)

    def drift_spec(self) -> DriftSpec:
        return DriftSpec.model_a(self.rho)


def sample_sequence(family: GaussianDrift1D, count: int, seed: int) -> np.ndarray:
    """Draw the scenario sequence xi_1..xi_count, one per step distribution.

    Each index uses an independent substream of ``seed``, so the sequence is
    bitwise reproducible and prefix-stable: the first k values do not depend
    on ``count``.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if count > family.n_steps + 1:
        raise HorizonError(
            f"count {count} exceeds defined horizon {family.n_steps + 1}"
        )
    out = np.empty(count)
    for i in range(1, count + 1):
        rng = _substream(seed, i)
        out[i - 1] = rng.normal(family.means[i - 1], family.stds[i - 1])
    return out


def sample_control_scenarios(
    family: MatrixGaussianDrift, count: int, seed: int
) -> np.ndarray:
    """Draw count 2x2 scenario matrices A_(1)..A_(count), one per step."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if count > family.n_steps + 1:
        raise HorizonError(
            f"count {count} exceeds defined horizon {family.n_steps + 1}"
        )
    out = np.empty((count, 2, 2))
    for i in range(1, count + 1):
        rng = _substream(seed, i)
        out[i - 1] = rng.normal(family.mean_matrices[i - 1], family.entry_std, size=(2, 2))
    return out


def drift_spec_of(family: GaussianDrift1D) -> DriftSpec:
    """Exact model-B drift spec of a gaussian family.

    ``rho_fn(i, j)`` is the exact 1-Wasserstein distance between the step-i
    and step-j distributions.  Note that for unequal stds this is strictly
    larger than the mean gap |mu_i - mu_j|; the mean gap is a valid distance
    only in the equal-std case.
    """

    def rho_fn(i: int, j: int) -> float:
        return w1_gaussian(family.distribution_at(i), family.distribution_at(j))

    return DriftSpec.model_b(rho_fn)


# ---------------------------------------------------------------------------
# Presets


def linear_gaussian_family(
    n_steps: int,
    mean_slope: float = 0.2,
    std_base: float = 1.0,
    std_slope: float = 0.2,
) -> GaussianDrift1D:
    """Linearly drifting family: mu_i = mean_slope*i/N, sigma_i = std_base + std_slope*i/N."""
    idx = np.arange(1, n_steps + 2, dtype=float)
    return GaussianDrift1D(
        n_steps=n_steps,
        means=mean_slope * idx / n_steps,
        stds=std_base + std_slope * idx / n_steps,
    )


def static_gaussian_family(n_steps: int, mean: float = 0.0, std: float = 1.0) -> GaussianDrift1D:
    """Constant family: every step distribution is Norm(mean, std)."""
    return GaussianDrift1D(
        n_steps=n_steps,
        means=np.full(n_steps + 1, float(mean)),
        stds=np.full(n_steps + 1, float(std)),
    )


# Nominal system matrix of the quantized-input control benchmark.
DEFAULT_CONTROL_MEAN = np.array([[0.8, -1.0], [0.0, -0.9]])


def constant_matrix_family(
    n_steps: int,
    mean: np.ndarray | None = None,
    entry_std: float = 0.02,
    rho: float = 0.0,
) -> MatrixGaussianDrift:
    """Matrix family with constant mean (no realized drift; rho declared)."""
    if mean is None:
        mean = DEFAULT_CONTROL_MEAN
    return MatrixGaussianDrift.constant(mean, entry_std, n_steps, rho=rho)


# ---------------------------------------------------------------------------
# Plain-text config support (key = value lines, '#' comments)

_FAMILY_KINDS = ("linear_gaussian", "static_gaussian", "constant_matrix_gaussian")


def parse_config_text(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines into a dict; blank lines and '#' comments ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value.strip()
    return out


def drift_family_from_config(config: dict[str, str]):
    """Build a drift family from a plain-text config mapping.

    Required keys: ``kind`` (one of linear_gaussian, static_gaussian,
    constant_matrix_gaussian) and ``n_steps``.  Kind-specific keys as
    documented in the README; unknown keys are rejected.
    """
    known = {
        "linear_gaussian": {"kind", "n_steps", "mean_slope", "std_base", "std_slope"},
        "static_gaussian": {"kind", "n_steps", "mean", "std"},
        "constant_matrix_gaussian": {"kind", "n_steps", "mean_entries", "entry_std", "rho"},
    }
    kind = config.get("kind")
    if kind not in _FAMILY_KINDS:
        raise ConfigError(f"kind must be one of {_FAMILY_KINDS}, got {kind!r}")
    extra = set(config) - known[kind]
    if extra:
        raise ConfigError(f"unknown keys for kind {kind}: {sorted(extra)}")
    try:
        n_steps = int(config["n_steps"])
    except KeyError:
        raise ConfigError("missing required key 'n_steps'") from None
    except ValueError:
        raise ConfigError(f"n_steps must be an integer, got {config['n_steps']!r}") from None

    def fget(key: str, default: float) -> float:
        try:
            return float(config.get(key, default))
        except ValueError:
            raise ConfigError(f"{key} must be a number, got {config[key]!r}") from None

    if kind == "linear_gaussian":
        return linear_gaussian_family(
            n_steps,
            mean_slope=fget("mean_slope", 0.2),
            std_base=fget("std_base", 1.0),
            std_slope=fget("std_slope", 0.2),
        )
    if kind == "static_gaussian":
        return static_gaussian_family(n_steps, mean=fget("mean", 0.0), std=fget("std", 1.0))
    entries = config.get("mean_entries")
    if entries is None:
        mean = DEFAULT_CONTROL_MEAN
    else:
        parts = [p for p in entries.replace(",", " ").split() if p]
        if len(parts) != 4:
            raise ConfigError(f"mean_entries needs 4 numbers (row major), got {entries!r}")
        mean = np.array([float(p) for p in parts]).reshape(2, 2)
    return constant_matrix_family(
        n_steps, mean=mean, entry_std=fget("entry_std", 0.02), rho=fget("rho", 0.0)
    )
