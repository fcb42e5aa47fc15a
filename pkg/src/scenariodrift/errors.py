"""Exception types shared across the package."""


class HorizonError(ValueError):
    """A requested step index lies outside the defined distribution horizon."""


class CapacityError(RuntimeError):
    """A requested computation exceeds a hard enumeration guard."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, *, value: float, error_estimate: float, n_evals: int):
        super().__init__(
            f"{message} (value={value!r}, error_estimate={error_estimate!r}, n_evals={n_evals})"
        )
        self.value = value
        self.error_estimate = error_estimate
        self.n_evals = n_evals


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


class ConsistencyError(RuntimeError):
    """A solver returned different results for identical inputs."""
