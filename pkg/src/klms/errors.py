"""Exceptions shared across the package."""


class ConfigurationError(ValueError):
    """A run was requested with invalid or unsupported parameters."""


class DivergenceError(RuntimeError):
    """A stochastic recursion produced a non-finite or absurdly large
    coefficient, which almost always means the step size is too large."""

    def __init__(self, step: int, value: float):
        self.step = step
        self.value = value
        super().__init__(
            f"coefficient diverged at step {step} (|a_n| = {value:.3e}); "
            "the step size is probably too large"
        )
