"""Exception types shared across the package."""


class NotCompletelyPositiveError(ValueError):
    """Raised when a Choi matrix has a significantly negative eigenvalue."""

    def __init__(self, min_eigenvalue: float):
        super().__init__(
            "map is not completely positive: "
            f"min Choi eigenvalue {min_eigenvalue:.6e}"
        )
        self.min_eigenvalue = min_eigenvalue


class IllConditionedError(ValueError):
    """Raised when a linear system is too ill-conditioned to invert reliably."""

    def __init__(self, condition_number: float, context: str = "input matrix"):
        super().__init__(
            f"{context}: condition number {condition_number:.3e} exceeds safe limit"
        )
        self.condition_number = condition_number


class DegenerateSpectrumError(ValueError):
    """Unperturbed spectrum has (near-)degenerate eigenphases."""


class PairingError(ValueError):
    """Eigenvalue pairing between measured and unperturbed spectra broke down."""


class NonPhysicalStateError(ValueError):
    """A constructed density matrix has a negative eigenvalue."""


class ConfigError(ValueError):
    """A scenario configuration file is malformed or inconsistent."""
