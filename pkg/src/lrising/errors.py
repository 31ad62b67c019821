"""Exception and warning types shared across the package."""


class SimulationError(Exception):
    """Base class for all lrising errors."""


class EquilibriumError(SimulationError):
    """Equilibrium solver hit its iteration cap; carries the final gradient norm."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class ChainUnstableError(SimulationError):
    """A transverse mode eigenvalue is non-positive (zigzag transition)."""


class ResonanceError(SimulationError):
    """Beatnote detuning falls inside the guard band of a normal mode."""

    def __init__(self, message, mode_index, mode_freq):
        super().__init__(message)
        self.mode_index = mode_index
        self.mode_freq = mode_freq


class CapacityError(SimulationError):
    """Requested system size exceeds an enumeration or dynamics cap."""


class RescaleError(SimulationError):
    """Coupling matrix cannot be rescaled (all entries zero)."""


class FitDomainError(SimulationError):
    """Power-law fit requires strictly positive couplings."""


class ZeroFieldError(SimulationError):
    """Initial-state direction undefined for a zero total field."""


class StiffnessError(SimulationError):
    """Time stepper cannot meet its accuracy/unitarity targets at this step size."""


class NumericsError(SimulationError):
    """An iterative eigensolver failed to converge."""


class ConfigError(SimulationError):
    """Config text failed to parse or validate."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IllConditionedCorrectionWarning(RuntimeWarning):
    """Detection-error inversion clamped a large amount of negative mass."""
