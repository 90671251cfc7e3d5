"""Common definitions for trackmatch-components."""


class UnreachableError(ValueError):
    """No drivable path connects two road points."""


class NoCandidatesError(ValueError):
    """No match candidate was found for a sample."""


class InfeasibleMatchError(ValueError):
    """No chain of candidates with drivable transitions exists."""


class ConvergenceError(RuntimeError):
    """A numerical solver did not converge."""


class SimulationError(ValueError):
    """Synthetic data could not be generated."""
