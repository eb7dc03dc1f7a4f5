"""Exception types shared across the package."""


class CapacityError(RuntimeError):
    """A requested object exceeds a configured dimension cap."""


class SectorError(ValueError):
    """An operator or coupling set is incompatible with a particle-number sector."""


class ConsistencyError(ValueError):
    """Input data contradicts itself (conflicting duplicates, asymmetry, ...)."""


class FcidumpParseError(ValueError):
    """Malformed integral or Fock-matrix file.  Carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DiagnosticError(RuntimeError):
    """A numerical diagnostic failed (e.g. no stationary mode found)."""


class StiffnessError(RuntimeError):
    """Adaptive step size underflowed.  Carries the last accepted (t, state)."""

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class ApplicabilityError(ValueError):
    """A closed-form shortcut was requested outside its domain of validity."""


class StepSizeError(RuntimeError):
    """Total per-step jump probability exceeded its guard; reduce the time step."""
