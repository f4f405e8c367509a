"""Exception and warning types shared across the package."""


class HPMError(Exception):
    """Base class for all errors raised by hpmkill."""


class InvalidArgumentError(HPMError, ValueError):
    """An argument lies outside the domain of the operation."""


class GeometryError(HPMError, ValueError):
    """Engagement geometry is degenerate (zero range, |z| above the range, ...)."""


class ValidationError(HPMError, ValueError):
    """A scenario violates one or more hard constraints.

    ``failures`` holds every violated constraint, not just the first one.
    """

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


class ClosureWarning(UserWarning):
    """A log-normal closure is being used outside its stated validity range."""


class ScenarioWarning(UserWarning):
    """Soft scenario constraint violated (duty cycle, logistic saturation, ...)."""


def require_valid(params) -> None:
    """Raise :class:`InvalidArgumentError` if ``params.problems()`` is non-empty."""
    found = params.problems()
    if found:
        raise InvalidArgumentError(f"invalid {type(params).__name__}: " + "; ".join(found))
