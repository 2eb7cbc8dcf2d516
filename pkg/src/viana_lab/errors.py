"""Exception hierarchy.

Every error carries enough context in its message to identify the failing
inequality or parameter; the CLI maps the families below onto exit codes.
"""


class LabError(Exception):
    """Base class for all errors raised by the package."""


class ConfigError(LabError, ValueError):
    """Invalid configuration value or violated input invariant."""


class ConstructionError(LabError):
    """A map, bridge or domain could not be built."""


class DegenerateWidth(ConstructionError):
    pass


class MonotonicityViolated(ConstructionError):
    pass


class BoundViolated(ConstructionError):
    pass


class NoReferenceOrbit(ConstructionError):
    pass


class NoBracket(ConstructionError):
    pass


class NotInvariant(ConstructionError):
    pass


class BudgetExceeded(ConstructionError):
    pass


class ConstraintViolated(LabError):
    """A derived constant fails one of the inequalities it must satisfy."""

    def __init__(self, name, message=""):
        self.name = name
        super().__init__(f"{name}: {message}" if message else name)


class AlphaTooLarge(ConstraintViolated):
    def __init__(self, alpha):
        super().__init__("32^M alpha < 1", f"alpha={alpha!r} must be < 1/32")


class PreconditionViolated(LabError, ValueError):
    pass


class NotAdmissible(LabError, ValueError):
    pass


class AdmissibilityLost(LabError):
    pass


class IndexOutOfRange(LabError, IndexError):
    pass


class NoSeparatedSets(LabError):
    pass
