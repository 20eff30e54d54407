"""Exception types shared across the package."""


class PlumbingError(Exception):
    """Base class for all errors raised by this package."""


class DuplicateVertex(PlumbingError):
    pass


class NotATree(PlumbingError):
    pass


class NotNegativeDefinite(PlumbingError):
    def __init__(self, minor_index, minor_value):
        self.minor_index = minor_index
        self.minor_value = minor_value
        super().__init__(
            "leading principal minor %d of -I is %s (must be positive)"
            % (minor_index, minor_value)
        )


class NotInDualLattice(PlumbingError):
    pass


class InfeasibleQuery(PlumbingError):
    pass


class IterationCapExceeded(PlumbingError):
    pass


class DepthNotStable(PlumbingError):
    pass


class MethodPreconditionFailed(PlumbingError):
    pass


class FitInconsistent(PlumbingError):
    pass


class IdentityViolation(PlumbingError):
    """A machine-verified identity failed; carries the full report."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class ComponentNotRational(PlumbingError):
    pass


class NotGorenstein(PlumbingError):
    pass


class BoundViolation(PlumbingError):
    pass


class SubsetCapExceeded(PlumbingError):
    pass


class InternalDisagreement(PlumbingError):
    pass
