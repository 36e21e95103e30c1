"""
Error hierarchy shared by every toricvol app.
"""


class ToricVolumeError(Exception):
    """Base class for all computation errors raised by toricvol."""


class EmptyPolytope(ToricVolumeError):
    pass


class NonCartier(ToricVolumeError):
    pass


class DegeneratePolytope(ToricVolumeError):
    pass


class IncompleteFan(ToricVolumeError):
    pass


class UnboundedPolytope(ToricVolumeError):
    pass


class DomainMismatch(ToricVolumeError):
    pass


class DimensionMismatch(ToricVolumeError):
    pass


class NotInDomain(ToricVolumeError):
    pass


class NotSmooth(ToricVolumeError):
    pass


class NoConvergence(ToricVolumeError):
    """Iterative procedure stopped without meeting its tolerance."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class BudgetExceeded(ToricVolumeError):
    """Exact enumeration ran out of nodes; `partial_count` is a lower bound."""

    def __init__(self, message, partial_count=0, nodes=0):
        super().__init__(message)
        self.partial_count = partial_count
        self.nodes = nodes


class ToleranceViolation(ToricVolumeError):
    pass
