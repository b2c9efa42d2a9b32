"""Exception types raised across the package."""


class NcmechError(Exception):
    """Base class for all package errors."""


class ExprSyntaxError(NcmechError):
    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class UnknownSymbolError(NcmechError):
    def __init__(self, name, position=None):
        where = "" if position is None else f" at offset {position}"
        super().__init__(f"unknown symbol {name!r}{where}")
        self.name = name
        self.position = position


class UnboundSymbolError(NcmechError):
    def __init__(self, name):
        super().__init__(f"symbol {name!r} has no binding")
        self.name = name


class DomainError(NcmechError):
    """log/sqrt of a negative number, division by zero, and similar."""


class AntisymmetryError(NcmechError):
    """K is not antisymmetric under the 1 <-> 2 interchange."""


class NonRegularError(NcmechError):
    """The velocity Hessian of the doubled Lagrangian is (numerically) singular."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class NoConvergenceError(NcmechError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class StepUnderflowError(NcmechError):
    def __init__(self, t, h):
        super().__init__(f"step size {h:.3e} underflowed at t={t!r}")
        self.t = t
        self.h = h


class ModelError(NcmechError):
    """Catalog lookup, kind mismatch, or a closed form requested outside its validity."""


class ConfigError(NcmechError):
    """Invalid scenario or grid configuration."""
