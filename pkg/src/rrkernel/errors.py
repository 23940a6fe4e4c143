"""Exception hierarchy shared by every module of the package."""


class RRKernelError(Exception):
    """Base class for all library errors."""


class NonConvergence(RRKernelError):
    """A series, quadrature or iteration hit its limit before meeting tolerance."""


class TailBoundViolated(NonConvergence):
    """A truncation bound never fell below the tail budget."""


class BadBracket(RRKernelError):
    """The target value is not enclosed by the supplied bracket."""


class DomainError(RRKernelError, ValueError):
    """Argument outside the mathematical domain of a kernel."""


class OutOfRange(DomainError):
    """A value (often an intermediate link of a composition) left its valid range."""


class PoleError(DomainError):
    """Evaluation at a pole (e.g. Gamma at a non-positive integer)."""


class DivergentIntegral(DomainError):
    """The requested integral does not exist."""


class UnknownName(RRKernelError, KeyError):
    """Lookup of an unregistered function, identity or table."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class UnknownFunction(UnknownName):
    pass


class UnknownIdentity(UnknownName):
    pass


class UnknownTable(UnknownName):
    pass
