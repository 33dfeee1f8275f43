"""Exception hierarchy shared by all modules."""


class NlfemError(Exception):
    """Base class for all errors raised by nlfem."""


class InvalidDelta(NlfemError, ValueError):
    pass


class NonNormalizable(NlfemError, ValueError):
    pass


class DomainError(NlfemError, ValueError):
    pass


class DegenerateTriangle(NlfemError, ValueError):
    pass


class DegenerateGeometry(NlfemError, ValueError):
    pass


class UnsupportedOrder(NlfemError, ValueError):
    pass


class ParseError(NlfemError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class OrientationError(NlfemError, ValueError):
    pass


class NonManifoldError(NlfemError, ValueError):
    pass


class HorizonTooSmall(NlfemError, ValueError):
    pass


class RegimeError(NlfemError, ValueError):
    pass


class NotConverged(NlfemError, RuntimeError):
    def __init__(self, maxiter, residual):
        self.maxiter = maxiter
        self.residual = residual
        super().__init__(f"CG did not converge in {maxiter} iterations (relative residual {residual:.3e})")


class NonSymmetric(NlfemError, ValueError):
    pass


class ZeroDiagonal(NlfemError, ValueError):
    pass
