"""Exception hierarchy shared by all modules."""


class EllipsoidError(Exception):
    """Base class for errors raised by this package."""


class ConvergenceError(EllipsoidError):
    """An iterative method hit its iteration cap.

    ``residual`` carries the last convergence measure (for the Jacobi
    eigensolver this is the off-diagonal Frobenius norm).
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SingularRepresentation(EllipsoidError):
    """A representation needs an inverse of a matrix that is not positive definite."""


class OriginNotInterior(EllipsoidError):
    """A homogeneous or dual form needs the origin strictly inside the ellipsoid.

    Re-center coordinates (e.g. pass ``shift=E.center``) and retry.
    """


class DomainError(EllipsoidError, ValueError):
    """Argument outside the domain of a size function or power map."""


class PreflightError(EllipsoidError):
    """A solver input failed its feasibility preflight.

    ``certificate`` is a direction (unbounded polytope), a point
    (empty interior / exterior center) or a row index, depending on the check.
    """

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate
