"""Exception hierarchy shared by all udep modules."""


class UdepError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(UdepError, ValueError):
    """Input violates a documented precondition (non-Hermitian, non-unitary, ...)."""


class ShapeError(UdepError, ValueError):
    pass


class StructureError(UdepError, ValueError):
    """Input does not have the structure required by the requested variant."""


class ConvergenceError(UdepError, ArithmeticError):
    pass


class DegenerateProjectionError(UdepError, ArithmeticError):
    """Nearest-unitary projection of a (numerically) rank-deficient matrix."""


class BranchDegeneracyError(UdepError, ArithmeticError):
    """A rotation has an eigenvalue at -1, so its principal log is not real."""


class FormatError(UdepError, ValueError):
    """Malformed UDEP payload or matrix file.

    ``code`` is a stable short identifier, e.g. ``"bad-magic"``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"[{code}] {message}")
        self.code = code
