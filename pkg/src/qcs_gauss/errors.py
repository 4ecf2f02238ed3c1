"""Exception and warning types raised across the package."""


class QcsError(Exception):
    """Base class for all package errors."""


class SingularCovariance(QcsError):
    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"covariance of term {index} is singular")


class SingularPairSum(QcsError):
    def __init__(self, pair, cond=None):
        self.pair = tuple(int(i) for i in pair)
        self.cond = cond
        detail = "" if cond is None else f" (condition estimate {cond:.3g})"
        super().__init__(f"gamma_m + conj(gamma_n) is singular for pair {self.pair}{detail}")


class HermiticityViolation(QcsError):
    """The state's Wigner function is not real on real phase points."""


class NonPositiveDefinite(QcsError):
    pass


class DimensionMismatch(QcsError, ValueError):
    pass


class TruncationTooTight(QcsError):
    pass


class TermCapExceeded(QcsError):
    pass


class GridTooCoarse(QcsError):
    def __init__(self, fine, coarse, what="value"):
        self.fine = fine
        self.coarse = coarse
        super().__init__(
            f"{what} changed from {coarse!r} to {fine!r} when halving the grid step"
        )


class BranchWarning(UserWarning):
    """A square-root branch choice was close to the principal-log cut."""


class PurityOutOfRange(UserWarning):
    pass
