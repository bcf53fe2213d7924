"""Exception hierarchy shared by all modules."""


class KoopmanSamplingError(Exception):
    """Base class for errors raised by this package."""


class NumericalFailure(KoopmanSamplingError, ArithmeticError):
    """A dense kernel did not converge or produced non-finite output."""


class BranchCutError(NumericalFailure):
    """Matrix has an eigenvalue on (or numerically touching) the closed negative real axis."""


class BasisDegeneracyError(NumericalFailure):
    """A transition matrix is too ill-conditioned to invert."""


class AliasingBoundaryError(KoopmanSamplingError):
    """The identified DT operator sits on the principal-log branch cut.

    Raised when the sampling period is at or beyond the critical period of the
    identified dynamics, so no unique generator exists.
    """


class InsufficientDataError(KoopmanSamplingError, ValueError):
    pass


class UnsupportedKindError(KoopmanSamplingError, TypeError):
    pass


class UndefinedSNRError(KoopmanSamplingError, ValueError):
    pass


class RangeError(KoopmanSamplingError, ValueError):
    pass


class InconsistencyError(KoopmanSamplingError):
    """Reconstruction left a large imaginary residue (wrong dimension or aliasing)."""


class PreconditionError(KoopmanSamplingError, ValueError):
    pass
