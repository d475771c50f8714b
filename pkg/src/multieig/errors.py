"""Exception hierarchy.

Every error carries a ``module`` tag so the command line front end can report
where a failure originated and map it to an exit status.
"""


class MultiEigError(Exception):
    """Base class for all errors raised by this package."""

    module = "multieig"

    def __str__(self):
        return f"[{self.module}] {super().__str__()}"


class PreconditionError(MultiEigError):
    """A mathematical precondition of the construction is violated."""


class DegenerateDegreeError(PreconditionError):
    module = "matpoly"


class SingularLeadingCoefficientError(PreconditionError):
    module = "matpoly"


class DegenerateCombinationError(MultiEigError):
    """Simultaneous diagonalization did not converge within the retry budget."""

    module = "matpoly"


class DerivativeSingularError(PreconditionError):
    """``mu`` is (numerically) an eigenvalue of the derivative polynomial."""

    module = "svcurve"


class AlreadyMultipleError(PreconditionError):
    """``mu`` is already (near) a multiple eigenvalue; the distance bound is 0."""

    module = "svcurve"


class ConsistencyError(MultiEigError):
    """An internal identity that must hold at the maximizer failed."""

    module = "vector_selector"


class NoAdmissibleCombinationError(ConsistencyError):
    """The combination matrix is definite, so no compliant pair exists."""


class RankError(MultiEigError):
    module = "perturbation"


class ProblemFileError(MultiEigError):
    """Malformed or inconsistent problem file."""

    module = "cli"
