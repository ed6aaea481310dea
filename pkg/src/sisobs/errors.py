"""Exception taxonomy shared across the package.

The distinction between CertifiedInfeasibleError and NumericFailureError
matters: logical conclusions ("not strongly detectable", "no quadratically
stable design") may only be drawn from a solver that produced an
infeasibility certificate, never from a solve that merely failed.
"""


class SisobsError(Exception):
    """Base class for all package errors."""


class ModelInvalidError(SisobsError):
    """A system description violates its structural assumptions."""


class DesignImpossibleError(SisobsError):
    """A hypothesis needed by the gain construction fails (e.g. rank condition)."""


class CertifiedImpossibleError(SisobsError):
    """A certificate proves no design of the requested kind exists."""


class SynthesisInfeasibleError(SisobsError):
    """Every point of a synthesis grid was certified infeasible."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class NumericFailureError(SisobsError):
    """The underlying numerical routine failed without a certificate."""


class AbstractionFailureError(SisobsError):
    """The affine-abstraction LP is infeasible (over-tight slack vector)."""


class InputRadiusUnavailableError(SisobsError):
    """No usable surrogate to propagate an input-estimate radius."""
