"""Exception types shared across the package."""


class RhoCalcError(Exception):
    """Base class for all library errors."""


class IncompatibleModels(RhoCalcError):
    pass


class TruncationOverflow(RhoCalcError):
    """A computation left the working ball; ``element`` is the offender."""

    def __init__(self, message: str, element=None):
        super().__init__(message)
        self.element = element


class MissingConjugator(RhoCalcError):
    pass


class EmptyClass(RhoCalcError):
    pass


class IndexOutOfRange(RhoCalcError):
    pass


class NonComplex(RhoCalcError):
    """Consecutive differentials fail to compose to zero."""


class UncertifiedInput(RhoCalcError):
    pass


class DegreeMismatch(RhoCalcError):
    pass


class ClassMismatch(RhoCalcError):
    pass


class CocycleCheckFailure(RhoCalcError):
    pass


class EndpointMismatch(RhoCalcError):
    pass


class NonPolynomialPath(RhoCalcError):
    pass


class NonInvolution(RhoCalcError):
    pass


class DegreeCapExceeded(RhoCalcError):
    pass


class IdentityFailure(RhoCalcError):
    """An exact identity check failed; ``counterexample`` holds a witness."""

    def __init__(self, message: str, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample
