"""Exception types shared across the package."""
from __future__ import annotations


class FibcalcError(Exception):
    """Base class; ``witness`` carries whatever pinpoints the failure."""

    def __init__(self, message: str = "", witness=None):
        super().__init__(message)
        self.witness = witness


class BadInput(FibcalcError):
    pass


class NonAssociative(BadInput):
    pass


class MissingIdentity(BadInput):
    pass


class DanglingEndpoint(BadInput):
    pass


class MissingComposite(BadInput):
    pass


class UnknownMorphism(FibcalcError):
    pass


class AmbiguousInitial(FibcalcError):
    pass


class InconsistentCriteria(FibcalcError):
    pass


class CriteriaDisagree(FibcalcError):
    pass


class NoLift(FibcalcError):
    pass


class NonUniqueFactorisation(FibcalcError):
    pass


class NotAFibration(FibcalcError):
    pass


class NonFunctorial(FibcalcError):
    pass


class NotFibrewiseLeftAdjoint(FibcalcError):
    pass


class SearchCapExceeded(FibcalcError):
    pass


class CapExceeded(FibcalcError):
    pass


class UsageError(FibcalcError):
    pass
