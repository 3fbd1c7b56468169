"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class DtcalcError(Exception):
    """Base class for every error raised by this package."""


class PoleAtOne(DtcalcError):
    """A motive was evaluated at L = 1 (or q = -1) where it has a pole."""


class DegenerateCone(DtcalcError):
    """A cone does not span the face it was declared in."""


class NotAMorphism(DtcalcError):
    """Two cones do not form a composable pair in the Hall category."""


class BasisMismatch(DtcalcError):
    """A motive is not expressed over the stack an operator expects."""


class ArrangementMismatch(DtcalcError):
    """A measure lives on an arrangement that does not cover the target faces."""


class MeasureInvalid(DtcalcError):
    """A stability measure fails the partition-of-unity condition."""


class BadDimensionVector(DtcalcError):
    """Unsupported quiver input (only the all-ones dimension vector is handled)."""


class NotRegular(DtcalcError):
    """A Theta-stratification has two destabilising rays where one is allowed."""


class NotApplicable(DtcalcError):
    """An identity check was requested outside its hypotheses."""


class ParseError(DtcalcError):
    """An instance file is not valid JSON."""


class SchemaError(DtcalcError):
    """An instance file parses but violates the instance schema."""

    def __init__(self, message: str, field: str = "") -> None:
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
