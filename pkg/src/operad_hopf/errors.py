"""Exception types shared across the package."""

from __future__ import annotations


class OperadHopfError(Exception):
    """Base class for all errors raised by this package."""


class SizeCapExceeded(OperadHopfError):
    """A structure or label set is larger than the configured cap."""

    def __init__(self, size: int, cap: int, hint: str = "--max-n"):
        super().__init__(
            f"size {size} exceeds the cap {cap}; raise it with {hint} "
            f"or the OPERAD_HOPF_MAX_N environment variable"
        )
        self.size = size
        self.cap = cap


class LabelMismatch(OperadHopfError):
    """Outer structure labels do not match the blocks of the assembly."""


class LabelOverlap(OperadHopfError):
    """Structures expected to have disjoint label sets overlap."""


class SpeciesMismatch(OperadHopfError):
    """A structure of the wrong species was supplied."""


class ShapeMismatch(OperadHopfError):
    """A decoration does not have the shape required by a bijection."""


class NonDeltaComposition(OperadHopfError):
    """Series substitution needs the inner series to have zero constant term."""


class NonInvertible(OperadHopfError):
    """Series reversion needs a unit leading coefficient."""


class RangeError(OperadHopfError):
    """An index argument is outside the meaningful range."""


class ParseError(OperadHopfError):
    """A text input could not be parsed."""
