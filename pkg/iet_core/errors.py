"""Exception hierarchy shared by every ietjoinings package."""

from typing import Optional


class IetError(Exception):
    """Base class for all ietjoinings errors."""


class DomainError(IetError, ValueError):
    """A point lies outside [0, 1)."""


class InvalidParametersError(IetError, ValueError):
    """Lengths or rotation parameters violate their preconditions."""


class ArithmeticModeError(IetError, ValueError):
    """Inputs are incompatible with the selected arithmetic mode."""


class InvalidMeasureError(IetError, ValueError):
    """A discrete measure has bad coordinates or weights."""


class UnbalancedMassError(InvalidMeasureError):
    """Two measures handed to a transport solver carry different total mass."""


class InvalidSpecError(IetError, ValueError):
    """A switch specification is not admissible (for example a == b)."""


class RangeError(IetError, OverflowError):
    """A flow time is too large to represent."""


class NoAdjustmentError(IetError, RuntimeError):
    """The vertical return offset admits no section adjustment (v2 >= 1)."""


class DegenerateRotationError(IetError, RuntimeError):
    """The horizontal displacement vanishes, as it does for rational rotations."""


class TowerError(IetError, RuntimeError):
    """Base for tower construction failures; carries the offending level."""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class TowerLevelSplitError(TowerError):
    """A discontinuity of T falls inside a tower level."""


class TowerOverlapError(TowerError):
    """Two tower levels intersect."""


class SearchFailure(IetError, RuntimeError):
    """No admissible renormalization time was found."""


class GeometryTooCoarseError(IetError, RuntimeError):
    """The renormalized geometry leaves no room for a tower (p_hat < 1)."""
