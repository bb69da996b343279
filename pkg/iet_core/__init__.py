"""Three-interval exchanges, their rotation picture and interval transport."""

from .arithmetic import ArithmeticMode, ModeTag, Number, frac, to_fraction
from .continued_fraction import (
    alpha_from_cf,
    convergents,
    denominators,
    distance_to_integer,
    parse_alpha_cf,
    partial_quotients,
)
from .errors import (
    ArithmeticModeError,
    DegenerateRotationError,
    DomainError,
    GeometryTooCoarseError,
    IetError,
    InvalidMeasureError,
    InvalidParametersError,
    InvalidSpecError,
    NoAdjustmentError,
    RangeError,
    SearchFailure,
    TowerError,
    TowerLevelSplitError,
    TowerOverlapError,
    UnbalancedMassError,
)
from .iet import Iet3, OrbitSegment, RotationRep, psi_count, rotate
from .intervals import (
    Interval,
    IntervalSet,
    min_return_time,
    preimage_measure,
    transport,
    transport_interval,
)
from .rotation import (
    first_close_return,
    floor_sum,
    return_time_lower_bound,
    rotation_jump,
    visit_count,
)

__all__ = [
    "ArithmeticMode",
    "ModeTag",
    "Number",
    "frac",
    "to_fraction",
    "alpha_from_cf",
    "convergents",
    "denominators",
    "distance_to_integer",
    "parse_alpha_cf",
    "partial_quotients",
    "ArithmeticModeError",
    "DegenerateRotationError",
    "DomainError",
    "GeometryTooCoarseError",
    "IetError",
    "InvalidMeasureError",
    "InvalidParametersError",
    "InvalidSpecError",
    "NoAdjustmentError",
    "RangeError",
    "SearchFailure",
    "TowerError",
    "TowerLevelSplitError",
    "TowerOverlapError",
    "UnbalancedMassError",
    "Iet3",
    "OrbitSegment",
    "RotationRep",
    "psi_count",
    "rotate",
    "Interval",
    "IntervalSet",
    "min_return_time",
    "preimage_measure",
    "transport",
    "transport_interval",
    "first_close_return",
    "floor_sum",
    "return_time_lower_bound",
    "rotation_jump",
    "visit_count",
]
