"""Marked-torus renormalization of 3-IETs."""

from .marked_torus import (
    MarkedTorus,
    apply_gt,
    apply_scale,
    closest_lattice_vector,
    dist_to_hat,
    reduce,
    torus_of_iet,
    vertical_return_offset,
)
from .renorm_search import (
    CrossingProfile,
    CrossingSegment,
    RenormCandidate,
    RenormTime,
    crossing_count,
    crossing_profile,
    find_renorm_times,
    renorm_time_at,
    rho_of,
    rho_of_torus,
    scan_renorm_candidates,
)

__all__ = [
    "MarkedTorus",
    "apply_gt",
    "apply_scale",
    "closest_lattice_vector",
    "dist_to_hat",
    "reduce",
    "torus_of_iet",
    "vertical_return_offset",
    "CrossingProfile",
    "CrossingSegment",
    "RenormCandidate",
    "RenormTime",
    "crossing_count",
    "crossing_profile",
    "find_renorm_times",
    "renorm_time_at",
    "rho_of",
    "rho_of_torus",
    "scan_renorm_candidates",
]
