"""Empirical joinings of a 3-IET with itself and their analysis."""

from .approximation import (
    ApproximationResult,
    CoefficientVector,
    LevelOutsideMass,
    PowerMixture,
    StabilityCheck,
    apportion,
    approx_by_powers,
    coefficient_stability,
    combine_powers,
    fit_power_mixture,
    level_outside_mass,
)
from .bary import BaryReport, BaryState, bary_recursion, hilbert_diameter, max_gap
from .disintegration import (
    DEFAULT_BINS,
    Disintegration,
    FiberStats,
    apply_Asigma,
    disintegrate,
    fiber_diameter_stats,
)
from .kr import METRICS, KRResult, cost_matrix, kr_bound, kr_distance
from .measures import (
    DiscreteMeasure2D,
    empirical_orbit_joining,
    induced_orbit_blocks,
    orbit_array,
    sample_power_joining,
    stratified_points,
)
from .test_functions import (
    TEST_FUNCTIONS_VERSION,
    TestFunction,
    functions_by_name,
    test_function_family,
)
from .weak_closure import WeakClosureResult, weak_closure_check

__all__ = [
    "ApproximationResult",
    "CoefficientVector",
    "LevelOutsideMass",
    "PowerMixture",
    "StabilityCheck",
    "apportion",
    "approx_by_powers",
    "coefficient_stability",
    "combine_powers",
    "fit_power_mixture",
    "level_outside_mass",
    "BaryReport",
    "BaryState",
    "bary_recursion",
    "hilbert_diameter",
    "max_gap",
    "DEFAULT_BINS",
    "Disintegration",
    "FiberStats",
    "apply_Asigma",
    "disintegrate",
    "fiber_diameter_stats",
    "METRICS",
    "KRResult",
    "cost_matrix",
    "kr_bound",
    "kr_distance",
    "DiscreteMeasure2D",
    "empirical_orbit_joining",
    "induced_orbit_blocks",
    "orbit_array",
    "sample_power_joining",
    "stratified_points",
    "TEST_FUNCTIONS_VERSION",
    "TestFunction",
    "functions_by_name",
    "test_function_family",
    "WeakClosureResult",
    "weak_closure_check",
]
