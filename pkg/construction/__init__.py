"""Switch construction, iterated schedules and the non-simplicity witness."""

from .ksv import KsvReport, ksv_check, tail_products
from .schedule import (
    Schedule,
    ScheduleLevel,
    ScheduleResult,
    geometric_eps,
    level_horizon,
    run_schedule,
    strand_divergence,
    strand_measures,
)
from .switch import (
    SwitchResult,
    SwitchSpec,
    SwitchStatus,
    build_switch,
    sample_A,
    switch_exponent,
    trivial_switch,
    verify_switch,
)
from .witness import (
    WitnessReport,
    birkhoff_length,
    birkhoff_spread,
    fit_constant,
    median_step,
    non_simplicity_witness,
)

__all__ = [
    "KsvReport",
    "ksv_check",
    "tail_products",
    "Schedule",
    "ScheduleLevel",
    "ScheduleResult",
    "geometric_eps",
    "level_horizon",
    "run_schedule",
    "strand_divergence",
    "strand_measures",
    "SwitchResult",
    "SwitchSpec",
    "SwitchStatus",
    "build_switch",
    "sample_A",
    "switch_exponent",
    "trivial_switch",
    "verify_switch",
    "WitnessReport",
    "birkhoff_length",
    "birkhoff_spread",
    "fit_constant",
    "median_step",
    "non_simplicity_witness",
]
