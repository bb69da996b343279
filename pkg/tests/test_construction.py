"""Tests for switches, schedules, schedule conditions and the witness."""

import math
from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest

from construction import (
    Schedule,
    SwitchSpec,
    SwitchStatus,
    birkhoff_length,
    birkhoff_spread,
    build_switch,
    fit_constant,
    geometric_eps,
    ksv_check,
    level_horizon,
    median_step,
    non_simplicity_witness,
    run_schedule,
    sample_A,
    switch_exponent,
    tail_products,
    trivial_switch,
    verify_switch,
)
from construction.sampling import sample_intervals
from iet_core import Interval, InvalidSpecError
from joinings import (
    DiscreteMeasure2D,
    disintegrate,
    fiber_diameter_stats,
    sample_power_joining,
)


class TestSwitchSpec:
    def test_rejects_invalid_parameters(self):
        """Test a == b, non-positive epsilon and negative samples."""
        with pytest.raises(InvalidSpecError):
            SwitchSpec(1, 1, 0.1)
        with pytest.raises(InvalidSpecError):
            SwitchSpec(0, 1, 0.0)
        with pytest.raises(InvalidSpecError):
            SwitchSpec(0, 1, 0.1, samples=-1)

    def test_gap_and_dict(self):
        """Test derived fields."""
        spec = SwitchSpec(3, -2, 0.05, t=6.0)
        assert spec.gap == 5
        assert spec.to_dict()["t"] == 6.0


def test_switch_exponent():
    """Test both forms of the switching exponent."""
    assert switch_exponent(0, 1, 401) == -401
    for a, b, m in [(0, 1, 7), (5, 2, 30), (-3, 4, 1)]:
        assert switch_exponent(a, b, m) == a + m * (a - b)


class TestTrivialSwitch:
    def test_identity_power_is_trivial(self, periodic_iet_f64, rng):
        """Test that T^0 and T^4 agree on the period-4 exchange."""
        # Create
        result = trivial_switch(periodic_iet_f64, 0, 4, 0.01, rng)

        # Verify
        assert result is not None
        assert result.trivial
        assert result.n == 0
        assert result.status == SwitchStatus.VERIFIED
        assert result.measure_A == pytest.approx(1.0)
        assert result.measure_B == 0.0

    def test_distinct_powers_are_not_trivial(self, periodic_iet_f64, rng):
        """Test that T moves every point by at least 1/4."""
        assert trivial_switch(periodic_iet_f64, 0, 1, 0.01, rng) is None

    def test_verification(self, periodic_iet_f64, rng):
        """Test re-verification with and without samples."""
        # Create
        result = trivial_switch(periodic_iet_f64, 0, 4, 0.01, rng)
        empty = verify_switch(periodic_iet_f64, result, samples=0, rng=rng)

        # Verify
        assert empty == []
        assert result.status == SwitchStatus.VERIFIED

        checks = verify_switch(periodic_iet_f64, result, samples=100, rng=rng)
        assert [c.name for c in checks] == ["identity_closeness"]
        assert checks[0].passed

    def test_sample_A_covers_the_space(self, periodic_iet_f64, rng):
        """Test sampling the whole-space A of a trivial switch."""
        result = trivial_switch(periodic_iet_f64, 0, 4, 0.01, rng)
        xs = sample_A(result, 50, rng)
        assert xs.shape == (50,)
        assert np.all((xs >= 0) & (xs < 1))


def test_sample_intervals(rng):
    """Test that samples stay inside the pieces."""
    # Create
    pieces = [Interval(0.0, 0.1), Interval(0.5, 0.6)]
    xs = sample_intervals(pieces, 1000, rng)

    # Verify
    inside = ((xs >= 0) & (xs < 0.1)) | ((xs >= 0.5) & (xs < 0.6))
    assert inside.all()
    assert sample_intervals(pieces, 0, rng).size == 0


def test_geometric_eps():
    """Test eps_k = eps / 2^k."""
    assert geometric_eps(0.1, 3) == pytest.approx([0.05, 0.025, 0.0125])
    assert geometric_eps(0.1, 0) == []


def test_fit_constant():
    """Test the smallest constant bounding every level's divergence."""
    assert fit_constant([1.0, 0.5], [0.1, 0.05]) == pytest.approx(0.5 / 0.55)
    assert fit_constant([], []) == 0.0


def test_median_step(periodic_iet_f64, rng):
    """Test the median displacement 1/2 of the period-4 exchange."""
    assert median_step(periodic_iet_f64, 1000, rng) == pytest.approx(0.5)


class TestSchedule:
    def test_validation(self, periodic_iet_f64, rng):
        """Test strand count and epsilon sequence checks."""
        with pytest.raises(ValueError):
            run_schedule(periodic_iet_f64, [0], [0.1], 1, 100, rng)
        with pytest.raises(ValueError):
            run_schedule(periodic_iet_f64, [0, 1], [0.1], 2, 100, rng)
        with pytest.raises(ValueError):
            run_schedule(periodic_iet_f64, [0, 1], [0.05, 0.1], 2, 100, rng)
        with pytest.raises(ValueError):
            run_schedule(periodic_iet_f64, [0, 1], [-0.1], 1, 100, rng)

    def test_trivial_levels(self, periodic_iet_f64, rng):
        """Test a schedule whose strands already coincide."""
        # Create
        result = run_schedule(
            periodic_iet_f64, [0, 4], geometric_eps(0.1, 2), 2, 200, rng
        )
        schedule = result.schedule

        # Verify
        assert schedule.completed
        assert [lv.exponents_after for lv in schedule.levels] == [[4, 0], [0, 4]]
        assert all(sw.trivial for lv in schedule.levels for sw in lv.switches)
        assert schedule.initial_divergence < 0.011
        assert tail_products(schedule) == [0.0]
        assert result.average.n_atoms == 400

    def test_conditions_on_trivial_levels(self, periodic_iet_f64, rng):
        """Test that conditions without switches to inspect pass vacuously."""
        # Create
        schedule = run_schedule(
            periodic_iet_f64, [0, 4], geometric_eps(0.1, 2), 2, 200, rng
        ).schedule
        report = ksv_check(periodic_iet_f64, schedule, rng)

        # Verify
        assert [c.name for c in report.checks] == [
            "a_measures",
            "b_return_time",
            "c_exceptional",
            "d_tail_products",
            "e_summable",
            "A_switching",
            "B_birkhoff",
        ]
        assert report.passed
        assert report.to_dict()["passed"] is True


def test_level_horizon_reaches_the_next_convergent(documented_iet):
    """Test that the horizon after q = 562 covers the next denominator 281007."""
    # Create
    after_first = level_horizon(documented_iet, math.log(562), 11.0)

    # Verify
    assert after_first == pytest.approx(math.log(281007) + 0.5)
    assert level_horizon(documented_iet, 0.0, 8.0) == 8.0
    assert level_horizon(documented_iet, 30.0, 8.0) <= 25.0


def test_schedule_levels_search_past_the_next_convergent(documented_iet, rng, mocker):
    """Test that every level's search window contains the time it is built at."""
    scales = [562, 281007]
    seen = []

    def fake_switch(iet, spec, rng):
        seen.append((spec.t_min, spec.t_max))
        t = next(math.log(q) for q in scales if math.log(q) > spec.t_min)
        return SimpleNamespace(
            n=spec.b, r=10, J_length=1e-9, t=t, trivial=False, diagnostics=[]
        )

    mocker.patch("construction.schedule.trivial_switch", return_value=None)
    mocker.patch("construction.schedule.build_switch", side_effect=fake_switch)

    # Create
    result = run_schedule(documented_iet, [0, 1], geometric_eps(0.1, 2), 2, 100, rng)

    # Verify
    assert result.schedule.completed
    assert [lv.t for lv in result.schedule.levels] == pytest.approx(
        [math.log(562), math.log(281007)]
    )
    level_two = seen[-1]
    assert level_two[0] == pytest.approx(math.log(562))
    assert level_two[1] > math.log(281007)


def test_witness_needs_two_levels(periodic_iet_f64, rng):
    """Test the level count check."""
    with pytest.raises(ValueError):
        non_simplicity_witness(periodic_iet_f64, 1, 100, rng)


def test_birkhoff_length_scales_with_the_tallest_tower():
    """Test that the window spans ten heights of the tallest switch tower."""
    # Create
    schedule = Schedule([0, 1], [0.1, 0.05])

    # Verify
    assert birkhoff_length(schedule) == 10_000
    schedule.levels = [SimpleNamespace(r=96641), SimpleNamespace(r=500)]
    assert birkhoff_length(schedule) == 966_410
    schedule.levels = [SimpleNamespace(r=10**12)]
    assert birkhoff_length(schedule) == 10**9


def test_birkhoff_averages_agree_on_long_windows(golden_iet, rng):
    """Test that time averages along one power joining forget the start."""
    # Create
    spreads = birkhoff_spread(golden_iet, [1], rng, starts=6, length=400_000)

    # Verify
    assert len(spreads) == 5
    assert max(spreads) < 0.02


def test_documented_preset_leaves_room_for_fat_fibers(documented_iet, rng):
    """Test that the half-half mixture of T^0 and T^1 has fat fibers at the preset."""
    # Create
    step = median_step(documented_iet, 20_000, rng)
    mixture = DiscreteMeasure2D.mixture(
        [sample_power_joining(documented_iet, n, 20_000, rng) for n in (0, 1)]
    )
    stats = fiber_diameter_stats(disintegrate(mixture, 128), 0.0, step / 2)

    # Verify
    assert float(documented_iet.l2) < 0.3
    assert stats.fraction_above >= 0.75


@pytest.mark.slow
def test_switch_on_documented_parameters(documented_iet, rng):
    """Test the switch built at q = 562 for a = 0, b = 1."""
    # Create
    result = build_switch(documented_iet, SwitchSpec(0, 1, 0.05, samples=200), rng)

    # Verify
    assert result.q == 562
    assert result.m in (481, 482)
    assert result.n == switch_exponent(0, 1, result.m) == -result.m
    assert result.r == result.m * result.p_hat
    assert result.measure_A > 0.4
    assert result.measure_B > 0.4
    assert len(result.diagnostics) == 8


@pytest.mark.slow
def test_shifted_exponent_fails_shadowing(documented_iet, rng):
    """Test that re-verifying a switch with n + 1 in place of n fails on A and B."""
    # Create
    result = build_switch(documented_iet, SwitchSpec(0, 1, 0.05, samples=200), rng)
    shifted = replace(result, n=result.n + 1, diagnostics=[])
    checks = {c.name: c for c in verify_switch(documented_iet, shifted, 200, rng)}

    # Verify
    assert not checks["shadowing_A"].passed
    assert not checks["shadowing_B"].passed
    assert shifted.status == SwitchStatus.UNVERIFIED


@pytest.mark.slow
def test_one_level_schedule_on_documented_parameters(documented_iet, rng):
    """Test a schedule level built from real switches and its conditions."""
    # Create
    result = run_schedule(
        documented_iet, [0, 1], geometric_eps(0.05, 1), 1, 2000, rng, samples=200
    )
    schedule = result.schedule
    report = ksv_check(documented_iet, schedule, rng)

    # Verify
    assert schedule.completed
    level = schedule.levels[0]
    assert not any(sw.trivial for sw in level.switches)
    assert level.exponents_after == [
        switch_exponent(1, 0, level.switches[0].m),
        switch_exponent(0, 1, level.switches[1].m),
    ]
    assert level.r == max(sw.r for sw in level.switches) > 0
    assert level.level_size.passed
    assert len(report.checks) == 7
    assert report.c is not None
    assert result.average.n_atoms == 4000


@pytest.mark.slow
def test_witness_report_on_documented_parameters(documented_iet, rng):
    """Test the witness items, the Birkhoff window and the stop after level 1."""
    # Create
    report = non_simplicity_witness(documented_iet, 2, 2000, rng, samples=200)
    checks = {c.name: c for c in report.checks}
    first = report.schedule.levels[0]

    # Verify
    assert set(checks) == {
        "product_separation",
        "product_budget",
        "mixture_closeness",
        "fat_fibers",
        "birkhoff_agreement",
        "schedule_complete",
        "constant_fit",
    }
    assert report.schedule.aborted_at == 2
    assert not checks["schedule_complete"].passed
    assert not report.is_witness
    assert report.data["birkhoff_length"] == birkhoff_length(report.schedule)
    assert report.data["birkhoff_length"] >= min(10 * first.r, 10**9)
    assert report.to_dict()["eps"] == pytest.approx(report.eps)
