"""Tests for marked tori, the diagonal flow and the renormalization search."""

import math
from fractions import Fraction

import numpy as np
import pytest

from iet_core import (
    DegenerateRotationError,
    NoAdjustmentError,
    RangeError,
    RotationRep,
    alpha_from_cf,
    distance_to_integer,
)
from renorm import (
    MarkedTorus,
    apply_gt,
    apply_scale,
    crossing_count,
    crossing_profile,
    dist_to_hat,
    find_renorm_times,
    reduce,
    renorm_time_at,
    rho_of,
    rho_of_torus,
    scan_renorm_candidates,
    torus_of_iet,
    vertical_return_offset,
)


def test_square_marked_torus_has_zero_distance():
    """Test dist_to_hat on the square torus with marked points 1/2 apart."""
    # Create
    hat = MarkedTorus.from_basis([[1, 0], [0, 1]], (Fraction(1, 2), 0))

    # Verify
    assert dist_to_hat(hat) == 0.0


def test_torus_of_iet_has_unit_area(golden_iet):
    """Test the lattice determinant before and after the flow and reduction."""
    # Create
    torus = torus_of_iet(golden_iet)
    flowed = reduce(apply_gt(torus, 3.0))

    # Verify
    assert float(torus.det) == pytest.approx(1.0, abs=1e-30)
    assert float(flowed.det) == pytest.approx(1.0, abs=1e-20)


def test_flow_time_out_of_range(golden_iet):
    """Test RangeError for unrepresentable flow times."""
    with pytest.raises(RangeError):
        apply_gt(torus_of_iet(golden_iet), 600)


def _components(vector):
    return float(vector[0]), float(vector[1])


def test_reduce_subtracts_the_nearest_multiple():
    """Test reduce on columns (1,0), (5.3,1) and the marked offset (1.5,0)."""
    # Create
    torus = MarkedTorus.from_basis([[1, "5.3"], [0, 1]], ("1.5", 0))
    reduced = reduce(torus)

    # Verify
    assert _components(reduced.u) == pytest.approx((1.0, 0.0), abs=1e-30)
    assert _components(reduced.v) == pytest.approx((0.3, 1.0), abs=1e-30)
    assert _components(reduced.marked) == pytest.approx((0.5, 0.0), abs=1e-30)


def test_reduce_finds_the_shortest_vector(rng):
    """Test the reduced first column against a search over coefficients in [-20, 20]."""
    grid = np.array(
        [(k, j) for k in range(-20, 21) for j in range(-20, 21) if (k, j) != (0, 0)]
    )
    checked = 0
    while checked < 50:
        basis = rng.normal(size=(2, 2))
        det = np.linalg.det(basis)
        if abs(det) < 0.25:
            continue
        if det < 0:
            basis[:, 1] *= -1
        basis /= math.sqrt(abs(det))
        checked += 1

        # Create
        reduced = reduce(MarkedTorus.from_basis(basis.tolist(), (0, 0)))
        shortest = np.min(np.linalg.norm(grid @ basis.T, axis=1))
        coeffs = np.linalg.solve(basis, reduced.basis)

        # Verify
        assert np.linalg.norm(reduced.basis[:, 0]) == pytest.approx(shortest, rel=1e-9)
        assert np.linalg.norm(reduced.basis[:, 0]) <= np.linalg.norm(
            reduced.basis[:, 1]
        ) * (1 + 1e-12)
        assert np.allclose(coeffs, np.round(coeffs), atol=1e-6)
        assert float(reduced.det) == pytest.approx(1.0, abs=1e-12)


def test_dist_to_hat_measures_the_marked_offset():
    """Test dist_to_hat = 0.1 for the square torus with marked offset (0.4, 0)."""
    # Create
    torus = MarkedTorus.from_basis([[1, 0], [0, 1]], ("0.4", 0))

    # Verify
    assert dist_to_hat(torus) == pytest.approx(0.1, abs=1e-12)


def test_dist_to_hat_ignores_the_choice_of_basis(golden_iet, rng):
    """Test dist_to_hat under 1000 random changes of basis and marked lift."""
    torus = apply_gt(torus_of_iet(golden_iet), 1.3)
    expected = dist_to_hat(torus)
    shears = ([[1, 1], [0, 1]], [[1, 0], [1, 1]], [[1, -1], [0, 1]], [[1, 0], [-1, 1]])

    for _ in range(1000):
        # Create
        gamma = np.eye(2, dtype=int)
        for index in rng.integers(0, len(shears), size=4):
            gamma = gamma @ np.array(shears[index])
        k, j = (int(c) for c in rng.integers(-5, 6, size=2))
        lift = torus.lattice_vector(k, j)
        moved = MarkedTorus(
            torus.lattice_vector(int(gamma[0, 0]), int(gamma[1, 0])),
            torus.lattice_vector(int(gamma[0, 1]), int(gamma[1, 1])),
            (torus.marked[0] + lift[0], torus.marked[1] + lift[1]),
        )

        # Verify
        assert dist_to_hat(moved) == pytest.approx(expected, abs=1e-9)


def test_vertical_return_offset_on_square_torus():
    """Test the zero offset and zero adjustment of the square torus."""
    # Create
    v1, v2, s_adjust = vertical_return_offset(
        MarkedTorus.from_basis([[1, 0], [0, 1]], ("0.5", 0))
    )

    # Verify
    assert (float(v1), float(v2), float(s_adjust)) == (0.0, 0.0, 0.0)


def test_vertical_return_offset_horizontal_shift():
    """Test v1 = 0.3, v2 = 0 when (-0.3, 1) is in the lattice."""
    # Create
    v1, v2, s_adjust = vertical_return_offset(
        MarkedTorus.from_basis([[1, "-0.3"], [0, 1]], ("0.5", 0))
    )

    # Verify
    assert float(v1) == pytest.approx(0.3, abs=1e-30)
    assert float(v2) == 0.0
    assert float(s_adjust) == 0.0


def test_vertical_return_offset_section_adjustment():
    """Test s_adjust = -ln(0.9) when the closest lattice vector is (0, 0.9)."""
    # Create
    torus = MarkedTorus.from_basis([[Fraction(10, 9), 0], [0, "0.9"]], ("0.5", 0))
    v1, v2, s_adjust = vertical_return_offset(torus)

    # Verify
    assert float(v1) == 0.0
    assert float(v2) == pytest.approx(0.1, abs=1e-30)
    assert float(s_adjust) == pytest.approx(-math.log(0.9), rel=1e-12)
    assert float(s_adjust) == pytest.approx(0.10536, abs=1e-5)


def test_vertical_return_offset_without_adjustment():
    """Test NoAdjustmentError when the closest lattice vector to (0, 1) is 0."""
    torus = MarkedTorus.from_basis([["0.4", 0], [0, "2.5"]], ("0.2", 0))

    with pytest.raises(NoAdjustmentError):
        vertical_return_offset(torus)


def test_rho_is_the_horizontal_offset():
    """Test rho = 0.05 for the lattice containing (-0.05, 1)."""
    # Create
    torus = MarkedTorus.from_basis([[1, "-0.05"], [0, 1]], ("0.5", 0))

    # Verify
    assert rho_of_torus(torus) == pytest.approx(0.05, abs=1e-15)


def test_rho_agrees_with_the_scan_off_the_section(golden_iet):
    """Test that rho_of and the candidate scan use the same displacement."""
    # Create
    candidates = scan_renorm_candidates(golden_iet, 0.5, 4.0)

    # Verify
    measured = [c for c in candidates if c.rho is not None]
    assert measured
    for c in measured:
        assert rho_of(golden_iet, c.t) == pytest.approx(c.rho, rel=1e-9, abs=1e-12)


def test_rho_of_rational_rotation_is_degenerate(periodic_iet):
    """Test DegenerateRotationError for alpha = 3/5 at scale 5."""
    # Create
    alpha, _ = periodic_iet.exact_rotation()
    torus = apply_scale(torus_of_iet(periodic_iet), 5)

    # Verify
    assert alpha == Fraction(3, 5)
    with pytest.raises(DegenerateRotationError):
        rho_of_torus(torus)


def test_rho_at_convergent_scale(golden_iet):
    """Test rho = q * ||q alpha|| at a Fibonacci denominator."""
    # Create
    q = 89
    alpha, _ = golden_iet.exact_rotation()
    torus = apply_scale(torus_of_iet(golden_iet), q)

    # Verify
    expected = float(q * distance_to_integer(q * alpha))
    assert rho_of_torus(torus) == pytest.approx(expected, abs=1e-12)


def test_crossing_count_matches_brute_force():
    """Test crossings at heights 1..1000 for golden alpha and kappa = 0.7."""
    # Create
    alpha = Fraction(float(alpha_from_cf([])))
    kappa = Fraction(7, 10)
    x = Fraction(1, 10)

    # Verify
    brute = 0
    for h in range(1, 1001):
        y = x + h * alpha
        if y - math.floor(y) < kappa:
            brute += 1
    assert crossing_count(RotationRep(alpha, kappa), math.log(1000), x) == brute


def test_crossing_profile_covers_slit(documented_iet):
    """Test that the pieces tile [0, kappa) and the counts split into m and m+1."""
    # Create
    profile = crossing_profile(documented_iet, 562)
    masses = profile.mass_by_count()
    m = profile.dominant_count()

    # Verify
    assert sum(seg.length for seg in profile.segments) == profile.kappa
    assert sum(masses.values()) == pytest.approx(1.0, abs=1e-12)
    assert m in (481, 482)
    assert masses.get(m, 0.0) + masses.get(m + 1, 0.0) > 0.99


def test_regular_pieces_move_by_the_shift(documented_iet):
    """Test T^c u = u + shift at the middle of regular pieces."""
    # Create
    profile = crossing_profile(documented_iet, 562)
    shift = float(profile.shift)
    regular = [seg for seg in profile.segments if seg.regular][:5]

    # Verify
    assert regular
    for seg in regular:
        u = float((seg.start + seg.end) / 2 / profile.kappa)
        image = float(documented_iet.apply_pow(seg.count, u))
        assert image == pytest.approx(u + shift, abs=1e-9)


def test_counts_at_agrees_with_segments(documented_iet, rng):
    """Test the vectorized piece lookup."""
    # Create
    profile = crossing_profile(documented_iet, 562)
    xs = rng.random(200) * float(profile.kappa)
    counts = profile.counts_at(xs)

    # Verify
    for x, c in zip(xs, counts):
        seg = next(s for s in profile.segments if float(s.start) <= x < float(s.end))
        assert c == seg.count


def test_scan_rejects_bad_arguments(golden_iet):
    """Test that delta and t_max must be positive."""
    with pytest.raises(ValueError):
        scan_renorm_candidates(golden_iet, 0.0, 5.0)
    with pytest.raises(ValueError):
        scan_renorm_candidates(golden_iet, 0.1, -1.0)


def test_scan_explains_every_candidate(golden_iet):
    """Test that every scanned candidate carries a reason."""
    # Create
    candidates = scan_renorm_candidates(golden_iet, 0.1, 4.0)

    # Verify
    assert candidates
    assert all(c.reason for c in candidates)
    assert all(c.accepted == (c.reason == "accepted") for c in candidates)


def test_find_renorm_times_on_documented_parameters(documented_iet):
    """Test the accepted time at scale 562 and its crossing data."""
    # Create
    times = find_renorm_times(documented_iet, 0.1, 8.0)

    # Verify
    assert times
    assert all(rt.dist_hat < 0.1 and rt.in_S for rt in times)
    rt = next(rt for rt in times if rt.q == 562)
    assert rt.t == pytest.approx(math.log(562))
    assert rt.m in (481, 482)
    assert 0 < rt.rho < 0.5
    assert rt.V_len > 0.4


def test_renorm_time_at_snaps_to_integer_scale(documented_iet):
    """Test that a prescribed time uses round(e^t)."""
    # Create
    rt = renorm_time_at(documented_iet, math.log(562) + 1e-7)

    # Verify
    assert rt.q == 562
    assert rt.m in (481, 482)
    assert rt.shift == pytest.approx(rt.eta / float(Fraction(963, 1124)), rel=1e-6)
    assert set(rt.to_dict()) >= {"t", "q", "m", "rho", "V_len", "shift"}
