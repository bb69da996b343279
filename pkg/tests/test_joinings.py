"""Tests for empirical joinings, transport distances and power approximations."""

import itertools
import math

import numpy as np
import pytest

from iet_core import Interval, InvalidMeasureError
from joinings import (
    TEST_FUNCTIONS_VERSION,
    BaryState,
    CoefficientVector,
    DiscreteMeasure2D,
    apply_Asigma,
    apportion,
    approx_by_powers,
    bary_recursion,
    coefficient_stability,
    cost_matrix,
    disintegrate,
    empirical_orbit_joining,
    fiber_diameter_stats,
    functions_by_name,
    hilbert_diameter,
    induced_orbit_blocks,
    kr_bound,
    kr_distance,
    level_outside_mass,
    orbit_array,
    sample_power_joining,
    stratified_points,
    test_function_family,
    weak_closure_check,
)
from towers import build_tower


def _random_measure(rng, n):
    return DiscreteMeasure2D.uniform(rng.random(n), rng.random(n))


class TestDiscreteMeasure:
    def test_rejects_invalid_atoms(self):
        """Test weight, mass and coordinate validation."""
        with pytest.raises(InvalidMeasureError):
            DiscreteMeasure2D(np.array([0.1]), np.array([0.2]), np.array([-1.0]))
        with pytest.raises(InvalidMeasureError):
            DiscreteMeasure2D(
                np.array([0.1, 0.2]), np.array([0.2, 0.3]), np.array([0.5, 0.4])
            )
        with pytest.raises(InvalidMeasureError):
            DiscreteMeasure2D(np.array([1.0]), np.array([0.2]), np.array([1.0]))
        with pytest.raises(InvalidMeasureError):
            DiscreteMeasure2D(np.array([]), np.array([]), np.array([]))

    def test_mixture_weights(self):
        """Test that a mixture scales each component's weights."""
        # Create
        first = DiscreteMeasure2D.uniform(np.array([0.1]), np.array([0.1]))
        second = DiscreteMeasure2D.uniform(np.array([0.5, 0.7]), np.array([0.5, 0.7]))
        mixed = DiscreteMeasure2D.mixture([first, second], [0.25, 0.75])

        # Verify
        assert mixed.n_atoms == 3
        assert list(mixed.ws) == pytest.approx([0.25, 0.375, 0.375])

    def test_csv_export_and_import(self, tmp_path):
        """Test the "x,y,w" file format."""
        # Create
        m = DiscreteMeasure2D(
            np.array([0.1, 0.6]), np.array([0.3, 0.9]), np.array([0.25, 0.75])
        )
        path = tmp_path / "m.csv"
        m.to_csv(str(path))
        loaded = DiscreteMeasure2D.from_csv(str(path))

        # Verify
        assert path.read_text(encoding="utf-8").splitlines()[0] == "x,y,w"
        assert np.array_equal(loaded.xs, m.xs)
        assert np.array_equal(loaded.ws, m.ws)

    def test_malformed_csv(self, tmp_path):
        """Test that bad rows and empty files raise."""
        bad = tmp_path / "bad.csv"
        bad.write_text("x,y,w\n0.1,zero,1\n", encoding="utf-8")
        empty = tmp_path / "empty.csv"
        empty.write_text("x,y,w\n", encoding="utf-8")

        with pytest.raises(InvalidMeasureError):
            DiscreteMeasure2D.from_csv(str(bad))
        with pytest.raises(InvalidMeasureError):
            DiscreteMeasure2D.from_csv(str(empty))

    def test_histogram_mass(self, rng):
        """Test that the histogram keeps the total mass."""
        m = _random_measure(rng, 50)
        assert m.histogram(8).sum() == pytest.approx(1.0)
        assert m.histogram(8).shape == (8, 8)


def test_stratified_points(rng):
    """Test one point per bin."""
    pts = stratified_points(100, rng)
    assert np.array_equal(np.floor(pts * 100).astype(int), np.arange(100))


def test_sample_power_joining_lies_on_graph(periodic_iet_f64, rng):
    """Test that the atoms are (x, T^a x)."""
    # Create
    m = sample_power_joining(periodic_iet_f64, 3, 200, rng)

    # Verify
    assert np.array_equal(m.ys, periodic_iet_f64.apply_array(m.xs, 3))
    assert m.ws == pytest.approx(np.full(200, 1 / 200))
    with pytest.raises(ValueError):
        sample_power_joining(periodic_iet_f64, 1, 0, rng)


def test_orbit_array_and_orbit_joining(periodic_iet_f64):
    """Test binary64 orbits and the offset joining along one orbit."""
    # Create
    orbit = orbit_array(periodic_iet_f64, 0.1, 5)
    joining = empirical_orbit_joining(periodic_iet_f64, 0.1, 2, 4)

    # Verify
    assert list(orbit) == pytest.approx([0.1, 0.85, 0.35, 0.6, 0.1])
    assert list(joining.ys) == pytest.approx([0.35, 0.6, 0.1, 0.85])
    with pytest.raises(ValueError):
        empirical_orbit_joining(periodic_iet_f64, 0.1, 1, 0)


def test_induced_orbit_blocks_follow_the_exchange(golden_iet):
    """Test the rotation-read orbit against direct iteration across block edges."""
    # Create
    blocks = list(induced_orbit_blocks(golden_iet, 0.3, 5000, block=777))
    direct = orbit_array(golden_iet, 0.3, 5000)

    # Verify
    assert [b.size for b in blocks] == [777] * 6 + [338]
    assert np.allclose(np.concatenate(blocks), direct, atol=1e-9)
    with pytest.raises(ValueError):
        next(induced_orbit_blocks(golden_iet, 0.3, 10, block=0))


class TestKR:
    def test_two_atom_example(self):
        """Test two atoms each moved by 0.1."""
        # Create
        mu = DiscreteMeasure2D.uniform(np.array([0.1, 0.5]), np.array([0.1, 0.5]))
        nu = DiscreteMeasure2D.uniform(np.array([0.2, 0.5]), np.array([0.1, 0.6]))
        result = kr_bound(mu, nu)

        # Verify
        assert result.value == pytest.approx(0.1)
        assert result.slack == 0.0
        assert result.method == "assignment"

    def test_matches_permutation_oracle(self, rng):
        """Test small equal-weight problems against brute force over matchings."""
        for n in range(1, 7):
            for _ in range(5):
                # Create
                mu, nu = _random_measure(rng, n), _random_measure(rng, n)
                cost = cost_matrix(mu.points, nu.points)
                brute = min(
                    sum(cost[i, p[i]] for i in range(n)) / n
                    for p in itertools.permutations(range(n))
                )

                # Verify
                assert kr_distance(mu, nu) == pytest.approx(brute, abs=1e-12)

    def test_network_simplex_agrees_with_assignment(self, rng):
        """Test that duplicating atoms leaves the distance unchanged."""
        # Create
        mu, nu = _random_measure(rng, 5), _random_measure(rng, 5)
        doubled = DiscreteMeasure2D.mixture([nu, nu])
        exact = kr_bound(mu, nu)
        simplex = kr_bound(mu, doubled)

        # Verify
        assert simplex.method == "network-simplex"
        assert simplex.value == pytest.approx(exact.value, abs=1e-9)

    def test_quantized_slack(self, rng):
        """Test that quantized solves stay within their slack."""
        # Create
        mu, nu = _random_measure(rng, 10), _random_measure(rng, 10)
        exact = kr_bound(mu, nu)
        coarse = kr_bound(mu, nu, exact_limit=3, grid=8)

        # Verify
        assert coarse.method == "quantized"
        assert coarse.slack == pytest.approx(0.25)
        assert abs(coarse.value - exact.value) <= coarse.slack + 1e-12

    def test_distance_refuses_to_quantize(self, rng):
        """Test that kr_distance raises past the exact limit instead of binning."""
        # Create
        mu, nu = _random_measure(rng, 10), _random_measure(rng, 10)

        # Verify
        assert kr_distance(mu, nu, exact_limit=10) == kr_bound(mu, nu).value
        with pytest.raises(ValueError, match="kr_bound"):
            kr_distance(mu, nu, exact_limit=3)

    def test_metric_axioms(self, rng):
        """Test identity, symmetry and the triangle inequality."""
        for _ in range(10):
            a, b, c = (_random_measure(rng, 6) for _ in range(3))
            assert kr_distance(a, a) == pytest.approx(0.0, abs=1e-15)
            assert kr_distance(a, b) == pytest.approx(kr_distance(b, a))
            assert kr_distance(a, c) <= kr_distance(a, b) + kr_distance(b, c) + 1e-12

    def test_circle_metric_wraps(self):
        """Test wrap-around distance."""
        mu = DiscreteMeasure2D.uniform(np.array([0.05]), np.array([0.5]))
        nu = DiscreteMeasure2D.uniform(np.array([0.95]), np.array([0.5]))

        assert kr_distance(mu, nu) == pytest.approx(0.9)
        assert kr_distance(mu, nu, metric="circle") == pytest.approx(0.1)
        with pytest.raises(ValueError):
            cost_matrix(mu.points, nu.points, metric="sphere")


class TestDisintegration:
    @pytest.fixture
    def measure(self):
        return DiscreteMeasure2D(
            np.array([0.1, 0.15, 0.6]),
            np.array([0.2, 0.4, 0.9]),
            np.array([0.25, 0.25, 0.5]),
        )

    def test_conditional_measures(self, measure):
        """Test bin masses, normalized conditionals and representatives."""
        # Create
        d = disintegrate(measure, 2)
        ys, ws = d.conditional(0)

        # Verify
        assert list(d.masses) == pytest.approx([0.5, 0.5])
        assert list(ys) == pytest.approx([0.2, 0.4])
        assert list(ws) == pytest.approx([0.5, 0.5])
        assert list(d.representative_x()) == pytest.approx([0.125, 0.6])
        _, weights = d.reassemble_y_marginal()
        assert weights.sum() == pytest.approx(1.0)

    def test_empty_bins(self, measure):
        """Test that empty bins give NaN expectations and centered representatives."""
        # Create
        d = disintegrate(measure, 4)
        coord = functions_by_name()["coord"]
        values = apply_Asigma(d, coord)

        # Verify
        assert list(d.empty) == [False, True, False, True]
        assert values[0] == pytest.approx(0.3)
        assert math.isnan(values[1])
        assert d.representative_x()[3] == pytest.approx(0.875)

    def test_fiber_diameters(self, measure):
        """Test support diameters against two thresholds."""
        d = disintegrate(measure, 2)

        assert fiber_diameter_stats(d).fraction_above == 0.0
        stats = fiber_diameter_stats(d, threshold=0.1)
        assert stats.fraction_above == pytest.approx(0.5)
        assert stats.nonempty == 2
        assert stats.to_dict()["median_diameter"] == pytest.approx(0.1)

    def test_needs_a_bin(self, measure):
        """Test bins validation."""
        with pytest.raises(ValueError):
            disintegrate(measure, 0)


class TestPowerApproximation:
    def test_graph_of_T_is_one_power(self, periodic_iet_f64, rng):
        """Test that the graph joining of T reads as the single power 1."""
        # Create
        tower = build_tower(periodic_iet_f64, Interval(0.0, 0.25), 4)
        m = sample_power_joining(periodic_iet_f64, 1, 4000, rng)
        result = approx_by_powers(periodic_iet_f64, m, tower, bins=128)

        # Verify
        assert result.coefficients.dominant() == (1, pytest.approx(1.0))
        assert result.coefficients.total == pytest.approx(1.0)
        assert result.l2_errors["coord"] < 0.01

    def test_coefficients_stable_along_the_orbit(self, periodic_iet_f64, rng):
        """Test that shifting the base point by T^i keeps the coefficients."""
        # Create
        tower = build_tower(periodic_iet_f64, Interval(0.0, 0.25), 4)
        m = sample_power_joining(periodic_iet_f64, 1, 4000, rng)
        result = approx_by_powers(periodic_iet_f64, m, tower, bins=128)
        xbar = (result.coefficients.base_bin + 0.5) / 128
        checks = coefficient_stability(periodic_iet_f64, result, [1, 2, -1], xbar)

        # Verify
        assert checks
        assert all(c.holds for c in checks)
        assert {c.shift for c in checks} <= {1, 2, -1}
        assert checks[0].to_dict()["holds"] is True

    def test_outside_mass_profile(self, periodic_iet_f64, rng):
        """Test that only the top level of a short tower leaks."""
        # Create
        tower = build_tower(periodic_iet_f64, Interval(0.0, 0.25), 2)
        m = sample_power_joining(periodic_iet_f64, 1, 400, rng)
        profile = level_outside_mass(m, tower)

        # Verify
        assert list(profile.per_level) == pytest.approx([0.0, 1.0])
        assert profile.total_outside == pytest.approx(0.25)
        assert profile.surrogate == pytest.approx(0.25)

    def test_coefficient_validation(self):
        """Test negative and excessive coefficients."""
        with pytest.raises(ValueError):
            CoefficientVector(4, {0: -0.1}, 0)
        with pytest.raises(ValueError):
            CoefficientVector(4, {0: 0.75, 1: 0.5}, 0)

    def test_apportion_largest_remainder(self):
        """Test rounding coefficients to equally weighted exponents."""
        # Create
        vector = CoefficientVector(4, {0: 0.5, 1: 0.25, 2: 0.25}, 0)

        # Verify
        assert apportion(vector, 2) == [0, 1]
        assert apportion(vector, 4) == [0, 0, 1, 2]
        assert apportion(CoefficientVector(4, {}, 0), 3) == [0, 0, 0]
        with pytest.raises(ValueError):
            apportion(vector, 0)


def test_weak_closure_finds_identity(periodic_iet_f64, rng):
    """Test that the identity target is matched by the zeroth power."""
    # Create
    result = weak_closure_check(periodic_iet_f64, 0, 5, 200, rng)

    # Verify
    assert result.best_n == 0
    assert result.kr_error == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        weak_closure_check(periodic_iet_f64, 0, 0, 200, rng)


class TestBary:
    def test_two_strand_decay(self):
        """Test the gap ratio |a - b| / (a + b) and the preserved mean."""
        # Create
        report = bary_recursion(BaryState([1.0, 0.0], 0.7, 0.3), 30)

        # Verify
        assert abs(report.decay_rate - 0.4) <= 1e-6
        assert report.contraction_bound == pytest.approx(0.4)
        assert report.mean_drift == pytest.approx(0.0, abs=1e-12)
        assert report.hilbert[0] is None
        assert len(report.trajectory) == 31

    def test_decay_ignores_rounding_noise(self):
        """Test that gaps at the rounding level do not skew the measured rate."""
        # Create
        report = bary_recursion(BaryState([1.0, 0.0], 0.7, 0.3), 80)

        # Verify
        assert abs(report.decay_rate - 0.4) <= 1e-7
        assert report.gaps[-1] < 1e-12

    def test_invalid_states(self):
        """Test parameter validation."""
        with pytest.raises(ValueError):
            BaryState([1.0], 0.5, 0.5)
        with pytest.raises(ValueError):
            BaryState([1.0, 0.0], 0.8, 0.3)
        with pytest.raises(ValueError):
            BaryState([1.5, 0.0], 0.5, 0.5)
        with pytest.raises(ValueError):
            bary_recursion(BaryState([1.0, 0.0], 0.5, 0.5), -1)

    def test_hilbert_diameter(self):
        """Test ln(max / min)."""
        assert hilbert_diameter([0.5, 0.25]) == pytest.approx(math.log(2))
        assert hilbert_diameter([0.5, 0.0]) is None


def test_function_family_is_versioned():
    """Test names and values of the fixed test functions."""
    # Create
    family = test_function_family()
    hat = functions_by_name()["hat_0.50"]

    # Verify
    assert TEST_FUNCTIONS_VERSION == "tf-v1"
    assert [f.name for f in family][:2] == ["coord", "hat_0.25"]
    assert list(hat(np.array([0.5, 0.25, 0.9]))) == pytest.approx([1.0, 0.0, 0.0])
    assert all(f.sup == 1.0 for f in family)

