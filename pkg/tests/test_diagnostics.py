import numpy as np
import pytest
from scipy.special import i0e

from lmcf_lab.curves import PlanarCurve
from lmcf_lab.diagnostics import (
    DensityQuery,
    angle_jump_tracker,
    beta_theta_invariant,
    density_monotonicity_check,
    expander_closeness,
    gaussian_density,
    intersection_count_series,
    loop_area_law_check,
    singular_time_bound_check,
)
from lmcf_lab.flow import FlowConfig, FlowState, as_component, initial_state, run, surgery
from lmcf_lab.intersections import extract_loops
from lmcf_lab.profiles import ExpanderSpec, expander_profile, lawlor_profile, ray, sigma_curve


def circle(radius: float, center: complex = 0.0, n: int = 256) -> PlanarCurve:
    s = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return PlanarCurve(center + radius * np.exp(1j * s), closed=True)


def states_of(*curves_with_times) -> list[FlowState]:
    return [
        FlowState(time=t, components=(as_component(c),)) for t, c in curves_with_times
    ]


def snapshot_run(state, config, **kwargs):
    seen: list[FlowState] = []
    final, _ = run(state, config, snapshot_callback=seen.append, **kwargs)
    return final, seen


@pytest.fixture(scope="module")
def origin_circle_trajectory():
    # Unit circle about the origin, stopped just short of its t = 1/4 death.
    # Spacing 0.02 keeps the late-time polygon fine enough that the perimeter
    # deficit stays below the density tolerance.
    cfg = FlowConfig(target_spacing=0.02, max_time=0.24)
    _, seen = snapshot_run(
        initial_state([circle(1.0, n=128)]), cfg, sample_stride=0.02, detect_period=0
    )
    return seen

@pytest.fixture(scope="module")
def shrinking_loop_trajectory():
    # Off-origin circle kept alive to near-extinction, detection off.
    cfg = FlowConfig(target_spacing=0.026, max_time=0.07)
    _, seen = snapshot_run(
        initial_state([circle(0.4, center=2.0, n=96)]),
        cfg,
        sample_stride=0.004,
        detect_period=0,
    )
    return seen


@pytest.fixture(scope="module")
def collapse_trajectory():
    # Same circle with detection on: ends in a logged whole-loop collapse.
    cfg = FlowConfig(target_spacing=0.026, max_time=0.2)
    _, seen = snapshot_run(
        initial_state([circle(0.4, center=2.0, n=96)]),
        cfg,
        sample_stride=0.01,
        detect_period=5,
    )
    return seen


@pytest.fixture(scope="module")
def expander():
    return expander_profile(ExpanderSpec())


@pytest.fixture(scope="module")
def sigma_surgery_pair():
    res = sigma_curve(0.05)
    before = initial_state([res.profile])
    (loop,) = extract_loops(before.components[0].curve)
    after = surgery(before, loop)
    return before, after, loop


class TestDensityQuery:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"scale": 0.0},
            {"scale": -1.0},
            {"scale": 1.0, "alpha_nodes": 32},
            {"scale": 1.0, "truncation": 4.0},
        ],
    )
    def test_rejects_bad_settings(self, kwargs):
        with pytest.raises(ValueError):
            DensityQuery(center=(1.0 + 0j, 0j), **kwargs)


class TestGaussianDensity:
    def test_flat_plane_has_density_one(self):
        # A straight ray sweeps a flat plane, whose density is one at any
        # point on it and any scale.
        plane = ray(0.3, 40.0, 0.02)
        z0 = 1.2 * np.exp(0.3j)
        center = (z0 * np.cos(0.7), z0 * np.sin(0.7))
        res = gaussian_density(plane, DensityQuery(center, scale=1.0))
        assert res.value == pytest.approx(1.0, abs=1e-4)
        assert res.error_estimate < 1e-4
        assert not res.tail_warning

    def test_off_plane_center_decays_with_distance(self):
        # Density of a plane at distance d from the center is exp(-d^2/4l);
        # the in-plane offset is irrelevant.
        chi = 0.3
        plane = ray(chi, 40.0, 0.02)
        p1, p2 = 0.9 + 0.4j, -0.3 + 1.1j
        d2 = (np.exp(-1j * chi) * p1).imag ** 2 + (np.exp(-1j * chi) * p2).imag ** 2
        expected = np.exp(-d2 / (4.0 * 0.8))
        res = gaussian_density(plane, DensityQuery((p1, p2), scale=0.8))
        assert res.value == pytest.approx(expected, abs=1e-3)

    def test_circle_at_origin_closed_form(self):
        # Constant radius makes the angular integral trivial:
        # value = (pi R^2 / l) exp(-R^2/4l).
        res = gaussian_density(
            circle(2.0, n=512), DensityQuery((0j, 0j), scale=1.0)
        )
        assert res.value == pytest.approx(4.0 * np.pi * np.exp(-1.0), rel=1e-4)
        assert not res.tail_warning

    def test_alpha_integral_matches_bessel_form(self):
        # With the center off the symmetry axis the angular integral is a
        # modified Bessel function; quadrature must reproduce it.
        R, c, l = 1.5, 0.8, 0.5
        s = np.linspace(0.0, 2.0 * np.pi, 4097)
        x = np.abs(c * R * np.cos(s) / (2.0 * l))
        vals = i0e(x) * np.exp(x - (R * R + c * c) / (4.0 * l))
        oracle = R * R * np.trapezoid(vals, s) / (2.0 * l)
        res = gaussian_density(
            circle(R, n=512), DensityQuery((c + 0j, 0j), scale=l)
        )
        assert res.value == pytest.approx(oracle, rel=1e-4)

    def test_scaling_invariance(self):
        base = circle(1.0, center=0.3 + 0.2j, n=256)
        center = (0.5 + 0.1j, -0.2 + 0.4j)
        c = 1.7
        scaled = PlanarCurve(c * base.nodes, closed=True)
        v0 = gaussian_density(base, DensityQuery(center, scale=0.4)).value
        v1 = gaussian_density(
            scaled, DensityQuery((c * center[0], c * center[1]), scale=c * c * 0.4)
        ).value
        assert v1 == pytest.approx(v0, rel=1e-10)

    def test_error_estimate_grows_with_coarseness(self):
        query = DensityQuery((0j, 0j), scale=1.0)
        fine = gaussian_density(circle(2.0, n=512), query)
        coarse = gaussian_density(circle(2.0, n=16), query)
        assert fine.error_estimate < 1e-6
        assert coarse.error_estimate > fine.error_estimate

    def test_tail_warning_on_short_profile(self):
        query = DensityQuery((2.5 + 0j, 0j), scale=1.0)
        short = gaussian_density(ray(0.0, 3.0, 0.05), query)
        full = gaussian_density(ray(0.0, 40.0, 0.05), query)
        assert short.tail_warning
        assert not full.tail_warning
        assert short.value < full.value


class TestDensityMonotonicity:
    def test_self_shrinker_density_is_constant(self, origin_circle_trajectory):
        # At the singular point and horizon of the shrinking circle the
        # density is scale-free: every sample equals 4 pi / e.
        report = density_monotonicity_check(
            origin_circle_trajectory, (0j, 0j), horizon=0.25
        )
        assert report.verdict == "PASS"
        values = np.array(report.series.values)
        assert np.allclose(values, 4.0 * np.pi * np.exp(-1.0), rtol=1e-3)
        assert report.details["worst_rise"] <= 1e-3
        assert report.details["worst_excess"] <= report.details["worst_rise"]

    def test_error_bars_excuse_unresolved_samples(self, origin_circle_trajectory):
        # Offset the center slightly so the late, coarse samples wiggle; any
        # rise must stay within the published quadrature error estimates.
        report = density_monotonicity_check(
            origin_circle_trajectory, (0.05 + 0j, 0j), horizon=0.25
        )
        assert report.verdict == "PASS"
        assert report.details["worst_excess"] <= 1e-3

    def test_too_few_samples_is_not_applicable(self, origin_circle_trajectory):
        report = density_monotonicity_check(
            origin_circle_trajectory, (0j, 0j), horizon=0.1
        )
        assert report.verdict == "NOT-APPLICABLE"
        assert all(t < 0.1 for t in report.series.times)


class TestExpanderCloseness:
    def test_circle_misfit_closed_form(self):
        # Unit circle at t = 1: misfit is 5 pointwise, weight scale 3, so the
        # integral is (25 pi / 3) exp(-1/12).
        value = expander_closeness(circle(1.0, n=512), t=1.0)
        assert value == pytest.approx(25.0 * np.pi / 3.0 * np.exp(-1.0 / 12.0), rel=1e-3)

    def test_ray_is_exactly_self_expanding(self):
        assert expander_closeness(ray(0.4, 20.0, 0.05), t=1.0) < 1e-20

    def test_expander_profile_scores_near_zero(self, expander):
        assert expander_closeness(expander.fine_curve, t=1.0) < 1e-8
        assert expander_closeness(expander.curve, t=1.0) < 1e-4

    @pytest.mark.parametrize("t", [0.0, -1.0, 4.0, 5.0])
    def test_rejects_times_outside_weight_window(self, t):
        with pytest.raises(ValueError):
            expander_closeness(circle(1.0), t=t)


class TestBetaThetaInvariant:
    def test_expander_oscillation_vanishes(self, expander):
        assert beta_theta_invariant(expander.fine_curve, t=1.0) < 1e-4

    def test_circle_is_not_an_expander(self):
        # On the unit circle the combination grows linearly: beta = s and
        # theta = 2s + pi/2, so the spread over the nodes is near 10 pi.
        n = 512
        value = beta_theta_invariant(circle(1.0, n=n), t=1.0)
        assert value == pytest.approx(10.0 * np.pi * (n - 1) / n, rel=1e-2)

    def test_reporting_radius_must_keep_nodes(self, expander):
        with pytest.raises(ValueError):
            beta_theta_invariant(expander.curve, t=1.0, reporting_radius=1e-6)


class TestAngleJump:
    def test_surgery_produces_full_turn_jump(self, sigma_surgery_pair):
        before, after, loop = sigma_surgery_pair
        r_inner = 0.5 * abs(loop.crossing.point)
        assert max(abs(loop.polygon)) < 1.0
        report = angle_jump_tracker([before, after], r_inner, 1.0)
        assert report.verdict == "PASS"
        (jump,) = report.details["jumps"]
        assert abs(abs(jump["magnitude"]) - 2.0 * np.pi) < 0.3
        assert report.details["lipschitz_estimate"] == 0.0

    def test_straight_profile_has_flat_series(self):
        line = ray(0.4, 10.0, 0.05)
        states = states_of((0.0, line), (0.5, line), (1.0, line))
        report = angle_jump_tracker(states, 0.5, 2.0)
        assert report.verdict == "PASS"
        assert report.details["jumps"] == []
        assert report.details["lipschitz_estimate"] == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(report.series.values, report.series.values[0])

    def test_missing_anchor_marks_report_unreliable(self):
        states = states_of((0.0, ray(0.4, 10.0, 0.05)), (1.0, ray(0.4, 1.0, 0.05)))
        report = angle_jump_tracker(states, 0.5, 2.0)
        assert report.verdict == "UNRELIABLE"
        assert report.details["missing_times"] == [1.0]
        assert len(report.series) == 1

    def test_rejects_bad_anchor_radii(self):
        with pytest.raises(ValueError):
            angle_jump_tracker([], 2.0, 0.5)


class TestLoopAreaLaw:
    def test_off_origin_circle_loses_one_turn_per_unit_time(
        self, shrinking_loop_trajectory
    ):
        # The forcing field is divergence-free away from the origin, so the
        # enclosed area obeys dA/dt = -2 pi exactly.
        report = loop_area_law_check(shrinking_loop_trajectory)
        assert report.verdict == "PASS"
        assert report.details["max_rel_residual"] < 0.02
        assert report.details["resolved_samples"] >= 10

    def test_duplicate_sample_times_are_skipped(self, shrinking_loop_trajectory):
        padded = list(shrinking_loop_trajectory)
        padded.insert(5, padded[4])
        report = loop_area_law_check(padded)
        assert report.verdict == "PASS"
        assert np.all(np.diff(report.series.times) > 0)

    def test_no_loop_is_not_applicable(self):
        states = states_of(*((0.1 * k, ray(0.3, 8.0, 0.1)) for k in range(12)))
        report = loop_area_law_check(states)
        assert report.verdict == "NOT-APPLICABLE"


class TestIntersectionCounts:
    def line(self, x: float = 2.0) -> PlanarCurve:
        return PlanarCurve(x + 1j * np.linspace(-1.0, 1.0, 9))

    def test_surgery_run_never_gains_crossings(self, sigma_surgery_pair):
        before, after, _ = sigma_surgery_pair
        report = intersection_count_series([before, after])
        assert report.verdict == "PASS"
        assert report.series.values == (1.0, 0.0)

    def test_new_crossings_against_obstacle_fail(self):
        states = states_of((0.0, circle(0.5, 0.0)), (1.0, circle(0.5, 2.0)))
        report = intersection_count_series(states, self.line())
        assert report.verdict == "FAIL"
        assert report.series.values == (0.0, 2.0)
        assert report.details["rise_times"] == [1.0]

    def test_component_pair_counting(self):
        state = FlowState(
            time=0.0,
            components=(as_component(circle(0.5)), as_component(circle(0.5, 0.6))),
        )
        report = intersection_count_series([state], reference=1)
        assert report.verdict == "PASS"
        assert report.series.values == (2.0,)

    def test_trajectory_pair_counting(self):
        states = states_of((0.0, circle(0.5)), (1.0, circle(0.5)))
        other = states_of((0.0, circle(0.5, 0.6)), (1.0, circle(0.5, 0.6)))
        report = intersection_count_series(states, other)
        assert report.series.values == (2.0, 2.0)

    def test_exclusion_radius_is_forwarded(self):
        states = states_of((0.0, circle(0.5, 2.0)))
        near = intersection_count_series(states, self.line())
        far = intersection_count_series(states, self.line(), exclude_radius=3.0)
        assert near.series.values == (2.0,)
        assert far.series.values == (0.0,)

    def test_tangential_rise_is_unreliable_not_failed(self):
        # The obstacle meets the moved line at half the tangential-angle
        # threshold, so the new crossing cannot be trusted.
        xs = np.linspace(-1.0, 1.0, 21)
        grazing = PlanarCurve(xs + 5e-4j * (xs - 0.33))
        states = states_of(
            (0.0, PlanarCurve(xs + 0.1j)), (1.0, PlanarCurve(xs + 0j))
        )
        report = intersection_count_series(states, grazing)
        assert report.series.values == (0.0, 1.0)
        assert report.verdict == "UNRELIABLE"
        assert report.details["unreliable_times"] == [1.0]


class TestSingularTimeBound:
    def test_collapse_beats_area_over_pi(self, collapse_trajectory):
        report = singular_time_bound_check(collapse_trajectory)
        assert report.verdict == "PASS"
        assert report.details["T_collapse_measured"] is not None
        assert report.details["margin"] > 0.0
        # Area pi 0.16 shrinking by 2 pi per unit time dies near t = 0.08,
        # half the bound.
        assert report.details["T_collapse_measured"] == pytest.approx(0.08, abs=0.02)
        assert report.details["bound"] == pytest.approx(0.16, rel=0.01)

    def test_run_ending_before_bound_is_not_applicable(self, shrinking_loop_trajectory):
        report = singular_time_bound_check(shrinking_loop_trajectory)
        assert report.verdict == "NOT-APPLICABLE"

    def test_origin_winding_loop_is_out_of_scope(self):
        report = singular_time_bound_check(states_of((0.0, circle(1.0))))
        assert report.verdict == "NOT-APPLICABLE"
        assert "origin" in report.details["reason"]

    def test_no_loop_is_out_of_scope(self):
        report = singular_time_bound_check(states_of((0.0, ray(0.3, 8.0, 0.1))))
        assert report.verdict == "NOT-APPLICABLE"

    def test_outlasting_the_bound_without_collapse_fails(self):
        states = states_of((0.0, circle(0.4, 2.0)), (1.0, circle(0.4, 2.0)))
        report = singular_time_bound_check(states)
        assert report.verdict == "FAIL"


class TestLawlorIsNotAnExpander:
    def test_angle_combination_oscillates(self):
        res = lawlor_profile(0.25, 0.9)
        assert beta_theta_invariant(res.curve, t=1.0) > 0.1
