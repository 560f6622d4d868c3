"""Flow-layer tests: velocity law, stepping, detection, surgery, run loop.

Closed forms drive the expectations: rays and the hyperbola-preimage profile
are fixed points, an origin-centered circle shrinks with r^2 = r0^2 - 4t, and
an off-origin circle loses area at exactly one full turn per unit time.
"""

from __future__ import annotations

import numpy as np
import pytest

from lmcf_lab.curves import (
    EquivariantProfile,
    PlanarCurve,
    circumcircle_curvature,
    h_length,
    hausdorff_distance,
    lagrangian_angle,
    rotation_index,
)
from lmcf_lab.errors import (
    FlowStallError,
    NumericalBlowupError,
    SingularForcingError,
    UnsupportedSurgeryError,
)
from lmcf_lab.flow import (
    FlowComponent,
    FlowConfig,
    FlowState,
    as_component,
    detect_singularity,
    initial_state,
    run,
    step,
    surgery,
    velocity_field,
)
from lmcf_lab.intersections import extract_loops, self_intersections
from lmcf_lab.profiles import lawlor_profile, ray, sigma_curve


def circle(radius: float, center: complex = 0.0, n: int = 256, ccw: bool = True) -> PlanarCurve:
    s = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    if not ccw:
        s = -s
    return PlanarCurve(center + radius * np.exp(1j * s), closed=True)


def bump_profile(length: float = 4.0, amplitude: float = 0.01, n: int = 81) -> EquivariantProfile:
    """Pinned ray along the real axis with a smooth interior bump.

    The bump s^2 (L - s)^2 vanishes to second order at the origin, so the
    profile passes the origin-smoothness gate, and to second order at the far
    end, which therefore stays on the axis.
    """
    s = np.linspace(0.0, length, n)
    y = amplitude * s**2 * (length - s) ** 2 / length**3
    return EquivariantProfile(PlanarCurve(s + 1j * y), asymptote_angle=0.0)


class TestVelocityField:
    def test_ray_is_a_fixed_point(self):
        v = velocity_field(ray(0.3, 12.0, 0.1))
        assert np.max(np.abs(v)) < 1e-12

    @pytest.mark.parametrize("radius", [1.0, 2.5])
    def test_origin_circle_velocity(self, radius):
        c = circle(radius)
        v = velocity_field(c)
        expect = -2.0 * c.nodes / radius**2
        assert np.max(np.abs(v - expect)) < 1e-12 / radius

    def test_origin_node_half_osculating_curvature(self):
        # Parabola through the origin: one-sided curvature 2a, normal ~ i.
        a = 0.4
        t = np.linspace(0.0, 1.0, 2001)
        prof = EquivariantProfile(PlanarCurve(t + 1j * a * t**2), asymptote_angle=0.0)
        v = velocity_field(prof)
        k0 = circumcircle_curvature(0.0, prof.nodes[1], prof.nodes[2])
        assert abs(k0 - 2.0 * a) < 1e-3
        assert abs(v[0] - 0.5j * 2.0 * a) < 1e-3

    def test_interior_node_on_origin_rejected(self):
        c = PlanarCurve(np.array([-1.0 + 0j, 1e-9j, 1.0 + 0j]))
        with pytest.raises(SingularForcingError):
            velocity_field(c)

    def test_accepts_component_and_rejects_junk(self):
        comp = as_component(circle(1.0))
        assert np.max(np.abs(velocity_field(comp) + 2.0 * comp.curve.nodes)) < 1e-12
        with pytest.raises(TypeError):
            velocity_field([1.0, 2.0])


class TestComponentWrapping:
    def test_profile_becomes_pinned_with_asymptote(self):
        comp = as_component(ray(0.7, 10.0, 0.1))
        assert comp.origin_pinned
        assert comp.end_ray == 0.7
        assert comp.start_ray is None

    def test_closed_curve_takes_no_boundary_options(self):
        with pytest.raises(ValueError):
            FlowComponent(circle(1.0), origin_pinned=True)
        with pytest.raises(ValueError):
            FlowComponent(circle(1.0), end_ray=0.0)

    def test_pinned_requires_origin_start(self):
        c = PlanarCurve(np.array([0.5 + 0j, 1.0 + 0j, 1.5 + 0j]))
        with pytest.raises(ValueError):
            FlowComponent(c, origin_pinned=True)

    def test_pinned_start_ray_conflict(self):
        c = PlanarCurve(np.array([0j, 1.0 + 0j, 2.0 + 0j]))
        with pytest.raises(ValueError):
            FlowComponent(c, origin_pinned=True, start_ray=0.0)

    def test_initial_state_requires_components(self):
        with pytest.raises(ValueError):
            initial_state([])


class TestFlowConfig:
    def test_default_area_threshold(self):
        cfg = FlowConfig(target_spacing=0.02, max_time=1.0)
        assert cfg.area_threshold() == pytest.approx((0.06) ** 2)
        override = FlowConfig(target_spacing=0.02, max_time=1.0, surgery_area_threshold=1e-3)
        assert override.area_threshold() == 1e-3

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"target_spacing": 0.0, "max_time": 1.0},
            {"target_spacing": 0.1, "max_time": 0.0},
            {"target_spacing": 0.1, "max_time": 1.0, "cfl_factor": 0.6},
            {"target_spacing": 0.1, "max_time": 1.0, "resample_period": 0},
            {"target_spacing": 0.1, "max_time": 1.0, "surgery_area_threshold": -1.0},
        ],
    )
    def test_rejects_bad_settings(self, kwargs):
        with pytest.raises(ValueError):
            FlowConfig(**kwargs)


class TestStep:
    def test_ray_drift_over_many_steps(self):
        prof = ray(0.3, 12.0, 0.1)
        state = initial_state([prof])
        cfg = FlowConfig(target_spacing=0.1, max_time=100.0, resample_period=10**9)
        for _ in range(10_000):
            state = step(state, cfg)
        drift = hausdorff_distance(state.components[0].curve, prof.curve)
        assert drift < 1e-8

    def test_circle_radius_tracks_closed_form(self):
        cfg = FlowConfig(target_spacing=2 * np.pi / 256, max_time=0.23)
        state = initial_state([circle(1.0)])
        final, series = run(
            state, cfg, {"radius": lambda st: float(np.abs(st.components[0].curve.nodes).mean())},
            detect_period=0,
        )
        t = np.array(series["radius"].times)
        r = np.array(series["radius"].values)
        assert np.all(np.abs(r - np.sqrt(1.0 - 4.0 * t)) < 5e-3 * np.sqrt(1.0 - 4.0 * t))
        assert final.time >= 0.23

    def test_lawlor_profile_is_stationary(self):
        res = lawlor_profile(1.0, 0.7, extent=6.0, spacing=0.05)
        comp = FlowComponent(res.curve, label="neck")
        cfg = FlowConfig(target_spacing=0.05, max_time=0.05, resample_period=10**9)
        state = initial_state([comp])
        while state.time < cfg.max_time:
            state = step(state, cfg)
        drift = hausdorff_distance(state.components[0].curve, res.curve)
        assert drift < 1e-4 * res.curve.bbox_diameter

    def test_origin_pin_is_exact(self):
        state = initial_state([bump_profile()])
        cfg = FlowConfig(target_spacing=0.05, max_time=1.0)
        for _ in range(60):
            state = step(state, cfg)
        assert state.components[0].curve.nodes[0] == 0.0

    def test_weighted_length_never_increases(self):
        state = initial_state([bump_profile(amplitude=0.05)])
        cfg = FlowConfig(target_spacing=0.05, max_time=1.0, resample_period=10**9)
        previous = h_length(state.components[0].curve)
        for _ in range(120):
            state = step(state, cfg)
            current = h_length(state.components[0].curve)
            assert current <= previous + 1e-8 * previous
            previous = current

    def test_angle_oscillation_does_not_grow(self):
        # Dirichlet-like ends: pinned at the origin, clamped on the axis far
        # out.  The interior angle spread must only flatten.
        state = initial_state([bump_profile(amplitude=0.08)])
        cfg = FlowConfig(target_spacing=0.05, max_time=1.0, resample_period=10**9)
        theta0 = lagrangian_angle(state.components[0].curve, origin_pinned=True)
        for _ in range(200):
            state = step(state, cfg)
        theta1 = lagrangian_angle(state.components[0].curve, origin_pinned=True)
        assert np.ptp(theta1) <= np.ptp(theta0) + 1e-2

    def test_resampling_trims_tails_past_truncation_radius(self):
        state = initial_state([ray(0.3, 40.0, 0.1)])
        cfg = FlowConfig(target_spacing=0.1, max_time=1.0, truncation_radius=20.0, resample_period=5)
        for _ in range(5):
            state = step(state, cfg)
        radii = np.abs(state.components[0].curve.nodes)
        assert radii.max() <= 20.0 + 1e-9
        assert radii.max() > 19.0
        assert state.components[0].curve.nodes[0] == 0.0

    def test_stall_on_collapsed_spacing(self):
        c = PlanarCurve(np.array([0j, 1e-7 + 0j, 2e-7 + 0j]))
        state = initial_state([FlowComponent(c)])
        cfg = FlowConfig(target_spacing=0.1, max_time=1.0)
        with pytest.raises(FlowStallError) as info:
            step(state, cfg)
        assert info.value.state is state

    @pytest.mark.filterwarnings("ignore:overflow", "ignore:invalid value")
    def test_blowup_reported_with_state(self):
        # Huge coordinates overflow the curvature stencil into NaN velocity.
        z = np.arange(1, 6) * 1e305 + 1j * np.array([0.0, 1e300, 0.0, 1e300, 0.0])
        state = initial_state([FlowComponent(PlanarCurve(z))])
        cfg = FlowConfig(target_spacing=1.0, max_time=1.0)
        with pytest.raises(NumericalBlowupError) as info:
            step(state, cfg)
        assert info.value.state is state


class TestRun:
    def test_matches_looped_steps(self):
        cfg = FlowConfig(target_spacing=0.05, max_time=0.01)
        final, _ = run(initial_state([bump_profile()]), cfg, detect_period=0)
        manual = initial_state([bump_profile()])
        while manual.time < cfg.max_time:
            manual = step(manual, cfg)
        assert np.array_equal(final.components[0].curve.nodes, manual.components[0].curve.nodes)
        assert final.step_count == manual.step_count

    def test_deterministic_replay(self):
        cfg = FlowConfig(target_spacing=0.05, max_time=0.02)
        hooks = {"h": lambda st: h_length(st.components[0].curve)}
        a_state, a_series = run(initial_state([bump_profile()]), cfg, hooks)
        b_state, b_series = run(initial_state([bump_profile()]), cfg, hooks)
        assert np.array_equal(
            a_state.components[0].curve.nodes, b_state.components[0].curve.nodes
        )
        assert a_series["h"].times == b_series["h"].times
        assert a_series["h"].values == b_series["h"].values

    def test_sampling_layout(self):
        cfg = FlowConfig(target_spacing=0.05, max_time=0.02)
        snapshots = []
        state, series = run(
            initial_state([bump_profile()]),
            cfg,
            {"h": lambda st: h_length(st.components[0].curve)},
            sample_stride=0.005,
            snapshot_callback=snapshots.append,
        )
        ts = series["h"].times
        assert len(ts) == len(snapshots)
        assert ts[0] == 0.0
        assert ts[-1] == state.time
        assert all(b >= a for a, b in zip(ts, ts[1:]))

    def test_event_times_are_ordered(self):
        cfg = FlowConfig(target_spacing=2 * np.pi * 0.3 / 96, max_time=0.06)
        state, _ = run(initial_state([circle(0.3, center=2.0, n=96)]), cfg, detect_period=5)
        times = [ev.time for ev in state.events]
        assert times == sorted(times)
        assert [ev.kind for ev in state.events] == ["loop_collapse"]


class TestDetection:
    def test_stationary_ray_never_fires(self):
        state = initial_state([ray(0.4, 10.0, 0.1)])
        cfg = FlowConfig(target_spacing=0.1, max_time=1.0, surgery_area_threshold=100.0)
        assert detect_singularity(state, cfg) is None

    def test_off_origin_circle_extinction_time(self):
        # Area shrinks at exactly one full turn per unit time, so the circle
        # of radius 0.3 dies at t = pi 0.09 / (2 pi) = 0.045.
        cfg = FlowConfig(target_spacing=2 * np.pi * 0.3 / 96, max_time=0.06)
        state, _ = run(initial_state([circle(0.3, center=2.0, n=96)]), cfg, detect_period=5)
        assert not state.components
        (event,) = [ev for ev in state.events if ev.kind == "loop_collapse"]
        assert event.payload["whole_component"] is True
        assert not event.payload["near_origin"]
        assert event.payload["t_singular"] == pytest.approx(0.045, rel=0.05)

    def test_origin_circle_extinction_time(self):
        cfg = FlowConfig(target_spacing=2 * np.pi / 128, max_time=0.3)
        state, _ = run(initial_state([circle(1.0, n=128)]), cfg, detect_period=5)
        assert not state.components
        (event,) = [ev for ev in state.events if ev.kind == "loop_collapse"]
        assert event.payload["t_singular"] == pytest.approx(0.25, rel=0.005)
        # Whole-curve collapse onto the origin is flagged as anomalous.
        assert event.payload["near_origin"]
        assert any(ev.kind == "anomaly" for ev in state.events)

    def test_curvature_blowup_query(self):
        # A semicircular spike: curvature 2/h against spacing ~0.7 h.
        z = np.array([0j, 1.0 + 0j, 1.5 + 0.5j, 2.0 + 0j, 3.0 + 0j])
        state = initial_state([FlowComponent(PlanarCurve(z))])
        cfg = FlowConfig(target_spacing=1.0, max_time=1.0)
        found = detect_singularity(state, cfg)
        assert found is not None and found.kind == "blowup"
        assert found.payload["curvature_times_spacing"] > 1.0

    def test_tiny_loop_detected_with_descriptor(self):
        res = sigma_curve(0.05)
        state = initial_state([res.profile])
        cfg = FlowConfig(target_spacing=0.05, max_time=1.0, surgery_area_threshold=0.06)
        found = detect_singularity(state, cfg)
        assert found is not None and found.kind == "loop_collapse"
        assert found.loop.crossing is not None
        assert found.payload["winds_origin"] == 0
        assert abs(found.payload["area"]) == pytest.approx(0.05, rel=0.01)


class TestSurgery:
    def make_loop_state(self, area: float = 0.05):
        res = sigma_curve(area)
        state = initial_state([res.profile])
        loops = extract_loops(state.components[0].curve)
        assert len(loops) == 1
        return state, loops[0]

    def test_crossing_count_drops_to_zero(self):
        state, loop = self.make_loop_state()
        after = surgery(state, loop)
        assert self_intersections(after.components[0].curve) == []
        assert after.components[0].curve.nodes[0] == 0.0

    def test_rotation_index_changes_by_one_turn(self):
        state, loop = self.make_loop_state()
        after = surgery(state, loop)
        (event,) = after.events
        jump = abs(event.payload["rotation_before"] - event.payload["rotation_after"])
        assert abs(jump - 1.0) < 0.15
        assert event.payload["crossings_before"] == 1
        assert event.payload["crossings_after"] == 0

    def test_junction_stays_resolved(self):
        state, loop = self.make_loop_state()
        after = surgery(state, loop)
        seg = after.components[0].curve.segment_lengths()
        assert seg.min() > 0.2 * np.median(seg)

    def test_refuses_origin_winding_loop(self):
        # Square detour around the origin, tails crossing east of it.
        z = np.array(
            [
                3.0 - 0.15j,
                1.0 - 0.15j,
                1.2 + 1.2j,
                -1.3 + 1.1j,
                -1.2 - 1.2j,
                1.3 - 1.0j,
                2.0 + 0.8j,
            ]
        )
        state = initial_state([FlowComponent(PlanarCurve(z))])
        loops = extract_loops(state.components[0].curve)
        assert len(loops) == 1 and abs(loops[0].winds_origin) == 1
        with pytest.raises(UnsupportedSurgeryError):
            surgery(state, loops[0])

    def test_whole_component_loop_is_not_surgery(self):
        state = initial_state([circle(0.5)])
        (loop,) = extract_loops(state.components[0].curve)
        with pytest.raises(ValueError):
            surgery(state, loop)
