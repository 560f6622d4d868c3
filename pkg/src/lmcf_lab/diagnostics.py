"""Monotone quantities and singularity signatures of the reduced flow.

Everything here is read-only over curve snapshots.  A trajectory is the
sequence of FlowState samples collected by the run loop's snapshot callback;
checks return a CheckReport bundling a verdict with the measured series.

The surface generated by a profile curve sits in R^4 = C^2: a curve point z
sweeps (z cos a, z sin a) over a in [0, 2pi).  Surface integrals reduce to
curve integrals against 2 pi |z| (co-area), which is how the Gaussian density
and the expander misfit are computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .curves import (
    EquivariantProfile,
    PlanarCurve,
    frames,
    hausdorff_distance,
    lagrangian_angle,
    liouville_primitive,
)
from .flow import FlowState, TimeSeries, as_component, loop_area_rate, velocity_field
from .intersections import crossings_between, extract_loops, self_intersections

PASS = "PASS"
FAIL = "FAIL"
NOT_APPLICABLE = "NOT-APPLICABLE"
UNRELIABLE = "UNRELIABLE"

# Gaussian weight below which a truncated far end is considered harmless.
TAIL_WEIGHT_FLOOR = 1e-8

# Per-sample slack allowed in the density monotonicity verdict.
MONOTONE_SLACK = 1e-3


@dataclass(frozen=True)
class DensityQuery:
    """Backward-heat-kernel query: center in R^4, scale, quadrature controls.

    ``center`` is a pair of complex numbers (the two C-coordinates of the
    ambient point).  ``truncation`` is measured in units of sqrt(scale):
    curve nodes whose sweep circle stays farther than that from the center
    are dropped from the quadrature.
    """

    center: tuple[complex, complex]
    scale: float
    alpha_nodes: int = 128
    truncation: float = 8.0

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if self.alpha_nodes < 64:
            raise ValueError("alpha_nodes must be at least 64")
        if self.truncation < 8.0:
            raise ValueError("truncation must be at least 8 sqrt(scale)")

    @property
    def center_norm(self) -> float:
        return float(np.hypot(abs(self.center[0]), abs(self.center[1])))


@dataclass(frozen=True)
class DensityResult:
    """Density value with a refinement-based error estimate."""

    value: float
    error_estimate: float
    tail_warning: bool


@dataclass(frozen=True)
class CheckReport:
    """Stable check result: {check, params, verdict, details, series}."""

    check: str
    params: dict
    verdict: str
    details: dict = field(default_factory=dict)
    series: TimeSeries | None = None


def _as_curve(obj) -> tuple[PlanarCurve, bool]:
    """Accept a profile, curve, or component; return (curve, origin_pinned)."""
    if isinstance(obj, EquivariantProfile):
        return obj.curve, True
    if isinstance(obj, PlanarCurve):
        return obj, False
    comp = as_component(obj)
    return comp.curve, comp.origin_pinned


def _arclength_weights(curve: PlanarCurve) -> NDArray[np.float64]:
    seg = curve.segment_lengths()
    if curve.closed:
        return 0.5 * (seg + np.roll(seg, 1))
    w = np.zeros(curve.n)
    w[:-1] += 0.5 * seg
    w[1:] += 0.5 * seg
    return w


def _density_quadrature(
    curve: PlanarCurve, query: DensityQuery, alpha_nodes: int, stride: int
) -> float:
    """Co-area Gaussian integral at the given quadrature resolution.

    The alpha integral uses the periodic trapezoid rule; exponents are
    assembled before exponentiating, so the weight never exceeds one and
    large radii cannot overflow.
    """
    z = curve.nodes[::stride]
    w = _arclength_weights(curve)[::stride] * stride
    y1, y2 = query.center
    l = query.scale
    r2 = np.abs(z) ** 2
    keep = np.abs(np.abs(z) - query.center_norm) <= query.truncation * np.sqrt(l)
    if not np.any(keep):
        return 0.0
    z, w, r2 = z[keep], w[keep], r2[keep]
    a = (z * np.conj(y1)).real
    b = (z * np.conj(y2)).real
    alpha = np.linspace(0.0, 2.0 * np.pi, alpha_nodes, endpoint=False)
    phase = (
        -r2[:, None]
        - query.center_norm**2
        + 2.0 * (a[:, None] * np.cos(alpha) + b[:, None] * np.sin(alpha))
    ) / (4.0 * l)
    alpha_integral = 2.0 * np.pi * np.exp(phase).mean(axis=1)
    return float(np.sum(np.abs(z) * alpha_integral * w) / (4.0 * np.pi * l))


def gaussian_density(profile, query: DensityQuery) -> DensityResult:
    """Gaussian density of the swept surface at the query point and scale.

    A single flat plane (ray profile) has density one; the error estimate
    comes from re-evaluating at half the quadrature resolution.  The tail
    warning fires when an open end is cut off while its Gaussian weight is
    still non-negligible.
    """
    curve, _ = _as_curve(profile)
    value = _density_quadrature(curve, query, query.alpha_nodes, 1)
    coarse_alpha = _density_quadrature(curve, query, max(query.alpha_nodes // 2, 4), 1)
    coarse_s = _density_quadrature(curve, query, query.alpha_nodes, 2)
    error = abs(value - coarse_alpha) + abs(value - coarse_s)

    tail = False
    if not curve.closed:
        reach = query.center_norm + query.truncation * np.sqrt(query.scale)
        for end in (curve.nodes[0], curve.nodes[-1]):
            gap = abs(end) - query.center_norm
            weight = np.exp(-max(gap, 0.0) ** 2 / (4.0 * query.scale))
            if abs(end) < reach and weight > TAIL_WEIGHT_FLOOR and abs(end) > 0:
                tail = True
    return DensityResult(value=value, error_estimate=error, tail_warning=tail)


def density_monotonicity_check(
    trajectory: Sequence[FlowState],
    center: tuple[complex, complex],
    horizon: float,
    *,
    component: int = 0,
    alpha_nodes: int = 128,
) -> CheckReport:
    """Density at scale (horizon - t) along a trajectory; must not increase.

    Samples at or past the horizon are out of scope; fewer than ten usable
    samples yields NOT-APPLICABLE.  A rise only counts as a violation when
    it exceeds the per-sample slack plus the quadrature error estimates of
    the two samples involved: very close to the horizon the kernel scale
    drops below what the polygon resolves, and the error estimate is the
    honest record of that.
    """
    params = {
        "center": [center[0].real, center[0].imag, center[1].real, center[1].imag],
        "horizon": horizon,
        "component": component,
    }
    times, values, errors = [], [], []
    for state in trajectory:
        if state.time >= horizon or component >= len(state.components):
            continue
        comp = state.components[component]
        query = DensityQuery(center, scale=horizon - state.time, alpha_nodes=alpha_nodes)
        result = gaussian_density(comp, query)
        times.append(state.time)
        values.append(result.value)
        errors.append(result.error_estimate)
    series = TimeSeries("gaussian_density", tuple(times), tuple(values))
    if len(times) < 10:
        return CheckReport(
            "density_monotonicity", params, NOT_APPLICABLE,
            {"reason": f"only {len(times)} samples before the horizon"}, series,
        )
    worst_rise = 0.0
    worst_excess = 0.0
    for k in range(1, len(values)):
        rise = values[k] - values[k - 1]
        worst_rise = max(worst_rise, rise)
        worst_excess = max(worst_excess, rise - (errors[k] + errors[k - 1]))
    verdict = PASS if worst_excess <= MONOTONE_SLACK else FAIL
    return CheckReport(
        "density_monotonicity", params, verdict,
        {"worst_rise": worst_rise, "worst_excess": worst_excess}, series,
    )


def expander_closeness(profile, t: float) -> float:
    """Weighted misfit between position and 2t times the flow velocity.

    Zero exactly on a self-expanding solution at its own time; the Gaussian
    weight is centered at the origin with scale (4 - t), so t must lie in
    (0, 4).
    """
    if not 0.0 < t < 4.0:
        raise ValueError("time must lie in (0, 4)")
    curve, pinned = _as_curve(profile)
    z = curve.nodes
    fr = frames(curve, origin_pinned=pinned)
    position_normal = (np.conj(1j * fr.tangent) * z).real
    velocity_normal = (np.conj(1j * fr.tangent) * velocity_field(profile)).real
    misfit = (position_normal - 2.0 * t * velocity_normal) ** 2
    scale = 4.0 - t
    weight = np.exp(-np.abs(z) ** 2 / (4.0 * scale)) / (4.0 * np.pi * scale)
    return float(np.sum(misfit * weight * 2.0 * np.pi * np.abs(z) * _arclength_weights(curve)))


def beta_theta_invariant(profile, t: float, *, reporting_radius: float | None = None) -> float:
    """Oscillation of (area primitive + 2 t angle) inside the reporting radius.

    The combination is constant along a self-expander at its own time; for
    open curves the default radius excludes the outer fifth, where end
    clamping injects non-flow motion.
    """
    curve, pinned = _as_curve(profile)
    radii = np.abs(curve.nodes)
    if reporting_radius is None:
        reporting_radius = float(radii.max())
        if not curve.closed:
            reporting_radius *= 0.8
    beta = liouville_primitive(curve, origin_pinned=pinned)
    theta = lagrangian_angle(curve, origin_pinned=pinned)
    combined = beta + 2.0 * t * theta
    inside = combined[radii <= reporting_radius]
    if inside.size == 0:
        raise ValueError("reporting radius excludes every node")
    return float(np.ptp(inside))


def self_similarity_check(
    trajectory: Sequence[FlowState],
    *,
    ball_radius: float = 10.0,
    rel_tolerance: float = 1e-3,
    time_offset: float = 1.0,
    component: int = 0,
) -> CheckReport:
    """Distance between the evolved curve and the dilated initial one.

    A self-expanding initial curve taken as its own time-``time_offset``
    slice must track sqrt((time_offset + t) / time_offset) times itself.
    Distances are Hausdorff, restricted to the comparison ball; the verdict
    compares the worst sample against the tolerance times the diameter of
    the initial curve inside that ball.
    """
    params = {
        "ball_radius": ball_radius,
        "rel_tolerance": rel_tolerance,
        "time_offset": time_offset,
        "component": component,
    }
    if not trajectory or component >= len(trajectory[0].components):
        return CheckReport("self_similarity", params, NOT_APPLICABLE,
                           {"reason": "component absent at start"})
    first = trajectory[0]
    base = first.components[component].curve
    inside = base.nodes[np.abs(base.nodes) <= ball_radius]
    if inside.size < 2:
        return CheckReport("self_similarity", params, NOT_APPLICABLE,
                           {"reason": "initial curve misses the comparison ball"})
    scale_diameter = float(
        np.hypot(np.ptp(inside.real), np.ptp(inside.imag))
    )
    times, distances = [], []
    for state in trajectory:
        if component >= len(state.components):
            break
        factor = np.sqrt((time_offset + state.time) / (time_offset + first.time))
        expected = PlanarCurve(factor * base.nodes, closed=base.closed)
        evolved = state.components[component].curve
        times.append(state.time)
        distances.append(hausdorff_distance(evolved, expected, within=ball_radius))
    series = TimeSeries("tracking_distance", tuple(times), tuple(distances))
    worst = max(distances)
    threshold = rel_tolerance * scale_diameter
    verdict = PASS if worst <= threshold else FAIL
    details = {
        "max_distance": worst,
        "threshold": threshold,
        "scale_diameter": scale_diameter,
    }
    return CheckReport("self_similarity", params, verdict, details, series)


def beta_theta_check(
    trajectory: Sequence[FlowState],
    *,
    sim_time: float = 0.0,
    time_offset: float = 1.0,
    rel_tolerance: float = 1e-3,
    component: int = 0,
    reporting_radius: float | None = None,
) -> CheckReport:
    """Verdict wrapper around the angle-combination oscillation.

    Evaluates at the sample nearest ``sim_time``; the curve's own time is
    ``time_offset`` plus its sample time.  The oscillation is compared to
    the tolerance times the squared curve diameter, the natural scale of an
    area primitive.
    """
    params = {
        "sim_time": sim_time,
        "time_offset": time_offset,
        "rel_tolerance": rel_tolerance,
        "component": component,
    }
    usable = [st for st in trajectory if component < len(st.components)]
    if not usable:
        return CheckReport("beta_theta", params, NOT_APPLICABLE,
                           {"reason": "component absent"})
    state = min(usable, key=lambda st: abs(st.time - sim_time))
    comp = state.components[component]
    value = beta_theta_invariant(
        comp, t=time_offset + state.time, reporting_radius=reporting_radius
    )
    threshold = rel_tolerance * comp.curve.bbox_diameter**2
    verdict = PASS if value < threshold else FAIL
    details = {
        "oscillation": value,
        "threshold": threshold,
        "sampled_time": state.time,
    }
    return CheckReport("beta_theta", params, verdict, details)


def _radius_crossing(curve: PlanarCurve, radius: float, last: bool) -> tuple[int, float] | None:
    """Segment index and fraction where |z| first (or last) crosses ``radius``."""
    r = np.abs(curve.nodes)
    lo, hi = r[:-1], r[1:]
    hits = np.flatnonzero(((lo - radius) * (hi - radius) <= 0.0) & (np.abs(hi - lo) > 1e-12))
    if hits.size == 0:
        return None
    k = int(hits[-1] if last else hits[0])
    return k, float((radius - r[k]) / (r[k + 1] - r[k]))


def angle_jump_tracker(
    trajectory: Sequence[FlowState],
    r_a: float,
    r_b: float,
    *,
    component: int = 0,
) -> CheckReport:
    """Angle difference between the two anchor circles, tracked over time.

    The tracked value is the continuous angle lift at the last crossing of
    the outer circle minus the lift at the first crossing of the inner one;
    anchor shifts cancel in the difference.  Samples that miss an anchor are
    logged and skipped.  The report lists every consecutive change exceeding
    half a turn as a jump, plus a Lipschitz estimate from the smooth samples.
    """
    if not 0.0 < r_a < r_b:
        raise ValueError("anchor radii must satisfy 0 < r_a < r_b")
    times, values, missing = [], [], []
    for state in trajectory:
        if component >= len(state.components):
            missing.append(state.time)
            continue
        comp = state.components[component]
        inner = _radius_crossing(comp.curve, r_a, last=False)
        outer = _radius_crossing(comp.curve, r_b, last=True)
        if inner is None or outer is None:
            missing.append(state.time)
            continue
        theta = lagrangian_angle(comp.curve, origin_pinned=comp.origin_pinned)
        (ka, fa), (kb, fb) = inner, outer
        theta_a = theta[ka] + fa * (theta[ka + 1] - theta[ka])
        theta_b = theta[kb] + fb * (theta[kb + 1] - theta[kb])
        times.append(state.time)
        values.append(float(theta_b - theta_a))

    jumps = []
    slopes = []
    for k in range(1, len(times)):
        delta = values[k] - values[k - 1]
        if abs(delta) > np.pi:
            jumps.append({"time": times[k], "magnitude": delta})
        elif times[k] > times[k - 1]:
            slopes.append(abs(delta) / (times[k] - times[k - 1]))
    details = {
        "jumps": jumps,
        "missing_times": missing,
        "lipschitz_estimate": max(slopes) if slopes else 0.0,
    }
    verdict = PASS if not missing else UNRELIABLE
    series = TimeSeries("angle_difference", tuple(times), tuple(values))
    return CheckReport(
        "angle_jump", {"r_a": r_a, "r_b": r_b, "component": component},
        verdict, details, series,
    )


def loop_area_law_check(
    trajectory: Sequence[FlowState],
    *,
    component: int = 0,
    rel_tolerance: float = 0.05,
) -> CheckReport:
    """Measured loop-area rate against the turning-plus-flux prediction.

    Tracks the largest loop of the component while one persists; the rate is
    a centered difference at the sampling stride.  Samples whose loop has
    shrunk under ten spacings are reported but not judged: the polygon is no
    longer resolved there.
    """
    params = {"component": component, "rel_tolerance": rel_tolerance}
    samples = []
    last_t = None
    for state in trajectory:
        if component >= len(state.components):
            break
        if last_t is not None and state.time <= last_t:
            continue
        curve = state.components[component].curve
        loops = extract_loops(curve)
        if not loops:
            break
        loop = max(loops, key=lambda lp: abs(lp.area))
        spacing = float(np.median(curve.segment_lengths()))
        samples.append(
            (state.time, abs(loop.area), loop_area_rate(loop), loop.diameter(), spacing)
        )
        last_t = state.time

    if len(samples) < 10:
        return CheckReport(
            "loop_area_law", params, NOT_APPLICABLE,
            {"reason": f"loop tracked over {len(samples)} samples; need 10"},
        )
    times, residuals, judged = [], [], []
    for k in range(1, len(samples) - 1):
        t0, a0, _, _, _ = samples[k - 1]
        tk, _, predicted, diameter, spacing = samples[k]
        t1, a1, _, _, _ = samples[k + 1]
        measured = (a1 - a0) / (t1 - t0)
        residual = measured - predicted
        times.append(tk)
        residuals.append(residual)
        if diameter > 10.0 * spacing:
            judged.append(abs(residual) / max(abs(predicted), 1e-12))
    series = TimeSeries("area_rate_residual", tuple(times), tuple(residuals))
    if not judged:
        return CheckReport(
            "loop_area_law", params, NOT_APPLICABLE,
            {"reason": "no resolved samples"}, series,
        )
    worst = max(judged)
    verdict = PASS if worst < rel_tolerance else FAIL
    details = {"max_rel_residual": worst, "resolved_samples": len(judged)}
    return CheckReport("loop_area_law", params, verdict, details, series)


def intersection_count_series(
    trajectory: Sequence[FlowState],
    reference=None,
    *,
    component: int = 0,
    exclude_radius: float = 0.0,
) -> CheckReport:
    """Crossing counts over time; they must never increase.

    ``reference`` selects what to intersect with: None counts the curve's
    own crossings, a PlanarCurve is a stationary obstacle, an integer names
    a co-evolved component of the same states, and a second trajectory is
    paired sample by sample.  Tangential near-misses make the affected
    samples untrustworthy; if the count ever rises at such a sample the
    verdict is UNRELIABLE rather than FAIL.
    """
    params = {"component": component, "exclude_radius": exclude_radius}
    times, counts, trusted = [], [], []
    for k, state in enumerate(trajectory):
        if component >= len(state.components):
            break
        curve = state.components[component].curve
        if reference is None:
            found = [c for c in self_intersections(curve) if abs(c.point) > exclude_radius]
        elif isinstance(reference, PlanarCurve):
            found = crossings_between(curve, reference, exclude_radius=exclude_radius)
        elif isinstance(reference, int):
            if reference >= len(state.components):
                break
            found = crossings_between(
                curve, state.components[reference].curve, exclude_radius=exclude_radius
            )
        else:
            other = reference[k].components[component].curve
            found = crossings_between(curve, other, exclude_radius=exclude_radius)
        times.append(state.time)
        counts.append(len(found))
        trusted.append(all(c.reliable for c in found))

    series = TimeSeries("crossing_count", tuple(times), tuple(float(c) for c in counts))
    rises, excusable = [], []
    for k in range(1, len(counts)):
        if counts[k] > counts[k - 1]:
            rises.append(times[k])
            excusable.append(not (trusted[k] and trusted[k - 1]))
    if not rises:
        verdict = PASS
    elif all(excusable):
        verdict = UNRELIABLE
    else:
        verdict = FAIL
    shaky = [t for t, ok in zip(times, trusted) if not ok]
    details = {"rise_times": rises, "unreliable_times": shaky}
    return CheckReport("intersection_count", params, verdict, details, series)


def singular_time_bound_check(
    trajectory: Sequence[FlowState],
    *,
    component: int = 0,
) -> CheckReport:
    """Collapse must happen before the start area over pi runs out.

    The bound follows from the loop losing area at a bounded rate; it only
    applies to a loop that avoids the origin.  The measured collapse time is
    the first logged collapse event for the component.
    """
    params = {"component": component}
    first = trajectory[0]
    if component >= len(first.components):
        return CheckReport("singular_time_bound", params, NOT_APPLICABLE,
                           {"reason": "component absent at start"})
    loops = extract_loops(first.components[component].curve)
    if not loops:
        return CheckReport("singular_time_bound", params, NOT_APPLICABLE,
                           {"reason": "no tracked loop at start"})
    loop = max(loops, key=lambda lp: abs(lp.area))
    if loop.winds_origin != 0:
        return CheckReport("singular_time_bound", params, NOT_APPLICABLE,
                           {"reason": "loop winds the origin; area bound not applicable"})
    t_start = first.time
    bound = t_start + abs(loop.area) / np.pi
    times = [st.time for st in trajectory]
    stride = float(np.median(np.diff(times))) if len(times) > 1 else 0.0

    collapse = None
    for event in trajectory[-1].events:
        if event.kind == "loop_collapse" and event.payload.get("component") == component:
            collapse = event.time
            break
    details = {
        "T_collapse_measured": collapse,
        "bound": bound,
        "stride": stride,
        "start_area": abs(loop.area),
    }
    if collapse is None:
        final = trajectory[-1].time
        if final >= bound:
            details["reason"] = "no collapse although the run outlasted the bound"
            return CheckReport("singular_time_bound", params, FAIL, details)
        details["reason"] = "run ended before the bound with no collapse"
        return CheckReport("singular_time_bound", params, NOT_APPLICABLE, details)
    details["margin"] = bound + stride - collapse
    verdict = PASS if collapse <= bound + stride else FAIL
    return CheckReport("singular_time_bound", params, verdict, details)
