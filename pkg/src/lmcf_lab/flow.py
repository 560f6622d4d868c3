"""Time integration of the reduced curve flow.

The evolution law is dx/dt = curvature vector - forcing, where the forcing is
the component of the position perpendicular to the curve divided by |x|^2.
Time carries units of length squared.  Stepping is explicit midpoint (RK2)
under a parabolic step bound dt = cfl_factor * min_spacing^2.

Boundary handling per component:

* origin-pinned profiles keep node 0 exactly at (0, 0);
* an open far end is either re-projected onto a ray through the origin after
  every substep (when the end follows such a ray) or held fixed;
* closed curves evolve freely.

States are immutable; every step returns a replacement, so a caller can keep
any snapshot for diffing.  Runs are deterministic for a fixed configuration:
components are visited in order and nothing reads a clock or an RNG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Mapping

import numpy as np
from numpy.typing import NDArray

from .curves import (
    EquivariantProfile,
    PlanarCurve,
    circumcircle_curvature,
    frames,
    resample,
    rotation_index,
)
from .errors import (
    DegenerateCurveError,
    FlowStallError,
    NumericalBlowupError,
    SingularForcingError,
    UnsupportedSurgeryError,
)
from .intersections import LoopDescriptor, extract_loops, self_intersections

# An off-pin node this close to the origin makes the forcing meaningless.
ORIGIN_EPS = 1e-8

# Steps below this duration indicate a collapsed spacing; refuse to crawl.
DT_FLOOR = 1e-14

# Nodes smoothed around a surgery junction.
MOLLIFY_WINDOW = 5

# Junction neighbors closer than this fraction of the median spacing merge
# into the junction node to keep the step bound healthy.
JUNCTION_MERGE_FRACTION = 0.3


@dataclass(frozen=True)
class FlowComponent:
    """One evolving curve plus its boundary handling.

    ``start_ray``/``end_ray`` give the direction of the origin ray an open
    end is projected back onto after each substep; ``None`` holds that end
    fixed instead.  A pinned component starts at the origin and keeps node 0
    there.  Closed curves take no boundary options.
    """

    curve: PlanarCurve
    origin_pinned: bool = False
    start_ray: float | None = None
    end_ray: float | None = None
    label: str = "curve"

    def __post_init__(self) -> None:
        if self.curve.closed:
            if self.origin_pinned or self.start_ray is not None or self.end_ray is not None:
                raise ValueError("closed components take no pin or end rays")
        if self.origin_pinned:
            if self.curve.nodes[0] != 0:
                raise ValueError("pinned component must start exactly at the origin")
            if self.start_ray is not None:
                raise ValueError("a pinned start is already constrained; drop start_ray")

    def with_curve(self, curve: PlanarCurve) -> "FlowComponent":
        return replace(self, curve=curve)


@dataclass(frozen=True)
class StepStats:
    """Footprint of the most recent step."""

    dt: float = 0.0
    max_speed: float = 0.0
    max_curvature: float = 0.0


@dataclass(frozen=True)
class Event:
    """One append-only log entry; payload values are JSON-encodable."""

    kind: str
    time: float
    payload: dict


@dataclass(frozen=True)
class FlowState:
    """Snapshot of an evolving configuration."""

    time: float
    components: tuple[FlowComponent, ...]
    step_stats: StepStats = StepStats()
    events: tuple[Event, ...] = ()
    step_count: int = 0


@dataclass(frozen=True)
class FlowConfig:
    """Step-size, boundary, and detection settings.

    ``surgery_area_threshold`` defaults to (3 * target_spacing)^2, the area
    below which a loop is unresolvable at the working spacing.
    """

    target_spacing: float
    max_time: float
    cfl_factor: float = 0.25
    truncation_radius: float = 30.0
    surgery_area_threshold: float | None = None
    curvature_blowup_threshold: float = 1.0
    resample_period: int = 25

    def __post_init__(self) -> None:
        if self.target_spacing <= 0 or self.max_time <= 0:
            raise ValueError("target_spacing and max_time must be positive")
        if not 0.0 < self.cfl_factor <= 0.5:
            raise ValueError("cfl_factor must lie in (0, 0.5]")
        if self.truncation_radius <= 0 or self.curvature_blowup_threshold <= 0:
            raise ValueError("thresholds must be positive")
        if self.surgery_area_threshold is not None and self.surgery_area_threshold <= 0:
            raise ValueError("surgery_area_threshold must be positive")
        if self.resample_period < 1:
            raise ValueError("resample_period must be >= 1")

    def area_threshold(self) -> float:
        if self.surgery_area_threshold is not None:
            return self.surgery_area_threshold
        return (3.0 * self.target_spacing) ** 2


@dataclass(frozen=True)
class SingularityEvent:
    """Detection result: a collapsing loop or a curvature blowup."""

    kind: str
    component_index: int
    loop: LoopDescriptor | None
    payload: dict


@dataclass(frozen=True)
class TimeSeries:
    """Sampled scalar with its sample times."""

    name: str
    times: tuple[float, ...]
    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.times)


def as_component(obj) -> FlowComponent:
    """Wrap a profile or bare curve as a FlowComponent.

    A profile pins the origin and projects its far end onto the recorded
    asymptote ray.  A bare open curve gets both ends held fixed; a closed
    curve evolves freely.
    """
    if isinstance(obj, FlowComponent):
        return obj
    if isinstance(obj, EquivariantProfile):
        return FlowComponent(
            curve=obj.curve,
            origin_pinned=True,
            end_ray=obj.asymptote_angle,
            label="profile",
        )
    if isinstance(obj, PlanarCurve):
        return FlowComponent(curve=obj)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a flow component")


def initial_state(components, *, time: float = 0.0) -> FlowState:
    """Bundle components (profiles, curves, or FlowComponents) into a state."""
    comps = tuple(as_component(c) for c in components)
    if not comps:
        raise ValueError("a flow needs at least one component")
    return FlowState(time=time, components=comps)


def _raw_velocity(comp: FlowComponent) -> tuple[NDArray[np.complex128], float]:
    """Per-node velocity of the flow law, plus the max |curvature| seen.

    Off the origin: curvature vector minus the perpendicular part of the
    position over |z|^2.  At a pinned origin node the forcing limit cancels
    half the curvature, leaving half the one-sided osculating curvature
    vector.
    """
    curve = comp.curve
    z = curve.nodes
    fr = frames(curve, origin_pinned=comp.origin_pinned)
    radii = np.abs(z)
    interior = radii[1:] if comp.origin_pinned else radii
    if np.any(interior < ORIGIN_EPS):
        idx = int(np.argmax(interior < ORIGIN_EPS)) + (1 if comp.origin_pinned else 0)
        raise SingularForcingError(
            f"node {idx} of component '{comp.label}' is within {ORIGIN_EPS:g} of the origin"
        )
    tang = (np.conj(fr.tangent) * z).real * fr.tangent
    with np.errstate(divide="ignore", invalid="ignore"):
        forcing = (z - tang) / radii**2
    velocity = fr.curvature_vector - forcing
    if comp.origin_pinned:
        k0 = circumcircle_curvature(z[0], z[1], z[2])
        velocity[0] = 0.5 * k0 * (1j * fr.tangent[0])
    return velocity, float(np.abs(fr.curvature).max())


def velocity_field(obj) -> NDArray[np.complex128]:
    """Per-node velocity (length/time) for a component, profile, or curve."""
    velocity, _ = _raw_velocity(as_component(obj))
    return velocity


def _step_velocity(comp: FlowComponent) -> tuple[NDArray[np.complex128], float]:
    """Velocity with fixed ends zeroed (two nodes per held end)."""
    velocity, kmax = _raw_velocity(comp)
    if not comp.curve.closed:
        if not comp.origin_pinned and comp.start_ray is None:
            velocity[:2] = 0.0
        if comp.end_ray is None:
            velocity[-2:] = 0.0
    return velocity, kmax


def _apply_constraints(comp: FlowComponent, nodes: NDArray[np.complex128]) -> NDArray[np.complex128]:
    if comp.curve.closed:
        return nodes
    if comp.origin_pinned:
        nodes[0] = 0.0
    elif comp.start_ray is not None:
        u = np.exp(1j * comp.start_ray)
        nodes[:2] = u * (nodes[:2] * np.conj(u)).real
    if comp.end_ray is not None:
        u = np.exp(1j * comp.end_ray)
        nodes[-2:] = u * (nodes[-2:] * np.conj(u)).real
    return nodes


def _min_spacing(components: tuple[FlowComponent, ...]) -> float:
    return min(float(c.curve.segment_lengths().min()) for c in components)


def _attach_state(err: Exception, state: FlowState) -> Exception:
    err.state = state
    return err


def _advance(
    comp: FlowComponent,
    velocity: NDArray[np.complex128],
    dt: float,
    state: FlowState,
) -> FlowComponent:
    """Move a component by dt * velocity, re-applying its constraints."""
    nodes = _apply_constraints(comp, comp.curve.nodes + dt * velocity)
    if not np.all(np.isfinite(nodes.view(np.float64))):
        raise _attach_state(
            NumericalBlowupError(f"non-finite positions in component '{comp.label}'"), state
        )
    return comp.with_curve(PlanarCurve(nodes, closed=comp.curve.closed))


def step(state: FlowState, config: FlowConfig) -> FlowState:
    """One explicit midpoint step for every component, under one shared dt."""
    comps = state.components
    if not comps:
        raise ValueError("cannot step a state with no components")
    spacing = _min_spacing(comps)
    # Plain multiplication: spacing * spacing overflows to inf instead of
    # raising, so absurd scales still reach the blowup check below.
    dt = config.cfl_factor * spacing * spacing
    if dt < DT_FLOOR:
        raise _attach_state(FlowStallError(f"time step {dt:.3e} fell below {DT_FLOOR:g}"), state)

    try:
        starts = [_step_velocity(c) for c in comps]
        mids = [_advance(c, v, 0.5 * dt, state) for c, (v, _) in zip(comps, starts)]
        finals = [_step_velocity(m) for m in mids]
    except SingularForcingError as err:
        raise _attach_state(err, state)

    max_speed = 0.0
    max_curv = 0.0
    new_comps = []
    for comp, (velocity, kmax) in zip(comps, finals):
        max_speed = max(max_speed, float(np.abs(velocity).max()))
        max_curv = max(max_curv, kmax)
        new_comps.append(_advance(comp, velocity, dt, state))

    count = state.step_count + 1
    if count % config.resample_period == 0:
        new_comps = [_resample_component(c, config) for c in new_comps]
    return FlowState(
        time=state.time + dt,
        components=tuple(new_comps),
        step_stats=StepStats(dt=dt, max_speed=max_speed, max_curvature=max_curv),
        events=state.events,
        step_count=count,
    )


def _resample_component(comp: FlowComponent, config: FlowConfig) -> FlowComponent:
    """Redistribute nodes; leave curves too short to resample untouched.

    Open curves are the computational window onto unbounded profiles, so
    tail runs that wander past the truncation radius are dropped here; the
    end constraints then act at the new last nodes.
    """
    curve = comp.curve
    if not curve.closed:
        inside = np.flatnonzero(np.abs(curve.nodes) <= config.truncation_radius)
        if inside.size >= 4 and (inside[0] > 0 or inside[-1] < curve.n - 1):
            trimmed = curve.nodes[inside[0] : inside[-1] + 1]
            curve = PlanarCurve(trimmed, closed=False)
    try:
        curve = resample(curve, config.target_spacing)
    except DegenerateCurveError:
        return comp
    nodes = _apply_constraints(comp, curve.nodes.copy())
    return comp.with_curve(PlanarCurve(nodes, closed=curve.closed))


def loop_area_rate(loop: LoopDescriptor) -> float:
    """Model rate of change of the loop's positive area.

    For a crossing loop the enclosed area changes at the exterior angle minus
    one full turn, with an extra full turn of flux per origin winding.  A
    whole closed component contributes its rotation index instead of the
    exterior-angle term.
    """
    if loop.area >= 0.0:
        alpha, winds = loop.exterior_angle, loop.winds_origin
    else:
        alpha, winds = -loop.exterior_angle, -loop.winds_origin
    if loop.crossing is None:
        turning = 2.0 * np.pi * abs(round(rotation_index(PlanarCurve(loop.polygon, closed=True))))
        return -turning - 2.0 * np.pi * abs(winds)
    return alpha - 2.0 * np.pi - 2.0 * np.pi * abs(winds)


def detect_singularity(state: FlowState, config: FlowConfig) -> SingularityEvent | None:
    """Query for a resolvable collapse or a curvature blowup; no mutation.

    A loop counts as collapsing when its area drops below the surgery
    threshold and its diameter below ten spacings.  Among simultaneous
    candidates the smallest area wins, so replay order is deterministic.
    A collapse location near the origin is flagged anomalous in the payload;
    the supported mechanism only pinches away from the origin.
    """
    candidates = []
    for index, comp in enumerate(state.components):
        for loop in extract_loops(comp.curve):
            area = abs(loop.area)
            if area < config.area_threshold() and loop.diameter() < 10.0 * config.target_spacing:
                candidates.append((area, index, loop))
    if candidates:
        area, index, loop = min(candidates, key=lambda c: (c[0], c[1]))
        if loop.crossing is not None:
            location = loop.crossing.point
        else:
            location = complex(loop.polygon.mean())
        rate = loop_area_rate(loop)
        payload = {
            "component": index,
            "label": state.components[index].label,
            "area": loop.area,
            "diameter": loop.diameter(),
            "winds_origin": loop.winds_origin,
            "point": [location.real, location.imag],
            "whole_component": loop.crossing is None,
            "near_origin": abs(location) < 10.0 * config.target_spacing,
        }
        if rate < 0.0:
            payload["t_singular"] = state.time + area / (-rate)
        return SingularityEvent("loop_collapse", index, loop, payload)

    spacing = _min_spacing(state.components) if state.components else 0.0
    for index, comp in enumerate(state.components):
        fr = frames(comp.curve, origin_pinned=comp.origin_pinned)
        product = float(np.abs(fr.curvature).max()) * spacing
        if product > config.curvature_blowup_threshold:
            payload = {
                "component": index,
                "label": comp.label,
                "curvature_times_spacing": product,
                "max_curvature": float(np.abs(fr.curvature).max()),
            }
            return SingularityEvent("blowup", index, None, payload)
    return None


def _mollify(nodes: NDArray[np.complex128], center: int, closed: bool, locked: set[int]) -> None:
    """Two smoothing passes over a 5-node window centered at ``center``.

    Window nodes average with their neighbors (weights 1/4, 1/2, 1/4);
    indices in ``locked`` and open-curve endpoints stay put.
    """
    n = nodes.shape[0]
    half = MOLLIFY_WINDOW // 2
    for _ in range(2):
        src = nodes.copy()
        for off in range(-half, half + 1):
            k = (center + off) % n if closed else center + off
            if not closed and not 0 < k < n - 1:
                continue
            if k in locked or (closed and n < 3):
                continue
            before = src[(k - 1) % n]
            after = src[(k + 1) % n]
            nodes[k] = 0.25 * before + 0.5 * src[k] + 0.25 * after


def surgery(state: FlowState, loop: LoopDescriptor, *, component_index: int = 0) -> FlowState:
    """Excise a collapsed crossing loop and rejoin the curve at the crossing.

    The junction gets the crossing point as a new node, absorbs neighbors
    closer than a fraction of the median spacing, and is mollified over a
    five-node window.  The event logs rotation indices and crossing counts
    on both sides.  Loops winding the origin are refused: the supported
    pinch-off happens away from the origin, and rejoining through it would
    change the surface topology in an uncontrolled way.
    """
    if loop.crossing is None:
        raise ValueError("whole-component collapse is extinction, not surgery")
    if loop.winds_origin != 0:
        raise _attach_state(
            UnsupportedSurgeryError(
                f"loop winds the origin {loop.winds_origin} time(s); cannot rejoin"
            ),
            state,
        )
    comp = state.components[component_index]
    curve = comp.curve
    z = curve.nodes
    n = z.shape[0]
    pre_rotation = rotation_index(curve)
    pre_crossings = len(self_intersections(curve))

    last_excised = int(loop.node_indices[-1])
    if curve.closed:
        keep = [(last_excised + 1 + k) % n for k in range(n - loop.node_indices.shape[0])]
        nodes = np.concatenate(([loop.crossing.point], z[keep]))
        junction = 0
    else:
        i = loop.crossing.seg_a
        nodes = np.concatenate((z[: i + 1], [loop.crossing.point], z[last_excised + 1 :]))
        junction = i + 1

    med = float(np.median(np.abs(np.diff(z))))
    nodes, junction = _merge_junction_neighbors(nodes, junction, curve.closed, med)
    locked = {0} if comp.origin_pinned else set()
    _mollify(nodes, junction, curve.closed, locked)

    new_curve = PlanarCurve(_apply_constraints(comp, nodes), closed=curve.closed)
    event = Event(
        kind="surgery",
        time=state.time,
        payload={
            "component": component_index,
            "label": comp.label,
            "point": [loop.crossing.point.real, loop.crossing.point.imag],
            "area_excised": loop.area,
            "rotation_before": pre_rotation,
            "rotation_after": rotation_index(new_curve),
            "crossings_before": pre_crossings,
            "crossings_after": len(self_intersections(new_curve)),
        },
    )
    comps = list(state.components)
    comps[component_index] = comp.with_curve(new_curve)
    return replace(state, components=tuple(comps), events=state.events + (event,))


def _merge_junction_neighbors(
    nodes: NDArray[np.complex128], junction: int, closed: bool, median_spacing: float
) -> tuple[NDArray[np.complex128], int]:
    """Drop nodes adjacent to the junction that sit too close to it."""
    limit = JUNCTION_MERGE_FRACTION * median_spacing
    n = nodes.shape[0]
    drop = []
    for side in (-1, 1):
        k = (junction + side) % n if closed else junction + side
        if 0 <= k < n and k != junction and abs(nodes[k] - nodes[junction]) < limit:
            if closed or 0 < k < n - 1:
                drop.append(k)
    if drop:
        keep = np.ones(n, dtype=bool)
        keep[drop] = False
        junction -= sum(1 for k in drop if k < junction)
        nodes = nodes[keep]
    return nodes, junction


def _log(state: FlowState, kind: str, payload: dict) -> FlowState:
    return replace(state, events=state.events + (Event(kind, state.time, payload),))


def _handle_detections(
    state: FlowState, config: FlowConfig, sample: Callable[[FlowState], None]
) -> tuple[FlowState, bool]:
    """Resolve every pending detection; returns (state, terminal)."""
    for _ in range(32):
        found = detect_singularity(state, config)
        if found is None:
            return state, False
        if found.kind == "blowup":
            return _log(state, "blowup", found.payload), True
        state = _log(state, "loop_collapse", found.payload)
        if found.payload["near_origin"]:
            state = _log(state, "anomaly", dict(found.payload))
        if found.loop.crossing is None:
            comps = list(state.components)
            del comps[found.component_index]
            state = replace(state, components=tuple(comps))
            if not comps:
                return state, True
            continue
        sample(state)
        state = surgery(state, found.loop, component_index=found.component_index)
        sample(state)
    raise _attach_state(
        NumericalBlowupError("surgeries kept producing new collapse candidates"), state
    )


def run(
    state: FlowState,
    config: FlowConfig,
    hooks: Mapping[str, Callable[[FlowState], float]] | None = None,
    *,
    sample_stride: float | None = None,
    detect_period: int = 10,
    snapshot_callback: Callable[[FlowState], None] | None = None,
) -> tuple[FlowState, dict[str, TimeSeries]]:
    """Advance until max_time, extinction, or blowup; collect sampled series.

    Hooks map a name to a scalar function of the state; they are sampled at
    the start, at every crossing of ``sample_stride`` (default: max_time/64),
    around each surgery (immediately before and after), and at the end.  The
    snapshot callback fires at the same moments with the full state.  Step
    errors propagate with the last good state attached as ``err.state``.
    """
    hooks = dict(hooks or {})
    stride = sample_stride if sample_stride is not None else config.max_time / 64.0
    if stride <= 0:
        raise ValueError("sample_stride must be positive")
    series: dict[str, tuple[list[float], list[float]]] = {name: ([], []) for name in hooks}

    def sample(st: FlowState) -> None:
        for name, fn in hooks.items():
            times, values = series[name]
            times.append(st.time)
            values.append(float(fn(st)))
        if snapshot_callback is not None:
            snapshot_callback(st)

    sample(state)
    terminal = False
    while not terminal and state.time < config.max_time and state.components:
        bucket = math.floor(state.time / stride)
        state = step(state, config)
        if detect_period and state.step_count % detect_period == 0:
            state, terminal = _handle_detections(state, config, sample)
        if state.components and math.floor(state.time / stride) > bucket:
            sample(state)
    if state.components and not terminal:
        state, _ = _handle_detections(state, config, sample)
    sample(state)
    bundle = {
        name: TimeSeries(name=name, times=tuple(ts), values=tuple(vs))
        for name, (ts, vs) in series.items()
    }
    return state, bundle
