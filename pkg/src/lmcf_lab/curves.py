"""Planar polyline curves and the discrete geometry used by the reduced flow.

Conventions used throughout the package:

* Curves live in the complex plane; a node array is complex128 of shape (n,).
* The unit tangent ``T`` follows node order; the unit normal is ``N = i*T``
  (tangent rotated by +pi/2).  Signed curvature ``k`` is defined so that the
  curvature vector is ``k * N``; a counterclockwise circle has ``k = +1/r``.
* Arclength is chord arclength of the polyline.
* Time, where it appears, carries units of length squared.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.interpolate import CubicSpline

from .errors import BranchCutError, DegenerateCurveError, SingularAngleError

# Consecutive nodes closer than this fraction of the bounding-box diameter are
# treated as coincident and rejected at construction time.
COINCIDENCE_RTOL = 1e-12

# Largest allowed ratio of adjacent segment lengths after a resample.
SPACING_RATIO_LIMIT = 1.5


def _as_complex_nodes(nodes) -> NDArray[np.complex128]:
    arr = np.asarray(nodes)
    if arr.ndim == 2 and arr.shape[1] == 2:
        arr = arr[:, 0] + 1j * arr[:, 1]
    arr = np.asarray(arr, dtype=np.complex128)
    if arr.ndim != 1:
        raise DegenerateCurveError(f"node array must be 1-d, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class PlanarCurve:
    """Ordered polyline, open or closed.

    A closed curve never repeats its first node; the wrap-around segment is
    implicit.  Node arrays are copied and frozen at construction.
    """

    nodes: NDArray[np.complex128]
    closed: bool = False

    def __post_init__(self) -> None:
        arr = _as_complex_nodes(self.nodes).copy()
        if arr.shape[0] < 3:
            raise DegenerateCurveError(f"curve needs >= 3 nodes, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise DegenerateCurveError("curve contains non-finite nodes")
        diam = self._bbox_diameter(arr)
        seg = np.abs(np.diff(arr))
        if self.closed:
            seg = np.append(seg, abs(arr[0] - arr[-1]))
        if np.any(seg <= COINCIDENCE_RTOL * max(diam, 1e-300)):
            i = int(np.argmin(seg))
            raise DegenerateCurveError(
                f"consecutive nodes {i},{i + 1} coincide within {COINCIDENCE_RTOL:g} x diameter"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "nodes", arr)

    @staticmethod
    def _bbox_diameter(arr: NDArray[np.complex128]) -> float:
        dx = float(arr.real.max() - arr.real.min())
        dy = float(arr.imag.max() - arr.imag.min())
        return float(np.hypot(dx, dy))

    @property
    def n(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def bbox_diameter(self) -> float:
        return self._bbox_diameter(self.nodes)

    def segment_vectors(self) -> NDArray[np.complex128]:
        """Vector of each polyline segment, including the wrap segment if closed."""
        if self.closed:
            return np.roll(self.nodes, -1) - self.nodes
        return np.diff(self.nodes)

    def segment_lengths(self) -> NDArray[np.float64]:
        return np.abs(self.segment_vectors())

    def arclength(self) -> float:
        return float(self.segment_lengths().sum())

    def cumulative_arclength(self) -> NDArray[np.float64]:
        """Arclength coordinate of every node, starting at 0."""
        seg = np.abs(np.diff(self.nodes))
        return np.concatenate(([0.0], np.cumsum(seg)))

    def reversed(self) -> "PlanarCurve":
        return PlanarCurve(self.nodes[::-1].copy(), closed=self.closed)

    def with_nodes(self, nodes) -> "PlanarCurve":
        return PlanarCurve(nodes, closed=self.closed)

    def diameter(self) -> float:
        """Exact diameter of the node set (max pairwise distance)."""
        pts = self.nodes
        if pts.shape[0] > 600:
            # Hull-free estimate is fine for large n: bbox diameter bounds the
            # true diameter within sqrt(2) and every caller treats this as a scale.
            return self.bbox_diameter
        d = np.abs(pts[:, None] - pts[None, :])
        return float(d.max())


@dataclass(frozen=True)
class EquivariantProfile:
    """A curve generating an equivariant surface: node 0 is the origin.

    ``asymptote_angle`` is the direction of the ray the far end follows;
    ``cone_param`` optionally records the sector half-gap the curve is known
    to stay inside (None when not applicable).
    """

    curve: PlanarCurve
    asymptote_angle: float
    cone_param: float | None = None
    # Dimensionless bound for the odd-symmetry surrogate at the origin:
    # |osculating curvature| * first spacing must stay below this.
    origin_smoothness_tol: float = 0.05

    def __post_init__(self) -> None:
        z = self.curve.nodes
        if self.curve.closed:
            raise DegenerateCurveError("a profile is an open curve")
        if z[0] != 0:
            raise DegenerateCurveError("profile node 0 must be exactly the origin")
        k0 = circumcircle_curvature(z[0], z[1], z[2])
        if abs(k0) * abs(z[1]) > self.origin_smoothness_tol:
            raise DegenerateCurveError(
                "profile fails the odd-symmetry surrogate at the origin: "
                f"|curvature|*spacing = {abs(k0) * abs(z[1]):.3g} > {self.origin_smoothness_tol:g}"
            )

    @property
    def nodes(self) -> NDArray[np.complex128]:
        return self.curve.nodes

    def with_curve(self, curve: PlanarCurve) -> "EquivariantProfile":
        return EquivariantProfile(
            curve, self.asymptote_angle, self.cone_param, self.origin_smoothness_tol
        )


@dataclass(frozen=True)
class Frames:
    """Per-node discrete frame: unit tangent, unit normal, signed curvature."""

    tangent: NDArray[np.complex128]
    normal: NDArray[np.complex128]
    curvature: NDArray[np.float64]

    @property
    def curvature_vector(self) -> NDArray[np.complex128]:
        return self.curvature * self.normal


def _cross(u: NDArray[np.complex128], v: NDArray[np.complex128]):
    """2-d cross product via complex parts: Im(conj(u) * v)."""
    return (np.conj(u) * v).imag


def circumcircle_curvature(a: complex, b: complex, c: complex) -> float:
    """Signed curvature of the circle through three points, evaluated at b.

    Positive when the triple turns counterclockwise.  Collinear triples give 0.
    """
    u = complex(b) - complex(a)
    v = complex(c) - complex(b)
    w = complex(c) - complex(a)
    denom = abs(u) * abs(v) * abs(w)
    if denom == 0.0:
        return 0.0
    cross = u.real * v.imag - u.imag * v.real
    return 2.0 * cross / denom


def frames(curve: PlanarCurve, *, origin_pinned: bool = False) -> Frames:
    """Discrete tangent/normal/curvature at every node.

    Tangents are normalized central differences (wrapping for closed curves,
    one-sided at open endpoints).  Curvature comes from the circumcircle of
    each node triple, which is exact on circles.  With ``origin_pinned`` the
    stencils at node 0 use the odd ghost nodes ``-z1, -z2``, so a genuinely
    odd-symmetric profile reports zero curvature there.
    """
    z = curve.nodes
    n = z.shape[0]
    if curve.closed:
        fwd = np.roll(z, -1)
        bwd = np.roll(z, 1)
        chord = fwd - bwd
        a, b, c = bwd, z, fwd
    else:
        chord = np.empty(n, dtype=np.complex128)
        chord[1:-1] = z[2:] - z[:-2]
        chord[0] = z[1] - z[0]
        chord[-1] = z[-1] - z[-2]
        a = np.concatenate(([z[0]], z[:-2], [z[-3]]))
        b = np.concatenate(([z[1]], z[1:-1], [z[-2]]))
        c = np.concatenate(([z[2]], z[2:], [z[-1]]))
        if origin_pinned:
            # Odd ghost continuation through the origin node.
            chord[0] = z[1] - (-z[1])
            a[0], b[0], c[0] = -z[1], z[0], z[1]

    norm = np.abs(chord)
    if np.any(norm == 0.0):
        raise DegenerateCurveError("zero-length tangent chord")
    tangent = chord / norm

    u = b - a
    v = c - b
    w = c - a
    denom = np.abs(u) * np.abs(v) * np.abs(w)
    kappa = np.zeros(n, dtype=np.float64)
    ok = denom > 0.0
    kappa[ok] = 2.0 * _cross(u[ok], v[ok]) / denom[ok]
    if origin_pinned and not curve.closed:
        # Scalar evaluation avoids fused-multiply rounding, so an exactly
        # symmetric ghost triple yields exactly zero curvature.
        kappa[0] = circumcircle_curvature(-z[1], z[0], z[1])
    return Frames(tangent=tangent, normal=1j * tangent, curvature=kappa)


def resample(curve: PlanarCurve, target_spacing: float) -> PlanarCurve:
    """Redistribute nodes uniformly in arclength at roughly ``target_spacing``.

    Positions are interpolated with an arclength-parametrized cubic spline
    (periodic for closed curves), which keeps the systematic shrink of linear
    chord interpolation out of long runs.  Endpoints of open curves are
    preserved exactly.
    """
    if target_spacing <= 0:
        raise ValueError("target_spacing must be positive")
    z = curve.nodes
    seg = np.abs(np.diff(z))
    if curve.closed:
        seg = np.append(seg, abs(z[0] - z[-1]))
    total = float(seg.sum())
    if total < 3.0 * target_spacing:
        raise DegenerateCurveError(
            f"curve of length {total:.3g} shorter than 3 x target spacing {target_spacing:.3g}"
        )
    s = np.concatenate(([0.0], np.cumsum(seg)))
    if curve.closed:
        vals = np.concatenate((z, z[:1]))
        spline_x = CubicSpline(s, vals.real, bc_type="periodic")
        spline_y = CubicSpline(s, vals.imag, bc_type="periodic")
        n_new = max(int(round(total / target_spacing)), 3)
        s_new = np.linspace(0.0, total, n_new, endpoint=False)
    else:
        spline_x = CubicSpline(s, z.real, bc_type="natural")
        spline_y = CubicSpline(s, z.imag, bc_type="natural")
        n_new = max(int(round(total / target_spacing)) + 1, 3)
        s_new = np.linspace(0.0, total, n_new)
    out = spline_x(s_new) + 1j * spline_y(s_new)
    if not curve.closed:
        out[0] = z[0]
        out[-1] = z[-1]
    return PlanarCurve(out, closed=curve.closed)


def lagrangian_angle(curve: PlanarCurve, *, origin_pinned: bool = False) -> NDArray[np.float64]:
    """Continuous lift of arg(z * T) along the curve.

    The lift is anchored so the value at the first off-origin node lies in
    (-pi, pi].  At a pinned origin node the angle is the along-curve limit,
    twice the tangent direction.  An interior node on the origin is an error.
    """
    z = curve.nodes
    fr = frames(curve, origin_pinned=origin_pinned)
    w = z * fr.tangent
    scale = max(curve.bbox_diameter, 1e-300)
    on_origin = np.abs(z) <= 1e-14 * scale
    if origin_pinned:
        interior_hits = np.flatnonzero(on_origin[1:]) + 1
    else:
        interior_hits = np.flatnonzero(on_origin)
    if interior_hits.size:
        raise SingularAngleError(f"node {int(interior_hits[0])} sits on the origin")
    if origin_pinned and on_origin[0]:
        w = w.copy()
        w[0] = fr.tangent[0] ** 2
    theta = np.unwrap(np.angle(w))
    anchor_idx = 1 if (origin_pinned and on_origin[0]) else 0
    # Shift by whole turns so theta[anchor] lands in (-pi, pi].
    shift = np.floor((theta[anchor_idx] + np.pi) / (2.0 * np.pi))
    theta = theta - 2.0 * np.pi * shift
    if theta[anchor_idx] <= -np.pi:
        theta = theta + 2.0 * np.pi
    return theta


def liouville_primitive(curve: PlanarCurve, *, origin_pinned: bool = False) -> NDArray[np.float64]:
    """Primitive of Im(conj(z) dz) along the curve, zero at node 0.

    The integrand per unit arclength is Im(conj(z) * T), whose magnitude equals
    the normal component |z - <z,T>T| of position.  On a radius-r circle about
    the origin the primitive grows exactly like r * s.
    """
    z = curve.nodes
    fr = frames(curve, origin_pinned=origin_pinned)
    f = (np.conj(z) * fr.tangent).imag
    ds = np.abs(np.diff(z))
    beta = np.concatenate(([0.0], np.cumsum(0.5 * (f[:-1] + f[1:]) * ds)))
    return beta


def h_length(curve: PlanarCurve) -> float:
    """Weighted length integral of |z| ds (trapezoid); 2*pi times it is the surface area."""
    z = curve.nodes
    r = np.abs(z)
    if curve.closed:
        r2 = np.append(r, r[0])
        z2 = np.append(z, z[0])
    else:
        r2, z2 = r, z
    ds = np.abs(np.diff(z2))
    return float(np.sum(0.5 * (r2[:-1] + r2[1:]) * ds))


def rotation_index(curve: PlanarCurve) -> float:
    """Total turning of the tangent divided by 2*pi.

    Computed from segment directions, so a closed polygon returns an exact
    integer; open arcs return the real-valued lift difference end minus start.
    """
    vec = curve.segment_vectors()
    ang = np.angle(vec)
    turns = np.diff(ang)
    if curve.closed:
        turns = np.append(turns, ang[0] - ang[-1])
    turns = (turns + np.pi) % (2.0 * np.pi) - np.pi
    return float(turns.sum() / (2.0 * np.pi))


def squaring_transform(curve: PlanarCurve) -> PlanarCurve:
    """Push the curve through z -> z^2 / 2 node-wise."""
    return PlanarCurve(curve.nodes**2 / 2.0, closed=curve.closed)


def _distance_to_polyline(points: NDArray[np.complex128], curve: PlanarCurve) -> NDArray[np.float64]:
    """Distance from each point to the nearest polyline segment of ``curve``."""
    z = curve.nodes
    p = np.append(z, z[:1]) if curve.closed else z
    a, r = p[:-1], np.diff(p)
    r2 = np.abs(r) ** 2
    out = np.empty(points.shape[0], dtype=np.float64)
    # Block over query points so the point-by-segment table stays small.
    for lo in range(0, points.shape[0], 256):
        x = points[lo : lo + 256, None]
        t = np.clip((np.conj(r) * (x - a)).real / r2, 0.0, 1.0)
        d = np.abs(x - (a + t * r))
        out[lo : lo + 256] = d.min(axis=1)
    return out


def hausdorff_distance(
    curve_a: PlanarCurve,
    curve_b: PlanarCurve,
    *,
    within: float | None = None,
) -> float:
    """Symmetric node-to-segment Hausdorff distance between two polylines.

    With ``within`` set, only source nodes inside the origin-centered ball of
    that radius contribute to either supremum; target distances still use the
    full polylines, so a truncation difference outside the ball is ignored.
    """
    sups = []
    for src, dst in ((curve_a, curve_b), (curve_b, curve_a)):
        pts = src.nodes
        if within is not None:
            pts = pts[np.abs(pts) <= within]
        if pts.shape[0]:
            sups.append(float(_distance_to_polyline(pts, dst).max()))
    if not sups:
        raise ValueError("no nodes inside the comparison ball")
    return max(sups)


def inverse_branch(
    offset: float,
    direction: float,
    branch: int = 0,
    *,
    extent: float = 8.0,
    spacing: float = 0.05,
) -> PlanarCurve:
    """One continuous preimage branch of a straight line under z -> z^2 / 2.

    The line is ``w(t) = i*offset*e^{i*direction} + t*e^{i*direction}``; its
    perpendicular distance from the origin is |offset| (units of length^2).  A
    line through the origin has no smooth branch (the preimage is a ray pair)
    and raises.  ``extent`` bounds the preimage radius |z|; ``branch`` in
    {0, 1} selects the component (branch 1 is the negation of branch 0).
    Branch 0 is oriented to end on the ray at angle ``direction / 2``; for a
    positive offset it starts on the ray a right angle above that.
    """
    if offset == 0.0:
        raise BranchCutError("line through the origin: preimage is a ray pair, not a branch")
    if branch not in (0, 1):
        raise ValueError("branch must be 0 or 1")
    if extent <= 0 or spacing <= 0:
        raise ValueError("extent and spacing must be positive")
    # Parametrize t = sign(u) u^2 / 2 so the preimage is sampled near-uniformly
    # in its own arclength (|dz| = dt / |z| and |z| ~ sqrt(2|t|) far out).
    def preimage(u):
        t = np.sign(u) * u**2 / 2.0
        w = (1j * offset + t) * np.exp(1j * direction)
        # arg(w) sweeps less than pi along a line missing the origin, so the
        # unwrapped half-angle picks one continuous square-root branch at any
        # sampling density.  Anchor the sheet so the outgoing end (largest u)
        # lies on the ray at half the line direction.
        ang = np.unwrap(np.angle(w))
        ang += 2.0 * np.pi * np.round((direction - ang[-1]) / (2.0 * np.pi))
        return np.sqrt(2.0 * np.abs(w)) * np.exp(0.5j * ang)

    n = max(int(np.ceil(4.0 * extent / spacing)), 64)
    u = np.linspace(-extent, extent, n)
    fine = preimage(u)
    # Redistribute in the parameter rather than through a spline so every
    # output node is an exact evaluation of the preimage map.
    s = np.concatenate(([0.0], np.cumsum(np.abs(np.diff(fine)))))
    n_out = max(int(round(s[-1] / spacing)) + 1, 4)
    z = preimage(np.interp(np.linspace(0.0, s[-1], n_out), s, u))
    if branch == 1:
        z = -z
    return PlanarCurve(z, closed=False)
