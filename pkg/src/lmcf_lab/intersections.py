"""Self-intersections, curve-vs-curve crossings, and loop extraction.

Crossing detection is exact segment-segment intersection on the polyline,
accelerated by a uniform hash grid (cell size = longest segment, so each
segment touches at most four cells).  Crossings landing exactly on a shared
node are counted once via half-open parameter intervals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .curves import PlanarCurve

# Segment pairs closer than this (circular) index distance are never tested:
# they share nodes or meet at slope discontinuities of the polyline.
ADJACENCY_WINDOW = 2

# Crossings whose line-to-line angle falls below this are flagged unreliable.
TANGENTIAL_ANGLE = 1e-3


@dataclass(frozen=True)
class Crossing:
    """A transverse crossing between polyline segments ``seg_a < seg_b``."""

    seg_a: int
    seg_b: int
    t_a: float
    t_b: float
    point: complex
    angle: float
    reliable: bool


@dataclass(frozen=True)
class LoopDescriptor:
    """A closed sub-polyline, either based at a crossing or a whole closed curve.

    ``area`` is the signed shoelace area of the traversal (reversing the curve
    negates it).  ``exterior_angle`` is the turn at the crossing vertex, from
    arrival direction to departure direction, positive when the vertex is
    locally convex for the traversal; it is 0 for a whole closed component.
    """

    crossing: Crossing | None
    node_indices: NDArray[np.int64]
    polygon: NDArray[np.complex128]
    area: float
    exterior_angle: float
    winds_origin: int

    def diameter(self) -> float:
        pts = self.polygon
        if pts.shape[0] > 400:
            dx = pts.real.max() - pts.real.min()
            dy = pts.imag.max() - pts.imag.min()
            return float(np.hypot(dx, dy))
        return float(np.abs(pts[:, None] - pts[None, :]).max())


def shoelace_area(points: NDArray[np.complex128]) -> float:
    """Signed area of the closed polygon through the points (no repeated end)."""
    nxt = np.roll(points, -1)
    return float(0.5 * np.sum((np.conj(points) * nxt).imag))


def winding_number(points: NDArray[np.complex128], about: complex = 0.0) -> int:
    """Winding of the closed polygon around a point not on the polygon."""
    rel = points - about
    ang = np.angle(rel)
    d = np.diff(np.append(ang, ang[0]))
    d = (d + np.pi) % (2.0 * np.pi) - np.pi
    return int(round(d.sum() / (2.0 * np.pi)))


def _segments(curve: PlanarCurve) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    z = curve.nodes
    if curve.closed:
        return z, np.roll(z, -1)
    return z[:-1], z[1:]


def _grid_cells(p: NDArray[np.complex128], q: NDArray[np.complex128], cell: float):
    """Map each segment to the grid cells its bounding box overlaps."""
    x0 = np.floor(np.minimum(p.real, q.real) / cell).astype(np.int64)
    x1 = np.floor(np.maximum(p.real, q.real) / cell).astype(np.int64)
    y0 = np.floor(np.minimum(p.imag, q.imag) / cell).astype(np.int64)
    y1 = np.floor(np.maximum(p.imag, q.imag) / cell).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = {}
    for i in range(p.shape[0]):
        for cx in range(x0[i], x1[i] + 1):
            for cy in range(y0[i], y1[i] + 1):
                buckets.setdefault((cx, cy), []).append(i)
    return buckets


def _candidate_pairs(curve: PlanarCurve) -> NDArray[np.int64]:
    p, q = _segments(curve)
    n_seg = p.shape[0]
    cell = float(np.abs(q - p).max()) * 1.0000001
    buckets = _grid_cells(p, q, cell)
    pairs: set[tuple[int, int]] = set()
    for idx in buckets.values():
        m = len(idx)
        if m < 2:
            continue
        for a in range(m):
            for b in range(a + 1, m):
                i, j = idx[a], idx[b]
                if i > j:
                    i, j = j, i
                gap = j - i
                if curve.closed:
                    gap = min(gap, n_seg - gap)
                if gap <= ADJACENCY_WINDOW:
                    continue
                pairs.add((i, j))
    if not pairs:
        return np.empty((0, 2), dtype=np.int64)
    return np.array(sorted(pairs), dtype=np.int64)


def _exact_crossings(
    pa: NDArray[np.complex128],
    ra: NDArray[np.complex128],
    pb: NDArray[np.complex128],
    rb: NDArray[np.complex128],
):
    """Half-open segment intersection test, vectorized over candidate pairs."""
    denom = (np.conj(ra) * rb).imag
    d = pb - pa
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (np.conj(d) * rb).imag / denom
        u = (np.conj(d) * ra).imag / denom
    scale = np.abs(ra) * np.abs(rb)
    ok = (np.abs(denom) > 1e-14 * scale) & (t >= 0.0) & (t < 1.0) & (u >= 0.0) & (u < 1.0)
    sin_angle = np.abs(denom) / np.maximum(scale, 1e-300)
    angle = np.arcsin(np.clip(sin_angle, 0.0, 1.0))
    return ok, t, u, angle


def self_intersections(curve: PlanarCurve) -> list[Crossing]:
    """All transverse proper crossings between non-adjacent segments, each once."""
    pairs = _candidate_pairs(curve)
    if pairs.shape[0] == 0:
        return []
    p, q = _segments(curve)
    r = q - p
    ia, ib = pairs[:, 0], pairs[:, 1]
    ok, t, u, angle = _exact_crossings(p[ia], r[ia], p[ib], r[ib])
    out: list[Crossing] = []
    for k in np.flatnonzero(ok):
        pt = p[ia[k]] + t[k] * r[ia[k]]
        out.append(
            Crossing(
                seg_a=int(ia[k]),
                seg_b=int(ib[k]),
                t_a=float(t[k]),
                t_b=float(u[k]),
                point=complex(pt),
                angle=float(angle[k]),
                reliable=bool(angle[k] > TANGENTIAL_ANGLE),
            )
        )
    return out


def crossings_between(
    curve_a: PlanarCurve,
    curve_b: PlanarCurve,
    *,
    exclude_radius: float = 0.0,
) -> list[Crossing]:
    """Transverse crossings between two curves.

    ``exclude_radius`` drops crossings that close to the origin (used for
    profile pairs that legitimately share the origin node).  Indices refer to
    segment positions in the respective curves.
    """
    pa, qa = _segments(curve_a)
    pb, qb = _segments(curve_b)
    ra, rb = qa - pa, qb - pb
    cell = float(max(np.abs(ra).max(), np.abs(rb).max())) * 1.0000001
    buckets_b = _grid_cells(pb, qb, cell)
    x0 = np.floor(np.minimum(pa.real, qa.real) / cell).astype(np.int64)
    x1 = np.floor(np.maximum(pa.real, qa.real) / cell).astype(np.int64)
    y0 = np.floor(np.minimum(pa.imag, qa.imag) / cell).astype(np.int64)
    y1 = np.floor(np.maximum(pa.imag, qa.imag) / cell).astype(np.int64)
    pairs: set[tuple[int, int]] = set()
    for i in range(pa.shape[0]):
        for cx in range(x0[i], x1[i] + 1):
            for cy in range(y0[i], y1[i] + 1):
                for j in buckets_b.get((cx, cy), ()):
                    pairs.add((i, j))
    if not pairs:
        return []
    arr = np.array(sorted(pairs), dtype=np.int64)
    ia, ib = arr[:, 0], arr[:, 1]
    ok, t, u, angle = _exact_crossings(pa[ia], ra[ia], pb[ib], rb[ib])
    out: list[Crossing] = []
    for k in np.flatnonzero(ok):
        pt = pa[ia[k]] + t[k] * ra[ia[k]]
        if abs(pt) <= exclude_radius:
            continue
        out.append(
            Crossing(
                seg_a=int(ia[k]),
                seg_b=int(ib[k]),
                t_a=float(t[k]),
                t_b=float(u[k]),
                point=complex(pt),
                angle=float(angle[k]),
                reliable=bool(angle[k] > TANGENTIAL_ANGLE),
            )
        )
    return out


def _loop_from_crossing(curve: PlanarCurve, crossing: Crossing) -> LoopDescriptor:
    z = curve.nodes
    n = z.shape[0]
    i, j = crossing.seg_a, crossing.seg_b
    inner = np.arange(i + 1, j + 1, dtype=np.int64)
    if curve.closed:
        outer = np.concatenate(
            (np.arange(j + 1, n, dtype=np.int64), np.arange(0, i + 1, dtype=np.int64))
        )
        len_inner = np.abs(np.diff(z[inner])).sum() if inner.size > 1 else 0.0
        len_outer = np.abs(np.diff(z[outer])).sum() if outer.size > 1 else 0.0
        use_inner = len_inner <= len_outer
    else:
        use_inner = True
    idx = inner if use_inner else outer
    polygon = np.concatenate(([crossing.point], z[idx]))
    # A crossing that lands exactly on a node duplicates the base vertex;
    # strip duplicated points so the departure/arrival edges below are
    # non-zero.  Edge k runs polygon[k] -> polygon[k+1 mod m].
    scale = float(max(np.max(np.abs(polygon - polygon[0])), 1e-300))
    edge = np.abs(np.diff(np.concatenate((polygon, polygon[:1]))))
    dup = np.zeros(polygon.size, dtype=bool)
    dup[1:] = edge[:-1] < 1e-12 * scale
    dup[-1] |= edge[-1] < 1e-12 * scale
    polygon = polygon[~dup]
    area = shoelace_area(polygon)
    depart = polygon[1] - polygon[0]
    arrive = polygon[0] - polygon[-1]
    ext = float(np.angle(depart / arrive))
    winds = winding_number(polygon)
    return LoopDescriptor(
        crossing=crossing,
        node_indices=idx,
        polygon=polygon,
        area=area,
        exterior_angle=ext,
        winds_origin=winds,
    )


def extract_loops(curve: PlanarCurve) -> list[LoopDescriptor]:
    """Loop descriptors for every crossing; a crossing-free closed curve is one loop.

    Crossing-based loops take the shorter of the two closed sub-polylines based
    at the crossing.  An open embedded curve yields no loops.
    """
    crossings = self_intersections(curve)
    if crossings:
        return [_loop_from_crossing(curve, c) for c in crossings]
    if curve.closed:
        z = curve.nodes
        return [
            LoopDescriptor(
                crossing=None,
                node_indices=np.arange(z.shape[0], dtype=np.int64),
                polygon=z.copy(),
                area=shoelace_area(z),
                exterior_angle=0.0,
                winds_origin=winding_number(z),
            )
        ]
    return []
