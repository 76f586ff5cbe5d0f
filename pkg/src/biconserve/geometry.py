"""Self-intersection counting for planar polylines.

Orientation signs are decided in floating point when a forward error bound
allows it, and otherwise recomputed exactly with rational arithmetic.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

_EPS = np.finfo(float).eps / 2
# Shewchuk's static bound for the 2x2 orientation determinant
_ORIENT_BOUND = (3.0 + 16.0 * _EPS) * _EPS


def orient_exact(a, b, c) -> int:
    ax, ay = Fraction(a[0]), Fraction(a[1])
    det = (Fraction(b[0]) - ax) * (Fraction(c[1]) - ay) - (Fraction(b[1]) - ay) * (Fraction(c[0]) - ax)
    return (det > 0) - (det < 0)


def _orient_filtered(ax, ay, bx, by, cx, cy):
    """Vectorised orientation sign; 0 where the sign is not certified."""
    left = (bx - ax) * (cy - ay)
    right = (by - ay) * (cx - ax)
    det = left - right
    bound = _ORIENT_BOUND * (np.abs(left) + np.abs(right))
    sign = np.sign(det)
    sign[np.abs(det) <= bound] = 0
    return sign


def _on_segment(a, b, c) -> bool:
    # c collinear with a-b: inside the bounding box
    return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])


def segments_intersect_exact(a, b, c, d) -> bool:
    """Closed segments [a, b] and [c, d] share a point (exact arithmetic)."""
    o1, o2 = orient_exact(a, b, c), orient_exact(a, b, d)
    o3, o4 = orient_exact(c, d, a), orient_exact(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return ((o1 == 0 and _on_segment(a, b, c)) or (o2 == 0 and _on_segment(a, b, d))
            or (o3 == 0 and _on_segment(c, d, a)) or (o4 == 0 and _on_segment(c, d, b)))


def _crossing_point(a, b, c, d):
    r = b - a
    s = d - c
    denom = r[0] * s[1] - r[1] * s[0]
    if denom == 0:
        return 0.5 * (c + d)
    t = ((c[0] - a[0]) * s[1] - (c[1] - a[1]) * s[0]) / denom
    return a + min(max(t, 0.0), 1.0) * r


def intersection_points(points, closed: bool = False) -> np.ndarray:
    """Points where non-adjacent segments of the polyline meet."""
    pts = np.asarray(points, dtype=float)
    if closed:
        pts = np.vstack([pts, pts[:1]])
    a, b = pts[:-1], pts[1:]
    m = len(a)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    found = []
    for i in range(m - 2):
        j = np.arange(i + 2, m)
        if closed and i == 0:
            j = j[:-1]
        if len(j) == 0:
            continue
        box = ((lo[j, 0] <= hi[i, 0]) & (hi[j, 0] >= lo[i, 0])
               & (lo[j, 1] <= hi[i, 1]) & (hi[j, 1] >= lo[i, 1]))
        j = j[box]
        if len(j) == 0:
            continue
        ai, bi = a[i], b[i]
        o1 = _orient_filtered(ai[0], ai[1], bi[0], bi[1], a[j, 0], a[j, 1])
        o2 = _orient_filtered(ai[0], ai[1], bi[0], bi[1], b[j, 0], b[j, 1])
        o3 = _orient_filtered(a[j, 0], a[j, 1], b[j, 0], b[j, 1], ai[0], ai[1])
        o4 = _orient_filtered(a[j, 0], a[j, 1], b[j, 0], b[j, 1], bi[0], bi[1])
        proper = (o1 * o2 < 0) & (o3 * o4 < 0)
        uncertain = ~proper & ((o1 * o2 <= 0) & (o3 * o4 <= 0)) & ((o1 == 0) | (o2 == 0) | (o3 == 0) | (o4 == 0))
        for k in j[proper]:
            found.append(_crossing_point(ai, bi, a[k], b[k]))
        for k in j[uncertain]:
            if segments_intersect_exact(ai, bi, a[k], b[k]):
                found.append(_crossing_point(ai, bi, a[k], b[k]))
    return np.array(found).reshape(-1, 2)


def count_self_intersections(points, closed: bool = False, merge_tol: float = 1e-9) -> int:
    """Distinct self-intersection points of a polyline.

    Crossings reported by several segment pairs (a crossing through a shared
    vertex) are merged when closer than ``merge_tol`` times the polyline extent.
    """
    hits = intersection_points(points, closed)
    if len(hits) == 0:
        return 0
    pts = np.asarray(points, dtype=float)
    scale = float(np.max(np.abs(pts))) or 1.0
    distinct: list[np.ndarray] = []
    for h in hits:
        if not any(np.linalg.norm(h - q) <= merge_tol * scale for q in distinct):
            distinct.append(h)
    return len(distinct)


def winding_number(points, center=(0.0, 0.0)) -> float:
    """Total turning of the position vector about ``center``, in turns (unrounded)."""
    pts = np.asarray(points, dtype=float) - np.asarray(center, dtype=float)
    angle = np.unwrap(np.arctan2(pts[:, 0], pts[:, 1]))
    return float((angle[-1] - angle[0]) / (2.0 * np.pi))
