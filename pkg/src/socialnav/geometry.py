"""Small planar-geometry helpers shared across the package.

Scalar math on plain floats (cheap for the bookkeeping paths); the hot
loops live in the kernel backends instead.
"""

from __future__ import annotations

import math

Vec2 = tuple[float, float]

TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    return (a + math.pi) % TWO_PI - math.pi


def norm(x: float, y: float) -> float:
    return math.hypot(x, y)


def unit(x: float, y: float, eps: float = 1e-12) -> Vec2:
    """Unit vector along (x, y); (0, 0) when the norm is below eps."""
    n = math.hypot(x, y)
    if n < eps:
        return (0.0, 0.0)
    return (x / n, y / n)


def dist(a: Vec2, b: Vec2) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def closest_point_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2:
    """Closest point to p on the segment a-b."""
    abx, aby = b[0] - a[0], b[1] - a[1]
    seg_len2 = abx * abx + aby * aby
    if seg_len2 < 1e-18:
        return a
    t = ((p[0] - a[0]) * abx + (p[1] - a[1]) * aby) / seg_len2
    t = max(0.0, min(1.0, t))
    return (a[0] + t * abx, a[1] + t * aby)


def point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> float:
    q = closest_point_on_segment(p, a, b)
    return math.hypot(p[0] - q[0], p[1] - q[1])


def _orient(a: Vec2, b: Vec2, c: Vec2) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool:
    """True when segment p1-p2 crosses segment q1-q2 (touching counts)."""
    d1 = _orient(q1, q2, p1)
    d2 = _orient(q1, q2, p2)
    d3 = _orient(p1, p2, q1)
    d4 = _orient(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
        return True
    if d1 == 0 and _on_segment(q1, q2, p1):
        return True
    if d2 == 0 and _on_segment(q1, q2, p2):
        return True
    if d3 == 0 and _on_segment(p1, p2, q1):
        return True
    if d4 == 0 and _on_segment(p1, p2, q2):
        return True
    return False


def _on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool:
    return (
        min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
        and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
    )


def convex_hull(points: list[Vec2]) -> list[Vec2]:
    """Monotone-chain convex hull; handles 1-2 points and collinear sets.

    Returns the hull vertices in counter-clockwise order (may be a point or
    a segment for degenerate inputs).
    """
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Vec2] = []
    for p in pts:
        while len(lower) >= 2 and _orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Vec2] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if not hull:  # fully collinear input
        return [pts[0], pts[-1]]
    return hull


def point_in_convex_polygon(p: Vec2, hull: list[Vec2]) -> bool:
    if len(hull) < 3:
        return False
    for i in range(len(hull)):
        if _orient(hull[i], hull[(i + 1) % len(hull)], p) < 0:
            return False
    return True


def distance_to_hull(p: Vec2, hull: list[Vec2]) -> float:
    """Distance from p to a convex hull (0 inside; hull may be degenerate)."""
    if not hull:
        return math.inf
    if len(hull) == 1:
        return dist(p, hull[0])
    if len(hull) == 2:
        return point_segment_distance(p, hull[0], hull[1])
    if point_in_convex_polygon(p, hull):
        return 0.0
    return min(
        point_segment_distance(p, hull[i], hull[(i + 1) % len(hull)])
        for i in range(len(hull))
    )
