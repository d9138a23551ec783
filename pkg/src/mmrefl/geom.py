"""Exact 2-D geometry: segment intersection, mirror transforms, specular points.

Scalar functions operate on Point/Segment and define the reference semantics;
the ``*_batch`` variants are vectorized equivalents used by the Monte Carlo
engine (degenerate configurations are measure-zero under continuous sampling).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

# Tolerance for orientation sign tests on normalized coordinates.
ORIENT_EPS = 1e-12


@dataclass(frozen=True)
class Point:
    x: float
    y: float


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self):
        if not (math.isfinite(self.a.x) and math.isfinite(self.a.y)
                and math.isfinite(self.b.x) and math.isfinite(self.b.y)):
            raise ValueError("segment endpoints must be finite")
        if self.a.x == self.b.x and self.a.y == self.b.y:
            raise ValueError("segment endpoints must be distinct")

    @property
    def length(self) -> float:
        return math.hypot(self.b.x - self.a.x, self.b.y - self.a.y)


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _orient(ox, oy, ax, ay, bx, by) -> int:
    """Sign of the cross product, with tolerance scaled to the coordinates."""
    d = _cross(ox, oy, ax, ay, bx, by)
    scale = max(abs(ax - ox), abs(ay - oy), abs(bx - ox), abs(by - oy), 1.0)
    if abs(d) <= ORIENT_EPS * scale * scale:
        return 0
    return 1 if d > 0 else -1


def _on_segment(px, py, qx, qy, rx, ry) -> bool:
    """Is q within the bounding box of p-r (assumes collinear)?"""
    return (min(px, rx) <= qx <= max(px, rx)) and (min(py, ry) <= qy <= max(py, ry))


def segments_intersect(s1: Segment, s2: Segment) -> bool:
    """True iff the closed segments share at least one point.

    Touching endpoints and collinear overlap both count as intersecting.
    """
    p1x, p1y, p2x, p2y = s1.a.x, s1.a.y, s1.b.x, s1.b.y
    p3x, p3y, p4x, p4y = s2.a.x, s2.a.y, s2.b.x, s2.b.y

    d1 = _orient(p3x, p3y, p4x, p4y, p1x, p1y)
    d2 = _orient(p3x, p3y, p4x, p4y, p2x, p2y)
    d3 = _orient(p1x, p1y, p2x, p2y, p3x, p3y)
    d4 = _orient(p1x, p1y, p2x, p2y, p4x, p4y)

    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and \
       ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(p3x, p3y, p1x, p1y, p4x, p4y):
        return True
    if d2 == 0 and _on_segment(p3x, p3y, p2x, p2y, p4x, p4y):
        return True
    if d3 == 0 and _on_segment(p1x, p1y, p3x, p3y, p2x, p2y):
        return True
    if d4 == 0 and _on_segment(p1x, p1y, p4x, p4y, p2x, p2y):
        return True
    return False


def mirror_point(p: Point, line: Segment) -> Point:
    """Reflect p across the infinite supporting line of `line`."""
    ax, ay = line.a.x, line.a.y
    dx, dy = line.b.x - ax, line.b.y - ay
    n2 = dx * dx + dy * dy
    t = ((p.x - ax) * dx + (p.y - ay) * dy) / n2
    # foot of the perpendicular
    fx, fy = ax + t * dx, ay + t * dy
    return Point(2.0 * fx - p.x, 2.0 * fy - p.y)


def specular_point(source: Point, receiver: Point, mirror: Segment) -> Optional[Point]:
    """Point on `mirror` where a single-bounce path source->mirror->receiver reflects.

    Returns None when source/receiver are not strictly on the same side of the
    supporting line, or when the mirrored sight-line misses the open segment
    (endpoint hits excluded: edge diffraction is out of model).
    """
    ax, ay = mirror.a.x, mirror.a.y
    bx, by = mirror.b.x, mirror.b.y
    side_s = _orient(ax, ay, bx, by, source.x, source.y)
    side_r = _orient(ax, ay, bx, by, receiver.x, receiver.y)
    if side_s == 0 or side_r == 0 or side_s != side_r:
        return None

    m = mirror_point(source, mirror)
    # receiver -> mirrored source crosses the supporting line exactly once
    # (receiver and m are on opposite sides by construction).
    denom = _cross(receiver.x, receiver.y, m.x, m.y, bx, by) \
        - _cross(receiver.x, receiver.y, m.x, m.y, ax, ay)
    if denom == 0.0:
        return None
    # parameter of the crossing along a->b
    t = _cross(receiver.x, receiver.y, m.x, m.y, ax, ay) / -denom
    if not (0.0 < t < 1.0):
        return None
    return Point(ax + t * (bx - ax), ay + t * (by - ay))


def reflected_path_length(source: Point, receiver: Point, mirror: Segment) -> Optional[float]:
    """Two-leg length |source-q| + |q-receiver| of the specular path, if any.

    Equals |mirror_point(source) - receiver| whenever defined.
    """
    q = specular_point(source, receiver, mirror)
    if q is None:
        return None
    return math.hypot(source.x - q.x, source.y - q.y) + \
        math.hypot(receiver.x - q.x, receiver.y - q.y)


# ---------------------------------------------------------------------------
# Vectorized kernels (used by the simulator; ndarray in, ndarray out)
# ---------------------------------------------------------------------------

def segments_cross_origin_batch(points: np.ndarray, seg_a: np.ndarray,
                                seg_b: np.ndarray) -> np.ndarray:
    """Boolean (N, M): does segment origin->points[i] intersect seg j?

    Closed-segment test via orientation signs; collinear grazing resolves
    arbitrarily (measure-zero under PPP sampling).
    """
    return segments_intersect_batch(np.zeros_like(points), points, seg_a, seg_b)


def segments_intersect_batch(p1: np.ndarray, p2: np.ndarray, seg_a: np.ndarray,
                             seg_b: np.ndarray) -> np.ndarray:
    """Boolean (N, M) closed-segment intersection of [p1_i,p2_i] vs [a_j,b_j]."""
    p1 = p1[:, None, :]
    p2 = p2[:, None, :]
    a = seg_a[None, :, :]
    b = seg_b[None, :, :]

    e = b - a     # (1, M, 2)
    d = p2 - p1   # (N, 1, 2)

    w1 = p1 - a
    w2 = p2 - a
    d1 = e[..., 0] * w1[..., 1] - e[..., 1] * w1[..., 0]
    d2 = e[..., 0] * w2[..., 1] - e[..., 1] * w2[..., 0]

    v1 = a - p1
    v2 = b - p1
    d3 = d[..., 0] * v1[..., 1] - d[..., 1] * v1[..., 0]
    d4 = d[..., 0] * v2[..., 1] - d[..., 1] * v2[..., 0]

    return (d1 * d2 <= 0.0) & (d3 * d4 <= 0.0)


def specular_batch(sources: np.ndarray, seg_a: np.ndarray, seg_b: np.ndarray):
    """Specular points toward the origin for many sources on one mirror.

    sources: (N, 2); seg_a/seg_b: (2,) endpoints of the mirror.
    Returns (valid (N,), q (N, 2), path_length (N,)); invalid entries hold NaN.
    """
    e = seg_b - seg_a
    n2 = e @ e

    w = sources - seg_a[None, :]
    side_s = e[0] * w[:, 1] - e[1] * w[:, 0]
    side_r = e[0] * (-seg_a[1]) - e[1] * (-seg_a[0])  # origin side

    t_foot = (w @ e) / n2
    foot = seg_a[None, :] + t_foot[:, None] * e[None, :]
    mirrored = 2.0 * foot - sources

    # crossing parameter of segment origin->mirrored with the supporting line:
    # solve a + t*e = s*mirrored
    mx, my = mirrored[:, 0], mirrored[:, 1]
    denom = e[0] * my - e[1] * mx
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (seg_a[1] * mx - seg_a[0] * my) / denom
        s = np.where(np.abs(mx) > np.abs(my),
                     (seg_a[0] + t * e[0]) / mx,
                     (seg_a[1] + t * e[1]) / my)

    valid = (side_s * side_r > 0.0) & (t > 0.0) & (t < 1.0) & (s > 0.0) & (s < 1.0)
    q = seg_a[None, :] + t[:, None] * e[None, :]
    length = np.hypot(mx, my)  # mirrored straight-line distance = two-leg sum
    q = np.where(valid[:, None], q, np.nan)
    length = np.where(valid, length, np.nan)
    return valid, q, length
