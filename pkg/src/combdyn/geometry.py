"""Exact planar predicates over rationals.

Points are 2-tuples of :class:`fractions.Fraction`; one-dimensional
coordinates are padded with a zero second component by the caller.
Every cell handled here is *relatively open*: an open triangle, an open
segment, or a single point.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Point = tuple[Fraction, Fraction]


def to_point(coords: Sequence) -> Point:
    """Convert a coordinate sequence of length 1 or 2 to an exact point.

    Floats are converted exactly (a float is a dyadic rational).
    """
    vals = [c if isinstance(c, Fraction) else Fraction(c) for c in coords]
    if len(vals) == 1:
        vals.append(Fraction(0))
    if len(vals) != 2:
        raise ValueError(f"only 1-D and 2-D coordinates are supported, got dimension {len(vals)}")
    return (vals[0], vals[1])


def orient(a: Point, b: Point, c: Point) -> Fraction:
    """Twice the signed area of triangle abc (positive if counter-clockwise)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def sign(x) -> int:
    return (x > 0) - (x < 0)


def convex_hull(points: Sequence[Point]) -> list[Point]:
    """Vertices of the convex hull in counter-clockwise order.

    Collinear boundary points are dropped. Degenerate inputs give one point
    or the two extreme points of a segment.
    """
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and orient(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and orient(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull


def polygon_area2(poly: Sequence[Point]) -> Fraction:
    """Twice the signed area of a polygon."""
    n = len(poly)
    if n < 3:
        return Fraction(0)
    s = Fraction(0)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return s


def on_segment_open(p: Point, a: Point, b: Point) -> bool:
    """True iff ``p`` lies strictly between ``a`` and ``b``."""
    if a == b or orient(a, b, p) != 0:
        return False
    d = (b[0] - a[0]) * (p[0] - a[0]) + (b[1] - a[1]) * (p[1] - a[1])
    length2 = (b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2
    return 0 < d < length2


def on_segment_closed(p: Point, a: Point, b: Point) -> bool:
    return p == a or p == b or on_segment_open(p, a, b)


def in_open_triangle(p: Point, a: Point, b: Point, c: Point) -> bool:
    s = sign(orient(a, b, c))
    if s == 0:
        return False
    return sign(orient(a, b, p)) == s and sign(orient(b, c, p)) == s and sign(orient(c, a, p)) == s


def in_closed_triangle(p: Point, a: Point, b: Point, c: Point) -> bool:
    s = sign(orient(a, b, c))
    if s == 0:
        return False
    return all(sign(orient(u, v, p)) in (0, s) for u, v in ((a, b), (b, c), (c, a)))


def in_open_polygon(p: Point, hull: Sequence[Point]) -> bool:
    """Strict interior test for a counter-clockwise convex polygon."""
    n = len(hull)
    return all(orient(hull[i], hull[(i + 1) % n], p) > 0 for i in range(n))


def in_open_cell(p: Point, cell: Sequence[Point]) -> bool:
    if len(cell) == 1:
        return p == cell[0]
    if len(cell) == 2:
        return on_segment_open(p, cell[0], cell[1])
    return in_open_triangle(p, *cell)


def _ccw(poly: Sequence[Point]) -> list[Point]:
    poly = list(poly)
    if polygon_area2(poly) < 0:
        poly.reverse()
    return poly


def _clip_param(a: Point, b: Point, hull: Sequence[Point]) -> tuple[Fraction, Fraction] | None:
    """Parameter range of the closed segment a + t(b - a), t in [0, 1], inside a closed CCW polygon."""
    lo, hi = Fraction(0), Fraction(1)
    n = len(hull)
    for i in range(n):
        u, v = hull[i], hull[(i + 1) % n]
        f0 = orient(u, v, a)
        f1 = orient(u, v, b)
        # f(t) = f0 + t (f1 - f0) >= 0
        df = f1 - f0
        if df == 0:
            if f0 < 0:
                return None
            continue
        t = -f0 / df
        if df > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
        if lo > hi:
            return None
    return lo, hi


def _lerp(a: Point, b: Point, t: Fraction) -> Point:
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def clip_polygon(subject: Sequence[Point], hull: Sequence[Point]) -> list[Point]:
    """Sutherland-Hodgman clip of a convex polygon against a closed CCW convex polygon."""
    out = list(subject)
    n = len(hull)
    for i in range(n):
        if not out:
            break
        u, v = hull[i], hull[(i + 1) % n]
        inp, out = out, []
        m = len(inp)
        for j in range(m):
            p, q = inp[j], inp[(j + 1) % m]
            fp, fq = orient(u, v, p), orient(u, v, q)
            if fp >= 0:
                out.append(p)
            if (fp > 0 > fq) or (fp < 0 < fq):
                out.append(_lerp(p, q, fp / (fp - fq)))
    return out


def open_segment_meets_open_polygon(a: Point, b: Point, hull: Sequence[Point]) -> bool:
    rng = _clip_param(a, b, hull)
    if rng is None or rng[0] >= rng[1]:
        return False
    return in_open_polygon(_lerp(a, b, (rng[0] + rng[1]) / 2), hull)


def open_triangle_meets_open_polygon(tri: Sequence[Point], hull: Sequence[Point]) -> bool:
    return polygon_area2(clip_polygon(_ccw(tri), hull)) > 0


def open_segments_meet(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Intersection of open segments (a, b) and (c, d) is nonempty."""
    o1, o2 = sign(orient(a, b, c)), sign(orient(a, b, d))
    if o1 == 0 and o2 == 0:
        # collinear: compare open parameter intervals along (a, b)
        ax = (b[0] - a[0], b[1] - a[1])

        def t(p: Point) -> Fraction:
            return ax[0] * (p[0] - a[0]) + ax[1] * (p[1] - a[1])

        lo1, hi1 = sorted((t(a), t(b)))
        lo2, hi2 = sorted((t(c), t(d)))
        return max(lo1, lo2) < min(hi1, hi2)
    o3, o4 = sign(orient(c, d, a)), sign(orient(c, d, b))
    return o1 * o2 < 0 and o3 * o4 < 0


def open_segment_meets_open_triangle(a: Point, b: Point, tri: Sequence[Point]) -> bool:
    hull = _ccw(tri)
    rng = _clip_param(a, b, hull)
    if rng is None or rng[0] >= rng[1]:
        return False
    return in_open_triangle(_lerp(a, b, (rng[0] + rng[1]) / 2), *hull)


class ConvexPieces:
    """A convex set written as a disjoint union of relatively open pieces.

    ``polygon`` is the open interior of a CCW hull (or ``None``), ``segments``
    are open segments and ``points`` single points.
    """

    def __init__(self, polygon=None, segments=(), points=()):
        self.polygon = polygon
        self.segments = list(segments)
        self.points = list(dict.fromkeys(points))

    def meets_cell(self, cell: Sequence[Point]) -> bool:
        k = len(cell)
        if self.polygon is not None:
            if k == 1 and in_open_polygon(cell[0], self.polygon):
                return True
            if k == 2 and open_segment_meets_open_polygon(cell[0], cell[1], self.polygon):
                return True
            if k == 3 and open_triangle_meets_open_polygon(cell, self.polygon):
                return True
        for a, b in self.segments:
            if k == 1 and on_segment_open(cell[0], a, b):
                return True
            if k == 2 and open_segments_meet(a, b, cell[0], cell[1]):
                return True
            if k == 3 and open_segment_meets_open_triangle(a, b, cell):
                return True
        return any(in_open_cell(p, cell) for p in self.points)


def _line_hull(cells: Sequence[Sequence[Point]], a: Point, b: Point) -> tuple[list, list]:
    """Convex hull of relatively open cells lying on the line through a and b.

    Returns (open segments, closed points) making up the hull.
    """
    d = (b[0] - a[0], b[1] - a[1])

    def t(p: Point) -> Fraction:
        return d[0] * (p[0] - a[0]) + d[1] * (p[1] - a[1])

    spans = []
    for cell in cells:
        ts = sorted((t(p), p) for p in cell)
        spans.append((ts[0], ts[-1], len(cell) == 1))
    if not spans:
        return [], []
    lo, lo_pt = min(s for s, _, _ in spans)
    hi, hi_pt = max(e for _, e, _ in spans)
    lo_closed = any(closed and s[0] == lo for s, _, closed in spans)
    hi_closed = any(closed and e[0] == hi for _, e, closed in spans)
    segments = [(lo_pt, hi_pt)] if lo < hi else []
    points = []
    if lo_closed:
        points.append(lo_pt)
    if hi_closed:
        points.append(hi_pt)
    return segments, points


def hull_of_cells(cells: Sequence[Sequence[Point]]) -> ConvexPieces:
    """Exact convex hull of a union of relatively open cells.

    The closed hull of the cell vertices has the right interior; a boundary
    point belongs to the hull only when it lies in the hull of the cells
    contained in the supporting face through that point.
    """
    verts = [p for cell in cells for p in cell]
    hull = convex_hull(verts)
    if len(hull) == 1:
        return ConvexPieces(points=hull)
    if len(hull) == 2:
        segs, pts = _line_hull(cells, hull[0], hull[1])
        return ConvexPieces(segments=segs, points=pts)
    segments, points = [], []
    n = len(hull)
    for i in range(n):
        u, v = hull[i], hull[(i + 1) % n]
        on_edge = [c for c in cells if len(c) < 3 and all(on_segment_closed(p, u, v) for p in c)]
        segs, pts = _line_hull(on_edge, u, v)
        segments += segs
        points += pts
    return ConvexPieces(polygon=hull, segments=segments, points=points)
