"""Newton and valuation polygons over exact rationals.

Vertices are stored in increasing X order.  A Newton polygon (lower convex
hull of the points (-n, v(b_n))) lists its bounded sides in ``lines``; a
valuation polygon (graph of mu -> min_n v(b_n) + n*mu) lists every affine
piece, including the two unbounded ones, so a polygon without vertices is
still a well-defined single line.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

NEWTON = "newton"
VALUATION = "valuation"

Point = tuple[Fraction, Fraction]
Line = tuple[Fraction, Fraction]  # (slope, intercept)


class AllInfinite(ValueError):
    pass


@dataclass(frozen=True)
class Polygon:
    kind: str
    vertices: tuple[Point, ...]
    lines: tuple[Line, ...]

    def __post_init__(self):
        if self.kind not in (NEWTON, VALUATION):
            raise ValueError(f"unknown polygon kind {self.kind!r}")
        xs = [x for x, _ in self.vertices]
        if any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("vertices must have strictly increasing X")
        slopes = [s for s, _ in self.lines]
        if self.kind == NEWTON:
            ok = all(a < b for a, b in zip(slopes, slopes[1:]))
        else:
            ok = all(a > b for a, b in zip(slopes, slopes[1:]))
        if not ok:
            raise ValueError(f"slopes violate {self.kind} convexity: {slopes}")

    def slopes(self) -> list[Fraction]:
        return [s for s, _ in self.lines]

    def __call__(self, x) -> Fraction:
        """Evaluate the piecewise-affine function."""
        x = Fraction(x)
        if self.kind == VALUATION:
            return min(s * x + t for s, t in self.lines)
        if not self.lines:
            if self.vertices and x == self.vertices[0][0]:
                return self.vertices[0][1]
            raise ValueError("point polygon only defined at its vertex")
        if not self.vertices[0][0] <= x <= self.vertices[-1][0]:
            raise ValueError(f"{x} outside the polygon's X range")
        return max(s * x + t for s, t in self.lines)

    def to_rows(self) -> list[tuple[str, str]]:
        return [(str(x), str(y)) for x, y in self.vertices]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y"])
        w.writerows(self.to_rows())
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "vertices": [{"x": str(x), "y": str(y)} for x, y in self.vertices],
            "lines": [{"slope": str(s), "intercept": str(t)} for s, t in self.lines],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "Polygon":
        return cls(
            d["kind"],
            tuple((Fraction(v["x"]), Fraction(v["y"])) for v in d["vertices"]),
            tuple((Fraction(l["slope"]), Fraction(l["intercept"])) for l in d["lines"]),
        )


def _finite_points(vals: Iterable[tuple[int, int | float]]) -> list[Point]:
    pts = [(Fraction(-n), Fraction(v)) for n, v in vals if v is not None and v != math.inf]
    if not pts:
        raise AllInfinite("no finite valuation among the coefficients")
    return pts


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _line_through(a: Point, b: Point) -> Line:
    s = (b[1] - a[1]) / (b[0] - a[0])
    return s, a[1] - s * a[0]


def newton_polygon(vals: Iterable[tuple[int, int | float]]) -> Polygon:
    """Lower convex hull of (-n, v(b_n)); zero coefficients (``inf``) are skipped."""
    pts = sorted(set(_finite_points(vals)))
    # keep the lowest point in each column
    lowest: dict[Fraction, Fraction] = {}
    for x, y in pts:
        lowest[x] = min(y, lowest.get(x, y))
    pts = sorted(lowest.items())
    hull: list[Point] = []
    for pt in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    lines = tuple(_line_through(a, b) for a, b in zip(hull, hull[1:]))
    return Polygon(NEWTON, tuple(hull), lines)


def valuation_polygon(vals: Iterable[tuple[int, int | float]]) -> Polygon:
    """Graph of mu -> min_n (v(b_n) + n*mu), built as a lower envelope of lines."""
    pts = _finite_points(vals)
    best: dict[Fraction, Fraction] = {}
    for x, y in pts:
        n = -x
        best[n] = min(y, best.get(n, y))
    # for mu -> -inf the steepest line is the minimum: scan slopes downward
    cand = sorted(best.items(), key=lambda sv: -sv[0])
    env: list[Line] = []

    def meet(l1: Line, l2: Line) -> Fraction:
        return (l2[1] - l1[1]) / (l1[0] - l2[0])

    for ln in cand:
        while len(env) >= 2 and meet(env[-2], ln) <= meet(env[-2], env[-1]):
            env.pop()
        env.append(ln)
    verts = []
    for l1, l2 in zip(env, env[1:]):
        x = meet(l1, l2)
        verts.append((x, l1[0] * x + l1[1]))
    return Polygon(VALUATION, tuple(verts), tuple(env))


def geometric_sum(q: int, i: int) -> int:
    """(q^i - 1)/(q - 1) = 1 + q + ... + q^(i-1)."""
    return (q ** i - 1) // (q - 1)


def closed_form_newton(q: int, i_max: int) -> Polygon:
    """Vertices V_i = (-q^i, i q^i - (q^i - 1)/(q - 1)) for 0 <= i <= i_max."""
    if q < 2 or i_max < 0:
        raise ValueError("need q >= 2 and i_max >= 0")
    verts = [(Fraction(-q ** i), Fraction(i * q ** i - geometric_sum(q, i))) for i in range(i_max + 1)]
    # side between V_(i-1) and V_i: Y = -i X - (q^i - 1)/(q - 1)
    lines = [(Fraction(-i), Fraction(-geometric_sum(q, i))) for i in range(i_max, 0, -1)]
    return Polygon(NEWTON, tuple(reversed(verts)), tuple(lines))


def sigma(q: int, j: int, mu) -> Fraction:
    """Piece of the valuation polygon over [-j, 1-j]: q^(j-1)(mu + j - 1) - (q^(j-1) - 1)/(q - 1)."""
    mu = Fraction(mu)
    return q ** (j - 1) * (mu + j - 1) - geometric_sum(q, j - 1)


def closed_form_valuation(q: int, j_max: int) -> Polygon:
    """Slope 1 for mu >= -1, slope q^j on (-j-1, -j); vertices (-j, -(q^j-1)/(q-1))."""
    if q < 2 or j_max < 0:
        raise ValueError("need q >= 2 and j_max >= 0")
    verts = [(Fraction(-j), Fraction(-geometric_sum(q, j))) for j in range(j_max, 0, -1)]
    lines = []
    for j in range(j_max + 1, 0, -1):
        # sigma_j(mu) = q^(j-1) mu + q^(j-1)(j-1) - geometric_sum(q, j-1)
        lines.append((Fraction(q ** (j - 1)), Fraction(q ** (j - 1) * (j - 1) - geometric_sum(q, j - 1))))
    return Polygon(VALUATION, tuple(verts), tuple(lines))


def polar_dual(vertices: Sequence[Point], lines: Sequence[Line]) -> tuple[list[Point], list[Line]]:
    """Polarity in the parabola X^2 = -2Y on raw vertex/line data.

    Vertex (-i, phi) goes to the line Y = i X - phi; the line Y = s X + t
    goes to the vertex (-s, -t).  Applying it twice is the identity.
    """
    new_vertices = sorted((-s, -t) for s, t in lines)
    new_lines = [(-x, -y) for x, y in vertices]
    return new_vertices, new_lines


def _negate(vertices: Sequence[Point], lines: Sequence[Line]) -> tuple[list[Point], list[Line]]:
    return [(x, -y) for x, y in vertices], [(-s, -t) for s, t in lines]


def dual_polygon(poly: Polygon) -> Polygon:
    """Newton polygon -> valuation polygon (and back) via Val(f) = (-Nw(f))^*."""
    if poly.kind == NEWTON:
        verts, lines = polar_dual(*_negate(poly.vertices, poly.lines))
        # left to right the valuation pieces have decreasing slope
        lines = sorted(lines, key=lambda l: -l[0])
        return Polygon(VALUATION, tuple(verts), tuple(lines))
    verts, lines = _negate(*polar_dual(poly.vertices, poly.lines))
    verts = sorted(verts)
    lines = sorted(lines)
    return Polygon(NEWTON, tuple(verts), tuple(lines))


def zero_counts(poly: Polygon) -> list[tuple[Fraction, Fraction]]:
    """(slope, horizontal length) for each side, starting next to the origin."""
    if poly.kind != NEWTON:
        raise ValueError("zero counts are read off a Newton polygon")
    out = []
    for (a, b), (s, _) in zip(zip(poly.vertices, poly.vertices[1:]), poly.lines):
        out.append((s, b[0] - a[0]))
    return list(reversed(out))


def trusted_vertices(poly: Polygon, limit: int) -> list[Point]:
    """Vertices with |X| <= limit.

    For a degree-N truncation use limit = the largest power of q not above N:
    beyond it the missing terms can no longer flatten the hull, so the last
    few vertices may be artefacts of the cut.
    """
    return [v for v in poly.vertices if abs(v[0]) <= limit]


def compare_with_closed_form(poly: Polygon, q: int, N: int) -> bool:
    """Compare the trusted part of a computed Newton polygon with V_0, V_1, ..."""
    i_max = 0
    while q ** (i_max + 1) <= N:
        i_max += 1
    return trusted_vertices(poly, q ** i_max) == list(closed_form_newton(q, i_max).vertices)


def newton_lower_bound(q: int, m: int) -> int:
    """The closed-form Newton polygon at X = -m (a lower bound for v_p(b_m))."""
    if m < 1:
        raise ValueError("m must be >= 1")
    i = 0
    while q ** i < m:
        i += 1
    # m lies in [q^(i-1), q^i]: side Y = -iX - (q^i - 1)/(q - 1)
    return i * m - geometric_sum(q, i)
