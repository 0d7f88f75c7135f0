"""Lattice start sets and forbidden regions for last-passage problems.

Start sets come in the handful of shapes the experiments need: single
points, explicit finite collections, the anti-diagonal line {(-k, k)},
its half-line, density-rho staircases, and unions of two sets.  Infinite
sets are never materialized; `truncate` reduces them to the finite subset
from which an up-right path to a given end point exists.

Staircase densities are exact rationals so that floor(n / rho) never
suffers float rounding (floor(n / (p/q)) == (n * q) // p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

Point = tuple[int, int]


def ifloor(x: float) -> int:
    """Floor for float-evaluated lattice formulas.

    Expressions like a * t**(2/3) are often mathematically integral but land
    a few ulps below the integer (1000**(1/3) == 9.999999999999998); plain
    floor would then be off by one.  Values within 64 ulps of an integer snap
    to it; genuinely fractional values are unaffected.
    """
    r = round(x)
    if abs(x - r) <= 64.0 * math.ulp(max(1.0, abs(x))):
        return int(r)
    return math.floor(x)


def as_fraction(rho) -> Fraction:
    """Coerce a density parameter to an exact Fraction.

    Floats go through their shortest decimal representation, so 0.8
    becomes Fraction(4, 5) rather than the binary expansion of 0.8.
    """
    if isinstance(rho, Fraction):
        return rho
    if isinstance(rho, str):
        return Fraction(rho)
    if isinstance(rho, float):
        return Fraction(str(rho))
    if isinstance(rho, int):
        return Fraction(rho)
    raise TypeError(f"cannot interpret density {rho!r}")


@dataclass(frozen=True)
class SinglePoint:
    p: Point

    def contains(self, q: Point) -> bool:
        return tuple(q) == tuple(self.p)

    def _truncated(self, end: Point) -> list[Point]:
        x, y = self.p
        return [(x, y)] if x <= end[0] and y <= end[1] else []


@dataclass(frozen=True)
class FinitePoints:
    points: tuple[Point, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple((int(x), int(y)) for x, y in self.points))

    def contains(self, q: Point) -> bool:
        return tuple(q) in set(self.points)

    def _truncated(self, end: Point) -> list[Point]:
        return [p for p in self.points if p[0] <= end[0] and p[1] <= end[1]]


@dataclass(frozen=True)
class AntiDiagonalLine:
    """{(-k, k) : k in Z}."""

    def contains(self, q: Point) -> bool:
        return q[0] + q[1] == 0

    def _truncated(self, end: Point) -> list[Point]:
        # reachability: -k <= end_x and k <= end_y
        k_lo, k_hi = -end[0], end[1]
        return [(-k, k) for k in range(k_lo, k_hi + 1)]


@dataclass(frozen=True)
class AntiDiagonalHalfLine:
    """{(-k, k) : k >= 0}."""

    def contains(self, q: Point) -> bool:
        return q[0] + q[1] == 0 and q[1] >= 0

    def _truncated(self, end: Point) -> list[Point]:
        k_lo, k_hi = max(0, -end[0]), end[1]
        return [(-k, k) for k in range(k_lo, k_hi + 1)]


@dataclass(frozen=True)
class Staircase:
    """{(n - floor(n / rho), n)} over an index range, 0 < rho < 1.

    index_range is one of 'nonpos' (n <= 0), 'pos' (n > 0), 'all'.
    """

    rho: Fraction
    index_range: str = "all"

    def __post_init__(self):
        object.__setattr__(self, "rho", as_fraction(self.rho))
        if not (0 < self.rho < 1):
            raise ValueError(f"staircase density must be in (0,1), got {self.rho}")
        if self.index_range not in ("nonpos", "pos", "all"):
            raise ValueError(f"bad index_range {self.index_range!r}")

    def x_of(self, n: int) -> int:
        p, q = self.rho.numerator, self.rho.denominator
        return n - (n * q) // p

    def _index_ok(self, n: int) -> bool:
        if self.index_range == "nonpos":
            return n <= 0
        if self.index_range == "pos":
            return n > 0
        return True

    def contains(self, q: Point) -> bool:
        n = q[1]
        return self._index_ok(n) and self.x_of(n) == q[0]

    def _truncated(self, end: Point) -> list[Point]:
        # x_of is nonincreasing in n, so {n : x_of(n) <= end_x} = [n_star, inf)
        mx, my = end
        p, q = self.rho.numerator, self.rho.denominator
        # initial estimate of n_star from x(n) ~ n (p - q) / p, then bracket
        est = (mx * p) // (p - q) if mx != 0 else 0
        lo = est
        while self.x_of(lo) <= mx:
            lo -= max(8, abs(lo) // 2 + 1)
        hi = est
        while self.x_of(hi) > mx:
            hi += max(8, abs(hi) // 2 + 1)
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if self.x_of(mid) <= mx:
                hi = mid
            else:
                lo = mid
        n_star = hi
        n_lo, n_hi = n_star, my
        if self.index_range == "nonpos":
            n_hi = min(n_hi, 0)
        elif self.index_range == "pos":
            n_lo = max(n_lo, 1)
        return [(self.x_of(n), n) for n in range(n_lo, n_hi + 1)]


@dataclass(frozen=True)
class UnionSet:
    left: "StartSet"
    right: "StartSet"

    def contains(self, q: Point) -> bool:
        return self.left.contains(q) or self.right.contains(q)

    def _truncated(self, end: Point) -> list[Point]:
        seen = dict.fromkeys(self.left._truncated(end))
        seen.update(dict.fromkeys(self.right._truncated(end)))
        return list(seen)


StartSet = Union[
    SinglePoint, FinitePoints, AntiDiagonalLine, AntiDiagonalHalfLine, Staircase, UnionSet
]


def truncate(start: StartSet, end: Point) -> np.ndarray:
    """Start-set points from which an up-right path to `end` exists.

    Returns an (n, 2) int64 array sorted by (row, col).  Empty result
    means no admissible path; callers map that to NoAdmissiblePath.
    """
    pts = start._truncated((int(end[0]), int(end[1])))
    if not pts:
        return np.empty((0, 2), dtype=np.int64)
    arr = np.array(sorted(set(pts), key=lambda p: (p[1], p[0])), dtype=np.int64)
    return arr


def row_member_cols(start: StartSet, j: int, i0: int, i1: int) -> list[int]:
    """Columns i in [i0, i1] with (i, j) in the set. Cheap per variant."""
    if isinstance(start, SinglePoint):
        x, y = start.p
        return [x] if y == j and i0 <= x <= i1 else []
    if isinstance(start, FinitePoints):
        return sorted({x for (x, y) in start.points if y == j and i0 <= x <= i1})
    if isinstance(start, AntiDiagonalLine):
        return [-j] if i0 <= -j <= i1 else []
    if isinstance(start, AntiDiagonalHalfLine):
        return [-j] if j >= 0 and i0 <= -j <= i1 else []
    if isinstance(start, Staircase):
        if start._index_ok(j):
            x = start.x_of(j)
            if i0 <= x <= i1:
                return [x]
        return []
    if isinstance(start, UnionSet):
        out = set(row_member_cols(start.left, j, i0, i1))
        out.update(row_member_cols(start.right, j, i0, i1))
        return sorted(out)
    raise TypeError(f"not a StartSet: {start!r}")


@dataclass(frozen=True)
class ForbiddenRegion:
    """Lattice points within `thickness` (Euclidean) of the segment a-b."""

    a: tuple[float, float]
    b: tuple[float, float]
    thickness: float = 2.0

    def contains(self, p: Point) -> bool:
        return self._dist2(float(p[0]), float(p[1])) <= self.thickness * self.thickness

    def _dist2(self, x: float, y: float) -> float:
        ax, ay = self.a
        bx, by = self.b
        dx, dy = bx - ax, by - ay
        len2 = dx * dx + dy * dy
        if len2 == 0.0:
            ex, ey = x - ax, y - ay
            return ex * ex + ey * ey
        lam = ((x - ax) * dx + (y - ay) * dy) / len2
        lam = 0.0 if lam < 0.0 else (1.0 if lam > 1.0 else lam)
        ex, ey = x - (ax + lam * dx), y - (ay + lam * dy)
        return ex * ex + ey * ey

    def row_interval(self, j: int) -> tuple[int, int] | None:
        """Blocked columns in row j as an inclusive interval, or None.

        The region is a capsule (segment dilated by a disk), which is
        convex, so its row section is a single interval.  A float bracket
        is widened and then refined with the same membership test used by
        `contains`, keeping both views of the region consistent.
        """
        ax, ay = self.a
        bx, by = self.b
        th = self.thickness
        ylo, yhi = min(ay, by) - th, max(ay, by) + th
        if j < ylo - 1 or j > yhi + 1:
            return None
        lo_f, hi_f = math.inf, -math.inf
        # end disks
        for (cx, cy) in (self.a, self.b):
            r2 = th * th - (j - cy) * (j - cy)
            if r2 >= 0.0:
                r = math.sqrt(r2)
                lo_f, hi_f = min(lo_f, cx - r), max(hi_f, cx + r)
        # slab between the two perpendiculars
        dx, dy = bx - ax, by - ay
        ell = math.hypot(dx, dy)
        if ell > 0.0 and dy != 0.0:
            # |(x-ax) dy - (j-ay) dx| <= th * ell
            c1 = (ax * dy + (j - ay) * dx - th * ell) / dy
            c2 = (ax * dy + (j - ay) * dx + th * ell) / dy
            xlo, xhi = min(c1, c2), max(c1, c2)
            # clamp to the along-segment parameter range [0, 1]
            # lam(x) = ((x-ax) dx + (j-ay) dy) / ell^2 linear in x
            if dx != 0.0:
                l1 = ax - (j - ay) * dy / dx
                l2 = ax + (ell * ell - (j - ay) * dy) / dx
                llo, lhi = min(l1, l2), max(l1, l2)
                xlo, xhi = max(xlo, llo), min(xhi, lhi)
            else:
                if not (min(ay, by) <= j <= max(ay, by)):
                    xhi = xlo - 1.0
            if xlo <= xhi:
                lo_f, hi_f = min(lo_f, xlo), max(hi_f, xhi)
        elif ell > 0.0 and dy == 0.0 and abs(j - ay) <= th:
            lo_f, hi_f = min(lo_f, min(ax, bx)), max(hi_f, max(ax, bx))
        if lo_f > hi_f:
            return None
        lo_i = math.ceil(lo_f) - 2
        hi_i = math.floor(hi_f) + 2
        while lo_i <= hi_i and not self.contains((lo_i, j)):
            lo_i += 1
        while hi_i >= lo_i and not self.contains((hi_i, j)):
            hi_i -= 1
        if lo_i > hi_i:
            return None
        return lo_i, hi_i
