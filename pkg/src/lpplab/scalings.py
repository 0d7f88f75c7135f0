"""Deterministic geometry: centerings, scales, characteristic points.

Every constructor is a pure function.  Floors are applied exactly where
the source formulas floor, i.e. to the outermost displayed expression;
each constructor notes its floor placement next to the formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import ForbiddenRegion, Point, ifloor

CBRT2 = 2.0 ** (1.0 / 3.0)
FLUCT = 2.0 ** (4.0 / 3.0)  # scale coefficient of t^(1/3) fluctuations on the diagonal


@dataclass(frozen=True)
class ScalingSpec:
    """A (center, scale) pair with the coefficients of each power of t."""

    center: float
    scale: float
    powers: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")


@dataclass(frozen=True)
class GeometrySpec:
    points: dict
    regions: dict = field(default_factory=dict)
    windows: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ShockParams:
    kind: str  # 'gue' or 'goe'
    rho1: float
    rho2: float
    sigma1: float | None = None
    sigma2: float | None = None
    c1: float | None = None
    c2: float | None = None


def pp_center_scale(eta: float) -> ScalingSpec:
    """Point-to-point law of large numbers and fluctuation coefficient for
    aspect ratio eta: value ~ (1+sqrt(eta))^2 * ell + eta^(-1/6)(1+sqrt(eta))^(4/3) ell^(1/3)."""
    if not eta > 0:
        raise ValueError("aspect ratio must be positive")
    mu = (1.0 + math.sqrt(eta)) ** 2
    sigma = eta ** (-1.0 / 6.0) * (1.0 + math.sqrt(eta)) ** (4.0 / 3.0)
    return ScalingSpec(center=mu, scale=sigma, powers={"ell": mu, "ell13": sigma})


def critical_center_scale(t: float, a: float, u: float) -> ScalingSpec:
    """Centering for the two-corner-start problem with tilt u at criticality a."""
    if a <= 0:
        raise ValueError("a must be positive")
    w = a + u / a
    center = 4.0 * t + 2.0 * t ** (2.0 / 3.0) * w - w * w * t ** (1.0 / 3.0) / 4.0
    return ScalingSpec(
        center=center,
        scale=FLUCT * t ** (1.0 / 3.0),
        powers={"t": 4.0, "t23": 2.0 * w, "t13": -w * w / 4.0},
    )


def corner_geometry(t: float, a: float, u: float) -> GeometrySpec:
    """Corner start points and the tilted end point of the critical problem."""
    if a <= 0:
        raise ValueError("a must be positive")
    g = ifloor(a * t ** (2.0 / 3.0))
    end = (ifloor(t + t ** (2.0 / 3.0) * (u / a)), ifloor(t))
    return GeometrySpec(points={"L_plus": (-g, 0), "L_minus": (0, -g), "E": end})


def cut_point(t: float, a: float, u: float, epsilon: float):
    """Intermediate point at macroscopic distance eps*t from the end, on the
    characteristic from the horizontal corner start; also the centering of the
    remaining leg and the variance deflation constant (1-eps)^(-1/3).

    eps=0 and eps=1 are allowed as degenerate checks (end point, start point).
    """
    if not (0.0 <= epsilon <= 1.0):
        raise ValueError("epsilon must lie in [0, 1]")
    if a <= 0:
        raise ValueError("a must be positive")
    w = u / a + a
    # floors on each coordinate of the displayed pair
    ex = ifloor(t * (1.0 - epsilon) + t ** (2.0 / 3.0) * (u / a - epsilon * w))
    ey = ifloor(t * (1.0 - epsilon))
    center = (
        4.0 * epsilon * t
        + 2.0 * epsilon * w * t ** (2.0 / 3.0)
        - epsilon * w * w * t ** (1.0 / 3.0) / 4.0
    )
    spec = ScalingSpec(
        center=center,
        scale=FLUCT * t ** (1.0 / 3.0),
        powers={"t": 4.0 * epsilon, "t23": 2.0 * epsilon * w, "t13": -epsilon * w * w / 4.0},
    )
    c_eps = math.inf if epsilon == 1.0 else (1.0 - epsilon) ** (-1.0 / 3.0)
    return (ex, ey), spec, c_eps


def shock_params(kind: str, *, beta: float | None = None, rho1: float | None = None,
                 rho2: float | None = None) -> ShockParams:
    """Densities and per-side scale constants at a shock."""
    if kind == "gue":
        if beta is None or not (0.0 <= beta < 1.0):
            raise ValueError("gue shock needs beta in [0, 1)")
        r1, r2 = (1.0 - beta) / 2.0, (1.0 + beta) / 2.0
        s1 = (1.0 + beta) ** (2.0 / 3.0) / (CBRT2 * (1.0 - beta) ** (1.0 / 3.0))
        s2 = (1.0 - beta) ** (2.0 / 3.0) / (CBRT2 * (1.0 + beta) ** (1.0 / 3.0))
        return ShockParams(kind="gue", rho1=r1, rho2=r2, sigma1=s1, sigma2=s2)
    if kind == "goe":
        if rho1 is None or rho2 is None or not (0.0 < rho2 <= rho1 < 1.0):
            raise ValueError("goe shock needs 0 < rho2 <= rho1 < 1")
        c1 = (1.0 - rho1) ** (-2.0 / 3.0) * rho1 ** (1.0 / 3.0)
        c2 = (1.0 - rho2) ** (-2.0 / 3.0) * rho2 ** (1.0 / 3.0)
        return ShockParams(kind="goe", rho1=rho1, rho2=rho2, c1=c1, c2=c2)
    raise ValueError(f"unknown shock kind {kind!r}")


@dataclass(frozen=True)
class StepMapping:
    """All derived quantities mapping the critically scaled step data onto a
    two-corner last-passage problem at time threshold `threshold`."""

    c1: float
    c2: float
    xi2: float
    t: int
    M: int
    L_plus: Point
    L_minus: Point
    threshold: float
    particle: int  # label whose position the threshold event describes
    a_hat: float   # corner offset parameter in the reduced time variable
    u_hat: float


def critical_step_mapping(T: float, a: float, u: float, s: float) -> StepMapping:
    if a <= 0:
        raise ValueError("a must be positive")
    if T < 1:
        raise ValueError("T must be at least 1")
    w = u / a + a
    c1 = -w / 2.0
    c2 = u / a
    xi2 = w * w / 2.0 - s / CBRT2
    t = ifloor(T / 4.0 + c1 * T ** (2.0 / 3.0))
    M = t + ifloor(c2 * T ** (2.0 / 3.0) + xi2 * T ** (1.0 / 3.0))
    g = ifloor(
        -a * ((4.0 * t) ** (2.0 / 3.0) - c1 * (2.0 / 3.0) * t ** (1.0 / 3.0) * 4.0 ** (4.0 / 3.0))
    )
    threshold = (
        4.0 * t
        - c1 * t ** (2.0 / 3.0) * 4.0 ** (5.0 / 3.0)
        + c1 * c1 * (2.0 / 3.0) * t ** (1.0 / 3.0) * 4.0 ** (7.0 / 3.0)
    )
    particle = ifloor(T / 4.0 - T ** (2.0 / 3.0) * w / 2.0)
    return StepMapping(
        c1=c1,
        c2=c2,
        xi2=xi2,
        t=t,
        M=M,
        L_plus=(g, 0),
        L_minus=(0, g),
        threshold=threshold,
        particle=particle,
        a_hat=a * 4.0 ** (2.0 / 3.0),
        u_hat=u * 4.0 ** (4.0 / 3.0),
    )


def timelike_points(x: float, y: float, t: float):
    """Start point offset along the axis and the centering of the passage
    time to (x t, x t).

    The center carries +2y(xt)^(2/3) - (y^2/4)(xt)^(1/3): that is the only
    sign choice coherent with the start point (-y (xt)^(2/3), 0) and with
    the mid-point centering below, which reproduces it exactly as a plain
    point-to-point expansion.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    px = ifloor(-y * (x * t) ** (2.0 / 3.0))
    center = 4.0 * x * t + 2.0 * y * (x * t) ** (2.0 / 3.0) - (y * y / 4.0) * (x * t) ** (1.0 / 3.0)
    spec = ScalingSpec(
        center=center,
        scale=FLUCT * (x * t) ** (1.0 / 3.0),
        powers={"xt": 4.0, "xt23": 2.0 * y, "xt13": -y * y / 4.0},
    )
    return (px, 0), spec


def timelike_midpoint(tau: float, a: float, u: float, t: float):
    """Mid point on the diagonal used to split the long passage time, and
    the centering of the first leg."""
    if not (a > tau > 0):
        raise ValueError("need a > tau > 0")
    px = ifloor(tau * t + u * t ** (2.0 / 3.0) * (tau * a ** (-1.0 / 3.0) - a ** (2.0 / 3.0)))
    py = ifloor(tau * t + 1.0)
    center = (
        4.0 * tau * t
        + 2.0 * tau * t ** (2.0 / 3.0) * u * a ** (-1.0 / 3.0)
        - u * u * tau * t ** (1.0 / 3.0) / (4.0 * a ** (2.0 / 3.0))
    )
    spec = ScalingSpec(
        center=center,
        scale=FLUCT * (a * t) ** (1.0 / 3.0),
        powers={"t": 4.0 * tau, "t23": 2.0 * tau * u * a ** (-1.0 / 3.0),
                "t13": -u * u * tau / (4.0 * a ** (2.0 / 3.0))},
    )
    return (px, py), spec


def forbidden_segments(kind: str, k: float, t: float, a: float, u: float = 0.0,
                       epsilon: float | None = None, b: float | None = None) -> ForbiddenRegion:
    """Thickness-2 segments that maximizers cross only with small probability.

    'plus'  : from (floor(-a t^(2/3) + k t^(2/3)), 0) to E+ shifted right by k t^(2/3)
    'minus' : from (0, floor(-a t^(2/3) + k t^(2/3))) to E shifted up by k t^(2/3)
    'r1'..'r4' : the diagonal-start segments, see line_geometry
    """
    if k <= 0:
        raise ValueError("k must be positive")
    t23 = t ** (2.0 / 3.0)
    if kind == "plus":
        if epsilon is None:
            raise ValueError("'plus' needs epsilon")
        ep, _, _ = cut_point(t, a, u, epsilon)
        start = (float(ifloor(-a * t23 + k * t23)), 0.0)
        end = (ep[0] + k * t23, float(ep[1]))
        return ForbiddenRegion(start, end, 2.0)
    if kind == "minus":
        e = (ifloor(t + t23 * (u / a)), ifloor(t))
        start = (0.0, float(ifloor(-a * t23 + k * t23)))
        end = (float(e[0]), e[1] + k * t23)
        return ForbiddenRegion(start, end, 2.0)
    if kind in ("r1", "r2"):
        geom = line_geometry("airy1", a=a, t=t, k=k)
        return geom.regions[kind.upper()]
    if kind in ("r3", "r4"):
        if b is None:
            raise ValueError("'r3'/'r4' need b")
        geom = line_geometry("airy21", a=a, b=b, t=t, k=k)
        return geom.regions[kind.upper()]
    raise ValueError(f"unknown segment kind {kind!r}")


def crossing_point(left: ForbiddenRegion, right: ForbiddenRegion) -> tuple[float, float]:
    """Intersection of the two segments' supporting lines."""
    (ax, ay), (bx, by) = left.a, left.b
    (cx, cy), (dx, dy) = right.a, right.b
    r = (bx - ax, by - ay)
    s = (dx - cx, dy - cy)
    den = r[0] * s[1] - r[1] * s[0]
    if den == 0.0:
        raise ValueError("segments are parallel")
    lam = ((cx - ax) * s[1] - (cy - ay) * s[0]) / den
    return ax + lam * r[0], ay + lam * r[1]


def restricted_problems_disjoint(t: float, a: float, u: float, epsilon: float, k: float) -> bool:
    """True when the admissible cells of the two restricted problems cannot
    overlap: at every shared row the left problem stays strictly left of the
    right one.  Holds whenever epsilon > k/a."""
    rp = forbidden_segments("plus", k, t, a, u, epsilon=epsilon)
    rm = forbidden_segments("minus", k, t, a, u)
    ep, _, _ = cut_point(t, a, u, epsilon)
    for row in range(0, ep[1] + 1):
        ivp = rp.row_interval(row)
        ivm = rm.row_interval(row)
        if ivp is None or ivm is None:
            return False
        if ivp[0] > ivm[1] + 1:
            return False
    return True


def two_density_points(rho1: float, rho2: float, xi: float, s: float, T: float,
                       nu: float = 0.9) -> GeometrySpec:
    """End point, characteristic feet, and slow-decorrelation cut point for
    the two-density problem; nu in (2/3, 1)."""
    if not (0.0 < rho2 <= rho1 < 1.0):
        raise ValueError("need 0 < rho2 <= rho1 < 1")
    t13 = T ** (1.0 / 3.0)
    e = (
        ifloor((1.0 - rho1 - rho2 + rho1 * rho2) * T - (s - xi) * t13),
        ifloor(rho1 * rho2 * T + xi * t13),
    )
    s1 = (ifloor((1.0 - rho1) * (rho1 - rho2) * T), ifloor(rho1 * (rho2 - rho1) * T))
    s2 = (ifloor((1.0 - rho2) * (rho2 - rho1) * T), ifloor((rho1 - rho2) * rho2 * T))
    tn = T**nu
    e2 = (e[0] - ifloor((1.0 - rho2) ** 2 * tn), e[1] - ifloor(rho2**2 * tn))
    return GeometrySpec(points={"E": e, "S_rho1": s1, "S_rho2": s2, "E_rho2": e2})


def critical_two_density_points(rho2: float, a: float, xi: float, s: float, T: float):
    """Critically merged two-density geometry: rho1 = rho2 + a T^(-1/3), the
    tilted end point, and a cut point at macroscopic distance T a^(-1/2)."""
    if a <= 0:
        raise ValueError("a must be positive")
    rho1 = rho2 + a * T ** (-1.0 / 3.0)
    if not (0.0 < rho2 < rho1 < 1.0):
        raise ValueError("rho1(a) left (0,1)")
    sp = shock_params("goe", rho1=rho1, rho2=rho2)
    t23 = T ** (2.0 / 3.0)
    e = (
        ifloor(
            (1.0 - rho1 - rho2 + rho1 * rho2) * T
            - xi * t23 * (1.0 / (a * rho2) - 1.0 / a)
            - s * T ** (1.0 / 3.0) / sp.c2
        ),
        ifloor(rho1 * rho2 * T + xi * t23 / a),
    )
    off = T * a ** (-0.5)
    e2 = (e[0] - ifloor((1.0 - rho2) ** 2 * off), e[1] - ifloor(rho2**2 * off))
    s1 = (ifloor((1.0 - rho1) * (rho1 - rho2) * T), ifloor(rho1 * (rho2 - rho1) * T))
    s2 = (ifloor((1.0 - rho2) * (rho2 - rho1) * T), ifloor((rho1 - rho2) * rho2 * T))
    return GeometrySpec(points={"E": e, "S_rho1": s1, "S_rho2": s2, "E_rho2": e2}), rho1


def end_on_antidiagonal(t: float, k: float) -> Point:
    """E(k) = (floor(t - k t^(2/3)), floor(t + k t^(2/3)))."""
    t23 = t ** (2.0 / 3.0)
    return (ifloor(t - k * t23), ifloor(t + k * t23))


def line_geometry(kind: str, a: float, t: float, k: float, b: float | None = None) -> GeometrySpec:
    """Points, start windows, and restriction segments for line-to-point and
    half-line-to-point decoupling geometries."""
    if t < 1:
        raise ValueError("t must be at least 1")
    t23 = t ** (2.0 / 3.0)
    kk = ifloor(k * t23)

    def antidiag_window(center: Point, half: int) -> list[Point]:
        return [(center[0] - i, center[1] + i) for i in range(-half, half + 1)]

    if kind == "airy1":
        e1 = (ifloor(t), ifloor(t))
        e2 = (ifloor(t) - ifloor(a * t23), ifloor(t) + ifloor(a * t23))
        e3 = (-ifloor(a / 4.0 * t23), ifloor(a / 4.0 * t23))
        e4 = (e3[0] + e1[0], e3[1] + e1[1])
        e5 = (-ifloor(3.0 * a / 4.0 * t23), ifloor(3.0 * a / 4.0 * t23))
        e6 = (e5[0] + e1[0], e5[1] + e1[1])
        f1 = antidiag_window((0, 0), kk)
        f2 = antidiag_window((-ifloor(a * t23), ifloor(a * t23)), kk)
        r1 = ForbiddenRegion(
            (float(e3[0] - kk), float(e3[1] + kk)), (float(e4[0] - kk), float(e4[1] + kk)), 2.0
        )
        r2 = ForbiddenRegion(
            (float(e5[0] + kk), float(e5[1] - kk)), (float(e6[0] + kk), float(e6[1] - kk)), 2.0
        )
        return GeometrySpec(
            points={"E1": e1, "E2": e2, "E3": e3, "E4": e4, "E5": e5, "E6": e6},
            regions={"R1": r1, "R2": r2},
            windows={"F1": f1, "F2": f2},
        )
    if kind == "airy21":
        if b is None:
            raise ValueError("'airy21' needs b")
        eb = end_on_antidiagonal(t, b)
        eba = end_on_antidiagonal(t, abs(b) + a)
        eb5 = end_on_antidiagonal(t, abs(b) + a / 5.0)
        e7 = (-ifloor((abs(b) + a) * t23), ifloor((abs(b) + a) * t23))
        e8 = (-ifloor((abs(b) + a / 5.0) * t23), ifloor((abs(b) + a / 5.0) * t23))
        f3 = antidiag_window(e7, kk)
        f4 = antidiag_window(e8, kk)
        r3 = ForbiddenRegion(
            (float(e8[0] - kk), float(e8[1] + kk)), (float(eb5[0] - kk), float(eb5[1] + kk)), 2.0
        )
        r4 = ForbiddenRegion(
            (float(e7[0] + kk), float(e7[1] - kk)), (float(eba[0] + kk), float(eba[1] - kk)), 2.0
        )
        return GeometrySpec(
            points={"E_b": eb, "E_ba": eba, "E_b5": eb5, "E7": e7, "E8": e8},
            regions={"R3": r3, "R4": r4},
            windows={"F3": f3, "F4": f4},
        )
    raise ValueError(f"unknown line geometry {kind!r}")


def default_k_schedule(a: float) -> float:
    """k(a) -> infinity with k(a)/a -> 0, valid down to a = 1."""
    return math.sqrt(a) / 2.0


def default_epsilon_schedule(a: float) -> float:
    """eps(a) in (k(a)/a, 1), eps(a) -> 0; equals 2/sqrt(a) once that is
    comfortably inside the domain (a >= ~14)."""
    ka = default_k_schedule(a)
    return min(2.0 / math.sqrt(a), (1.0 + ka / a) / 2.0)
