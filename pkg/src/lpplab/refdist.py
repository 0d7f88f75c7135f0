"""Tracy-Widom reference CDFs and the closed-form limit/bound assemblers.

F_gue(s) is the Fredholm determinant of the Airy kernel on (s, inf);
F_goe(s) the determinant with kernel Ai((x+y)/2)/2 on (s, inf).  Both are
evaluated by Nystrom discretization on Gauss-Legendre nodes mapped to the
half line through x = s + L (1+xi)/(1-xi) with L = 10.  The determinant
representations are the standard ones; two-resolution self-agreement and
an independent power-series Airy oracle pin the accuracy in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import airy as _scipy_airy

S_MIN, S_MAX = -10.0, 8.0
AIRY_MIN, AIRY_MAX = -40.0, 200.0
DEFAULT_ORDER = 64
_MAP_L = 10.0


def airy_ai(x: float) -> float:
    """Airy function on the supported range [-40, 200]."""
    if not (AIRY_MIN <= x <= AIRY_MAX):
        raise ValueError(f"airy_ai supports [{AIRY_MIN}, {AIRY_MAX}], got {x}")
    return float(_ai_aip(np.asarray([x], dtype=np.float64))[0][0])


def _ai_aip(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Ai, Ai') with hard zero past the double-precision underflow point."""
    ai = np.zeros_like(x)
    aip = np.zeros_like(x)
    small = x <= 120.0
    if np.any(small):
        with np.errstate(over="ignore", invalid="ignore"):
            a, ap, _, _ = _scipy_airy(x[small])
        ai[small] = a
        aip[small] = ap
    return ai, aip


@lru_cache(maxsize=8)
def _gl_nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


@dataclass(frozen=True)
class RefCdf:
    """Nystrom evaluator for one ensemble at a fixed quadrature order."""

    ensemble: str
    order: int = DEFAULT_ORDER
    _nodes: np.ndarray = field(init=False, repr=False)
    _weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.ensemble not in ("gue", "goe"):
            raise ValueError(f"unknown ensemble {self.ensemble!r}")
        xi, w = _gl_nodes(self.order)
        object.__setattr__(self, "_nodes", xi)
        object.__setattr__(self, "_weights", w)

    def cdf(self, s: float) -> float:
        if not (S_MIN <= s <= S_MAX):
            raise ValueError(f"tw_cdf supports s in [{S_MIN}, {S_MAX}], got {s}")
        xi, gw = self._nodes, self._weights
        x = s + _MAP_L * (1.0 + xi) / (1.0 - xi)
        w = gw * 2.0 * _MAP_L / (1.0 - xi) ** 2
        if self.ensemble == "gue":
            kern = _airy_kernel(x)
        else:
            kern = 0.5 * _ai_aip(0.5 * (x[:, None] + x[None, :]).ravel())[0].reshape(
                len(x), len(x)
            )
        sq = np.sqrt(w)
        m = kern * sq[:, None] * sq[None, :]
        det = float(np.linalg.det(np.eye(self.order) - m))
        return min(max(det, 0.0), 1.0)

    def table(self, grid: np.ndarray) -> np.ndarray:
        return np.array([self.cdf(float(s)) for s in grid])


def _airy_kernel(x: np.ndarray) -> np.ndarray:
    ai, aip = _ai_aip(x)
    num = ai[:, None] * aip[None, :] - aip[:, None] * ai[None, :]
    den = x[:, None] - x[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = num / den
    diag = aip * aip - x * ai * ai
    np.fill_diagonal(kern, diag)
    return kern


@lru_cache(maxsize=16)
def _evaluator(ensemble: str, order: int) -> RefCdf:
    return RefCdf(ensemble=ensemble, order=order)


def tw_cdf(ensemble: str, s: float, order: int = DEFAULT_ORDER) -> float:
    """Tracy-Widom CDF; strict about the supported range."""
    return _evaluator(ensemble, order).cdf(float(s))


def tw_cdf_sat(ensemble: str, s: float, order: int = DEFAULT_ORDER) -> float:
    """Saturating variant used by product/bound assemblers: outside the
    supported window the CDFs equal 0 or 1 to well below every tolerance
    used in this package."""
    if s < S_MIN:
        return 0.0
    if s > S_MAX:
        return 1.0
    return tw_cdf(ensemble, s, order)


def tw_table(ensemble: str, grid, order: int = DEFAULT_ORDER) -> np.ndarray:
    return _evaluator(ensemble, order).table(np.asarray(grid, dtype=np.float64))


def product_limit_tasep(s: float, u: float, cdf=None) -> float:
    """F(s) F(s - u 2^(4/3)); the particle-position scale convention."""
    f = cdf or (lambda v: tw_cdf_sat("gue", v))
    return f(s) * f(s - u * 2.0 ** (4.0 / 3.0))


def product_limit_lpp(s: float, u: float, cdf=None) -> float:
    """F(s) F(s - u / 2^(4/3)); the passage-time scale convention."""
    f = cdf or (lambda v: tw_cdf_sat("gue", v))
    return f(s) * f(s - u / 2.0 ** (4.0 / 3.0))


def sandwich_bounds(
    kind: str,
    s: float,
    u: float = 0.0,
    delta: float = 0.5,
    epsilon: float = 0.25,
    surrogate: float = 0.0,
    cdf=None,
) -> tuple[float, float]:
    """Lower/upper envelope for the decoupling probability at threshold s.

    kind 'tasep' uses the u*2^(4/3) shift, kind 'lpp' the u/2^(4/3) shift.
    `surrogate` stands in for the unquantified restriction-crossing term;
    the default 0 understates the upper bound, callers must report that.
    """
    if delta <= 0 or not (0.0 < epsilon < 1.0):
        raise ValueError("need delta > 0 and epsilon in (0,1)")
    if kind == "tasep":
        shift = u * 2.0 ** (4.0 / 3.0)
    elif kind == "lpp":
        shift = u / 2.0 ** (4.0 / 3.0)
    else:
        raise ValueError(f"unknown sandwich kind {kind!r}")
    f = cdf or (lambda v: tw_cdf_sat("gue", v))
    lower = f(s) * f(s - shift)
    upper = (
        f((s + delta) / (1.0 - epsilon) ** (1.0 / 3.0)) * f(s - shift)
        + f(-delta * epsilon ** (-1.0 / 3.0))
        + surrogate
    )
    return lower, min(upper, 1.0)


def general_sandwich(
    s1: float,
    s2: float,
    delta: float,
    c_eps: float,
    psi: float,
    g0,
    g1,
    g2,
) -> tuple[float, float]:
    """Assemble the general two-time sandwich from evaluator handles:
    lower = G1(s1) G2(s2), upper = G1((s1+delta) c_eps) G2(s2) + G0(-delta) + 3 psi."""
    if delta < 0 or psi < 0:
        raise ValueError("delta and psi must be nonnegative")
    lower = g1(s1) * g2(s2)
    upper = g1((s1 + delta) * c_eps) * g2(s2) + g0(-delta) + 3.0 * psi
    return lower, min(upper, 1.0)


def goe_shock_product(s: float, xi: float, rho1: float, rho2: float, cdf=None) -> float:
    """F_goe(2^(2/3)(s - xi/rho1) c1) * F_goe(2^(2/3)(s - xi/rho2) c2)."""
    from .scalings import shock_params

    sp = shock_params("goe", rho1=rho1, rho2=rho2)
    f = cdf or (lambda v: tw_cdf_sat("goe", v))
    c = 2.0 ** (2.0 / 3.0)
    return f(c * (s - xi / rho1) * sp.c1) * f(c * (s - xi / rho2) * sp.c2)


def gue_shock_product(s: float, xi: float, beta: float, cdf=None) -> float:
    """F_gue((s - xi/rho1)/sigma1) * F_gue((s - xi/rho2)/sigma2)."""
    from .scalings import shock_params

    sp = shock_params("gue", beta=beta)
    f = cdf or (lambda v: tw_cdf_sat("gue", v))
    return f((s - xi / sp.rho1) / sp.sigma1) * f((s - xi / sp.rho2) / sp.sigma2)


def curve_moments(ensemble: str, order: int = DEFAULT_ORDER,
                  lo: float = -9.5, hi: float = 7.5, n: int = 686) -> tuple[float, float]:
    """Mean and variance of the evaluated CDF curve via trapezoidal E[X^k] on
    a fixed grid (used for stability and cross checks, not as an oracle)."""
    grid = np.linspace(lo, hi, n)
    f = tw_table(ensemble, grid, order)
    pdf = np.gradient(f, grid)
    mass = np.trapezoid(pdf, grid)
    mean = np.trapezoid(grid * pdf, grid) / mass
    var = np.trapezoid((grid - mean) ** 2 * pdf, grid) / mass
    return float(mean), float(var)


def inverse_cdf_sampler(ensemble: str, order: int = DEFAULT_ORDER):
    """Monotone-interpolated inverse of the evaluated curve, for sampling."""
    grid = np.linspace(S_MIN, S_MAX, 1801)
    f = tw_table(ensemble, grid, order)
    f = np.maximum.accumulate(f)

    def sample(uniforms: np.ndarray) -> np.ndarray:
        return np.interp(uniforms, f, grid)

    return sample


def exceedance_fit(ks: np.ndarray, probs: np.ndarray) -> tuple[float, float]:
    """Least-squares slope/intercept of log p against k over the p > 0 part."""
    mask = probs > 0
    if mask.sum() < 2:
        return math.nan, math.nan
    k = np.asarray(ks, dtype=float)[mask]
    lp = np.log(np.asarray(probs, dtype=float)[mask])
    slope, intercept = np.polyfit(k, lp, 1)
    return float(slope), float(intercept)
