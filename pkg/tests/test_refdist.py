import math

import mpmath as mp
import numpy as np
import pytest
from scipy.special import airy as scipy_airy

from lpplab import refdist

# values pinned by the pre-build oracle run: two-resolution Nystrom
# self-agreement at orders 64/128 (1e-14), cross-checked against the
# independent power-series Airy oracle and the published curve mean
PINNED_F_GUE_0 = 0.9693728283552626
PINNED_F_GOE_0 = 0.8319080662029520
PINNED_AI_0 = 0.3550280538878172
PUBLISHED_MEAN_GUE = -1.7710868074
PUBLISHED_MEAN_GOE = -1.2065335746


def ai_series(x, dps):
    """Independent Airy oracle: Maclaurin series in exact arbitrary precision."""
    mp.mp.dps = dps
    xm = mp.mpf(x)
    c1 = mp.mpf(3) ** mp.mpf("-2/3") / mp.gamma(mp.mpf(2) / 3)
    c2 = mp.mpf(3) ** mp.mpf("-1/3") / mp.gamma(mp.mpf(1) / 3)
    f_term, g_term = mp.mpf(1), xm
    f_sum, g_sum = f_term, g_term
    for k in range(1, 300):
        f_term *= xm**3 / ((3 * k) * (3 * k - 1))
        g_term *= xm**3 / ((3 * k + 1) * (3 * k))
        f_sum += f_term
        g_sum += g_term
        if abs(f_term) < mp.mpf(10) ** (-dps) and abs(g_term) < mp.mpf(10) ** (-dps):
            break
    return c1 * f_sum - c2 * g_sum


@pytest.mark.parametrize("x", [0.0, -2.0, 1.5, -5.0, 3.0])
def test_airy_against_series_oracle(x):
    a30, a50 = ai_series(x, 30), ai_series(x, 50)
    assert abs(a30 - a50) < 1e-12  # two precisions agree
    assert abs(refdist.airy_ai(x) - float(a50)) < 1e-12


def test_airy_zero_closed_form():
    mp.mp.dps = 30
    closed = float(mp.mpf(3) ** mp.mpf("-2/3") / mp.gamma(mp.mpf(2) / 3))
    assert refdist.airy_ai(0.0) == pytest.approx(closed, abs=1e-14)
    assert refdist.airy_ai(0.0) == pytest.approx(PINNED_AI_0, abs=1e-12)


def test_airy_positive_decay():
    vals = [refdist.airy_ai(x) for x in np.arange(1.0, 12.0, 0.5)]
    assert all(v > 0 for v in vals)
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_airy_wronskian():
    for x in (-5.0, 0.0, 5.0):
        ai, aip, bi, bip = scipy_airy(x)
        assert abs(ai * bip - aip * bi - 1.0 / math.pi) < 1e-9


def test_airy_range():
    with pytest.raises(ValueError):
        refdist.airy_ai(-41.0)
    with pytest.raises(ValueError):
        refdist.airy_ai(201.0)


# ------------------------------------------------------------------ tw_cdf

def test_pinned_values():
    assert refdist.tw_cdf("gue", 0.0) == pytest.approx(PINNED_F_GUE_0, abs=1e-8)
    assert refdist.tw_cdf("goe", 0.0) == pytest.approx(PINNED_F_GOE_0, abs=1e-8)


def test_two_resolution_agreement():
    grid = np.linspace(-8.0, 6.0, 29)
    for ens in ("gue", "goe"):
        lo = refdist.tw_table(ens, grid, order=refdist.DEFAULT_ORDER)
        hi = refdist.tw_table(ens, grid, order=2 * refdist.DEFAULT_ORDER)
        assert np.max(np.abs(lo - hi)) <= 1e-8


def test_monotone_unit_range():
    grid = np.linspace(-10.0, 8.0, 1000)
    for ens in ("gue", "goe"):
        vals = refdist.tw_table(ens, grid)
        assert np.all(np.diff(vals) >= -1e-12)
        assert np.all((vals >= 0.0) & (vals <= 1.0))


def test_endpoints():
    for ens in ("gue", "goe"):
        assert refdist.tw_cdf(ens, -10.0) <= 1e-6
        assert refdist.tw_cdf(ens, 8.0) >= 1.0 - 1e-6
    assert refdist.tw_cdf("gue", 8.0) >= 1.0 - 1e-6


def test_right_tail_example():
    assert refdist.tw_cdf("gue", 8.0) >= 1.0 - 1e-6


def test_range_errors_and_saturation():
    with pytest.raises(ValueError):
        refdist.tw_cdf("gue", -11.0)
    with pytest.raises(ValueError):
        refdist.tw_cdf("goe", 9.0)
    assert refdist.tw_cdf_sat("gue", -50.0) == 0.0
    assert refdist.tw_cdf_sat("gue", 50.0) == 1.0


def test_curve_moments_stable_and_cross_checked():
    for ens, published in (("gue", PUBLISHED_MEAN_GUE), ("goe", PUBLISHED_MEAN_GOE)):
        m1, v1 = refdist.curve_moments(ens, order=refdist.DEFAULT_ORDER)
        m2, v2 = refdist.curve_moments(ens, order=2 * refdist.DEFAULT_ORDER)
        assert abs(m1 - m2) < 1e-4 and abs(v1 - v2) < 1e-4
        assert m1 == pytest.approx(published, abs=1e-3)


def test_inverse_cdf_sampling_self_consistency():
    sampler = refdist.inverse_cdf_sampler("gue")
    u = (np.arange(100000) + 0.5) / 100000.0
    samples = sampler(u)
    mean_curve, _ = refdist.curve_moments("gue")
    assert abs(samples.mean() - mean_curve) < 0.01


# ------------------------------------------------------- product assemblers

def test_product_limit_trivial():
    f0 = refdist.tw_cdf("gue", 0.0)
    assert refdist.product_limit_tasep(0.0, 0.0) == pytest.approx(f0 * f0, abs=1e-12)
    assert refdist.product_limit_lpp(0.0, 0.0) == pytest.approx(f0 * f0, abs=1e-12)
    # u -> infinity kills the product
    assert refdist.product_limit_tasep(0.0, 100.0) == 0.0


def test_product_monotone_in_u():
    us = np.linspace(0.0, 3.0, 13)
    vals = [refdist.product_limit_tasep(0.5, float(u)) for u in us]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_products_compose_mock_cdf():
    # assemblers are pure compositions: a mock CDF reproduces the algebra
    mock = lambda s: min(max((s + 5.0) / 10.0, 0.0), 1.0)
    s, u = 0.3, 0.7
    want = mock(s) * mock(s - u * 2.0 ** (4.0 / 3.0))
    assert refdist.product_limit_tasep(s, u, cdf=mock) == want
    lo, up = refdist.sandwich_bounds("lpp", s, u, 0.5, 0.25, 0.0, cdf=mock)
    assert lo == mock(s) * mock(s - u / 2.0 ** (4.0 / 3.0))
    want_up = mock((s + 0.5) / 0.75 ** (1.0 / 3.0)) * mock(s - u / 2.0 ** (4.0 / 3.0)) + mock(
        -0.5 * 0.25 ** (-1.0 / 3.0)
    )
    assert up == min(want_up, 1.0)


def test_sandwich_limits():
    # delta large: the slack term vanishes and the first factor saturates
    lo, up = refdist.sandwich_bounds("tasep", 0.0, 0.0, delta=14.0, epsilon=0.25, surrogate=0.005)
    f0 = refdist.tw_cdf("gue", 0.0)
    assert up == pytest.approx(f0 + 0.005, abs=1e-6)
    # the clamp keeps the upper bound a probability
    _, up_clamped = refdist.sandwich_bounds("tasep", 0.0, 0.0, delta=14.0, epsilon=0.25, surrogate=0.5)
    assert up_clamped == 1.0
    # delta -> 0 slower than eps^(1/3): the sandwich closes
    lo2, up2 = refdist.sandwich_bounds("tasep", 0.0, 0.0, delta=0.01, epsilon=1e-12, surrogate=0.0)
    assert up2 - lo2 < 0.02
    assert lo2 <= up2


def test_sandwich_direct_point():
    lo, up = refdist.sandwich_bounds("lpp", 0.0, 0.0, delta=0.5, epsilon=0.25, surrogate=0.0)
    f0 = refdist.tw_cdf("gue", 0.0)
    assert lo == pytest.approx(f0 * f0, abs=1e-10)
    assert lo <= up <= 1.0


def test_sandwich_domain():
    with pytest.raises(ValueError):
        refdist.sandwich_bounds("lpp", 0.0, 0.0, delta=0.0, epsilon=0.5)
    with pytest.raises(ValueError):
        refdist.sandwich_bounds("nope", 0.0, 0.0, delta=0.1, epsilon=0.5)


def test_general_sandwich_wellformed():
    # with any distribution handles, delta >= 0, psi >= 0, c_eps >= 1 the
    # lower bound never exceeds the upper bound
    uni = lambda s: min(max((s + 1.0) / 2.0, 0.0), 1.0)
    for delta in (0.0, 0.3, 2.0):
        for c_eps in (1.0, 1.2, 2.0):
            for psi in (0.0, 0.05):
                lo, up = refdist.general_sandwich(0.1, -0.2, delta, c_eps, psi, uni, uni, uni)
                assert lo <= up + 1e-12


def test_goe_shock_product():
    f = refdist.tw_cdf_sat
    c = 2.0 ** (2.0 / 3.0)
    val = refdist.goe_shock_product(0.0, 0.0, 0.3, 0.3)
    from lpplab.scalings import shock_params

    sp = shock_params("goe", rho1=0.3, rho2=0.3)
    assert val == pytest.approx(f("goe", 0.0 * c * sp.c1) ** 2, abs=1e-12)
    # specific point from pinned evaluations
    sp2 = shock_params("goe", rho1=0.8, rho2=0.2)
    want = f("goe", c * 0.0 * sp2.c1) * f("goe", c * 0.0 * sp2.c2)
    assert refdist.goe_shock_product(0.0, 0.0, 0.8, 0.2) == pytest.approx(want, abs=1e-12)
    assert want == pytest.approx(PINNED_F_GOE_0**2, abs=1e-8)
    assert refdist.goe_shock_product(-9.0, 0.0, 0.8, 0.2) < 1e-4


def test_gue_shock_product():
    # beta -> 0: both arguments approach s * 2^(1/3)
    v = refdist.gue_shock_product(0.0, 0.0, 1e-9)
    assert v == pytest.approx(PINNED_F_GUE_0**2, abs=1e-6)
    assert refdist.gue_shock_product(7.9, 0.0, 0.5) > 0.999
    from lpplab.scalings import shock_params

    sp = shock_params("gue", beta=0.5)
    want = refdist.tw_cdf_sat("gue", (0.0 - 1.0 / sp.rho1) / sp.sigma1) * refdist.tw_cdf_sat(
        "gue", (0.0 - 1.0 / sp.rho2) / sp.sigma2
    )
    assert refdist.gue_shock_product(0.0, 1.0, 0.5) == pytest.approx(want, abs=1e-12)


def test_exceedance_fit():
    ks = np.array([0.5, 1.0, 1.5, 2.0])
    probs = np.exp(-1.7 * ks)
    slope, intercept = refdist.exceedance_fit(ks, probs)
    assert slope == pytest.approx(-1.7, abs=1e-9)
    s2, _ = refdist.exceedance_fit(ks, np.array([0.1, 0.0, 0.0, 0.0]))
    assert math.isnan(s2)
