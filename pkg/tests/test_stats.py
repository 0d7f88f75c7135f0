import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from lpplab import stats


def test_ecdf_basic():
    e = stats.ecdf([1.0, 2.0, 3.0])
    assert e(2.0) == pytest.approx(2.0 / 3.0)
    assert e(0.5) == 0.0
    assert e(3.0) == 1.0
    assert e(2.4) == pytest.approx(2.0 / 3.0)  # right-continuous steps


def test_ecdf_empty():
    with pytest.raises(ValueError):
        stats.ecdf([])


@given(hs.lists(hs.floats(-50, 50), min_size=1, max_size=60))
@settings(max_examples=60, deadline=None)
def test_ecdf_properties(xs):
    e = stats.ecdf(xs)
    grid = np.linspace(min(xs) - 1, max(xs) + 1, 37)
    vals = e(grid)
    assert np.all(np.diff(vals) >= 0)
    assert vals[0] >= 0.0 and vals[-1] == 1.0


def test_ks_distance_self_is_zero():
    xs = np.array([0.5, 1.5, 2.5, 3.5])
    e = stats.ecdf(xs)

    def self_step(v):
        return e(v)

    assert stats.ks_distance(e, self_step) == 0.0


def test_ks_distance_against_uniform():
    # analytic: ECDF of {0.5} vs U[0,1] has sup distance 0.5 at the atom
    e = stats.ecdf([0.5])
    d = stats.ks_distance(e, lambda s: min(max(s, 0.0), 1.0))
    assert d == pytest.approx(0.5)


def test_two_sample_ks_same_stream_below_critical():
    rng = np.random.default_rng(7)
    a, b = rng.normal(size=10000), rng.normal(size=10000)
    d = stats.two_sample_ks(stats.ecdf(a), stats.ecdf(b))
    assert d < stats.ks_two_sample_critical(10000, 10000)


def test_two_sample_ks_detects_shift():
    rng = np.random.default_rng(8)
    a, b = rng.normal(size=4000), rng.normal(size=4000) + 1.0
    d = stats.two_sample_ks(stats.ecdf(a), stats.ecdf(b))
    assert d > 0.3


def test_ecdf2_and_grid():
    e2 = stats.ecdf2([0.0, 1.0, 2.0], [2.0, 1.0, 0.0])
    assert e2(1.0, 1.0) == pytest.approx(1.0 / 3.0)
    grid = np.array([0.0, 1.0, 2.0])
    joint = e2.on_grid(grid, grid)
    assert joint.shape == (3, 3)
    assert joint[2, 2] == 1.0
    assert joint[0, 0] == 0.0  # (0,2) pair has y > 0


def test_decoupling_gap_comonotone():
    rng = np.random.default_rng(9)
    x = rng.normal(size=20000)
    e2 = stats.ecdf2(x, x)
    ex = stats.ecdf(x)
    grid = np.linspace(-3, 3, 61)
    joint = e2.on_grid(grid, grid)
    prod = np.outer(ex(grid), ex(grid))
    gap = stats.decoupling_gap(joint, prod)
    # sup of F(1-F) is 1/4 at the median
    assert gap["sup_signed"] == pytest.approx(0.25, abs=0.02)


def test_decoupling_gap_independent():
    rng = np.random.default_rng(10)
    x, y = rng.normal(size=20000), rng.normal(size=20000)
    e2 = stats.ecdf2(x, y)
    grid = np.linspace(-3, 3, 21)
    joint = e2.on_grid(grid, grid)
    prod = np.outer(stats.ecdf(x)(grid), stats.ecdf(y)(grid))
    gap = stats.decoupling_gap(joint, prod)
    assert abs(gap["sup_abs"]) < 3.0 * np.sqrt(0.25 / 20000) * 3
    # single grid point reduces to the pointwise difference
    single = stats.decoupling_gap(joint[:1, :1], prod[:1, :1])
    assert single["sup_signed"] == pytest.approx(joint[0, 0] - prod[0, 0])


def test_decoupling_gap_mismatch():
    with pytest.raises(ValueError):
        stats.decoupling_gap(np.zeros((2, 2)), np.zeros((3, 3)))


def test_binomial_and_diff_se():
    assert stats.binomial_se(0.5, 100) == pytest.approx(0.05)
    assert stats.binomial_se(0.0, 100) == 0.0
    assert stats.diff_se(0.5, 0.5, 100) == pytest.approx(np.sqrt(0.5 / 100))


def test_quantile_se_normal_sample():
    rng = np.random.default_rng(11)
    xs = np.sort(rng.normal(size=20000))
    se = stats.quantile_se(xs, 0.5)
    # asymptotic: sqrt(p(1-p)/n)/phi(0) = 0.5/(0.3989 sqrt(n))
    assert se == pytest.approx(0.5 / (0.3989 * np.sqrt(20000)), rel=0.25)


def test_iqr():
    xs = np.arange(101.0)
    assert stats.iqr(xs) == pytest.approx(50.0)
