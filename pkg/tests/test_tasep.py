import math

import numpy as np
import pytest
from scipy import stats as sps

from lpplab import Seed, WeightField, last_passage
from lpplab.errors import BufferExhausted, ConfigError
from lpplab.geometry import FinitePoints, Staircase, UnionSet
from lpplab.tasep import (
    default_buffer,
    empirical_density,
    init_config,
    simulate_tasep,
    tasep_to_lpp,
)
from lpplab.weights import stream_key128


# ----------------------------------------------------------- initial data

def test_step_a_zero_is_classical_step():
    init = init_config("step-a", {"a": 0.0, "window": (0, 10)}, T=100.0)
    for n in range(0, 11):
        assert init.position0(n) == -n
    assert init.min_label() == 0


def test_step_a_gap():
    init = init_config("step-a", {"a": 1.0, "window": (-10, 5)}, T=1000.0)
    from lpplab.geometry import ifloor

    gap = ifloor(1.0 * 1000.0 ** (2.0 / 3.0))
    assert gap == 100
    assert init.position0(0) == 0
    assert init.position0(1) == -1 - gap
    assert init.position0(-gap) == gap
    assert init.min_label() == -gap


def test_shock_beta_positions():
    init = init_config("shock-beta", {"beta": 0.5, "window": (0, 5)}, T=100.0)
    assert init.position0(1) == -51
    assert init.position0(0) == 0
    assert init.min_label() == -50


def test_flat_positions():
    init = init_config("flat", {"rho": "1/2", "window": (-5, 5)}, T=10.0)
    for n in range(-5, 6):
        assert init.position0(n) == -2 * n
    assert init.min_label() is None


def test_two_density_positions():
    init = init_config("two-density", {"rho1": "4/5", "rho2": "1/5", "window": (-5, 5)}, T=10.0)
    assert init.position0(-4) == 5
    assert init.position0(4) == -20


def test_param_validation():
    with pytest.raises(ConfigError):
        init_config("step-a", {"a": -1.0, "window": (0, 1)}, 10.0)
    with pytest.raises(ConfigError):
        init_config("shock-beta", {"beta": 1.5, "window": (0, 1)}, 10.0)
    with pytest.raises(ConfigError):
        init_config("two-density", {"rho1": "1/5", "rho2": "4/5", "window": (0, 1)}, 10.0)
    with pytest.raises(ConfigError):
        init_config("step-a", {"a": 0.0, "window": (-3, 1)}, 10.0)  # below min label


# ------------------------------------------------------------- simulation

def test_time_zero_returns_init():
    init = init_config("step-a", {"a": 0.0, "window": (0, 8)}, T=0.0)
    st = simulate_tasep(init, 0.0, Seed(1))
    assert [st.position(n) for n in range(9)] == [-n for n in range(9)]


def test_single_particle_is_poisson():
    T = 5.0
    init = init_config("step-a", {"a": 0.0, "window": (0, 0)}, T=T)
    moves = []
    for r in range(20000):
        st = simulate_tasep(init, T, Seed(77, "poisson", r))
        moves.append(st.position(0) - 0)
    moves = np.array(moves)
    assert abs(moves.mean() - T) <= 4.0 * math.sqrt(T / len(moves))
    assert abs(moves.var() - T) <= 0.2


def test_order_preserved_and_monotone():
    init = init_config("step-a", {"a": 0.0, "window": (0, 30)}, T=20.0)
    st = simulate_tasep(init, 20.0, Seed(3))
    pos = st.positions
    assert np.all(np.diff(pos) < 0)
    assert all(st.position(n) >= -n for n in range(31))


def test_two_adjacent_particles_exclusion():
    init = init_config("step-a", {"a": 0.0, "window": (0, 1)}, T=50.0)
    for r in range(50):
        st = simulate_tasep(init, 50.0, Seed(5, "excl", r))
        assert st.position(1) < st.position(0)


def test_reference_implementation_bit_exact():
    """Pure-python Gillespie consuming the same Philox stream must reproduce
    the kernel's trajectory exactly."""
    T = 12.0
    init = init_config("step-a", {"a": 0.0, "window": (0, 12)}, T=T)
    seed = Seed(123, "bitexact", 7)
    st = simulate_tasep(init, T, seed)

    pos = [init.position0(n) for n in range(0, 13)]
    key = stream_key128(seed, "tasep-events-0")
    rng = np.random.Generator(np.random.Philox(key=key))
    buf = rng.random(1 << 16)
    idx = 0
    t_now = 0.0
    while True:
        elig = [i for i in range(len(pos)) if i == 0 or pos[i] + 1 < pos[i - 1]]
        dt = -math.log1p(-buf[idx]) / len(elig)
        if t_now + dt > T:
            break
        t_now += dt
        r = min(int(buf[idx + 1] * len(elig)), len(elig) - 1)
        idx += 2
        pos[elig[r]] += 1
    assert pos == list(st.positions)


def test_buffer_exhaustion_raises_without_retry():
    init = init_config("flat", {"rho": "4/5", "window": (0, 4)}, T=50.0)
    with pytest.raises(BufferExhausted):
        simulate_tasep(init, 50.0, Seed(9), buffer=3, max_retries=0)


def test_buffer_retry_recovers():
    init = init_config("flat", {"rho": "1/2", "window": (0, 4)}, T=10.0)
    st = simulate_tasep(init, 10.0, Seed(9), buffer=6, max_retries=4)
    assert st.buffer_valid


def test_default_buffer_validity_frequency():
    # spec-sized buffer: exhaustion should essentially never happen
    T = 20.0
    init = init_config("flat", {"rho": "1/2", "window": (0, 0)}, T=T)
    bad = 0
    for r in range(300):
        try:
            simulate_tasep(init, T, Seed(31, "lc", r), max_retries=0)
        except BufferExhausted:
            bad += 1
    assert bad == 0
    assert default_buffer(T) == math.ceil(4 * T + 10 * math.sqrt(T))


# ------------------------------------------------------------ density

def test_density_flat_profile():
    T = 400.0
    rho = 0.5
    # labels must cover every particle that can enter the observed sites
    init = init_config(
        "flat", {"rho": "1/2", "window": (-int(0.3 * T), int(0.76 * T) + 5)}, T=T
    )
    profs = []
    for r in range(6):
        st = simulate_tasep(init, T, Seed(17, "dens", r))
        profs.append(empirical_density(st, T, 0.1, (-0.5, 0.5)).values)
    mean_prof = np.mean(profs, axis=0)
    assert np.max(np.abs(mean_prof - rho)) < 0.06


def test_density_empty_window():
    from lpplab.tasep import TasepState

    st = TasepState(1.0, 0, -1, np.array([], dtype=np.int64), True, 0)
    prof = empirical_density(st, 10.0, 0.1)
    assert np.all(prof.values == 0.0)


def test_density_values_in_unit_interval():
    T = 100.0
    init = init_config("step-a", {"a": 0.0, "window": (0, 250)}, T=T)
    st = simulate_tasep(init, T, Seed(13))
    prof = empirical_density(st, T, 0.05, (-1.0, 1.0))
    assert np.all((prof.values >= 0.0) & (prof.values <= 1.0))


# ----------------------------------------------------- growth-picture link

def test_tasep_to_lpp_step_column():
    init = init_config("step-a", {"a": 0.0, "window": (0, 5)}, T=10.0)
    start, end = tasep_to_lpp(init, 3, 7)
    assert end == (7, 3)
    assert isinstance(start, FinitePoints)
    assert set(start.points) == {(0, k) for k in range(0, 4)}


def test_tasep_to_lpp_shock_shape():
    T = 100.0
    init = init_config("shock-beta", {"beta": 0.5, "window": (-50, 5)}, T=T)
    start, _ = tasep_to_lpp(init, 3, 5)
    pts = set(start.points)
    assert {(0, k) for k in range(-50, 1)} <= pts
    assert {(-50, k) for k in range(1, 4)} <= pts


def test_tasep_to_lpp_staircase_variants():
    init = init_config("flat", {"rho": "1/2", "window": (0, 5)}, T=10.0)
    start, _ = tasep_to_lpp(init, 2, 4)
    assert isinstance(start, UnionSet)
    init2 = init_config("two-density", {"rho1": "4/5", "rho2": "1/5", "window": (0, 5)}, T=10.0)
    start2, _ = tasep_to_lpp(init2, 2, 4)
    assert isinstance(start2.left, Staircase) and isinstance(start2.right, Staircase)


def test_single_particle_gamma_duality():
    # P(x_0(T) >= m) = P(Gamma(m, 1) <= T), via the growth picture
    T = 10.0
    init = init_config("step-a", {"a": 0.0, "window": (0, 0)}, T=T)
    samples = np.array(
        [simulate_tasep(init, T, Seed(3, "gamma", r)).position(0) for r in range(20000)]
    )
    for m in (3, 7, 10, 14):
        emp = float(np.mean(samples >= m))
        want = sps.gamma.cdf(T, a=m)
        assert abs(emp - want) < 0.02


def test_lpp_tasep_two_sample_consistency():
    # desk-scale version of the cross-module oracle
    T = 50.0
    n = 5
    init = init_config("step-a", {"a": 0.0, "window": (0, n)}, T=T)
    xs_t = np.array(
        [simulate_tasep(init, T, Seed(41, "2s-t", r)).position(n) for r in range(3000)]
    )
    start, _ = tasep_to_lpp(init, n, 0)
    m_hi = int(T + 10 * math.sqrt(T)) + 10
    xs_l = []
    from lpplab import multi_endpoint_last_passage

    for r in range(3000):
        fld = WeightField(Seed(41, "2s-l", r), zero_set=start)
        res = multi_endpoint_last_passage(fld, start, [(mm, n) for mm in range(0, n + m_hi)])
        vals = np.array([q.value for q in res])
        xs_l.append(int(np.searchsorted(vals, T, side="right")) - 1 - n)
    from lpplab import stats as st

    d = st.two_sample_ks(st.ecdf(xs_t), st.ecdf(np.array(xs_l, dtype=float)))
    assert d <= 0.05


def test_tasep_to_lpp_label_outside_window():
    init = init_config("step-a", {"a": 0.0, "window": (0, 5)}, T=10.0)
    with pytest.raises(ConfigError):
        tasep_to_lpp(init, 9, 5)
