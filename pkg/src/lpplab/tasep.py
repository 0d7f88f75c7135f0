"""Event-driven TASEP on a finite label window, with exact truncation audit.

Particles are labeled right to left; the position of label n never depends
on labels above n, so families whose labels are bounded below (step-like
and shock-like data) are simulated exactly.  Families with infinitely many
particles to the right (constant-density data) are truncated `buffer`
labels beyond the observed window, and a conservative light-cone audit
tracks how far the missing particles could have influenced the truncated
run: a frozen "shadow" lower-bounds the true position of the last possibly
contaminated particle, and the next label is marked as soon as it rings
adjacent to that shadow.  If the front reaches the observed window the
simulation retries with a doubled buffer and ultimately raises
BufferExhausted.

All randomness comes from a Philox counter generator keyed by the run
seed, consumed in a fixed order (one waiting-time uniform, one selection
uniform per event), so results are reproducible and thread-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from .errors import BufferExhausted, ConfigError
from .geometry import FinitePoints, Staircase, StartSet, UnionSet, as_fraction, ifloor
from .weights import Seed, stream_key128

_CHUNK = 1 << 16


@dataclass(frozen=True)
class TasepInit:
    """Initial particle data over a label window [n_min, n_max]."""

    kind: str               # 'step-a' | 'shock-beta' | 'flat' | 'two-density'
    window: tuple[int, int]
    T: float
    a: float | None = None
    beta: float | None = None
    rho: Fraction | None = None
    rho1: Fraction | None = None
    rho2: Fraction | None = None

    def min_label(self) -> int | None:
        """Smallest label that carries a particle; None if unbounded below."""
        if self.kind == "step-a":
            return -ifloor(self.a * self.T ** (2.0 / 3.0))
        if self.kind == "shock-beta":
            return -ifloor(self.beta * self.T)
        return None

    def position0(self, n: int) -> int:
        if self.kind in ("step-a", "shock-beta"):
            if self.kind == "step-a":
                gap = ifloor(self.a * self.T ** (2.0 / 3.0))
            else:
                gap = ifloor(self.beta * self.T)
            if n < -gap:
                raise ConfigError(f"label {n} below the leftmost particle {-gap}")
            return -n if n <= 0 else -n - gap
        if self.kind == "flat":
            p, q = self.rho.numerator, self.rho.denominator
            return -((n * q) // p)
        if self.kind == "two-density":
            r = self.rho1 if n <= 0 else self.rho2
            p, q = r.numerator, r.denominator
            return -((n * q) // p)
        raise ConfigError(f"unknown initial data kind {self.kind!r}")

    def start_set(self) -> StartSet:
        """The lattice start set {(x_k(0)+k, k)} of the growth picture."""
        if self.kind in ("step-a", "shock-beta"):
            # finite up to the window top; labels above never matter for it
            lo = self.min_label()
            hi = self.window[1]
            pts = tuple((self.position0(k) + k, k) for k in range(lo, hi + 1))
            return FinitePoints(pts)
        if self.kind == "flat":
            return UnionSet(Staircase(self.rho, "nonpos"), Staircase(self.rho, "pos"))
        if self.kind == "two-density":
            return UnionSet(Staircase(self.rho1, "nonpos"), Staircase(self.rho2, "pos"))
        raise ConfigError(f"unknown initial data kind {self.kind!r}")


def init_config(kind: str, params: dict, T: float) -> TasepInit:
    """Validated initial data; `params` must carry the label window."""
    window = tuple(params.get("window", (0, 0)))
    if window[0] > window[1]:
        raise ConfigError(f"empty label window {window}")
    if kind == "step-a":
        a = float(params["a"])
        if a < 0:
            raise ConfigError("step-a needs a >= 0")
        init = TasepInit(kind=kind, window=window, T=T, a=a)
    elif kind == "shock-beta":
        beta = float(params["beta"])
        if not (0.0 < beta < 1.0):
            raise ConfigError("shock-beta needs beta in (0,1)")
        init = TasepInit(kind=kind, window=window, T=T, beta=beta)
    elif kind == "flat":
        rho = as_fraction(params["rho"])
        if not (0 < rho < 1):
            raise ConfigError("flat needs rho in (0,1)")
        init = TasepInit(kind=kind, window=window, T=T, rho=rho)
    elif kind == "two-density":
        rho1, rho2 = as_fraction(params["rho1"]), as_fraction(params["rho2"])
        if not (0 < rho2 < rho1 < 1):
            raise ConfigError("two-density needs 1 > rho1 > rho2 > 0")
        init = TasepInit(kind=kind, window=window, T=T, rho1=rho1, rho2=rho2)
    else:
        raise ConfigError(f"unknown initial data kind {kind!r}")
    lo = init.min_label()
    if lo is not None and window[0] < lo:
        raise ConfigError(f"window starts at {window[0]} but labels start at {lo}")
    return init


@dataclass
class TasepState:
    time: float
    n_min: int
    n_max: int
    positions: np.ndarray  # positions[i] = x_{n_min + i}(time)
    buffer_valid: bool
    events: int

    def position(self, n: int) -> int:
        if not (self.n_min <= n <= self.n_max):
            raise KeyError(f"label {n} outside window [{self.n_min}, {self.n_max}]")
        return int(self.positions[n - self.n_min])


@dataclass
class DensityProfile:
    centers: np.ndarray  # bin centers in xi = position / T
    values: np.ndarray   # occupied fraction per bin
    T: float


@njit(cache=True, nogil=True)
def _fenwick_add(tree, i, delta):
    i += 1
    while i < tree.shape[0]:
        tree[i] += delta
        i += i & (-i)


@njit(cache=True, nogil=True)
def _fenwick_select(tree, log2n, k):
    # smallest index i with prefix_sum(0..i) > k
    pos = 0
    rem = k
    mask = 1 << log2n
    while mask > 0:
        nxt = pos + mask
        if nxt < tree.shape[0] and tree[nxt] <= rem:
            rem -= tree[nxt]
            pos = nxt
        mask >>= 1
    return pos  # 0-based particle index


@njit(cache=True, nogil=True)
def _run_events(pos, tree, log2n, state, uni, horizon, ghost, limit):
    """Advance until the horizon, the uniform chunk runs out, or the audit
    front crosses `limit`.  state = [t_now, n_elig, front_next, shadow,
    events]; returns (status, consumed): 0 horizon, 1 refill, 2 exhausted."""
    t_now = state[0]
    n_elig = int(state[1])
    front = int(state[2])
    shadow = state[3]
    events = state[4]
    w = pos.shape[0]
    idx = 0
    nu = uni.shape[0]
    status = 1
    while True:
        if n_elig <= 0:
            t_now = horizon
            status = 0
            break
        if idx + 2 > nu:
            status = 1
            break
        dt = -math.log1p(-uni[idx]) / n_elig
        if t_now + dt > horizon:
            t_now = horizon
            idx += 1
            status = 0
            break
        t_now += dt
        r = int(uni[idx + 1] * n_elig)
        if r >= n_elig:
            r = n_elig - 1
        idx += 2
        i = _fenwick_select(tree, log2n, r)
        if ghost and i == front and pos[i] + 1 >= shadow:
            shadow = pos[i]
            front += 1
            while front < w and pos[front] + 1 >= shadow:
                shadow = pos[front]
                front += 1
            if front > limit:
                status = 2
                break
        pos[i] += 1
        events += 1.0
        if i > 0 and pos[i] + 1 == pos[i - 1]:
            _fenwick_add(tree, i, -1)
            n_elig -= 1
        if i + 1 < w and pos[i + 1] + 2 == pos[i]:
            _fenwick_add(tree, i + 1, 1)
            n_elig += 1
    state[0] = t_now
    state[1] = n_elig
    state[2] = front
    state[3] = shadow
    state[4] = events
    return status, idx


def default_buffer(T: float) -> int:
    """Labels of truncation margin: light-cone bound plus fluctuation slack."""
    return math.ceil(4.0 * T + 10.0 * math.sqrt(T)) if T > 0 else 8


def simulate_tasep(
    init: TasepInit,
    horizon: float,
    seed: Seed,
    buffer: int | None = None,
    max_retries: int = 3,
) -> TasepState:
    """Exclusion dynamics up to `horizon` with per-event exponential clocks."""
    if horizon < 0:
        raise ConfigError("horizon must be nonnegative")
    w_lo, w_hi = init.window
    bounded = init.min_label()
    attempt = 0
    buf = buffer if buffer is not None else default_buffer(horizon)
    while True:
        if bounded is not None:
            n_lo = bounded
            ghost = False
        else:
            n_lo = w_lo - buf
            ghost = True
        state = _simulate_window(init, horizon, seed, n_lo, w_hi, ghost, w_lo, attempt)
        if state is not None:
            out = TasepState(
                time=horizon,
                n_min=w_lo,
                n_max=w_hi,
                positions=state[0][w_lo - n_lo :].copy(),
                buffer_valid=True,
                events=state[1],
            )
            return out
        attempt += 1
        if attempt > max_retries:
            raise BufferExhausted(
                f"truncation front reached the observed window even with buffer {buf}"
            )
        buf *= 2


def _simulate_window(init, horizon, seed, n_lo, n_hi, ghost, w_lo, attempt):
    pos = np.array([init.position0(n) for n in range(n_lo, n_hi + 1)], dtype=np.int64)
    if not np.all(np.diff(pos) < 0):
        raise ConfigError("initial positions are not strictly decreasing in the label")
    w = pos.shape[0]
    log2n = max(0, (w - 1).bit_length())
    tree = np.zeros((1 << log2n) + 1, dtype=np.int64)
    n_elig = 0
    for i in range(w):
        if i == 0 or pos[i] + 1 < pos[i - 1]:
            _fenwick_add(tree, i, 1)
            n_elig += 1
    front = 0
    shadow = float(init.position0(n_lo - 1)) if ghost else 0.0
    if ghost:
        while front < w and pos[front] + 1 >= shadow:
            shadow = float(pos[front])
            front += 1
    limit = w_lo - n_lo
    if ghost and front > limit:
        return None
    state = np.array([0.0, float(n_elig), float(front), shadow, 0.0])
    key = stream_key128(seed, f"tasep-events-{attempt}")
    rng = np.random.Generator(np.random.Philox(key=key))
    while True:
        uni = rng.random(_CHUNK)
        status, _ = _run_events(pos, tree, log2n, state, uni, horizon, ghost, limit)
        if status == 0:
            return pos, int(state[4])
        if status == 2:
            return None


def empirical_density(
    state: TasepState, T: float, bin_width: float, xi_range: tuple[float, float] = (-1.0, 1.0)
) -> DensityProfile:
    """Occupied-site histogram in the rescaled coordinate xi = site / T."""
    lo, hi = xi_range
    nbins = max(1, round((hi - lo) / bin_width))
    edges = lo + np.arange(nbins + 1) * bin_width
    centers = 0.5 * (edges[:-1] + edges[1:])
    values = np.zeros(nbins)
    if state.positions.size:
        xi = state.positions / float(T)
        counts, _ = np.histogram(xi, bins=edges)
        sites = np.floor(edges[1:] * T) - np.floor(edges[:-1] * T)
        np.divide(counts, sites, out=values, where=sites > 0)
    return DensityProfile(centers=centers, values=values, T=float(T))


def tasep_to_lpp(init: TasepInit, n: int, m: int) -> tuple[StartSet, tuple[int, int]]:
    """Growth-picture translation: start set and end point (m, n) with
    P(x_n(T) >= m - n) = P(L <= T) once weights vanish on the start set."""
    if not (init.window[0] <= n <= init.window[1]):
        raise ConfigError(f"label {n} outside the window {init.window}")
    lo = init.min_label()
    if lo is not None:
        pts = tuple((init.position0(k) + k, k) for k in range(lo, n + 1))
        return FinitePoints(pts), (m, n)
    return init.start_set(), (m, n)
