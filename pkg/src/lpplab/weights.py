"""Reproducible lattice weight fields of independent exp(1) variables.

The generator is SplitMix64 used in counter mode: the output at counter c
under stream key s is

    mix64(s + c * 0x9E3779B97F4A7C15)

where mix64 is the Stafford "mix13" finalizer (the same mixing function
used by SplittableRandom).  The counter encodes the lattice point as

    c = (uint32(i + 2^31) << 32) | uint32(j + 2^31)

so any cell can be evaluated lazily, in any order, on any thread, and two
implementations of the same recipe reproduce the stream bit-exactly.

Stream keys are derived from (root seed, experiment id, replica index,
purpose tag) through BLAKE2b, see `stream_key`.  Exponential variates are
inverse-CDF: w = -log1p(-u) with u = (top 53 bits) * 2^-53, evaluated with
NumPy's log1p for every cell (scalar queries included) so that scalar and
bulk evaluation cannot diverge in the last ulp.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from numba import njit

from .geometry import Point, StartSet, row_member_cols

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_COORD_OFFSET = 2**31
_COORD_MIN, _COORD_MAX = -(2**31), 2**31 - 1


@dataclass(frozen=True)
class Seed:
    """Stream labels: (root, experiment id, replica) pin a weight field."""

    root: int
    experiment_id: str = ""
    replica: int = 0

    def __post_init__(self):
        if not (0 <= self.root < 2**64):
            raise ValueError("root seed must be a 64-bit unsigned integer")
        if not (0 <= self.replica < 2**64):
            raise ValueError("replica index must be a 64-bit unsigned integer")


def stream_key(seed: Seed, purpose: str = "weights") -> np.uint64:
    """64-bit stream key for a (seed, purpose) pair.

    Layout fed to BLAKE2b (digest_size=8, little-endian result):
    8 bytes root (LE) || 8 bytes replica (LE) || experiment id (UTF-8)
    || 0x00 || purpose (UTF-8).
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(int(seed.root).to_bytes(8, "little"))
    h.update(int(seed.replica).to_bytes(8, "little"))
    h.update(seed.experiment_id.encode("utf-8"))
    h.update(b"\x00")
    h.update(purpose.encode("utf-8"))
    return np.uint64(int.from_bytes(h.digest(), "little"))


def stream_key128(seed: Seed, purpose: str) -> tuple[int, int]:
    """Two 64-bit words for generators that take a 128-bit key."""
    h = hashlib.blake2b(digest_size=16)
    h.update(int(seed.root).to_bytes(8, "little"))
    h.update(int(seed.replica).to_bytes(8, "little"))
    h.update(seed.experiment_id.encode("utf-8"))
    h.update(b"\x00")
    h.update(purpose.encode("utf-8"))
    d = h.digest()
    return int.from_bytes(d[:8], "little"), int.from_bytes(d[8:], "little")


@njit(cache=True, nogil=True)
def _uniforms_block(key, j0, i0, out):  # pragma: no cover - exercised via wrappers
    rows, cols = out.shape
    gamma_hi = np.uint64(0x9E3779B97F4A7C15) << np.uint64(32)
    for r in range(rows):
        base = key + np.uint64(j0 + r + 2**31) * np.uint64(0x9E3779B97F4A7C15)
        zc = base + np.uint64(i0 + 2**31) * gamma_hi
        for i in range(cols):
            z = zc
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            z = z ^ (z >> np.uint64(31))
            out[r, i] = np.float64(z >> np.uint64(11)) * (2.0**-53)
            zc = zc + gamma_hi


def _check_coords(i0: int, i1: int, j0: int, j1: int) -> None:
    for v in (i0, i1, j0, j1):
        if not (_COORD_MIN <= v <= _COORD_MAX):
            raise ValueError(f"lattice coordinate {v} outside 32-bit range")


@dataclass(frozen=True)
class WeightField:
    """Deterministic exp(1) weights, zeroed on `zero_set` (may be None).

    `domain` is a hint ((imin, jmin), (imax, jmax)); points outside it are
    still defined.
    """

    seed: Seed
    zero_set: StartSet | None = None
    domain: tuple[Point, Point] | None = None

    def key(self) -> np.uint64:
        return stream_key(self.seed, "weights")

    def block(self, i0: int, i1: int, j0: int, j1: int) -> np.ndarray:
        """Weights for the rectangle [i0..i1] x [j0..j1], shape (rows, cols)."""
        _check_coords(i0, i1, j0, j1)
        out = np.empty((j1 - j0 + 1, i1 - i0 + 1), dtype=np.float64)
        _uniforms_block(self.key(), j0, i0, out)
        np.negative(out, out=out)
        np.log1p(out, out=out)
        np.negative(out, out=out)
        if self.zero_set is not None:
            for r in range(j0, j1 + 1):
                for c in row_member_cols(self.zero_set, r, i0, i1):
                    out[r - j0, c - i0] = 0.0
        return out

    def weight_at(self, p: Point) -> float:
        return float(self.block(int(p[0]), int(p[0]), int(p[1]), int(p[1]))[0, 0])


@dataclass(frozen=True)
class TableField:
    """Explicit weight table for fixed examples and brute-force tests."""

    weights: np.ndarray  # shape (rows, cols), row r is lattice row origin[1]+r
    origin: Point = (0, 0)
    fill: float = 0.0

    def block(self, i0: int, i1: int, j0: int, j1: int) -> np.ndarray:
        out = np.full((j1 - j0 + 1, i1 - i0 + 1), self.fill, dtype=np.float64)
        oi, oj = self.origin
        h, w = self.weights.shape
        r0, r1 = max(j0, oj), min(j1, oj + h - 1)
        c0, c1 = max(i0, oi), min(i1, oi + w - 1)
        if r0 <= r1 and c0 <= c1:
            out[r0 - j0 : r1 - j0 + 1, c0 - i0 : c1 - i0 + 1] = self.weights[
                r0 - oj : r1 - oj + 1, c0 - oi : c1 - oi + 1
            ]
        return out

    def weight_at(self, p: Point) -> float:
        return float(self.block(int(p[0]), int(p[0]), int(p[1]), int(p[1]))[0, 0])


def make_weight_field(
    seed: Seed, zero_set: StartSet | None, domain: tuple[Point, Point] | None = None
) -> WeightField:
    """Construct a weight field; degenerate one-cell domains are allowed."""
    if domain is not None:
        (imin, jmin), (imax, jmax) = domain
        if imin > imax or jmin > jmax:
            raise ValueError("domain rectangle is empty")
        _check_coords(imin, imax, jmin, jmax)
    return WeightField(seed=seed, zero_set=zero_set, domain=domain)


def weight_at(field, p: Point) -> float:
    """Weight at a lattice point; pure function of (seed, p)."""
    return field.weight_at(p)
