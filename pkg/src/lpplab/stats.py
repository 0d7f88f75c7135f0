"""Empirical CDF machinery and the comparisons the harness reports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Ecdf:
    """Right-continuous empirical CDF of a 1-D sample."""

    sorted_samples: np.ndarray

    @classmethod
    def from_samples(cls, samples) -> "Ecdf":
        arr = np.asarray(samples, dtype=np.float64)
        if arr.size == 0:
            raise ValueError("empty sample")
        return cls(np.sort(arr))

    @property
    def n(self) -> int:
        return int(self.sorted_samples.size)

    def __call__(self, s):
        idx = np.searchsorted(self.sorted_samples, s, side="right")
        return idx / self.n


@dataclass(frozen=True)
class Ecdf2:
    """Joint empirical CDF of paired samples."""

    x: np.ndarray
    y: np.ndarray

    @classmethod
    def from_pairs(cls, x, y) -> "Ecdf2":
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if x.size == 0 or x.shape != y.shape:
            raise ValueError("need equally sized nonempty samples")
        return cls(x, y)

    @property
    def n(self) -> int:
        return int(self.x.size)

    def __call__(self, s1: float, s2: float) -> float:
        return float(np.mean((self.x <= s1) & (self.y <= s2)))

    def on_grid(self, g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
        """Joint CDF on the product grid, shape (len(g1), len(g2))."""
        cx = self.x[:, None] <= np.asarray(g1)[None, :]
        cy = self.y[:, None] <= np.asarray(g2)[None, :]
        return (cx.astype(np.float64).T @ cy.astype(np.float64)) / self.n


def ecdf(samples) -> Ecdf:
    return Ecdf.from_samples(samples)


def ecdf2(x, y) -> Ecdf2:
    return Ecdf2.from_pairs(x, y)


def ks_distance(e: Ecdf, ref) -> float:
    """sup over sample points of |ECDF - ref|.

    Evaluated at the samples themselves (right-continuous values), so the
    distance of an ECDF to itself-as-step-function is exactly 0; against a
    continuous reference this understates the classical statistic by at
    most 1/n, far below every tolerance used here.
    """
    xs = e.sorted_samples
    n = e.n
    fr = np.asarray([ref(float(v)) for v in xs])
    return float(np.max(np.abs(np.arange(1, n + 1) / n - fr)))


def two_sample_ks(e1: Ecdf, e2: Ecdf) -> float:
    allv = np.concatenate([e1.sorted_samples, e2.sorted_samples])
    allv.sort(kind="mergesort")
    return float(np.max(np.abs(e1(allv) - e2(allv))))


def ks_two_sample_critical(n1: int, n2: int, alpha_coeff: float = 1.63) -> float:
    """Critical value c * sqrt((n1+n2)/(n1 n2)); 1.63 is the 1 percent level."""
    return alpha_coeff * np.sqrt((n1 + n2) / (n1 * n2))


def binomial_se(p: float, n: int) -> float:
    p = min(max(p, 0.0), 1.0)
    return float(np.sqrt(p * (1.0 - p) / n))


def diff_se(p1: float, p2: float, n: int) -> float:
    """Conservative standard error for a difference of two proportions
    estimated from the same n replicas."""
    return float(np.sqrt((p1 * (1 - p1) + p2 * (1 - p2)) / n))


def decoupling_gap(joint: np.ndarray, product: np.ndarray) -> dict:
    """Signed and absolute sup of (joint - product) over a common grid."""
    joint = np.asarray(joint)
    product = np.asarray(product)
    if joint.shape != product.shape:
        raise ValueError(f"grid mismatch: {joint.shape} vs {product.shape}")
    diff = joint - product
    k = int(np.argmax(diff))
    ka = int(np.argmax(np.abs(diff)))
    return {
        "sup_signed": float(diff.flat[k]),
        "sup_abs": float(np.abs(diff).flat[ka]),
        "argmax_signed": int(k),
        "argmax_abs": int(ka),
    }


def quantile_se(sorted_samples: np.ndarray, p: float) -> float:
    """Normal-approximation standard error of the p-quantile, with the
    density estimated by a central difference of order statistics."""
    n = sorted_samples.size
    half = max(2, int(0.02 * n))
    k = int(p * (n - 1))
    k0, k1 = max(0, k - half), min(n - 1, k + half)
    spread = sorted_samples[k1] - sorted_samples[k0]
    if spread <= 0:
        return 0.0
    dens = (k1 - k0) / (n * spread)
    return float(np.sqrt(p * (1 - p) / n) / max(dens, 1e-12))


def iqr(samples: np.ndarray) -> float:
    q1, q3 = np.quantile(samples, [0.25, 0.75])
    return float(q3 - q1)
