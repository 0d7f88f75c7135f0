import itertools

import numpy as np
import pytest

from lpplab import truncate


def enumerate_paths(start_pt, end):
    """All up-right paths between two points, as lists of lattice points."""
    sx, sy = start_pt
    n_r, n_u = end[0] - sx, end[1] - sy
    for moves in itertools.combinations(range(n_r + n_u), n_r):
        x, y = sx, sy
        pts = [(x, y)]
        mv = set(moves)
        for m in range(n_r + n_u):
            if m in mv:
                x += 1
            else:
                y += 1
            pts.append((x, y))
        yield pts


def brute_force_lpp(field, start, end, forbidden=None):
    """Exhaustive-path oracle; sums weights start-to-end like the DP does.

    Returns (value, best_path) or (None, None) when every path is blocked.
    """
    best, best_path = None, None
    for sx, sy in truncate(start, end):
        for pts in enumerate_paths((sx, sy), end):
            if forbidden is not None and any(forbidden.contains(p) for p in pts):
                continue
            s = 0.0
            for p in pts:
                s += field.weight_at(p)
            if best is None or s > best:
                best, best_path = s, pts
    return best, best_path


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
