"""Exact last-passage computations: values, maximizers, restrictions.

All operations are pure functions of (field, geometry); a sweep never
depends on evaluation order, and multi-endpoint sweeps return the same
values as independent single-endpoint sweeps on the same field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._dp import BLOCKED_CUTOFF, NEG, dp_advance
from .errors import MissingPath, NoAdmissiblePath
from .geometry import ForbiddenRegion, Point, StartSet, ifloor, truncate

_BLOCK_ROWS = 256
_PATH_HULL_MAX = 4096  # full value grids are materialized only up to this side


@dataclass
class LppResult:
    value: float
    path: np.ndarray | None = None  # (k, 2) int64, start to end
    start_point: Point | None = None


@dataclass
class PathStats:
    rows: np.ndarray          # rows visited by the path
    z_right: np.ndarray       # rightmost column per row
    cols: np.ndarray          # columns visited
    y_top: np.ndarray         # topmost row per column
    max_z_dev: float          # max over rows of (Z_l - ref col), / t^(2/3)
    max_y_dev: float          # max over cols of (Y_r - ref row), / t^(2/3)


def _gather_starts(start: StartSet, ends: list[Point]) -> tuple[np.ndarray, list[bool]]:
    per_end = [truncate(start, e) for e in ends]
    ok = [len(t) > 0 for t in per_end]
    nonempty = [t for t in per_end if len(t)]
    if not nonempty:
        return np.empty((0, 2), dtype=np.int64), ok
    allpts = np.unique(np.concatenate(nonempty, axis=0), axis=0)
    order = np.lexsort((allpts[:, 0], allpts[:, 1]))
    return allpts[order], ok


def _csr_by_row(rows: np.ndarray, jmin: int, jmax: int) -> np.ndarray:
    """Pointer array for entries sorted by row, rows in [jmin, jmax]."""
    nr = jmax - jmin + 1
    ptr = np.zeros(nr + 1, dtype=np.int64)
    np.add.at(ptr, rows - jmin + 1, 1)
    return np.cumsum(ptr)


def _sweep(
    field,
    start: StartSet,
    ends: list[Point],
    want_path: bool = False,
    forbidden: ForbiddenRegion | None = None,
):
    """Shared DP driver. Returns (values, grid-or-None, context for backtracking)."""
    ends = [(int(e[0]), int(e[1])) for e in ends]
    starts, end_ok = _gather_starts(start, ends)
    if len(starts) == 0:
        raise NoAdmissiblePath(f"no start point of {type(start).__name__} reaches any of {ends}")

    imin = int(starts[:, 0].min())
    jmin = int(starts[:, 1].min())
    imax = max(e[0] for e in ends)
    jmax = max(e[1] for e in ends)
    width = imax - imin + 1
    height = jmax - jmin + 1
    if want_path and (width > _PATH_HULL_MAX or height > _PATH_HULL_MAX):
        raise ValueError(
            f"path backtracking materializes the value grid; hull {width}x{height} "
            f"exceeds the {_PATH_HULL_MAX} cap"
        )

    # leftmost reachable column per row: running min of start columns
    lo = np.full(height, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(lo, starts[:, 1] - jmin, starts[:, 0])
    lo = np.minimum.accumulate(lo)

    ent_ptr = _csr_by_row(starts[:, 1], jmin, jmax)
    ent_col = np.ascontiguousarray(starts[:, 0])

    e_rows = np.array([e[1] for e in ends], dtype=np.int64)
    e_order = np.argsort(e_rows, kind="stable")
    end_ptr = _csr_by_row(e_rows[e_order], jmin, jmax)
    end_col = np.array([ends[k][0] for k in e_order], dtype=np.int64)
    end_idx = np.array(e_order, dtype=np.int64)

    blk_lo_all = np.ones(height, dtype=np.int64)
    blk_hi_all = np.zeros(height, dtype=np.int64)
    if forbidden is not None:
        for r in range(height):
            iv = forbidden.row_interval(jmin + r)
            if iv is not None:
                blk_lo_all[r], blk_hi_all[r] = max(iv[0], imin), iv[1]

    g = np.full(width, NEG, dtype=np.float64)
    em = np.zeros(width, dtype=np.uint8)
    out = np.full(len(ends), NEG, dtype=np.float64)
    grid = np.full((height, width), NEG, dtype=np.float64) if want_path else np.empty((1, 1))

    r0 = 0
    while r0 < height:
        r1 = min(r0 + _BLOCK_ROWS, height)
        # lo is nonincreasing, so the last block row needs the widest span;
        # generating weights only from there trims triangular hulls
        w0 = int(min(lo[r1 - 1], imax))
        W = field.block(w0, imax, jmin + r0, jmin + r1 - 1)
        dp_advance(
            W,
            imin - w0,
            g,
            imin,
            lo[r0:r1],
            em,
            ent_ptr[r0 : r1 + 1] - ent_ptr[r0],
            ent_col[ent_ptr[r0] : ent_ptr[r1]],
            blk_lo_all[r0:r1],
            blk_hi_all[r0:r1],
            end_ptr[r0 : r1 + 1] - end_ptr[r0],
            end_col[end_ptr[r0] : end_ptr[r1]],
            end_idx[end_ptr[r0] : end_ptr[r1]],
            out,
            grid,
            want_path,
            r0,
        )
        r0 = r1

    ctx = {
        "imin": imin,
        "jmin": jmin,
        "lo": lo,
        "starts": {(int(x), int(y)) for x, y in starts},
        "end_ok": end_ok,
    }
    return out, (grid if want_path else None), ctx


def _backtrack(grid: np.ndarray, ctx: dict, end: Point) -> np.ndarray:
    imin, jmin, lo = ctx["imin"], ctx["jmin"], ctx["lo"]
    starts = ctx["starts"]
    i, j = int(end[0]), int(end[1])
    rev = [(i, j)]
    while True:
        left = NEG
        if i - 1 >= lo[j - jmin]:
            left = grid[j - jmin, i - 1 - imin]
        up = NEG
        if j - 1 >= jmin and i >= lo[j - 1 - jmin]:
            up = grid[j - 1 - jmin, i - imin]
        if (i, j) in starts and left <= 0.0 and up <= 0.0:
            break
        if left <= BLOCKED_CUTOFF and up <= BLOCKED_CUTOFF:
            raise NoAdmissiblePath(f"backtracking from {end} hit an unreachable cell at {(i, j)}")
        if left >= up:  # ties break to the horizontal predecessor
            i -= 1
        else:
            j -= 1
        rev.append((i, j))
    return np.array(rev[::-1], dtype=np.int64)


def _result_for_end(values, grid, ctx, ends, k) -> LppResult:
    if not ctx["end_ok"][k]:
        raise NoAdmissiblePath(f"no start point reaches end {ends[k]}")
    v = float(values[k])
    if v <= BLOCKED_CUTOFF:
        raise NoAdmissiblePath(f"every path to {ends[k]} is blocked")
    res = LppResult(value=v)
    if grid is not None:
        res.path = _backtrack(grid, ctx, ends[k])
        res.start_point = (int(res.path[0, 0]), int(res.path[0, 1]))
    elif len(ctx["starts"]) == 1:
        res.start_point = next(iter(ctx["starts"]))
    return res


def last_passage(field, start: StartSet, end: Point, want_path: bool = False) -> LppResult:
    """Last-passage value from `start` to `end`, optionally with maximizer."""
    values, grid, ctx = _sweep(field, start, [end], want_path=want_path)
    return _result_for_end(values, grid, ctx, [end], 0)


def restricted_last_passage(
    field, start: StartSet, end: Point, forbidden: ForbiddenRegion, want_path: bool = False
) -> LppResult:
    """Maximum over up-right paths containing no point of `forbidden`."""
    values, grid, ctx = _sweep(field, start, [end], want_path=want_path, forbidden=forbidden)
    return _result_for_end(values, grid, ctx, [end], 0)


def multi_endpoint_last_passage(
    field, start: StartSet, ends: list[Point], want_path: bool = False
) -> list[LppResult]:
    """All end points on one weight realization, single sweep over the union hull."""
    values, grid, ctx = _sweep(field, start, list(ends), want_path=want_path)
    return [_result_for_end(values, grid, ctx, list(ends), k) for k in range(len(ends))]


def path_stats(result: LppResult, reference: tuple[Point, Point], t: float) -> PathStats:
    """Per-row rightmost columns, per-column topmost rows, and the maximal
    signed offsets from the reference line, in units of t^(2/3)."""
    if result.path is None:
        raise MissingPath("path_stats needs a result computed with want_path=True")
    (ax, ay), (bx, by) = reference
    path = result.path
    rows, z_right = _group_max(path[:, 1], path[:, 0])
    cols, y_top = _group_max(path[:, 0], path[:, 1])
    scale = float(t) ** (2.0 / 3.0)
    if by == ay:
        raise ValueError("reference line must have distinct row coordinates")
    ref_cols = ax + (rows - ay) * (bx - ax) / (by - ay)
    max_z = float(np.max(z_right - ref_cols)) / scale
    if bx == ax:
        raise ValueError("reference line must have distinct column coordinates")
    ref_rows = ay + (cols - ax) * (by - ay) / (bx - ax)
    max_y = float(np.max(y_top - ref_rows)) / scale
    return PathStats(rows, z_right, cols, y_top, max_z, max_y)


def _group_max(keys: np.ndarray, vals: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(keys, kind="stable")
    k, v = keys[order], vals[order]
    uniq, idx = np.unique(k, return_index=True)
    out = np.maximum.reduceat(v, idx)
    return uniq, out


def local_shift_check(field, base_k: int, shift_v: float, gamma: float) -> float:
    """One-realization statistic comparing the passage time to (K,K) with a
    horizontally shifted end point, drift-corrected and scaled by K^(1/3)."""
    if not (0.0 <= gamma <= 1.0 / 3.0):
        raise ValueError("gamma must lie in [0, 1/3]")
    if base_k < 1:
        raise ValueError("base point must have K >= 1")
    kpow = float(base_k) ** gamma
    shift = ifloor(kpow * shift_v)
    from .geometry import SinglePoint

    origin = SinglePoint((0, 0))
    e_shift = (base_k + shift, base_k)
    e_base = (base_k, base_k)
    res = multi_endpoint_last_passage(field, origin, [e_shift, e_base])
    return (res[0].value - res[1].value - 2.0 * shift_v * kpow) / float(base_k) ** (1.0 / 3.0)
