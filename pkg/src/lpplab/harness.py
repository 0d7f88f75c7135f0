"""Experiment catalog, config validation, deterministic reports, persistence.

A report is a pure function of (experiment id, resolved config): replicas
are assembled in index order regardless of worker count, floats serialize
through repr, and volatile run facts (wall clock, worker count) go to a
sidecar run_meta.json instead of report.json.
"""

from __future__ import annotations

import csv
import json
import math
import time
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .experiments import _RUNNERS

_COMMON = {
    "seed": 1,
    "replicas": 2000,
    "s_min": -5.0,
    "s_max": 3.0,
    "s_points": 17,
    "joint_min": -5.0,
    "joint_max": 3.0,
    "joint_points": 21,
}

CATALOG: dict[str, dict] = {
    "step-gue": {
        "description": "rescaled particle position in the rarefaction fan vs the GUE Tracy-Widom law",
        "defaults": {**_COMMON, "T": 1000.0, "u": 0.0, "ks_tol": 0.15},
    },
    "flat-goe": {
        "description": "constant-density particle fluctuations vs the GOE Tracy-Widom law",
        "defaults": {**_COMMON, "T": 1000.0, "rho": "1/2", "u": 0.0, "ks_tol": 0.12},
    },
    "shock-gue2": {
        "description": "macroscopic shock between two fans vs a product of two GUE laws",
        "defaults": {**_COMMON, "T": 1000.0, "beta": 0.5, "xi": 0.0, "ks_tol": 0.08},
    },
    "critical-shock-lpp": {
        "description": "two-corner passage times at critical tilt: sandwich bounds and decoupling vs a",
        "defaults": {**_COMMON, "t": 1000.0, "u": 0.0, "a_grid": [1.0, 2.0, 4.0, 8.0],
                     "delta": 2.0, "epsilon": None, "k": None},
    },
    "critical-shock-tasep": {
        "description": "critically scaled step data mapped to a two-corner problem: threshold probabilities vs bounds",
        "defaults": {**_COMMON, "T": 1000.0, "a": 2.0, "u": 0.0, "delta": 2.0,
                     "epsilon": None, "k": None},
    },
    "shock-flat-goe2": {
        "description": "shock between two constant densities vs a product of two GOE laws",
        "defaults": {**_COMMON, "T": 1000.0, "rho1": "4/5", "rho2": "1/5", "xi": 0.0,
                     "mode": "macro", "a": 4.0, "ks_tol": 0.12},
    },
    "airy2-twopoint": {
        "description": "joint law of two point-to-point times sharing an origin: two-point decoupling bounds",
        "defaults": {**_COMMON, "t": 1000.0, "a": 4.0, "u": 1.0, "delta": 1.0,
                     "epsilon": None, "surrogate": 0.0},
    },
    "airy1-decoupling": {
        "description": "line-to-point times at two endpoints: joint law vs product of marginals",
        "defaults": {**_COMMON, "t": 1000.0, "a_grid": [1.0, 2.0, 4.0, 8.0], "ks_tol": 0.06},
    },
    "airy21-decoupling": {
        "description": "half-line-to-point times at two endpoints: joint law vs product of marginals",
        "defaults": {**_COMMON, "t": 1000.0, "a_grid": [1.0, 2.0, 4.0, 8.0], "b": -1.0},
    },
    "timelike-decoupling": {
        "description": "passage times to two nested diagonal points: decoupling along the time direction",
        "defaults": {**_COMMON, "t": 1000.0, "tau": 0.5, "r": 0.0, "u": 0.0,
                     "a_grid": [1.0, 2.0, 4.0, 8.0]},
    },
    "transversal": {
        "description": "maximizer deviation from the characteristic line: exceedance decay in k",
        "defaults": {**_COMMON, "t": 1000.0, "eta0": 1.0, "d": 0.0,
                     "k_grid": [0.5, 1.0, 1.5, 2.0], "ks_tol": 0.06},
    },
    "slow-decorrelation": {
        "description": "passage-time difference along the characteristic at macroscopic separation eps",
        "defaults": {**_COMMON, "t": 1000.0, "a": 4.0, "u": 0.0, "eps_grid": [0.4, 0.2, 0.1]},
    },
    "crossing": {
        "description": "probability that maximizers touch the restriction segments: decay in k",
        "defaults": {**_COMMON, "t": 1000.0, "a": 4.0, "u": 0.0,
                     "k_grid": [0.5, 1.0, 1.5, 2.0], "epsilon": None},
    },
    "tasep-lpp-consistency": {
        "description": "two-sample check of the particle/growth-picture correspondence",
        "defaults": {**_COMMON, "T": 100.0, "labels": [0, 10, 25], "replicas": 10000,
                     "ks_tol": 0.02},
    },
    "density-profile": {
        "description": "empirical density profiles for fan, shock, flat and two-density data",
        "defaults": {**_COMMON, "T": 2000.0, "mode": "step", "bin_width": 0.05, "replicas": 24,
                     "profile_tol": 0.05, "jump_tol": 0.1, "rho1": "4/5", "rho2": "1/5",
                     "beta": 0.5, "rho": "1/2"},
    },
    "fkg-floor": {
        "description": "re-assert the universal product lower bound on a target experiment",
        "defaults": {**_COMMON, "target": "critical-shock-lpp"},
    },
    "localshift": {
        "description": "small end-point shifts of the point-to-point time concentrate after drift correction",
        "defaults": {**_COMMON, "K": 1000, "gamma": 1.0 / 3.0, "v": 1.0, "mean_tol": 0.1},
    },
}


def resolve_config(exp_id: str, overrides: dict | None = None) -> dict:
    if exp_id not in CATALOG:
        raise ConfigError(f"unknown experiment {exp_id!r}; see `lab list`")
    cfg = dict(CATALOG[exp_id]["defaults"])
    for key, val in (overrides or {}).items():
        if key not in cfg:
            raise ConfigError(f"unknown config key {key!r} for experiment {exp_id!r}")
        cfg[key] = val
    cfg["_id"] = exp_id
    return cfg


def run_experiment(exp_id: str, overrides: dict | None = None, workers: int = 1) -> dict:
    """Dispatch to the catalog; the report is bit-identical for a given
    (experiment id, config) whatever the worker count."""
    cfg = resolve_config(exp_id, overrides)
    body = _RUNNERS[exp_id](cfg, max(1, int(workers)))
    config_echo = {k: v for k, v in cfg.items() if k != "_id"}
    report = {
        "experiment": exp_id,
        "config": _pyify(config_echo),
        "statistics": _pyify(body["statistics"]),
        "tables": _pyify(body["tables"]),
        "exceedance": _pyify(body["exceedance"]),
        "checks": _pyify(body["checks"]),
        "caveats": list(body["caveats"]),
        "passed": all(c["passed"] for c in body["checks"]),
    }
    return report


def _pyify(obj):
    if isinstance(obj, dict):
        return {str(k): _pyify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_pyify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_pyify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, float) and math.isnan(obj):
        return None
    from fractions import Fraction

    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def write_outputs(report: dict, outdir: str | Path, run_meta: dict | None = None) -> Path:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(report_json(report))
    for name, rows in report.get("tables", {}).items():
        _write_csv(out / f"cdf_{name}.csv", rows, ("s", "s2", "empirical", "reference", "gap", "se"))
    for name, rows in report.get("exceedance", {}).items():
        _write_csv(out / f"exceedance_{name}.csv", rows, ("k", "probability", "se"))
    if run_meta is not None:
        (out / "run_meta.json").write_text(json.dumps(run_meta, sort_keys=True, indent=2) + "\n")
    return out / "report.json"


def _write_csv(path: Path, rows: list[dict], column_order) -> None:
    if not rows:
        return
    cols = [c for c in column_order if c in rows[0]]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in rows:
            w.writerow(["" if row[c] is None or _isnan(row[c]) else row[c] for c in cols])


def _isnan(v) -> bool:
    return isinstance(v, float) and math.isnan(v)


def timed_run(exp_id: str, overrides: dict | None, workers: int):
    t0 = time.perf_counter()
    report = run_experiment(exp_id, overrides, workers)
    elapsed = time.perf_counter() - t0
    meta = {"wall_clock_seconds": elapsed, "workers": workers}
    return report, meta
