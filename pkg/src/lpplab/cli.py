"""Command-line entry points: `lab list`, `lab run`, `lab refdist`."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import refdist
from .errors import ConfigError, LppLabError
from .harness import CATALOG, timed_run, write_outputs


def _parse_set(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    return out


def _cmd_list(_args) -> int:
    width = max(len(k) for k in CATALOG)
    for name, entry in CATALOG.items():
        print(f"{name:<{width}}  {entry['description']}")
    return 0


def _cmd_run(args) -> int:
    overrides = {}
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ConfigError("config file must hold a flat JSON object")
        overrides.update(doc)
    overrides.update(_parse_set(args.set or []))
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.replicas is not None:
        overrides["replicas"] = args.replicas
    report, meta = timed_run(args.experiment, overrides, args.workers)
    if args.out:
        path = write_outputs(report, args.out, run_meta=meta)
        print(f"wrote {path}")
    for chk in report["checks"]:
        flag = "PASS" if chk["passed"] else "FAIL"
        print(f"[{flag}] {report['experiment']}: {chk['name']} "
              f"(observed={chk['observed']}, bound={chk['bound']})")
    for cav in report["caveats"]:
        print(f"[note] {cav}")
    print(f"{'PASS' if report['passed'] else 'FAIL'} in {meta['wall_clock_seconds']:.1f}s")
    return 0 if report["passed"] else 1


def _cmd_refdist(args) -> int:
    if args.refcmd == "eval":
        val = refdist.tw_cdf(args.ensemble, args.s, args.order)
        print(repr(val))
        return 0
    if args.refcmd == "table":
        lo, hi, n = args.grid.split(":")
        grid = np.linspace(float(lo), float(hi), int(n))
        vals = refdist.tw_table(args.ensemble, grid, args.order)
        lines = ["s,cdf,quad_order"]
        lines += [f"{float(s)!r},{float(v)!r},{args.order}" for s, v in zip(grid, vals)]
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
            print(f"wrote {args.out}")
        else:
            sys.stdout.write(text)
        return 0
    raise ConfigError("refdist needs a subcommand: eval or table")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lab", description="last-passage / exclusion-process Monte Carlo laboratory")
    sub = p.add_subparsers(dest="cmd", required=True)

    sub.add_parser("list", help="print the experiment catalog")

    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("experiment", choices=sorted(CATALOG))
    run.add_argument("--config", help="flat JSON config file")
    run.add_argument("--seed", type=int, help="root seed")
    run.add_argument("--replicas", type=int)
    run.add_argument("--out", help="output directory for report.json and CSVs")
    run.add_argument("--workers", type=int, default=2)
    run.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override one config key (JSON value)")

    ref = sub.add_parser("refdist", help="reference distribution utilities")
    refsub = ref.add_subparsers(dest="refcmd", required=True)
    ev = refsub.add_parser("eval")
    ev.add_argument("--ensemble", choices=("gue", "goe"), required=True)
    ev.add_argument("--s", type=float, required=True)
    ev.add_argument("--order", type=int, default=refdist.DEFAULT_ORDER)
    tb = refsub.add_parser("table")
    tb.add_argument("--ensemble", choices=("gue", "goe"), required=True)
    tb.add_argument("--grid", required=True, metavar="LO:HI:N")
    tb.add_argument("--order", type=int, default=refdist.DEFAULT_ORDER)
    tb.add_argument("--out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "list":
            return _cmd_list(args)
        if args.cmd == "run":
            return _cmd_run(args)
        if args.cmd == "refdist":
            return _cmd_refdist(args)
    except LppLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
