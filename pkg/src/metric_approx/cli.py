"""Command-line front end: ``metric-approx <command> [options]``.

Exit codes: 0 pass, 1 expected-value mismatch, 2 config error, 3 resource limit.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import experiments as ex
from .errors import MetricApproxError

_SPACE_FOR_LAMBDA = {
    "cantor-endpoint": "central-cantor",
    "central-cantor-endpoint": "central-cantor",
    "cantor-shifted": "central-cantor",
    "gap-centers": "cantor-plus-centers",
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="metric-approx", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(ex.COMMANDS) + ["reproduce", "list"])
    p.add_argument("name", nargs="?", help="experiment name for reproduce")
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--out", help="output directory (default results/<command>)")
    p.add_argument("--kind", help="scheme kind")
    p.add_argument("--space", help="space kind (defaults to the scheme's natural space)")
    p.add_argument("--lambda", dest="lam", help="Cantor ratio as p/q")
    p.add_argument("--alpha", help="power-block exponent")
    p.add_argument("--net-depth", type=int, help="net depth for the greedy scheme")
    p.add_argument("--qmin", type=int)
    p.add_argument("--qmax", type=int)
    p.add_argument("--t")
    p.add_argument("--d", help="shift exponent of cantor-shifted, or a single Dirichlet d")
    p.add_argument("--N", dest="N_list", help="comma-separated tail starts for dirichlet")
    p.add_argument("--grid", help="comma-separated d values for dirichlet")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--depth", type=int, help="certification depth")
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int)
    return p


def config_from_args(args: argparse.Namespace) -> dict:
    obj = {}
    if args.config:
        with open(args.config) as fh:
            obj = json.load(fh)
    if args.command != "list":
        obj["command"] = args.command
    if args.name:
        obj["name"] = args.name
    if args.kind:
        scheme = {"kind": args.kind}
        if args.alpha:
            scheme["alpha"] = args.alpha
        if args.net_depth:
            scheme["net_depth"] = args.net_depth
        if args.kind == "cantor-shifted":
            scheme["d"] = args.d
        space_kind = args.space or _SPACE_FOR_LAMBDA.get(args.kind)
        if args.lam or args.space:
            scheme["space"] = {"kind": space_kind or "central-cantor"}
            if args.lam:
                scheme["space"]["lambda"] = args.lam
        obj["scheme"] = scheme
    elif args.d:
        obj["d"] = args.d
    if args.kind and args.kind != "cantor-shifted" and args.d:
        obj["d"] = args.d
    for key, val in (("q_min", args.qmin), ("q_max", args.qmax), ("t", args.t),
                     ("tolerance", args.tolerance), ("depth", args.depth),
                     ("threads", args.threads), ("seed", args.seed), ("out", args.out)):
        if val is not None:
            obj[key] = val
    if args.N_list:
        obj["N_list"] = [int(v) for v in args.N_list.split(",")]
    if args.grid:
        obj["grid"] = [v.strip() for v in args.grid.split(",")]
    return obj


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        for name, rep in ex.CATALOGUE.items():
            print(f"{name:22s} {rep.description}")
        return 0
    try:
        cfg = ex.ExperimentConfig.from_dict(config_from_args(args))
    except ex.ConfigError as exc:
        print(f"config error at {exc.path}: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        res = ex.run(cfg)
    except ex.ConfigError as exc:
        print(f"config error at {exc.path}: {exc}", file=sys.stderr)
        return 2
    except MetricApproxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = cfg.out or f"results/{cfg.name or cfg.command}"
    res.write(out)
    for r in res.records:
        mark = "" if r.passed is None else ("PASS " if r.passed else "FAIL ")
        exp = "" if r.expected is None else f" (expected {ex._jsonable(r.expected)}"
        exp += "" if not exp or r.tolerance is None else f" +/- {r.tolerance}"
        exp += ")" if exp else ""
        cite = f" [{r.citation}]" if r.citation else ""
        print(f"{mark}{r.metric}: {ex._jsonable(r.value)}{exp}{cite}")
    print(f"wrote {out}")
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
