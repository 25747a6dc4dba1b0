"""Run every catalogued reproduction and print a one-line verdict for each.

    python3 scripts/reproduce_all.py --out results --skip prop-3.4-ii
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List

from metric_approx import experiments as ex


@dataclass
class ReproduceAllConfig:
    out: Path = Path("results")
    only: List[str] = field(default_factory=list)
    skip: List[str] = field(default_factory=list)
    threads: int = 1
    seed: int = 0

    def names(self) -> List[str]:
        names = self.only or list(ex.CATALOGUE)
        return [n for n in names if n not in self.skip]


def run_all(cfg: ReproduceAllConfig) -> int:
    worst = 0
    for name in cfg.names():
        start = time.perf_counter()
        exp_cfg = ex.ExperimentConfig.from_dict(
            {"command": "reproduce", "name": name, "threads": cfg.threads, "seed": cfg.seed})
        res = ex.run(exp_cfg)
        res.write(cfg.out / name)
        failed = [r.metric for r in res.records if r.passed is False]
        verdict = {0: "PASS", 1: "FAIL", 3: "PARTIAL"}[res.exit_code]
        print(f"{verdict:7s} {name:22s} {time.perf_counter() - start:7.1f}s  {', '.join(failed)}", flush=True)
        worst = max(worst, res.exit_code)
    return worst


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--only", nargs="*", default=[])
    p.add_argument("--skip", nargs="*", default=[])
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    unknown = [n for n in args.only + args.skip if n not in ex.CATALOGUE]
    if unknown:
        print(f"unknown experiments: {unknown}", file=sys.stderr)
        return 2
    return run_all(ReproduceAllConfig(args.out, args.only, args.skip, args.threads, args.seed))


if __name__ == "__main__":
    sys.exit(main())
