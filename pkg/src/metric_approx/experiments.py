"""Batch experiments: configs, the reproduction catalogue and result files.

Every run produces one ``summary.json`` and one or more CSV tables in the
output directory. Rationals are written as ``"p/q"`` strings. Apart from the
``timestamp`` block, a rerun with the same config writes identical bytes.
"""
from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import jsonschema

from . import dimension as dm
from . import dirichlet as di
from . import limsup as ls
from . import nested as ne
from . import schemes as sc
from . import spaces as sp
from .errors import InvalidArgument, MetricApproxError, ResourceLimit
from .exact import as_fraction, fraction_str

THREADS_ENV = "METRIC_APPROX_THREADS"


class ConfigError(MetricApproxError):
    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("config.schema.json").read_text())


@dataclass
class ExperimentConfig:
    command: str
    name: Optional[str] = None
    scheme: Optional[dict] = None
    t: Optional[str] = None
    d: Optional[str] = None
    q_min: Optional[int] = None
    q_max: Optional[int] = None
    N_list: Optional[List[int]] = None
    grid: Optional[List[str]] = None
    tolerance: Optional[float] = None
    depth: Optional[int] = None
    seed: int = 0
    threads: Optional[int] = None
    out: Optional[str] = None

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        try:
            jsonschema.validate(obj, load_schema())
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(exc.message, path) from None
        cfg = cls(**obj)
        if cfg.command == "reproduce" and cfg.name not in CATALOGUE:
            raise ConfigError(f"unknown experiment {cfg.name!r}", "name")
        return cfg

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def resolved_threads(self) -> int:
        if self.threads:
            return self.threads
        env = os.environ.get(THREADS_ENV)
        return int(env) if env and env.isdigit() and int(env) > 0 else 1

    def build_scheme(self) -> sc.Scheme:
        if self.scheme is None:
            raise ConfigError("a scheme is required", "scheme")
        try:
            return sc.Scheme.from_json(self.scheme)
        except (InvalidArgument, ValueError) as exc:
            raise ConfigError(str(exc), "scheme") from None


@dataclass
class Record:
    metric: str
    value: object
    expected: object = None
    tolerance: Optional[float] = None
    passed: Optional[bool] = None
    citation: str = ""


@dataclass
class ExperimentResult:
    config: dict
    records: List[Record] = field(default_factory=list)
    tables: Dict[str, Tuple[List[str], List[list]]] = field(default_factory=dict)
    resolution: dict = field(default_factory=dict)
    runtime: float = 0.0
    partial: bool = False

    @property
    def passed(self) -> bool:
        return all(r.passed is not False for r in self.records)

    @property
    def exit_code(self) -> int:
        if self.partial:
            return 3
        return 0 if self.passed else 1

    def summary(self) -> dict:
        return {
            "config": self.config,
            "records": [_jsonable(asdict(r)) for r in self.records],
            "resolution": _jsonable(self.resolution),
            "passed": self.passed,
            "partial": self.partial,
            "tables": sorted(self.tables),
            "timestamp": {
                "utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                "runtime_s": round(self.runtime, 3),
            },
        }

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "summary.json", "w") as fh:
            json.dump(self.summary(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        for name, (cols, rows) in self.tables.items():
            with open(out / f"{name}.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(cols)
                for row in rows:
                    w.writerow([_cell(v) for v in row])
        return out


def _cell(v):
    if isinstance(v, Fraction):
        return fraction_str(v)
    if isinstance(v, float):
        return repr(v)
    return v


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        items = sorted(obj, key=str) if isinstance(obj, set) else obj
        return [_jsonable(v) for v in items]
    return obj


def within(value: float, expected: float, tol: float) -> bool:
    return abs(value - expected) <= tol


def in_bracket(value: Optional[float], lo: float, hi: float) -> bool:
    return value is not None and lo - 1e-12 <= value <= hi + 1e-12


# -- subcommands ---------------------------------------------------------------

def run_gen_rationals(cfg: ExperimentConfig, res: ExperimentResult) -> None:
    scheme = cfg.build_scheme()
    lo, hi = cfg.q_min or 1, cfg.q_max or 16
    rows = [[q, p] for q in range(lo, hi + 1) for p in sc.generate(scheme, q)]
    res.tables["rationals"] = (["q", "point"], rows)
    res.records.append(Record("point_count", len(rows)))


def run_check_scheme(cfg: ExperimentConfig, res: ExperimentResult) -> None:
    scheme = cfg.build_scheme()
    lo, hi = cfg.q_min or 1, cfg.q_max or 64
    recs = sc.validate(scheme, range(lo, hi + 1), cfg.depth or sp.DEFAULT_DEPTH)
    res.tables["validation"] = (["q", "size", "separated", "maximal", "witness"],
                                [[r.q, r.size, r.separated, r.maximal, r.witness] for r in recs])
    bad = [r.q for r in recs if not r.ok]
    res.records.append(Record("separated_and_maximal", f"{len(recs) - len(bad)}/{len(recs)}",
                              expected="all", passed=not bad, citation="exhaustive validation"))


def run_cover(cfg: ExperimentConfig, res: ExperimentResult) -> None:
    scheme = cfg.build_scheme()
    spec = ls.CoverSpec(scheme, as_fraction(cfg.t or "2"), cfg.q_min or 1, cfg.q_max or 32)
    rep = ls.build_cover(spec)
    res.tables["cover"] = (["lo", "hi"], [[a, b] for a, b in rep.union.intervals])
    res.resolution = {"resolution_level": rep.resolution_level}
    res.records.append(Record("covered_measure", rep.covered_measure))
    res.records.append(Record("distinct_balls", rep.distinct_ball_count))


def run_dim(cfg: ExperimentConfig, res: ExperimentResult) -> None:
    scheme = cfg.build_scheme()
    t = as_fraction(cfg.t or "2")
    est = dm.critical_exponent(scheme, t, cfg.q_max or 10 ** 4)
    closed = dm.closed_form_dimensions(scheme.space)
    bound = (closed.box.value + 1) / float(t)
    tol = cfg.tolerance or dm.EPSILON
    res.tables["bisection"] = (["tau", "slope_log_S", "increment_slope"],
                               [[h["tau"], h["slope_log_S"], h["increment_slope"]]
                                for h in est.diagnostics["history"]])
    res.resolution = {"checkpoints": est.diagnostics["checkpoints"]}
    res.records.append(Record("critical_exponent", est.value, f"<= (dim_B + 1)/t = {bound:.6f}", tol,
                              est.value <= bound + tol, "cover-series upper bound"))
    res.records.append(Record("closed_form", closed.as_dict()))


def run_dirichlet(cfg: ExperimentConfig, res: ExperimentResult) -> None:
    scheme = cfg.build_scheme()
    grid = [as_fraction(g) for g in cfg.grid] if cfg.grid else None
    if cfg.d is not None:
        grid = [as_fraction(cfg.d)]
    rep = di.estimate_dirichlet(scheme, grid, cfg.N_list or (10, 30), cfg.q_max or 1000,
                                threads=cfg.resolved_threads())
    _dirichlet_table(res, rep)
    res.records.append(Record("estimated_dirichlet", rep.estimated_d))


def _dirichlet_table(res: ExperimentResult, rep: di.DirichletReport, name: str = "dirichlet") -> None:
    res.tables[name] = (["d", "N", "covered_measure"], [list(r) for r in rep.rows()])
    res.resolution[name] = rep.summary()


# -- reproduction catalogue ----------------------------------------------------

@dataclass(frozen=True)
class Reproduction:
    name: str
    description: str
    run: Callable[[ExperimentConfig, ExperimentResult], None]


def _tau_record(res, cfg, name, scheme, t, q_max, expected, formula, tol=dm.EPSILON):
    est = dm.critical_exponent(scheme, t, cfg.q_max or q_max)
    tol = cfg.tolerance or tol
    res.tables[f"bisection_{scheme.kind}"] = (
        ["tau", "slope_log_S", "increment_slope"],
        [[h["tau"], h["slope_log_S"], h["increment_slope"]] for h in est.diagnostics["history"]])
    res.records.append(Record(f"critical_exponent[{scheme.label}, t={fraction_str(as_fraction(t))}]",
                              round(est.value, 6), round(expected, 6), tol,
                              within(est.value, expected, tol), f"{name}: {formula}"))


def _dirichlet_record(res, cfg, name, scheme, N_list, q_max, lo, hi, formula):
    grid = [as_fraction(g) for g in cfg.grid] if cfg.grid else None
    rep = di.estimate_dirichlet(scheme, grid, cfg.N_list or N_list, q_max,
                                threads=cfg.resolved_threads(), max_balls=10 ** 8)
    _dirichlet_table(res, rep, f"dirichlet_{scheme.kind}")
    res.records.append(Record(f"dirichlet_estimate[{scheme.label}]", rep.estimated_d, [lo, hi], None,
                              in_bracket(rep.estimated_d, lo, hi), f"{name}: {formula}"))
    res.records.append(Record(f"dirichlet_monotone[{scheme.label}]",
                              rep.monotone_in_d and rep.monotone_in_N, True, None,
                              rep.monotone_in_d and rep.monotone_in_N, f"{name}: nested unions"))


def _exact_records(res, name, checks, label):
    res.tables[label] = (["claim", "depth", "passed", "detail"],
                         [[c.claim, c.depth, c.passed, c.detail] for c in checks])
    res.records.append(Record(label, f"{sum(c.passed for c in checks)}/{len(checks)}", "all", None,
                              all(c.passed for c in checks), f"{name}: exact finite check"))


def _t(cfg, default):
    return as_fraction(cfg.t) if cfg.t else as_fraction(default)


def rep_jarnik(cfg, res):
    t = _t(cfg, 2)
    _tau_record(res, cfg, "jarnik-besicovitch", sc.classic(), t, 10 ** 5, 2 / float(t), "2/t")


def rep_dyadic(cfg, res):
    t = _t(cfg, 3)
    _tau_record(res, cfg, "prop-3.3-dyadic", sc.dyadic_block(), t, 2 ** 20 - 1, 1 / float(t), "1/t")


def rep_power(cfg, res):
    alpha = Fraction(2)
    d = 1 + 1 / float(alpha)
    _dirichlet_record(res, cfg, "prop-3.3-power", sc.power_block(alpha), (10, 30), cfg.q_max or 10 ** 4,
                      d - 0.1, d + 0.1, "d = 1 + 1/alpha")


def rep_cantor_i(cfg, res):
    t = _t(cfg, 2)
    scheme = sc.cantor_endpoint(sp.middle_third())
    s = scheme.space.dimension_s
    _tau_record(res, cfg, "prop-3.4-i", scheme, t, 3 ** 12 - 1, s / float(t), "s/t")
    _dirichlet_record(res, cfg, "prop-3.4-i", scheme, (3 ** 8, 3 ** 10, 3 ** 12), 3 ** 15, 1.0, 1.1, "d = 1")


def rep_cantor_ii(cfg, res):
    scheme = sc.cantor_shifted(None)
    s = scheme.space.dimension_s
    t = _t(cfg, "517/200")
    _tau_record(res, cfg, "prop-3.4-ii", scheme, t, 3 ** 12 - 1, (s + 1) / float(t), "(s+1)/t")
    _dirichlet_record(res, cfg, "prop-3.4-ii", scheme, (27, 81, 243), 3 ** 11, 2.5, 2.7, "d = 1 + 1/s")
    _exact_records(res, "prop-3.4-ii", di.verify_cantor_dirichlet("ii", n_max=6), "exact_cylinder_cover")


def rep_cantor_iii(cfg, res):
    d = as_fraction(cfg.d) if cfg.d else Fraction(3, 2)
    scheme = sc.cantor_shifted(d)
    s = scheme.space.dimension_s
    t = _t(cfg, 2)
    _tau_record(res, cfg, "prop-3.4-iii", scheme, t, 3 ** 12 - 1, float(d) * s / float(t), "d s/t")
    _dirichlet_record(res, cfg, "prop-3.4-iii", scheme, (27, 243), 3 ** 10,
                      float(d) - 0.1, float(d) + 0.1, "d")
    _exact_records(res, "prop-3.4-iii", di.verify_cantor_dirichlet("iii", d, n_max=6), "exact_cylinder_cover")


def rep_central(cfg, res):
    scheme = sc.central_cantor_endpoint(Fraction(1, 4))
    t = _t(cfg, 2)
    _tau_record(res, cfg, "prop-3.5", scheme, t, 4 ** 9 - 1, scheme.space.dimension_s / float(t), "s/t")
    _dirichlet_record(res, cfg, "prop-3.5", scheme, (4 ** 6, 4 ** 8), 4 ** 11, 1.0, 1.1, "d = 1")


def cantor_test_points(count: int = 50) -> List[Fraction]:
    """Middle-third points with purely periodic ternary digits in {0, 2}.

    ``x = 2A / (3**L - 1)`` where A has ternary digits in {0, 1}; excluding
    all-zero and all-one digit strings keeps x off endpoints and gap centres.
    """
    out, seen, L = [], set(), 2
    while len(out) < count:
        for bits in range(1, 2 ** L - 1):
            A = sum(3 ** i for i in range(L) if bits >> i & 1)
            x = Fraction(2 * A, 3 ** L - 1)
            if x not in seen:
                seen.add(x)
                out.append(x)
                if len(out) == count:
                    break
        L += 1
    return out


def rep_degenerate(cfg, res):
    t = _t(cfg, 2)
    scheme = sc.gap_centers(Fraction(1, 3))
    q0 = ls.degeneracy_threshold(scheme, t)
    q_hi = cfg.q_max or max(3 * q0, q0 + 50)
    above = [q for q in range(q0, q_hi + 1) if not ls.ball_degeneracy_check(scheme, t, q)]
    below = ls.ball_degeneracy_check(scheme, t, q0 - 1) if q0 > 1 else False
    pts = cantor_test_points(50)
    hits = 0
    spec = ls.CoverSpec(scheme, t, q0, q_hi)
    for x in pts:
        hits += len(ls.membership_profile(spec, x))
    res.resolution = {"threshold": q0, "tested_up_to": q_hi}
    name = "prop-2.4-degenerate"
    res.records.append(Record("degenerate_at_and_above_threshold", not above, True, None, not above,
                              f"{name}: balls meet the set only at their centres"))
    res.records.append(Record("not_degenerate_below_threshold", not below, True, None, not below,
                              f"{name}: threshold is exact"))
    res.records.append(Record("membership_hits_beyond_threshold", hits, 0, None, hits == 0,
                              f"{name}: F_t is countable"))
    res.tables["threshold"] = (["q", "degenerate"],
                               [[q, ls.ball_degeneracy_check(scheme, t, q)] for q in range(max(1, q0 - 5), q0 + 6)])


def rep_holes(cfg, res):
    space = sp.alternating_ifs((2, 3), 2)
    N = 2
    delta = as_fraction(cfg.d) if cfg.d else di.smallest_admissible_delta(space, N)
    depth = cfg.depth or 13
    std = di.hole_forcing_check(space, sc.greedy(space, depth), delta, N)
    adv = di.hole_forcing_check(space, None, delta, N, adversarial=True, net_depth=depth)
    rows = []
    for label, rep in (("standard", std), ("adversarial", adv)):
        rows += [[label, c.claim, c.passed, c.detail] for c in rep.checks]
        res.records.append(Record(f"hole_forcing[{label}]", rep.status, "pass", None, rep.passed,
                                  "prop-2.3-holes: maximality fills every block-end cylinder"))
    res.tables["hole_forcing"] = (["variant", "claim", "passed", "detail"], rows)
    res.resolution = {"delta": delta, "level": std.level, "q_range": list(std.q_range)}


MASS_CONFIGS = {
    "classic": (sc.classic, (2, 64, 16384), Fraction(1, 2)),
    "cantor-endpoint": (lambda: sc.cantor_endpoint(sp.middle_third()), (3, 243, 3 ** 12), Fraction(0)),
    "dyadic-block": (sc.dyadic_block, (3, 100, 30000), Fraction(1, 2)),
}


def _mass(cfg, res, name, keys):
    t = _t(cfg, 2)
    for key in keys:
        make, q_seq, z = MASS_CONFIGS[key]
        nc = ne.build_nested(make(), t, q_seq, z)
        rep = ne.verify_mass_bound(nc, samples=48, seed=cfg.seed)
        res.tables[f"mass_{key}"] = (["x", "r", "level", "regime", "mass", "ratio"],
                                     [[s.x, s.r, s.level, s.regime, s.mass, s.ratio] for s in rep.samples])
        res.records.append(Record(f"product_bound[{key}]", rep.product_ok, True, None, rep.product_ok,
                                  f"{name}: mass of a level-k ball"))
        ok = rep.spread < 1e3 and rep.cases == {"below", "above"}
        res.records.append(Record(f"ratio_spread[{key}]", round(rep.spread, 3), "< 1000", None, ok,
                                  f"{name}: |log r|^(ts) r^(s/t) bound"))


def rep_mass_21(cfg, res):
    _mass(cfg, res, "thm-2.1-mass", ("classic", "dyadic-block"))


def rep_mass_26(cfg, res):
    _mass(cfg, res, "thm-2.6-mass", ("cantor-endpoint",))


CATALOGUE: Dict[str, Reproduction] = {r.name: r for r in (
    Reproduction("jarnik-besicovitch", "classic rationals, critical exponent 2/t", rep_jarnik),
    Reproduction("prop-3.3-dyadic", "dyadic blocks, critical exponent 1/t", rep_dyadic),
    Reproduction("prop-3.3-power", "power blocks, Dirichlet exponent 1 + 1/alpha", rep_power),
    Reproduction("prop-3.4-i", "Cantor endpoints, exponent s/t and Dirichlet 1", rep_cantor_i),
    Reproduction("prop-3.4-ii", "shifted Cantor points, exponent (s+1)/t and Dirichlet 1 + 1/s", rep_cantor_ii),
    Reproduction("prop-3.4-iii", "intermediate shifts, exponent d s/t and Dirichlet d", rep_cantor_iii),
    Reproduction("prop-3.5", "Cantor set of ratio 1/4, Dirichlet exponent 1", rep_central),
    Reproduction("prop-2.4-degenerate", "gap centres, balls degenerate past a threshold", rep_degenerate),
    Reproduction("prop-2.3-holes", "alternating set, maximality forces points into cylinders", rep_holes),
    Reproduction("thm-2.1-mass", "nested constructions on the unit interval", rep_mass_21),
    Reproduction("thm-2.6-mass", "nested construction on the middle-third set", rep_mass_26),
)}

COMMANDS = {
    "gen-rationals": run_gen_rationals,
    "check-scheme": run_check_scheme,
    "cover": run_cover,
    "dim": run_dim,
    "dirichlet": run_dirichlet,
}


def run(cfg: ExperimentConfig) -> ExperimentResult:
    """Run one config; a resource limit returns a partial result instead of raising."""
    res = ExperimentResult(cfg.to_dict())
    start = time.perf_counter()
    try:
        if cfg.command == "reproduce":
            CATALOGUE[cfg.name].run(cfg, res)
        else:
            COMMANDS[cfg.command](cfg, res)
    except ResourceLimit as exc:
        res.partial = True
        res.records.append(Record("resource_limit", str(exc)))
    res.runtime = time.perf_counter() - start
    return res
