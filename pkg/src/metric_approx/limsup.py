"""Finite-range approximations of the well-approximable set F_t.

``F_t`` is the set of x within ``q**-t`` of ``P(q)`` for infinitely many q.
Everything here works with a truncation ``q_min <= q <= q_max`` of the inner
union and reports exact measures of it.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import grid as gr
from . import schemes as sc
from . import spaces as sp
from .errors import DomainError, InvalidArgument, ResourceLimit, UnsupportedSpace
from .exact import IntervalUnion, _normalize, as_fraction, fraction_str, pow_rational

MAX_BALLS = 2_000_000


@dataclass(frozen=True)
class CoverSpec:
    scheme: sc.Scheme
    t: Fraction
    q_min: int
    q_max: int
    radius_mode: str = "outer"

    def __post_init__(self):
        t = as_fraction(self.t)
        object.__setattr__(self, "t", t)
        if t < 1:
            raise InvalidArgument("t must be at least 1")
        if not (1 <= self.q_min <= self.q_max):
            raise InvalidArgument("need 1 <= q_min <= q_max")
        if self.radius_mode not in ("outer", "inner"):
            raise InvalidArgument("radius_mode must be outer or inner")


@dataclass
class CoverReport:
    spec: CoverSpec
    union: IntervalUnion
    covered_measure: Fraction
    ball_count: int
    distinct_ball_count: int
    resolution_level: int
    measure_over: Optional[Fraction] = None
    measure_under: Optional[Fraction] = None
    trajectory: List[Tuple[int, Fraction]] = field(default_factory=list)
    radius_gap: Fraction = Fraction(0)
    partial: bool = False

    def diameter_sum(self, tau: float) -> float:
        """``sum |B|**tau`` over the distinct balls of the cover."""
        s = self.spec
        total = 0.0
        for q in sc.distinct_runs(s.scheme, s.q_min, s.q_max):
            total += sc.size(s.scheme, q) * (2 * float(q) ** (-float(s.t))) ** tau
        return total

    def covered_cylinders(self, level: Optional[int] = None) -> sp.CylinderSet:
        return sp.intersect_with_space(self.spec.scheme.space, self.union,
                                       self.resolution_level if level is None else level)

    def summary(self) -> dict:
        return {
            "ball_count": self.ball_count,
            "distinct_ball_count": self.distinct_ball_count,
            "covered_measure": fraction_str(self.covered_measure),
            "resolution_level": self.resolution_level,
            "measure_over": None if self.measure_over is None else fraction_str(self.measure_over),
            "measure_under": None if self.measure_under is None else fraction_str(self.measure_under),
            "partial": self.partial,
        }


def default_resolution(space: sp.SpaceDescriptor, q_max: int, t: Fraction) -> int:
    """``ceil(log_{1/lam} q_max**t) + 2`` on Cantor kinds, ``ceil(t log2 q_max) + 2`` otherwise."""
    base = float(1 / space.lam) if space.is_cantor else 2.0
    return math.ceil(float(t) * math.log(q_max) / math.log(base) - 1e-12) + 2


def ball(p: Fraction, r: Fraction) -> Tuple[Fraction, Fraction]:
    return p - r, p + r


def covered_measure(space: sp.SpaceDescriptor, u: IntervalUnion) -> Fraction:
    """Exact natural measure of ``u`` intersected with the space."""
    total = Fraction(0)
    for a, b in u:
        total += sp.natural_cdf(space, b) - sp.natural_cdf(space, a)
    return total


_CYLINDER_BOUND_LEVEL = 16


def cylinder_bounds(space: sp.SpaceDescriptor, u: IntervalUnion, level: int) -> Tuple[Fraction, Fraction]:
    """Natural measure of the level-n cylinders touching ``u`` and of those inside ``u``."""
    mass = sp.cylinder_mass(space, level)
    fast = _integer_cylinders(space, level)
    if fast is not None and u.intervals:
        L, size, D = fast
        # piece ends in units of 1/D, rounded so integer comparisons stay exact
        lo = np.array([-((-a * D) // 1) for a, _ in u.intervals], dtype=object)
        hi = np.array([(b * D) // 1 for _, b in u.intervals], dtype=object)
        lo, hi = lo.astype(np.int64), hi.astype(np.int64)
        R = L + size
        j = np.searchsorted(hi, L, side="left")
        valid = j < len(hi)
        jj = np.minimum(j, len(hi) - 1)
        touch = valid & (lo[jj] <= R)
        inside = touch & (lo[jj] <= L) & (R <= hi[jj])
        return int(touch.sum()) * mass, int(inside.sum()) * mass
    # cylinders and union pieces are both sorted, so one sweep suffices
    pieces = u.intervals
    j = touching = inside = 0
    for _, l, r in sp.cylinders(space, level):
        while j < len(pieces) and pieces[j][1] < l:
            j += 1
        if j == len(pieces):
            break
        a, b = pieces[j]
        if a <= r:
            touching += 1
            inside += a <= l and r <= b
    return touching * mass, inside * mass


def _integer_cylinders(space: sp.SpaceDescriptor, level: int):
    """Left ends of level-n cylinders as int64 in units of 1/D, or None.

    Covers the unit interval and central Cantor sets when ``D`` fits in 62 bits.
    """
    if space.kind == sp.UNIT:
        if level > 62:
            return None
        return np.arange(2 ** level, dtype=np.int64), 1, 2 ** level
    if not space.is_cantor:
        return None
    a, b = space.lam.numerator, space.lam.denominator
    D = b ** level
    if D >= 2 ** 62:
        return None
    L = np.zeros(1, dtype=np.int64)
    for i in range(level):
        # level i+1 in units b**(i+1): x -> lam x and x -> (1 - lam) + lam x
        L = np.concatenate([a * L, (b - a) * b ** i + a * L])
    return L, a ** level, D


def build_cover(spec: CoverSpec, max_balls: int = MAX_BALLS,
                trajectory: bool = False) -> CoverReport:
    """Exact union of ``B(p, r(q))`` for ``q_min <= q <= q_max``, ``p in P(q)``.

    Identical point sets at larger q contribute balls already contained in
    earlier ones, so only the first q of every distinct ``P(q)`` is unioned.
    """
    scheme, space = spec.scheme, spec.scheme.space
    runs = sc.distinct_runs(scheme, spec.q_min, spec.q_max)
    run_set = set(runs)
    intervals: List[Tuple[Fraction, Fraction]] = []
    ball_count = distinct = 0
    traj = []
    gap = Fraction(0)
    partial = False
    q_reached = spec.q_max
    for q in range(spec.q_min, spec.q_max + 1):
        n = sc.size(scheme, q)
        if q in run_set:
            if distinct + n > max_balls:
                partial = True
                q_reached = q - 1
                break
            rp = pow_rational(q, spec.t)
            r = rp.pick(spec.radius_mode)
            gap = max(gap, rp.upper - rp.lower)
            intervals.extend(ball(p, r) for p in sc.generate(scheme, q))
            distinct += n
            if trajectory:
                u = IntervalUnion._from_normalized(_normalize(intervals))
                intervals = list(u.intervals)
                traj.append((q, covered_measure(space, u)))
        elif trajectory:
            traj.append((q, traj[-1][1]))
        ball_count += n
    union = IntervalUnion._from_normalized(_normalize(intervals))
    level = default_resolution(space, max(q_reached, 1), spec.t)
    report = CoverReport(spec, union, covered_measure(space, union), ball_count, distinct,
                         level, trajectory=traj, radius_gap=gap, partial=partial)
    if level <= _CYLINDER_BOUND_LEVEL:
        report.measure_over, report.measure_under = cylinder_bounds(space, union, level)
    if partial:
        raise ResourceLimit(f"ball budget {max_balls} exhausted after q={q_reached}", report)
    return report


# -- grid engine -------------------------------------------------------------

def grid_union(scheme: sc.Scheme, t, q_lo: int, q_hi: int, grid: Optional[gr.Grid] = None,
               mode: str = "outer", window: int = 0, max_balls: int = 20_000_000):
    """Merged grid intervals for the union over ``q_lo <= q <= q_hi``.

    Outer rounding of both the radius and the grid makes the result a
    superset of the exact union; inner rounding a subset. ``window > 0``
    keeps only balls centred in the first level-``window`` cylinder.
    """
    t = as_fraction(t)
    space = scheme.space
    if grid is None:
        grid = gr.grid_for(space, q_hi)
    los, his = [], []
    total = 0
    if scheme.kind == sc.SHIFTED:
        for lo, hi in _shifted_balls(scheme, t, q_lo, q_hi, grid, mode, window):
            total += lo.size
            if total > max_balls:
                raise ResourceLimit(f"ball budget {max_balls} exhausted")
            lo, hi = gr.merge(lo, hi)
            los.append(lo)
            his.append(hi)
        if not los:
            return np.zeros(0, np.int64), np.zeros(0, np.int64), grid
        lo, hi = gr.merge(np.concatenate(los), np.concatenate(his))
        return lo, hi, grid
    for q in sc.distinct_runs(scheme, q_lo, q_hi):
        nums, den = sc.point_array(scheme, q, window)
        total += len(nums)
        if total > max_balls:
            raise ResourceLimit(f"ball budget {max_balls} exhausted at q={q}")
        R = gr.radius_units(pow_rational(q, t).pick(mode), grid, mode)
        lo, hi = gr.ball_endpoints(nums, den, R, grid, mode)
        los.append(lo)
        his.append(hi)
    if not los:
        return np.zeros(0, np.int64), np.zeros(0, np.int64), grid
    lo, hi = gr.merge(np.concatenate(los), np.concatenate(his))
    return lo, hi, grid


_FLOAT_MARGIN = 1e-12


def radius_units_float(q: np.ndarray, t: Fraction, grid: gr.Grid, mode: str) -> np.ndarray:
    """Vectorized ``q**-t * D`` with a relative safety margin far above float error.

    Outer radii are rounded up past the margin, inner radii down, so the
    direction of rounding is the same as :func:`grid.radius_units`.
    """
    x = np.exp(math.log(grid.D) - float(t) * np.log(q.astype(float)))
    if mode == "outer":
        return np.ceil(x * (1 + _FLOAT_MARGIN)).astype(np.int64) + 1
    return np.maximum(np.floor(x * (1 - _FLOAT_MARGIN)).astype(np.int64) - 1, 0)


def _shifted_balls(scheme: sc.Scheme, t: Fraction, q_lo: int, q_hi: int, grid: gr.Grid,
                   mode: str, window: int, chunk: int = 4_000_000):
    """Grid balls of the shifted scheme, block by block.

    Within a block the shifted part depends only on m, so each m needs its
    first q only; each endpoint family needs one ball per centre, at the
    first q where the padding keeps it.
    """
    lam = Fraction(1, 3)
    D = grid.D
    n = sc.cantor_block(lam, q_lo)
    while 3 ** n <= q_hi:
        k = sc.shifted_k(n, scheme.d)
        period = 2 ** (k - n)
        start = max(q_lo, 3 ** n)
        stop = min(q_hi, 3 ** (n + 1) - 1)
        lefts = sc.left_int(lam, n)
        if window:
            lefts = lefts[: 2 ** max(n - window, 0)]
        unit = D // 3 ** k
        L = np.asarray(lefts, dtype=np.int64) * (3 ** (k - n) * unit)
        ells = np.asarray(sc.left_int(lam, k - n), dtype=np.int64)
        # first q >= start of every residue class m - 1
        first = start + (np.arange(period) - (start - 3 ** n)) % period
        live = first <= stop
        m_idx = np.flatnonzero(live)
        q_first = first[live]
        R = radius_units_float(q_first, t, grid, mode)
        shift = ells[m_idx] * unit
        rows = max(1, chunk // max(L.size, 1))
        for i in range(0, m_idx.size, rows):
            c = (L[None, :] + shift[i:i + rows, None])
            r = R[i:i + rows, None]
            yield (c - r).ravel(), (c + r).ravel()
        # endpoint families: smallest q of the block range at which they are kept
        width = 3 ** (k - n)
        den = 3 ** k
        q_all = np.arange(start, stop + 1, dtype=np.int64)
        e_all = ells[(q_all - 3 ** n) % period]
        # ell * q and (width - ell) * q stay below 2**63 for k <= 39
        keep_left = np.flatnonzero(e_all * q_all >= den)
        keep_right = np.flatnonzero((width - e_all) * q_all >= den)
        q_left = int(q_all[keep_left[0]]) if keep_left.size else None
        q_right = int(q_all[keep_right[0]]) if keep_right.size else None
        for qf, offset in ((q_left, 0), (q_right, width * unit)):
            if qf is None:
                continue
            rr = radius_units_float(np.array([qf]), t, grid, mode)[0]
            c = L + offset
            yield c - rr, c + rr
        n += 1


def grid_measure(scheme: sc.Scheme, t, q_lo: int, q_hi: int, mode: str = "outer",
                 use_symmetry: bool = True, max_balls: int = 20_000_000) -> Fraction:
    """Natural measure of the q-range union, computed on the integer grid.

    When the cover repeats in every level-n0 cylinder (see
    :func:`schemes.self_similar_level`) only the first cylinder is built and
    its measure is scaled by ``2**n0``.
    """
    if q_lo > q_hi:
        return Fraction(0)
    n0 = sc.self_similar_level(scheme, q_lo, t) if use_symmetry else 0
    lo, hi, grid = grid_union(scheme, t, q_lo, q_hi, mode=mode, window=n0, max_balls=max_balls)
    if not n0:
        return gr.measure(lo, hi, grid)
    edge = grid.D // scheme.space.lam.denominator ** n0
    lo, hi = np.maximum(lo, 0), np.minimum(hi, edge)
    keep = lo <= hi
    return gr.measure(lo[keep], hi[keep], grid) * 2 ** n0


# -- pointwise queries -------------------------------------------------------

@dataclass(frozen=True)
class Hit:
    q: int
    p: Fraction
    distance: Fraction


def membership_profile(spec: CoverSpec, x, certification_depth: int = sp.DEFAULT_DEPTH) -> List[Hit]:
    """All ``(q, p)`` in range with ``|x - p| <= q**-t`` (inner-rounded radius)."""
    x = as_fraction(x)
    space = spec.scheme.space
    if sp.contains(space, x, certification_depth) is not True:
        raise DomainError(f"{x} is not certified to lie in {space.label}")
    out = []
    for q in range(spec.q_min, spec.q_max + 1):
        r = pow_rational(q, spec.t).lower
        pts = sc.generate(spec.scheme, q)
        for p in pts[bisect_left(pts, x - r):bisect_right(pts, x + r)]:
            out.append(Hit(q, p, abs(x - p)))
    return out


def _power_below(q: int, t: Fraction, delta: Fraction) -> bool:
    """``q**-t < delta`` decided in integers."""
    u, v = t.numerator, t.denominator
    return delta.denominator ** v < q ** u * delta.numerator ** v


def ball_degeneracy_check(scheme: sc.Scheme, t, q: int) -> bool:
    """Whether every ball ``B(p, q**-t)``, ``p in P(q)``, meets the space only in p."""
    t = as_fraction(t)
    if scheme.kind != sc.GAP_CENTERS:
        raise UnsupportedSpace("degenerate balls are specific to the gap-centre scheme")
    space = scheme.space
    for p in sc.generate(scheme, q):
        delta = sp.punctured_distance(space, p)
        if delta == 0 or not _power_below(q, t, delta):
            return False
    return True


def degeneracy_threshold(scheme: sc.Scheme, t) -> int:
    """Smallest q0 with every ball degenerate for all ``q >= q0``.

    For q with centre level k the smallest half-gap is that of level k, and
    the worst q is the first of its block. The block test
    ``q_first(k)**-t < lam**(k-1) (1 - 2 lam) / 2`` improves with k when
    ``t > 1``, so once it holds it holds for every later block; the exact
    threshold is then found by walking down from that block's start.
    """
    t = as_fraction(t)
    if t <= 1:
        raise InvalidArgument("balls never degenerate for t <= 1")
    lam = scheme.space.lam
    k = 2
    while True:
        start = _block_start(lam, k)
        half_gap = lam ** (k - 1) * (1 - 2 * lam) / 2
        if _power_below(start, t, half_gap) and _power_below(_block_start(lam, k + 1), t, half_gap * lam):
            break
        k += 1
    q0 = start
    while q0 > 1 and ball_degeneracy_check(scheme, t, q0 - 1):
        q0 -= 1
    return q0


def _block_start(lam: Fraction, k: int) -> int:
    """Smallest q whose gap-centre level is k: ``q * lam**(k-2) >= 2``."""
    if k <= 1:
        return 1
    v = 2 / lam ** (k - 2)
    return -((-v.numerator) // v.denominator)
