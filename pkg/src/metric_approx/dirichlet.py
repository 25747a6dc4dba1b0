"""Dirichlet exponents: coverage sweeps and exact finite verifications.

The Dirichlet exponent of a scheme is the largest d for which the tail
unions ``U_N(d) = U_{q > N} U_{p in P(q)} B(p, q**-d)`` still cover (a ball
of) the space up to measure zero. At finite range this is surrogated by
requiring natural measure at least ``1 - eps`` for every tested N.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import gmpy2
import numpy as np

from . import grid as gr
from . import limsup as ls
from . import schemes as sc
from . import spaces as sp
from .errors import InvalidArgument, UnsupportedSpace
from .exact import as_fraction, fraction_str

FULL_THRESHOLD = Fraction(1, 2 ** 10)


@dataclass(frozen=True)
class ExactCheck:
    claim: str
    depth: int
    passed: bool
    detail: str = ""


# -- coverage curves ---------------------------------------------------------

def covered_measure_curve(scheme: sc.Scheme, d, N_list: Sequence[int], q_max: int,
                          mode: str = "outer", max_balls: int = 50_000_000) -> List[Tuple[int, Fraction]]:
    """Natural measure of ``U_{N < q <= q_max} U_p B(p, q**-d)`` for each N.

    The unions are nested (smaller N, bigger union), so they are accumulated
    from the largest N down and every q is processed once. When the cover
    repeats in each cylinder of some level (see
    :func:`schemes.self_similar_level`) only the first cylinder is built.
    """
    d = as_fraction(d)
    if d < 1:
        raise InvalidArgument("d must be at least 1")
    Ns = sorted(set(int(n) for n in N_list))
    if not Ns or Ns[0] < 0:
        raise InvalidArgument("N_list must be non-empty and non-negative")
    if q_max <= Ns[-1]:
        raise InvalidArgument("q_max must exceed every N")
    space = scheme.space
    window = sc.self_similar_level(scheme, Ns[0] + 1, d)
    grid = gr.grid_for(space, q_max)
    lo = np.zeros(0, np.int64)
    hi = np.zeros(0, np.int64)
    out = {}
    upper = q_max
    for N in reversed(Ns):
        seg_lo, seg_hi, _ = ls.grid_union(scheme, d, N + 1, upper, grid=grid, mode=mode,
                                          window=window, max_balls=max_balls)
        lo, hi = gr.merge(np.concatenate([lo, seg_lo]), np.concatenate([hi, seg_hi]))
        upper = N
        out[N] = _windowed_measure(lo, hi, grid, space, window)
    return [(N, out[N]) for N in Ns]


def _windowed_measure(lo, hi, grid: gr.Grid, space: sp.SpaceDescriptor, window: int) -> Fraction:
    if not window:
        return gr.measure(lo, hi, grid)
    edge = grid.D // space.lam.denominator ** window
    lo, hi = np.maximum(lo, 0), np.minimum(hi, edge)
    keep = lo <= hi
    return gr.measure(lo[keep], hi[keep], grid) * 2 ** window


def default_grid(space: sp.SpaceDescriptor, step: Fraction = Fraction(1, 20),
                 margin: Fraction = Fraction(1, 5)) -> List[Fraction]:
    """``1, 1 + step, ...`` up to ``1 + 1/s + margin``."""
    top = 1 + 1 / space.dimension_s + float(margin)
    out = []
    d = Fraction(1)
    while d <= top + 1e-12:
        out.append(d)
        d += step
    return out


@dataclass
class DirichletReport:
    scheme: str
    d_grid: List[Fraction]
    N_list: List[int]
    q_max: int
    curves: Dict[Fraction, List[Tuple[int, Fraction]]]
    estimated_d: Optional[float]
    bracket: Tuple[Optional[float], Optional[float]]
    threshold: Fraction
    monotone_in_d: bool
    monotone_in_N: bool
    exact_checks: List[ExactCheck] = field(default_factory=list)
    note: str = ("finite-range surrogate: full coverage means natural measure >= 1 - threshold "
                 "for every tested N; curves are monotone in d and N by construction")

    def rows(self):
        for d in self.d_grid:
            for N, m in self.curves[d]:
                yield d, N, m

    def summary(self) -> dict:
        return {
            "scheme": self.scheme,
            "estimated_d": self.estimated_d,
            "bracket": list(self.bracket),
            "threshold": fraction_str(self.threshold),
            "N_list": self.N_list,
            "q_max": self.q_max,
            "monotone_in_d": self.monotone_in_d,
            "monotone_in_N": self.monotone_in_N,
            "note": self.note,
        }


def estimate_dirichlet(scheme: sc.Scheme, d_grid: Optional[Sequence] = None,
                       N_list: Sequence[int] = (10, 30), q_max: int = 1000,
                       threshold: Fraction = FULL_THRESHOLD,
                       max_balls: int = 50_000_000, threads: int = 1) -> DirichletReport:
    """Largest grid d whose coverage stays ``>= 1 - threshold`` at every N.

    The reported bracket is ``[estimate, next grid value)``. With
    ``threads > 1`` the grid values run in separate processes.
    """
    grid_d = sorted(as_fraction(d) for d in (d_grid if d_grid is not None else default_grid(scheme.space)))
    if not grid_d:
        raise InvalidArgument("empty d grid")
    Ns = sorted(set(int(n) for n in N_list))
    job = partial(covered_measure_curve, scheme, N_list=Ns, q_max=q_max, max_balls=max_balls)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            curves = dict(zip(grid_d, pool.map(job, grid_d)))
    else:
        curves = {d: job(d) for d in grid_d}
    full = [all(m >= 1 - threshold for _, m in curves[d]) for d in grid_d]
    mono_d = all(
        curves[a][i][1] >= curves[b][i][1]
        for a, b in zip(grid_d, grid_d[1:]) for i in range(len(Ns))
    )
    mono_N = all(
        c[i][1] >= c[i + 1][1] for c in curves.values() for i in range(len(Ns) - 1)
    )
    est_idx = max((i for i, f in enumerate(full) if f), default=None)
    if est_idx is None:
        estimate, bracket = None, (None, float(grid_d[0]))
    else:
        estimate = float(grid_d[est_idx])
        nxt = float(grid_d[est_idx + 1]) if est_idx + 1 < len(grid_d) else None
        bracket = (estimate, nxt)
    return DirichletReport(scheme.label, grid_d, Ns, q_max, curves, estimate, bracket,
                           threshold, mono_d, mono_N)


# -- exact verifications -------------------------------------------------------

def verify_cantor_dirichlet(case: str, d=None, n_max: int = 6) -> List[ExactCheck]:
    """Every level-k(n) cylinder holds a point of some P(q), ``q <= 3**(n+1)``.

    Such a point is within ``3**-k`` of every point of the cylinder, so all
    of the Cantor set is ``3**-k``-approximable at that q. Checked
    exhaustively for ``n = 0..n_max``. For case iii the cover-sum terms
    ``2**(k - n d')`` for a ``d' > d`` are also checked against the geometric
    bound ``2**(-n (d' - d))``.
    """
    if case not in ("ii", "iii"):
        raise InvalidArgument("case must be ii or iii")
    if case == "iii":
        if d is None:
            raise InvalidArgument("case iii needs d")
        d = as_fraction(d)
    scheme = sc.cantor_shifted(None if case == "ii" else d)
    lam = Fraction(1, 3)
    out = []
    for n in range(n_max + 1):
        k = sc.shifted_k(n, scheme.d)
        den = 3 ** k
        pts = []
        for q in sc.distinct_runs(scheme, 3 ** n, 3 ** (n + 1)):
            nums, pden = sc.point_array(scheme, q)
            if den % pden:
                continue
            pts.append(nums * (den // pden))
        allp = np.unique(np.concatenate(pts))
        lefts = np.asarray(sc.left_int(lam, k), dtype=np.int64)
        # a point p lies in [l, l + 1] (units of 3**-k) iff the first p >= l is <= l + 1
        idx = np.searchsorted(allp, lefts, side="left")
        ok = idx < allp.size
        hit = np.zeros(lefts.size, dtype=bool)
        hit[ok] = allp[idx[ok]] <= lefts[ok] + 1
        missing = int((~hit).sum())
        out.append(ExactCheck(f"case-{case}: every level-{k} cylinder hit by q <= 3^{n + 1}", n,
                              missing == 0, f"k={k}, cylinders={lefts.size}, missed={missing}"))
    if case == "iii":
        d_prime = d + Fraction(1, 10)
        partial = 0.0
        for n in range(1, n_max + 1):
            k = sc.shifted_k(n, d)
            expo = k - n * d_prime
            partial += 2.0 ** float(expo)
            ok = expo <= -n * (d_prime - d)
            tail = 2.0 ** (-float(n + 1) * float(d_prime - d)) / (1 - 2.0 ** (-float(d_prime - d)))
            out.append(ExactCheck(f"case-iii: cover-sum term 2^(k - n d') <= 2^(-n (d' - d)), d'={d_prime}",
                                  n, ok, f"exponent={expo}, partial={partial:.6g}, tail<={tail:.6g}"))
    return out


def verify_classic_dirichlet(x_net: Sequence, N: int) -> List[ExactCheck]:
    """For each x find ``q <= N`` and a with ``|x - a/q| <= 1/(q (N + 1))``."""
    out = []
    bound = N + 1
    for x in x_net:
        x = as_fraction(x)
        found = None
        for q in range(1, N + 1):
            a = math.floor(q * x + Fraction(1, 2))
            if abs(q * x - a) * bound <= 1:
                found = (q, a)
                break
        detail = "" if found is None else f"q={found[0]}, p={found[1]}/{found[0]}"
        out.append(ExactCheck(f"dirichlet x={fraction_str(x)}", N, found is not None, detail))
    return out


# -- hole forcing on the alternating set ---------------------------------------

def gap_condition(gap: Optional[Fraction], kN: int, delta: Fraction) -> bool:
    """``gap > 2 * 2**(-kN * delta)`` exactly (missing gap counts as infinite)."""
    if gap is None:
        return True
    a, b = delta.numerator, delta.denominator
    return gap.numerator ** b * 2 ** (kN * a) > 2 ** b * gap.denominator ** b


def smallest_admissible_delta(space: sp.SpaceDescriptor, N: int, den: int = 100) -> Fraction:
    """Smallest ``Delta = j/den > 1`` meeting the gap condition at block N.

    The condition only gets easier as Delta grows, so this is the most
    demanding Delta the block supports.
    """
    M = sp.block_boundaries(space)[N]
    kN = space.blocks[N - 1]
    gaps = [g for c in sp.alternating_cylinders(space, M) for g in (c.gap_left, c.gap_right) if g is not None]
    g = min(gaps)
    est = math.log2(2 / float(g)) / kN
    j = max(den + 1, int(est * den) - 2)
    while not gap_condition(g, kN, Fraction(j, den)):
        j += 1
    while j - 1 > den and gap_condition(g, kN, Fraction(j - 1, den)):
        j -= 1
    return Fraction(j, den)


def probe_range(kN: int, delta: Fraction) -> Tuple[int, int]:
    """Integers q with ``2**(kN Delta) / 2 < q <= 2**(kN Delta)``."""
    a, b = delta.numerator, delta.denominator
    top, _ = gmpy2.iroot(gmpy2.mpz(2) ** (kN * a), b)
    top = int(top)
    half, _ = gmpy2.iroot(gmpy2.mpz(2) ** (kN * a - b), b)
    return int(half) + 1, top


@dataclass
class HoleForcingReport:
    delta: Fraction
    block: int
    level: int
    q_range: Tuple[int, int]
    status: str
    checks: List[ExactCheck]

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def hole_forcing_check(space: sp.SpaceDescriptor, scheme: Optional[sc.Scheme], delta, N: int,
                       adversarial: bool = False, net_depth: int = 13,
                       probes: Optional[Sequence[int]] = None) -> HoleForcingReport:
    """Maximality forces a point of ``P(q)`` into every level-M cylinder.

    With ``M = t * sum_{n <= N} k_n``: when both gaps next to a cylinder E
    exceed ``2 * 2**(-k_N Delta)`` and ``1/q`` is below that gap, no point
    outside E is within ``1/q`` of E, so a maximal P(q) must meet E. Then
    the whole space lies within ``2**-M <= q**(-t/Delta)`` of P(q).

    With ``adversarial=True`` each cylinder E gets its own greedy set,
    seeded first with the nearest points outside E and scanned in
    descending order.
    """
    if space.kind != sp.ALTERNATING:
        raise UnsupportedSpace("hole forcing is stated for the alternating set")
    delta = as_fraction(delta)
    if delta <= 1:
        raise InvalidArgument("Delta must exceed 1")
    M = sp.block_boundaries(space)[N]
    kN = space.blocks[N - 1]
    t = space.t
    cyl = sp.alternating_cylinders(space, M)
    q_lo, q_hi = probe_range(kN, delta)
    checks = []
    gaps_ok = all(gap_condition(c.gap_left, kN, delta) and gap_condition(c.gap_right, kN, delta) for c in cyl)
    checks.append(ExactCheck(f"gaps next to level-{M} cylinders exceed 2*2^(-{kN}*({delta}))", N, gaps_ok))
    if not gaps_ok:
        return HoleForcingReport(delta, N, M, (q_lo, q_hi), "inconclusive", checks)
    if probes is None:
        probes = range(q_lo, q_hi + 1)
    probes = [q for q in probes if q_lo <= q <= q_hi]
    size = Fraction(1, 2 ** M)
    for q in probes:
        # 2**-M <= q**(-t/Delta)  <=>  q**(t b) <= 2**(M a)
        near = q ** (t * delta.denominator) <= 2 ** (M * delta.numerator)
        if adversarial:
            hits = 0
            maximal = True
            for i, c in enumerate(cyl):
                seeds = []
                if i > 0:
                    seeds.append(cyl[i - 1].right)
                if i + 1 < len(cyl):
                    seeds.append(cyl[i + 1].left)
                pts = sc.greedy_scheme(space, q, net_depth, "descending", seeds)
                maximal &= sc.is_maximal(pts, q, space).maximal
                hits += any(c.left <= p <= c.right for p in pts)
            ok = maximal and hits == len(cyl)
            detail = f"adversarial: {hits}/{len(cyl)} cylinders hit"
        else:
            pts = sc.generate(scheme, q)
            maximal = sc.is_maximal(pts, q, space).maximal
            hits = sum(any(c.left <= p <= c.right for p in pts) for c in cyl)
            ok = maximal and hits == len(cyl)
            detail = f"{hits}/{len(cyl)} cylinders hit"
        checks.append(ExactCheck(f"q={q}: maximal, meets every cylinder, 2^-{M} <= q^(-{t}/({delta}))",
                                 N, ok and near, detail))
    status = "pass" if all(c.passed for c in checks) else "fail"
    return HoleForcingReport(delta, N, M, (q_lo, q_hi), status, checks)
