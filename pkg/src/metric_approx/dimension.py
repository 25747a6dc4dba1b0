"""Dimension estimators.

Two numerical routes: box counting (log-log regression of maximal
r-separated counts) and the convergence abscissa of cover-diameter series
``sum_q |P(q)| (2 q**-t)**tau``, which bounds the Hausdorff dimension of the
limsup set from above. Closed forms for the catalogued spaces are exact or
symbolic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from . import schemes as sc
from . import spaces as sp
from .errors import InconsistentBracket, InvalidArgument
from .exact import IntervalUnion, as_fraction

EPSILON = 0.05
DEFAULT_CHECKPOINTS = 8


@dataclass
class DimensionEstimate:
    method: str
    value: float
    confidence_band: Tuple[float, float]
    diagnostics: Dict = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.confidence_band
        if not lo <= self.value <= hi:
            raise ValueError("estimate outside its band")


# -- box counting ------------------------------------------------------------

def separated_count(source, r: Fraction) -> int:
    """Size of the greedy (leftmost-first) maximal r-separated subset.

    On a line the greedy scan attains the maximum cardinality. ``source`` is
    a sorted sequence of points or an :class:`IntervalUnion`.
    """
    r = as_fraction(r)
    if isinstance(source, IntervalUnion):
        ivs = source.intervals
        if not ivs:
            return 0
        count = 0
        x = ivs[0][0]
        i = 0
        while True:
            count += 1
            target = x + r
            while i < len(ivs) and ivs[i][1] < target:
                i += 1
            if i == len(ivs):
                return count
            x = max(target, ivs[i][0])
    count = 0
    last = None
    for p in source:
        if last is None or p - last >= r:
            count += 1
            last = p
    return count


def box_dimension(source, scales: Sequence) -> DimensionEstimate:
    """Slope of ``log N_r`` against ``-log r`` with a two-standard-error band."""
    scales = sorted({as_fraction(s) for s in scales}, reverse=True)
    if len(scales) < 4:
        raise InvalidArgument("box counting needs at least four scales")
    if scales[0] / scales[-1] < 100:
        raise InvalidArgument("scales must span at least two decades")
    counts = [separated_count(source, r) for r in scales]
    diag = {"scales": [str(r) for r in scales], "counts": counts}
    if max(counts) <= 1:
        diag["degenerate"] = True
        return DimensionEstimate("box_count", 0.0, (0.0, 0.0), diag)
    x = np.array([-math.log(r) for r in scales])
    y = np.log(np.array(counts, dtype=float))
    fit = stats.linregress(x, y)
    resid = y - (fit.intercept + fit.slope * x)
    diag.update(residual_rms=float(np.sqrt(np.mean(resid ** 2))), stderr=float(fit.stderr))
    band = (fit.slope - 2 * fit.stderr, fit.slope + 2 * fit.stderr)
    return DimensionEstimate("box_count", float(fit.slope), band, diag)


# -- convergence abscissa ------------------------------------------------------

def block_starts(scheme: sc.Scheme, q_max: int) -> Optional[List[int]]:
    """First q of every block on which ``P(q)`` is built from one level, or None."""
    kind = scheme.kind
    if kind in (sc.ENDPOINT, sc.CENTRAL, sc.SHIFTED):
        lam = scheme.space.lam
        out, n = [], 0
        while True:
            start = sc._ceil_pow(lam, n)
            if start > q_max:
                return out
            out.append(start)
            n += 1
    if kind == sc.DYADIC:
        return [1 << k for k in range(q_max.bit_length()) if (1 << k) <= q_max]
    if kind == sc.GAP_CENTERS:
        lam = scheme.space.lam
        out, k = [1], 2
        while True:
            v = 2 / lam ** (k - 2)
            start = -((-v.numerator) // v.denominator)
            if start > q_max:
                return out
            out.append(start)
            k += 1
    return None


def default_checkpoints(scheme: sc.Scheme, q_max: int, count: int = DEFAULT_CHECKPOINTS) -> List[int]:
    """Checkpoints ending at ``q_max``: block ends where blocks exist, else log-spaced."""
    starts = block_starts(scheme, q_max)
    if starts is not None and len(starts) > 2:
        ends = [s - 1 for s in starts[1:]]
        if q_max not in ends:
            ends.append(q_max)
        ends = [e for e in ends if e >= 1]
        return ends[-(count + 1):] if len(ends) > count + 1 else ends
    lo = max(2.0, q_max ** 0.25)
    qs = np.unique(np.round(np.geomspace(lo, q_max, count + 1)).astype(np.int64))
    return [int(q) for q in qs]


@dataclass
class SeriesData:
    """Distinct runs ``q`` with ``|P(q)|``, grouped by checkpoint."""

    q: np.ndarray
    count: np.ndarray
    checkpoints: List[int]
    bins: np.ndarray

    def log_terms(self, tau: float, t: float) -> np.ndarray:
        return np.log(self.count) + tau * (math.log(2) - t * np.log(self.q))


def series_data(scheme: sc.Scheme, q_max: int, checkpoints: Sequence[int]) -> SeriesData:
    runs = sc.distinct_runs(scheme, 1, q_max)
    q = np.array(runs, dtype=float)
    count = np.array([sc.size(scheme, r) for r in runs], dtype=float)
    cps = sorted(int(c) for c in checkpoints)
    bins = np.searchsorted(np.array(cps), q, side="left")
    return SeriesData(q, count, cps, bins)


def partial_sums(data: SeriesData, tau: float, t: float) -> np.ndarray:
    """``S_tau(Q)`` at each checkpoint Q."""
    lt = data.log_terms(tau, t)
    shift = lt.max()
    w = np.exp(lt - shift)
    sums = np.bincount(data.bins, weights=w, minlength=len(data.checkpoints) + 1)
    return np.cumsum(sums[: len(data.checkpoints)]) * math.exp(shift)


def classify(data: SeriesData, tau: float, t: float, eps: float = EPSILON) -> Tuple[bool, Dict]:
    """True when the series looks divergent at ``tau``.

    Fast path: a fitted slope of ``log S`` against ``log Q`` below ``eps``
    means convergence. Otherwise the increments between consecutive
    checkpoints decide: on geometric checkpoints their log-log slope is the
    growth exponent of the summand, positive iff the series diverges.
    """
    S = partial_sums(data, tau, t)
    logQ = np.log(np.array(data.checkpoints, dtype=float))
    slope_S = float(np.polyfit(logQ, np.log(S), 1)[0])
    info = {"tau": tau, "slope_log_S": slope_S}
    if slope_S < eps:
        info["increment_slope"] = None
        return False, info
    inc = np.diff(S)
    ok = inc > 0
    if ok.sum() < 2:
        info["increment_slope"] = None
        return slope_S >= eps, info
    slope_inc = float(np.polyfit(logQ[1:][ok], np.log(inc[ok]), 1)[0])
    info["increment_slope"] = slope_inc
    return slope_inc > 0, info


def critical_exponent(scheme: sc.Scheme, t, q_max: int,
                      tau_bracket: Tuple[float, float] = (0.0, 3.0),
                      checkpoints: Optional[Sequence[int]] = None,
                      tolerance: float = 1e-3, eps: float = EPSILON) -> DimensionEstimate:
    """Bisect on ``tau`` for the convergence abscissa of the reduced cover series.

    Only the first q of every distinct ``P(q)`` contributes: a repeated set at
    a larger q yields balls inside the earlier ones.
    """
    t = float(as_fraction(t))
    if checkpoints is None:
        checkpoints = default_checkpoints(scheme, q_max)
    if len(checkpoints) < 3:
        raise InvalidArgument("need at least three checkpoints")
    data = series_data(scheme, q_max, checkpoints)
    lo, hi = map(float, tau_bracket)
    div_lo, info_lo = classify(data, lo, t, eps)
    div_hi, info_hi = classify(data, hi, t, eps)
    if not div_lo or div_hi:
        raise InconsistentBracket(
            f"bracket [{lo}, {hi}] does not separate divergence from convergence",
            {"lo": info_lo, "hi": info_hi},
        )
    history = []
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        div, info = classify(data, mid, t, eps)
        history.append(info)
        if div:
            lo = mid
        else:
            hi = mid
    diag = {
        "checkpoints": list(data.checkpoints),
        "runs": int(data.q.size),
        "bracket_width": hi - lo,
        "iterations": len(history),
        "history": history,
    }
    return DimensionEstimate("critical_exponent", (lo + hi) / 2, (lo, hi), diag)


# -- closed forms --------------------------------------------------------------

@dataclass(frozen=True)
class DimensionValue:
    value: float
    symbolic: str
    extrapolated: bool = False


@dataclass(frozen=True)
class ClosedForm:
    hausdorff: DimensionValue
    packing: DimensionValue
    box: DimensionValue
    lower: DimensionValue
    notes: Tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {name: {"value": v.value, "symbolic": v.symbolic, "extrapolated": v.extrapolated}
                for name, v in (("hausdorff", self.hausdorff), ("packing", self.packing),
                                ("box", self.box), ("lower", self.lower))}


def prefix_ratios(space: sp.SpaceDescriptor) -> List[Fraction]:
    """``N(k)/k`` for k = 1..M over the generated prefix."""
    M = sp.total_levels(space)
    return [Fraction(sp.branch_count(space, k), k) for k in range(1, M + 1)]


def closed_form_dimensions(space: sp.SpaceDescriptor) -> ClosedForm:
    if space.kind == sp.UNIT:
        one = DimensionValue(1.0, "1")
        return ClosedForm(one, one, one, one)
    if space.kind == sp.CANTOR:
        s = DimensionValue(space.dimension_s, space.dimension_symbolic)
        return ClosedForm(s, s, s, s)
    if space.kind == sp.PLUS_CENTERS:
        s = DimensionValue(space.dimension_s, space.dimension_symbolic)
        return ClosedForm(s, s, s, DimensionValue(0.0, "0"),
                          ("isolated gap centres force the lower dimension to 0",))
    # Alternating IFS: at block ends N(k)/k = 1/t; after the branching phase of a
    # block it approaches 1 when k_N dominates the previous blocks.
    ratios = prefix_ratios(space)
    ends = sp.block_boundaries(space)[1:]
    at_ends = [ratios[e - 1] for e in ends]
    peak = max(ratios)
    t = space.t
    notes = (
        f"prefix liminf of N(k)/k at block ends = {min(at_ends)}",
        f"prefix limsup of N(k)/k = {peak} ({float(peak):.4f})",
        "limits assume block lengths growing fast enough that k_N dominates the earlier blocks",
    )
    h = DimensionValue(1.0 / t, f"1/{t}", True)
    p = DimensionValue(1.0, "1", True)
    return ClosedForm(h, p, p, DimensionValue(0.0, "0", True), notes)
