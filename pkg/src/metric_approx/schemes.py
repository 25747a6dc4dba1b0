"""Abstract-rational hierarchies ``q -> P(q)`` and their exact validation.

Every generator returns an ascending list of Fractions that is
``(1/q)``-separated and maximal in its space. Maximality is certified by
showing that the open ``1/q``-neighbourhoods of the points cover the space;
see :func:`is_maximal`.
"""
from __future__ import annotations

import json
import math
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import gmpy2
import numpy as np

from . import spaces as sp
from .errors import InvalidArgument, Undecided, UnsupportedSpace
from .exact import IntervalUnion, as_fraction, fraction_str
from .spaces import SpaceDescriptor

CLASSIC = "classic"
DYADIC = "dyadic-block"
POWER = "power-block"
ENDPOINT = "cantor-endpoint"
SHIFTED = "cantor-shifted"
CENTRAL = "central-cantor-endpoint"
GAP_CENTERS = "gap-centers"
GREEDY = "greedy"
KINDS = (CLASSIC, DYADIC, POWER, ENDPOINT, SHIFTED, CENTRAL, GAP_CENTERS, GREEDY)

_SPACE_KINDS = {
    CLASSIC: (sp.UNIT,),
    DYADIC: (sp.UNIT,),
    POWER: (sp.UNIT,),
    ENDPOINT: (sp.CANTOR,),
    SHIFTED: (sp.CANTOR,),
    CENTRAL: (sp.CANTOR,),
    GAP_CENTERS: (sp.PLUS_CENTERS,),
    GREEDY: sp.KINDS,
}


@dataclass(frozen=True)
class Scheme:
    """A rule ``q -> P(q)`` on a catalogued space.

    ``d`` selects the intermediate construction for ``cantor-shifted``
    (``k(n) = floor(n d)``); ``d=None`` gives ``k(n) = floor(1 + n(1 + 1/s))``.
    ``order`` and ``seeds`` only affect the greedy scheme.
    """

    kind: str
    space: SpaceDescriptor
    alpha: Optional[Fraction] = None
    d: Optional[Fraction] = None
    net_depth: Optional[int] = None
    order: str = "ascending"
    seeds: Tuple[Fraction, ...] = ()
    claimed_dirichlet: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown scheme kind {self.kind!r}")
        if self.space.kind not in _SPACE_KINDS[self.kind]:
            raise UnsupportedSpace(f"{self.kind} is not defined on {self.space.label}")
        if self.kind == POWER:
            alpha = as_fraction(self.alpha)
            if alpha <= 1:
                raise InvalidArgument("power-block needs alpha > 1")
            object.__setattr__(self, "alpha", alpha)
        if self.kind == SHIFTED:
            if self.space.lam != Fraction(1, 3):
                raise UnsupportedSpace("cantor-shifted is built on the middle-third set")
            if self.d is not None:
                d = as_fraction(self.d)
                if not shifted_d_admissible(d):
                    raise InvalidArgument(f"d={d} outside (1, 1 + 1/s]")
                object.__setattr__(self, "d", d)
        if self.kind == GREEDY:
            if self.net_depth is None:
                raise InvalidArgument("greedy scheme needs net_depth")
            if self.order not in ("ascending", "descending"):
                raise InvalidArgument("order must be ascending or descending")
            object.__setattr__(self, "seeds", tuple(as_fraction(s) for s in self.seeds))

    @property
    def label(self) -> str:
        extra = ""
        if self.kind == POWER:
            extra = f"(alpha={fraction_str(self.alpha)})"
        elif self.kind == SHIFTED:
            extra = "(ii)" if self.d is None else f"(iii, d={fraction_str(self.d)})"
        elif self.kind == GREEDY:
            extra = f"(depth={self.net_depth}, {self.order})"
        return f"{self.kind}{extra} on {self.space.label}"

    def to_json(self) -> dict:
        out = {"kind": self.kind, "space": self.space.to_json()}
        if self.alpha is not None:
            out["alpha"] = fraction_str(self.alpha)
        if self.d is not None:
            out["d"] = fraction_str(self.d)
        if self.net_depth is not None:
            out["net_depth"] = self.net_depth
        if self.kind == GREEDY and self.order != "ascending":
            out["order"] = self.order
        if self.seeds:
            out["seeds"] = [fraction_str(s) for s in self.seeds]
        return out

    @classmethod
    def from_json(cls, obj) -> "Scheme":
        if isinstance(obj, str):
            obj = json.loads(obj)
        kind = obj["kind"]
        space = SpaceDescriptor.from_json(obj["space"]) if "space" in obj else default_space(kind)
        return cls(
            kind,
            space,
            alpha=as_fraction(obj["alpha"]) if "alpha" in obj else None,
            d=as_fraction(obj["d"]) if obj.get("d") is not None else None,
            net_depth=obj.get("net_depth"),
            order=obj.get("order", "ascending"),
            seeds=tuple(as_fraction(s) for s in obj.get("seeds", ())),
        )


def default_space(kind: str) -> SpaceDescriptor:
    if kind in (CLASSIC, DYADIC, POWER, GREEDY):
        return sp.unit_interval()
    if kind == GAP_CENTERS:
        return sp.cantor_plus_centers()
    if kind == CENTRAL:
        return sp.central_cantor(Fraction(1, 4))
    return sp.middle_third()


def classic() -> Scheme:
    return Scheme(CLASSIC, sp.unit_interval())


def dyadic_block() -> Scheme:
    return Scheme(DYADIC, sp.unit_interval())


def power_block(alpha=2) -> Scheme:
    return Scheme(POWER, sp.unit_interval(), alpha=as_fraction(alpha))


def cantor_endpoint(space: Optional[SpaceDescriptor] = None) -> Scheme:
    return Scheme(ENDPOINT, space or sp.middle_third())


def cantor_shifted(d=None) -> Scheme:
    return Scheme(SHIFTED, sp.middle_third(), d=None if d is None else as_fraction(d))


def central_cantor_endpoint(lam=Fraction(1, 4)) -> Scheme:
    return Scheme(CENTRAL, sp.central_cantor(lam))


def gap_centers(lam=Fraction(1, 3)) -> Scheme:
    return Scheme(GAP_CENTERS, sp.cantor_plus_centers(lam))


def greedy(space: SpaceDescriptor, net_depth: int, order: str = "ascending",
           seeds: Sequence = ()) -> Scheme:
    return Scheme(GREEDY, space, net_depth=net_depth, order=order,
                  seeds=tuple(as_fraction(s) for s in seeds))


# -- block bookkeeping -------------------------------------------------------

def cantor_block(lam: Fraction, q: int) -> int:
    """Largest n with ``lam**-n <= q``."""
    a, b = lam.numerator, lam.denominator
    n = 0
    while b ** (n + 1) <= q * a ** (n + 1):
        n += 1
    return n


def floor_log2_pow3(n: int) -> int:
    """``floor(n log2 3)``: largest j with ``2**j <= 3**n``."""
    return (3 ** n).bit_length() - 1


def shifted_d_admissible(d: Fraction) -> bool:
    """``1 < d <= 1 + log2 3`` decided exactly."""
    a, b = d.numerator, d.denominator
    return d > 1 and 2 ** (a - b) <= 3 ** b


def shifted_k(n: int, d: Optional[Fraction]) -> int:
    if d is None:
        return 1 + n + floor_log2_pow3(n)
    return (n * d.numerator) // d.denominator


def power_block_index(alpha: Fraction, q: int) -> Tuple[int, int]:
    """``(k, floor(k**alpha))`` for the k with ``k**alpha <= q < (k+1)**alpha``."""
    u, v = alpha.numerator, alpha.denominator
    k = max(1, int(q ** (v / u)))
    while k > 1 and k ** u > q ** v:
        k -= 1
    while (k + 1) ** u <= q ** v:
        k += 1
    root, _ = gmpy2.iroot(gmpy2.mpz(k ** u), v)
    return k, int(root)


def gap_center_level(lam: Fraction, q: int) -> int:
    """Smallest k >= 1 with ``lam**(k-1) / 2 < 1/q``."""
    k = 1
    while q * lam ** (k - 1) >= 2:
        k += 1
    return k


@lru_cache(maxsize=256)
def left_int(lam: Fraction, n: int) -> Tuple[int, ...]:
    """Numerators of the level-n left endpoints over ``b**n`` (``lam = a/b``)."""
    a, b = lam.numerator, lam.denominator
    if n == 0:
        return (0,)
    prev = left_int(lam, n - 1)
    shift = (b - a) * b ** (n - 1)
    return tuple(a * l for l in prev) + tuple(a * l + shift for l in prev)


@lru_cache(maxsize=256)
def endpoints_int(lam: Fraction, n: int) -> Tuple[int, ...]:
    """Numerators of all level-n endpoints over ``b**n``."""
    size = lam.numerator ** n
    out = []
    for l in left_int(lam, n):
        if not out or out[-1] != l:
            out.append(l)
        out.append(l + size)
    return tuple(out)


@lru_cache(maxsize=4096)
def shifted_parts(d: Optional[Fraction], q: int) -> Tuple[int, int, int, Fraction]:
    """``(n, k, m, ell_m)`` for the shifted scheme at level q.

    ``ell_m`` is the m-th left endpoint of the level-k cylinders inside the
    first level-n cylinder.
    """
    lam = Fraction(1, 3)
    n = cantor_block(lam, q)
    k = shifted_k(n, d)
    m = (q - 3 ** n) % 2 ** (k - n) + 1
    return n, k, m, Fraction(left_int(lam, k - n)[m - 1], 3 ** k)


# -- generation --------------------------------------------------------------

def generate(scheme: Scheme, q: int) -> List[Fraction]:
    """``P(q)`` as an ascending list of exact rationals."""
    if not isinstance(q, int) or isinstance(q, bool) or q < 1:
        raise InvalidArgument(f"q must be a positive integer, got {q!r}")
    nums, den = generate_int(scheme, q)
    return [Fraction(x, den) for x in nums]


def size(scheme: Scheme, q: int) -> int:
    if scheme.kind == CLASSIC:
        return q + 1
    if scheme.kind == SHIFTED:
        return shifted_size(scheme.d, q)
    return len(generate_int(scheme, q)[0])


@lru_cache(maxsize=8192)
def generate_int(scheme: Scheme, q: int) -> Tuple[Tuple[int, ...], int]:
    """``P(q)`` as ascending numerators over one common denominator."""
    kind = scheme.kind
    space = scheme.space
    lam = space.lam
    if kind == CLASSIC:
        return tuple(range(q + 1)), q
    if kind == DYADIC:
        den = 1 << (q.bit_length() - 1)
        return tuple(range(den + 1)), den
    if kind == POWER:
        _, den = power_block_index(scheme.alpha, q)
        return _complete_int(list(range(den + 1)), den, q, space)
    if kind == ENDPOINT:
        n = cantor_block(lam, q)
        return endpoints_int(lam, n), lam.denominator ** n
    if kind == SHIFTED:
        n, k, m, _ = shifted_parts(scheme.d, q)
        scale = 3 ** (k - n)
        ell = left_int(lam, k - n)[m - 1]
        base = [l * scale + ell for l in left_int(lam, n)]
        pts = pad_greedy_int(base, [e * scale for e in endpoints_int(lam, n)], 3 ** k, q)
        return _complete_int(pts, 3 ** k, q, space)
    if kind == CENTRAL:
        n = cantor_block(lam, q)
        den = lam.denominator ** n
        pts = pad_greedy_int(left_int(lam, n), endpoints_int(lam, n), den, q)
        return _complete_int(pts, den, q, space)
    if kind == GAP_CENTERS:
        k = gap_center_level(lam, q)
        a, b = lam.numerator, lam.denominator
        den = 2 * b ** (k - 1)

        def centers(j):
            scale = b ** (k - j)
            return [(2 * l + a ** (j - 1)) * scale for l in left_int(lam, j - 1)]

        extra = sorted(c for j in range(1, k) for c in centers(j))
        pts = pad_greedy_int(centers(k), extra, den, q)
        return _complete_int(pts, den, q, space)
    if kind == GREEDY:
        pts = greedy_scheme(space, q, scheme.net_depth, scheme.order, scheme.seeds)
        return to_common(pts)
    raise InvalidArgument(kind)


def to_common(points: Sequence[Fraction]) -> Tuple[Tuple[int, ...], int]:
    den = math.lcm(*(Fraction(p).denominator for p in points)) if points else 1
    return tuple(int(p * den) for p in points), den


def pad_greedy_int(base: Iterable[int], candidates: Iterable[int], den: int, q: int) -> List[int]:
    """Integer form of :func:`pad_greedy` for numerators over ``den``."""
    pts = sorted(base)
    for c in candidates:
        i = bisect_left(pts, c)
        if i < len(pts) and (pts[i] - c) * q < den:
            continue
        if i > 0 and (c - pts[i - 1]) * q < den:
            continue
        pts.insert(i, c)
    return pts


@lru_cache(maxsize=64)
def _net_int(space: SpaceDescriptor, depth: int) -> Tuple[Tuple[int, ...], int]:
    return to_common(sp.net(space, depth))


def _scan(candidates: Sequence[int], den: int, q: int, descending: bool = False) -> List[int]:
    # on a line, a sorted scan only has to compare with the last accepted point
    if descending:
        out = []
        for c in reversed(candidates):
            if not out or (out[-1] - c) * q >= den:
                out.append(c)
        return out[::-1]
    out = []
    for c in candidates:
        if not out or (c - out[-1]) * q >= den:
            out.append(c)
    return out


def pad_greedy(base: Iterable[Fraction], candidates: Iterable[Fraction], q: int) -> List[Fraction]:
    """Add candidates in the given order when ``>= 1/q`` away from all members."""
    sep = Fraction(1, q)
    pts = sorted(base)
    for c in candidates:
        i = bisect_left(pts, c)
        if i < len(pts) and pts[i] - c < sep:
            continue
        if i > 0 and c - pts[i - 1] < sep:
            continue
        pts.insert(i, c)
    return pts


def greedy_scheme(space: SpaceDescriptor, q: int, net_depth: int,
                  order: str = "ascending", seeds: Sequence[Fraction] = ()) -> List[Fraction]:
    """Greedy maximal ``(1/q)``-separated set from a finite net of the space.

    Seeds are accepted first (when separated), then the net is scanned in
    ``order``. Whatever the net misses is completed from exact witnesses, so
    the result is certified maximal in the space.
    """
    if sp.net_resolution(space, net_depth) * 4 * q >= 1:
        need = net_depth
        while sp.net_resolution(space, need) * 4 * q >= 1:
            need += 1
        raise InvalidArgument(f"net_depth {net_depth} too coarse for q={q}; need depth >= {need}")
    candidates, den = _net_int(space, net_depth)
    if seeds:
        seed_nums, seed_den = to_common(seeds)
        lcm = math.lcm(den, seed_den)
        candidates = [c * (lcm // den) for c in candidates]
        seed_nums = [x * (lcm // seed_den) for x in seed_nums]
        den = lcm
        if order == "descending":
            candidates = candidates[::-1]
        pts = pad_greedy_int(pad_greedy_int([], seed_nums, den, q), candidates, den, q)
    else:
        pts = _scan(candidates, den, q, descending=(order == "descending"))
    nums, den = _complete_int(pts, den, q, space)
    return [Fraction(x, den) for x in nums]


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class SeparationResult:
    ok: bool
    witness: Optional[Tuple[Fraction, Fraction]] = None

    def __bool__(self):
        return self.ok


def is_separated(points: Sequence[Fraction], q: int) -> SeparationResult:
    """Every consecutive gap of the sorted points is at least ``1/q``.

    A failure carries the closest pair as witness.
    """
    pts = sorted(Fraction(p) for p in points)
    nums, den = to_common(pts)
    if _first_close_pair(nums, den, q) is None:
        return SeparationResult(True)
    i = min(range(len(nums) - 1), key=lambda j: nums[j + 1] - nums[j])
    return SeparationResult(False, (pts[i], pts[i + 1]))


def _first_close_pair(nums: Sequence[int], den: int, q: int) -> Optional[int]:
    for i in range(len(nums) - 1):
        if (nums[i + 1] - nums[i]) * q < den:
            return i
    return None


MAXIMAL = "maximal"
EXTENDABLE = "extendable"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class MaximalityResult:
    status: str
    witness: Optional[Fraction] = None

    @property
    def maximal(self) -> bool:
        return self.status == MAXIMAL


def uncovered_intervals(points: Sequence[Fraction], q: int) -> List[Tuple[Fraction, Fraction]]:
    """Closed pieces of ``[0, 1]`` at distance ``>= 1/q`` from every point."""
    nums, den = to_common(points)
    unit = den * q
    return [(Fraction(c, unit), Fraction(d, unit)) for c, d in _uncovered_int(nums, den, q)]


def _uncovered_int(nums: Sequence[int], den: int, q: int) -> List[Tuple[int, int]]:
    # units of 1/(den*q): points scale by q, the radius 1/q becomes den
    one = den * q
    out = []
    lo = 0
    for x in nums:
        x *= q
        hi = x - den
        if hi >= lo:
            out.append((lo, min(hi, one)))
        if x + den > lo:
            lo = x + den
        if lo > one:
            return out
    out.append((lo, one))
    return out


def _witness_int(space: SpaceDescriptor, c: int, d: int, unit: int,
                 depth: int) -> Optional[Fraction]:
    """Some point of the space in ``[c/unit, d/unit]`` (a subset of [0, 1]), or None."""
    if space.kind == sp.UNIT:
        return Fraction(c, unit)
    if space.kind == sp.ALTERNATING or space.lam.numerator != 1:
        return _witness_in(space, Fraction(c, unit), Fraction(d, unit), depth)
    hit = sp.gap_of(space.lam.denominator, c, unit, depth)
    if hit is None:
        return Fraction(c, unit)
    lo, hi, scale, _ = hit
    best = None
    if hi * unit <= d * scale:
        best = Fraction(hi, scale)
    if space.kind == sp.PLUS_CENTERS and c * 2 * scale <= (lo + hi) * unit <= d * 2 * scale:
        best = Fraction(lo + hi, 2 * scale)
    return best


def _witness_in(space: SpaceDescriptor, c: Fraction, d: Fraction, depth: int) -> Optional[Fraction]:
    """Some point of the space in ``[c, d]``, or None."""
    if space.kind == sp.UNIT:
        return c
    if space.kind == sp.ALTERNATING:
        hit = sp.solid_set(space).clip(c, d)
        return hit.intervals[0][0] if hit else None
    best = None
    loc = sp.locate(space, c, depth)
    if loc.status == "in":
        return c
    if loc.status == "gap":
        if loc.b <= d:
            best = loc.b
        if space.kind == sp.PLUS_CENTERS:
            center = (loc.a + loc.b) / 2
            if c <= center <= d:
                best = center
    elif loc.status == "left" and d >= 0:
        best = Fraction(0)
    return best


def _maximal_int(nums: Sequence[int], den: int, q: int, space: SpaceDescriptor,
                 depth: int) -> MaximalityResult:
    unit = den * q
    try:
        for c, d in _uncovered_int(nums, den, q):
            w = _witness_int(space, c, d, unit, depth)
            if w is not None:
                return MaximalityResult(EXTENDABLE, w)
    except Undecided:
        return MaximalityResult(UNKNOWN)
    return MaximalityResult(MAXIMAL)


def is_maximal(points: Sequence[Fraction], q: int, space: SpaceDescriptor,
               certification_depth: int = sp.DEFAULT_DEPTH) -> MaximalityResult:
    """Certify that no point of the space can join ``points`` at separation 1/q.

    The complement of the open ``1/q``-neighbourhoods is a finite union of
    closed intervals; each is tested exactly against the space. A returned
    witness lies in the space at distance ``>= 1/q`` from every point.
    """
    nums, den = to_common(sorted(points))
    return _maximal_int(nums, den, q, space, certification_depth)


def complete_maximal(points: Sequence[Fraction], q: int, space: SpaceDescriptor,
                     max_steps: int = 100_000) -> List[Fraction]:
    """Insert exact witnesses until the separated set is maximal."""
    nums, den = _complete_int(*to_common(sorted(points)), q, space, max_steps)
    return [Fraction(x, den) for x in nums]


def _complete_int(nums: Sequence[int], den: int, q: int, space: SpaceDescriptor,
                  max_steps: int = 100_000) -> Tuple[Tuple[int, ...], int]:
    nums = list(nums)
    for _ in range(max_steps):
        res = _maximal_int(nums, den, q, space, sp.DEFAULT_DEPTH)
        if res.status == MAXIMAL:
            return tuple(nums), den
        if res.status == UNKNOWN:
            raise Undecided(f"maximality undecided at q={q}")
        w = res.witness
        if den % w.denominator:
            scale = w.denominator // math.gcd(den, w.denominator)
            nums = [x * scale for x in nums]
            den *= scale
        insort(nums, w.numerator * (den // w.denominator))
    raise Undecided(f"maximal completion did not finish at q={q}")


@dataclass(frozen=True)
class ValidationRecord:
    q: int
    size: int
    separated: bool
    maximal: str
    witness: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.separated and self.maximal == MAXIMAL


def validate(scheme: Scheme, q_values: Iterable[int],
             certification_depth: int = sp.DEFAULT_DEPTH) -> List[ValidationRecord]:
    """Exact separation and maximality check of ``P(q)`` for each q."""
    out = []
    for q in q_values:
        nums, den = generate_int(scheme, q)
        close = _first_close_pair(nums, den, q)
        mx = _maximal_int(nums, den, q, scheme.space, certification_depth)
        w = None
        if close is not None:
            w = f"{fraction_str(Fraction(nums[close], den))},{fraction_str(Fraction(nums[close + 1], den))}"
        elif mx.witness is not None:
            w = fraction_str(mx.witness)
        out.append(ValidationRecord(q, len(nums), close is None, mx.status, w))
    return out


# -- structure used by covers ------------------------------------------------

def distinct_runs(scheme: Scheme, q_lo: int, q_hi: int) -> List[int]:
    """Smallest q of every distinct ``P(q)`` with ``q_lo <= q <= q_hi``.

    A ball ``B(p, q**-t)`` is contained in ``B(p, q'**-t)`` when ``q' < q``,
    so a union over the whole q-range only needs each distinct set once, at
    the first q where it occurs.
    """
    kind = scheme.kind
    if q_lo > q_hi:
        return []
    if kind == CLASSIC:
        return list(range(q_lo, q_hi + 1))
    if kind == DYADIC:
        out = [q_lo]
        k = q_lo.bit_length()
        while (1 << k) <= q_hi:
            out.append(1 << k)
            k += 1
        return out
    if kind in (ENDPOINT, CENTRAL):
        lam = scheme.space.lam
        out = [q_lo]
        n = cantor_block(lam, q_lo) + 1
        while True:
            start = _ceil_pow(lam, n)
            if start > q_hi:
                return out
            out.append(start)
            n += 1
    if kind == POWER:
        u, v = scheme.alpha.numerator, scheme.alpha.denominator
        out = []
        q = q_lo
        while q <= q_hi:
            k, K = power_block_index(scheme.alpha, q)
            end = min(q_hi, _ceil_root((k + 1) ** u, v) - 1)
            out.append(q)
            # once q >= 2K the 1/K grid is no longer maximal and witness
            # completion can change the set inside the block
            prev = generate_int(scheme, q) if 2 * K <= end else None
            for r in range(max(q + 1, 2 * K), end + 1):
                key = generate_int(scheme, r)
                if key != prev:
                    out.append(r)
                    prev = key
            q = end + 1
        return out
    if kind == SHIFTED:
        return _shifted_runs(scheme.d, q_lo, q_hi)
    # content-based dedupe for everything else
    seen = set()
    out = []
    for q in range(q_lo, q_hi + 1):
        key = generate_int(scheme, q)
        if key not in seen:
            seen.add(key)
            out.append(q)
    return out


def _ceil_pow(lam: Fraction, n: int) -> int:
    """Smallest integer ``>= lam**-n``."""
    v = 1 / lam ** n
    return -((-v.numerator) // v.denominator)


def _ceil_root(x: int, v: int) -> int:
    r, exact = gmpy2.iroot(gmpy2.mpz(x), v)
    return int(r) if exact else int(r) + 1


# -- closed forms for the shifted scheme --------------------------------------

def shifted_flags(d: Optional[Fraction], q: int) -> Tuple[int, int, int, bool, bool]:
    """``(n, k, m, left, right)``: which endpoint families the padding keeps.

    Left endpoints survive the padding iff ``ell_m >= 1/q``; right endpoints
    iff ``lam**n - ell_m >= 1/q``. Every other endpoint is within ``1/q`` of
    a shifted point.
    """
    n, k, m, ell = shifted_parts(d, q)
    return n, k, m, ell * q >= 1, (Fraction(1, 3 ** n) - ell) * q >= 1


def shifted_closed_form(d: Optional[Fraction], q: int, window: int = 0) -> Tuple[np.ndarray, int]:
    """``P(q)`` of the shifted scheme as an int64 array over ``3**k``.

    ``window > 0`` keeps only the points in the first level-``window`` cylinder.
    """
    lam = Fraction(1, 3)
    n, k, m, left, right = shifted_flags(d, q)
    scale = 3 ** (k - n)
    ell = left_int(lam, k - n)[m - 1]
    lefts = left_int(lam, n)
    if window:
        lefts = lefts[: 2 ** max(n - window, 0)]
    L = np.asarray(lefts, dtype=np.int64) * scale
    parts = [L + ell]
    if left:
        parts.append(L)
    if right:
        parts.append(L + scale)
    return np.sort(np.concatenate(parts)), 3 ** k


def shifted_size(d: Optional[Fraction], q: int) -> int:
    n, _, _, left, right = shifted_flags(d, q)
    return 2 ** n * (1 + left + right)


def _shifted_runs(d: Optional[Fraction], q_lo: int, q_hi: int) -> List[int]:
    lam = Fraction(1, 3)
    out = []
    n = cantor_block(lam, q_lo)
    while 3 ** n <= q_hi:
        k = shifted_k(n, d)
        period = 2 ** (k - n)
        ells = left_int(lam, k - n)
        den = 3 ** k
        width = 3 ** (k - n)
        seen = set()
        for q in range(max(q_lo, 3 ** n), min(q_hi, 3 ** (n + 1) - 1) + 1):
            m = (q - 3 ** n) % period + 1
            ell = ells[m - 1]
            key = (m, ell * q >= den, (width - ell) * q >= den)
            if key not in seen:
                seen.add(key)
                out.append(q)
        n += 1
    return out


def point_array(scheme: Scheme, q: int, window: int = 0) -> Tuple[np.ndarray, int]:
    """``P(q)`` as an int64 numerator array and its denominator.

    With ``window > 0`` (Cantor kinds only) just the points of the first
    level-``window`` cylinder ``[0, lam**window]`` are returned.
    """
    if scheme.kind == CLASSIC:
        return np.arange(q + 1, dtype=np.int64), q
    if scheme.kind == SHIFTED:
        return shifted_closed_form(scheme.d, q, window)
    nums, den = generate_int(scheme, q)
    arr = np.asarray(nums, dtype=np.int64)
    if window:
        lam = scheme.space.lam
        edge = Fraction(den) * lam ** window
        arr = arr[arr <= edge.numerator // edge.denominator]
    return arr, den


def self_similar_level(scheme: Scheme, q_lo: int, t) -> int:
    """A level n0 at which the cover for ``q >= q_lo`` repeats in every cylinder.

    For the endpoint, central and shifted schemes ``P(q)`` with
    ``q >= lam**-n0`` is the same pattern in each level-n0 cylinder. Balls
    stay inside their cylinder's neighbourhood when the radius is below the
    smallest level-n0 gap, so the cover of one cylinder determines the rest.
    Returns 0 when no such level applies.
    """
    if scheme.kind not in (ENDPOINT, CENTRAL, SHIFTED):
        return 0
    lam = scheme.space.lam
    n0 = cantor_block(lam, q_lo)
    if n0 == 0:
        return 0
    gap = lam ** (n0 - 1) * (1 - 2 * lam)
    t = Fraction(t)
    u, v = t.numerator, t.denominator
    # q_lo**-t < gap  <=>  gap.den**v < q_lo**u * gap.num**v
    if gap.denominator ** v < q_lo ** u * gap.numerator ** v:
        return n0
    return 0
