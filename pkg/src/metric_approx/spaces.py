"""Catalogued compact subsets of [0, 1].

Four kinds are supported:

``unit-interval``
    ``[0, 1]``; level-n cylinders are the dyadic intervals.
``central-cantor``
    attractor of ``x -> lam*x`` and ``x -> lam*x + 1 - lam``; ``lam = 1/3`` is
    the middle-third set.
``cantor-plus-centers``
    a central Cantor set together with the midpoint of every complementary
    interval.
``alternating-ifs``
    runs of the binary IFS ``{x/2, (x+1)/2}`` (``k_n`` levels) followed by
    runs of ``{x/2}`` (``(t-1) k_n`` levels). The listed blocks are a finite
    prefix; below the last block the set is completed by the solid cylinder
    hull, so the concrete set is a finite union of intervals of length
    ``2**-M_total``.

Points are exact Fractions. Membership in a Cantor set is decided by
descending the cylinder tree; a rational orbit that revisits a state proves
membership, a gap proves non-membership.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .errors import InvalidArgument, Undecided, UnsupportedSpace
from .exact import IntervalUnion, as_fraction, fraction_str

UNIT = "unit-interval"
CANTOR = "central-cantor"
PLUS_CENTERS = "cantor-plus-centers"
ALTERNATING = "alternating-ifs"
KINDS = (UNIT, CANTOR, PLUS_CENTERS, ALTERNATING)

DEFAULT_DEPTH = 4096


@dataclass(frozen=True)
class SpaceDescriptor:
    kind: str
    lam: Optional[Fraction] = None
    blocks: Tuple[int, ...] = ()
    t: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown space kind {self.kind!r}")
        if self.kind in (CANTOR, PLUS_CENTERS):
            lam = as_fraction(self.lam)
            if not (0 < lam <= Fraction(1, 2)):
                raise InvalidArgument("lambda must lie in (0, 1/2]")
            object.__setattr__(self, "lam", lam)
        if self.kind == ALTERNATING:
            blocks = tuple(int(k) for k in self.blocks)
            if not blocks or any(k <= 0 for k in blocks):
                raise InvalidArgument("blocks must be positive integers")
            if any(b <= a for a, b in zip(blocks, blocks[1:])):
                raise InvalidArgument("blocks must be strictly increasing")
            if not isinstance(self.t, int) or self.t < 1:
                raise InvalidArgument("alternating-ifs needs a positive integer t")
            object.__setattr__(self, "blocks", blocks)

    @property
    def is_cantor(self) -> bool:
        return self.kind in (CANTOR, PLUS_CENTERS)

    @property
    def dimension_s(self) -> float:
        if self.kind == UNIT:
            return 1.0
        if self.is_cantor:
            return math.log(2) / math.log(1 / self.lam)
        return float(Fraction(1, self.t))

    @property
    def dimension_symbolic(self) -> str:
        if self.kind == UNIT:
            return "1"
        if self.is_cantor:
            return f"log 2 / log({fraction_str(1 / self.lam)})"
        return f"1/{self.t}"

    @property
    def label(self) -> str:
        if self.kind == UNIT:
            return "unit-interval"
        if self.is_cantor:
            return f"{self.kind}(lambda={fraction_str(self.lam)})"
        return f"alternating-ifs(blocks={list(self.blocks)}, t={self.t})"

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.lam is not None:
            out["lambda"] = fraction_str(self.lam)
        if self.kind == ALTERNATING:
            out["blocks"] = list(self.blocks)
            out["t"] = self.t
        return out

    @classmethod
    def from_json(cls, obj) -> "SpaceDescriptor":
        if isinstance(obj, str):
            obj = json.loads(obj)
        kind = obj.get("kind")
        if kind == UNIT:
            return unit_interval()
        if kind in (CANTOR, PLUS_CENTERS):
            return cls(kind, lam=as_fraction(obj.get("lambda", "1/3")))
        if kind == ALTERNATING:
            return cls(kind, blocks=tuple(obj["blocks"]), t=int(obj["t"]))
        raise InvalidArgument(f"unknown space kind {kind!r}")


def unit_interval() -> SpaceDescriptor:
    return SpaceDescriptor(UNIT)


def central_cantor(lam=Fraction(1, 3)) -> SpaceDescriptor:
    return SpaceDescriptor(CANTOR, lam=as_fraction(lam))


def middle_third() -> SpaceDescriptor:
    return central_cantor(Fraction(1, 3))


def cantor_plus_centers(lam=Fraction(1, 3)) -> SpaceDescriptor:
    return SpaceDescriptor(PLUS_CENTERS, lam=as_fraction(lam))


def alternating_ifs(blocks: Sequence[int] = (2, 3), t: int = 2) -> SpaceDescriptor:
    return SpaceDescriptor(ALTERNATING, blocks=tuple(blocks), t=t)


def default_blocks(count: int) -> Tuple[int, ...]:
    """``k_n = n + 1``: a desk-scale stand-in for very rapidly growing blocks."""
    return tuple(n + 1 for n in range(1, count + 1))


def _require_cantor(space: SpaceDescriptor):
    if not space.is_cantor:
        raise UnsupportedSpace(f"{space.label} has no Cantor cylinder structure")


# -- Cantor cylinder geometry ------------------------------------------------

@lru_cache(maxsize=256)
def _left_endpoints(lam: Fraction, n: int) -> Tuple[Fraction, ...]:
    pts = [Fraction(0)]
    shift = 1 - lam
    for _ in range(n):
        pts = [lam * p for p in pts] + [lam * p + shift for p in pts]
    return tuple(pts)


def left_endpoints(space: SpaceDescriptor, n: int) -> List[Fraction]:
    """The ``2**n`` left endpoints of the level-n cylinders, ascending."""
    _require_cantor(space)
    if n < 0:
        raise InvalidArgument("level must be non-negative")
    return list(_left_endpoints(space.lam, n))


@lru_cache(maxsize=256)
def _endpoints(lam: Fraction, n: int) -> Tuple[Fraction, ...]:
    size = lam ** n
    out = []
    for l in _left_endpoints(lam, n):
        if not out or out[-1] != l:
            out.append(l)
        out.append(l + size)
    return tuple(out)


def endpoints(space: SpaceDescriptor, n: int) -> List[Fraction]:
    """All left and right endpoints of the level-n cylinders, ascending."""
    _require_cantor(space)
    if n < 0:
        raise InvalidArgument("level must be non-negative")
    return list(_endpoints(space.lam, n))


def centers_of_gaps(space: SpaceDescriptor, n: int) -> List[Fraction]:
    """Midpoints of the level-n complementary intervals.

    A level-n gap sits in the middle of a level-(n-1) cylinder and has length
    ``lam**(n-1) * (1 - 2 lam)``.
    """
    _require_cantor(space)
    if n < 1:
        raise InvalidArgument("gap levels start at 1")
    half = space.lam ** (n - 1) / 2
    return [l + half for l in _left_endpoints(space.lam, n - 1)]


def gap_length(space: SpaceDescriptor, n: int) -> Fraction:
    return space.lam ** (n - 1) * (1 - 2 * space.lam)


@dataclass(frozen=True)
class Location:
    """Result of a cylinder descent for a point ``x``.

    ``status`` is ``in`` (x belongs to the Cantor set), ``gap`` (x lies in the
    open complementary interval ``(a, b)`` of level ``level``), or
    ``left``/``right`` (x is outside ``[0, 1]``).
    """

    status: str
    a: Optional[Fraction] = None
    b: Optional[Fraction] = None
    level: Optional[int] = None


def locate(space: SpaceDescriptor, x, depth: int = DEFAULT_DEPTH) -> Location:
    """Locate ``x`` relative to the base Cantor set of ``space``."""
    _require_cantor(space)
    x = as_fraction(x)
    if x < 0:
        return Location("left")
    if x > 1:
        return Location("right")
    lam = space.lam
    if lam.numerator == 1:
        return _locate_reciprocal(lam.denominator, x, depth)
    shift = 1 - lam
    offset, scale, y = Fraction(0), Fraction(1), x
    seen = set()
    for level in range(depth):
        if y == 0 or y == 1 or y in seen:
            return Location("in")
        seen.add(y)
        if y <= lam:
            scale *= lam
            y = y / lam
        elif y >= shift:
            offset += scale * shift
            scale *= lam
            y = (y - shift) / lam
        else:
            return Location("gap", offset + scale * lam, offset + scale * shift, level + 1)
    raise Undecided(f"membership of {x} undecided after {depth} levels")


def _locate_reciprocal(m: int, x: Fraction, depth: int) -> Location:
    hit = gap_of(m, x.numerator, x.denominator, depth)
    if hit is None:
        return Location("in")
    lo, hi, scale, level = hit
    return Location("gap", Fraction(lo, scale), Fraction(hi, scale), level)


def gap_of(m: int, N: int, D: int, depth: int = DEFAULT_DEPTH) -> Optional[Tuple[int, int, int, int]]:
    """Integer-only descent of ``N/D`` in ``[0, 1]`` for the Cantor set with ratio ``1/m``.

    Returns None when the point is in the set, else ``(lo, hi, scale, level)``
    with the open gap ``(lo/scale, hi/scale)``. ``N/D`` need not be reduced.
    """
    off = 0
    cut = (m - 1) * D
    seen = set()
    for level in range(depth):
        if N == 0 or N == D or N in seen:
            return None
        seen.add(N)
        N *= m
        if N <= D:
            off *= m
        elif N >= cut:
            N -= cut
            off = off * m + m - 1
        else:
            return off * m + 1, off * m + m - 1, m ** (level + 1), level + 1
    raise Undecided(f"membership of {Fraction(N, D)} undecided after {depth} levels")


def succ_in_cantor(space: SpaceDescriptor, x, depth: int = DEFAULT_DEPTH) -> Optional[Fraction]:
    """Smallest point of the base Cantor set that is ``>= x`` (None if none)."""
    loc = locate(space, x, depth)
    if loc.status == "in":
        return as_fraction(x)
    if loc.status == "left":
        return Fraction(0)
    if loc.status == "right":
        return None
    return loc.b


def pred_in_cantor(space: SpaceDescriptor, x, depth: int = DEFAULT_DEPTH) -> Optional[Fraction]:
    loc = locate(space, x, depth)
    if loc.status == "in":
        return as_fraction(x)
    if loc.status == "right":
        return Fraction(1)
    if loc.status == "left":
        return None
    return loc.a


# -- alternating IFS ---------------------------------------------------------

def branching_levels(space: SpaceDescriptor) -> Tuple[bool, ...]:
    """Per level 1..M_total: True where the two-map IFS is used."""
    if space.kind != ALTERNATING:
        raise UnsupportedSpace(f"{space.label} is not an alternating IFS")
    out: List[bool] = []
    for k in space.blocks:
        out += [True] * k + [False] * ((space.t - 1) * k)
    return tuple(out)


def block_boundaries(space: SpaceDescriptor) -> List[int]:
    """Levels ``M = t * sum_{n<=N} k_n`` for N = 0..len(blocks)."""
    if space.kind != ALTERNATING:
        raise UnsupportedSpace(f"{space.label} is not an alternating IFS")
    out, acc = [0], 0
    for k in space.blocks:
        acc += space.t * k
        out.append(acc)
    return out


def total_levels(space: SpaceDescriptor) -> int:
    return block_boundaries(space)[-1]


def branch_count(space: SpaceDescriptor, n: int) -> int:
    """N(n): branching levels among the first n (levels past the prefix branch)."""
    levels = branching_levels(space)
    if n <= len(levels):
        return sum(levels[:n])
    return sum(levels) + (n - len(levels))


@lru_cache(maxsize=64)
def _alt_left_endpoints(space: SpaceDescriptor, n: int) -> Tuple[Fraction, ...]:
    levels = branching_levels(space)
    pts = [Fraction(0)]
    for i in range(1, n + 1):
        branching = levels[i - 1] if i <= len(levels) else True
        if branching:
            step = Fraction(1, 2 ** i)
            pts = pts + [p + step for p in pts]
            pts.sort()
    return tuple(pts)


def alt_left_endpoints(space: SpaceDescriptor, n: int) -> List[Fraction]:
    return list(_alt_left_endpoints(space, n))


@lru_cache(maxsize=64)
def solid_set(space: SpaceDescriptor) -> IntervalUnion:
    """The concrete compact set as an interval union."""
    if space.kind == UNIT:
        return IntervalUnion([(0, 1)])
    if space.kind != ALTERNATING:
        raise UnsupportedSpace(f"{space.label} is not a finite union of intervals")
    M = total_levels(space)
    size = Fraction(1, 2 ** M)
    return IntervalUnion((l, l + size) for l in _alt_left_endpoints(space, M))


@dataclass(frozen=True)
class AnnotatedCylinder:
    left: Fraction
    right: Fraction
    gap_left: Optional[Fraction]
    gap_right: Optional[Fraction]


def alternating_cylinders(space: SpaceDescriptor, M: int) -> List[AnnotatedCylinder]:
    """Level-M cylinders with the exact complementary gaps on each side.

    Gaps are measured between consecutive level-M cylinder intervals; the
    outermost sides carry ``None`` (no point of the set lies beyond them).
    """
    if M not in block_boundaries(space):
        raise InvalidArgument(f"level {M} is not a block boundary of {space.label}")
    size = Fraction(1, 2 ** M)
    lefts = alt_left_endpoints(space, M)
    out = []
    for i, l in enumerate(lefts):
        gl = None if i == 0 else l - (lefts[i - 1] + size)
        gr = None if i == len(lefts) - 1 else lefts[i + 1] - (l + size)
        out.append(AnnotatedCylinder(l, l + size, gl, gr))
    return out


# -- cylinder sets -----------------------------------------------------------

def cylinders(space: SpaceDescriptor, n: int) -> List[Tuple[int, Fraction, Fraction]]:
    """``(word, left, right)`` for every level-n cylinder, ascending.

    Words are integers whose binary digits (most significant first) are the
    branch choices. For the unit interval they index dyadic intervals; for an
    alternating IFS only branching levels contribute digits.
    """
    if n < 0:
        raise InvalidArgument("level must be non-negative")
    if space.kind == UNIT:
        size = Fraction(1, 2 ** n)
        return [(j, j * size, (j + 1) * size) for j in range(2 ** n)]
    if space.is_cantor:
        size = space.lam ** n
        return [(w, l, l + size) for w, l in enumerate(_left_endpoints(space.lam, n))]
    size = Fraction(1, 2 ** n)
    return [(w, l, l + size) for w, l in enumerate(_alt_left_endpoints(space, n))]


def cylinder_mass(space: SpaceDescriptor, n: int) -> Fraction:
    """Natural measure of one level-n cylinder."""
    if space.kind == ALTERNATING:
        return Fraction(1, 2 ** branch_count(space, n))
    return Fraction(1, 2 ** n)


@dataclass(frozen=True)
class CylinderSet:
    space: SpaceDescriptor
    level: int
    words: frozenset = field(default_factory=frozenset)

    def natural_measure(self) -> Fraction:
        return len(self.words) * cylinder_mass(self.space, self.level)

    def intervals(self) -> List[Tuple[Fraction, Fraction]]:
        return [(l, r) for w, l, r in cylinders(self.space, self.level) if w in self.words]

    def word_strings(self) -> List[str]:
        width = self.level if self.space.kind != ALTERNATING else branch_count(self.space, self.level)
        return [format(w, f"0{width}b") if width else "" for w in sorted(self.words)]


def intersect_with_space(space: SpaceDescriptor, u: IntervalUnion, level: int) -> CylinderSet:
    """Level-n words whose closed cylinder meets ``u``.

    This over-approximates the part of the space inside ``u`` at resolution
    of one cylinder.
    """
    words = frozenset(w for w, l, r in cylinders(space, level) if u.intersects(l, r))
    return CylinderSet(space, level, words)


def all_cylinders(space: SpaceDescriptor, level: int) -> CylinderSet:
    return CylinderSet(space, level, frozenset(w for w, _, _ in cylinders(space, level)))


# -- membership and distance -------------------------------------------------

def contains(space: SpaceDescriptor, x, depth: int = DEFAULT_DEPTH) -> Optional[bool]:
    """Exact membership; ``None`` when undecided within ``depth`` levels."""
    x = as_fraction(x)
    if space.kind == UNIT:
        return 0 <= x <= 1
    if space.kind == ALTERNATING:
        return solid_set(space).contains_point(x)
    try:
        loc = locate(space, x, depth)
    except Undecided:
        return None
    if loc.status == "in":
        return True
    if space.kind == PLUS_CENTERS and loc.status == "gap":
        return x == (loc.a + loc.b) / 2
    return False


def distance_to_space(space: SpaceDescriptor, x, depth: int = DEFAULT_DEPTH) -> Fraction:
    """Exact distance from ``x`` to the space."""
    x = as_fraction(x)
    if space.kind == UNIT:
        return max(Fraction(0), -x, x - 1)
    if space.kind == ALTERNATING:
        return _distance_to_union(solid_set(space), x)
    loc = locate(space, x, depth)
    if loc.status == "in":
        return Fraction(0)
    if loc.status == "left":
        return -x
    if loc.status == "right":
        return x - 1
    d = min(x - loc.a, loc.b - x)
    if space.kind == PLUS_CENTERS:
        d = min(d, abs(x - (loc.a + loc.b) / 2))
    return d


def punctured_distance(space: SpaceDescriptor, p, depth: int = DEFAULT_DEPTH) -> Fraction:
    """Distance from a point ``p`` of the space to the rest of the space.

    Zero unless ``p`` is isolated, which in the catalogue happens only for
    gap centers of a ``cantor-plus-centers`` space.
    """
    p = as_fraction(p)
    if space.kind == PLUS_CENTERS:
        loc = locate(space, p, depth)
        if loc.status == "gap" and p == (loc.a + loc.b) / 2:
            return (loc.b - loc.a) / 2
    return Fraction(0)


def _distance_to_union(u: IntervalUnion, x: Fraction) -> Fraction:
    best = None
    for a, b in u:
        if a <= x <= b:
            return Fraction(0)
        d = a - x if x < a else x - b
        if best is None or d < best:
            best = d
    if best is None:
        raise InvalidArgument("empty set")
    return best


def net(space: SpaceDescriptor, depth: int) -> List[Fraction]:
    """Ascending finite net of points of the space at resolution ``depth``.

    Cantor kinds: endpoints of the level-``depth`` cylinders (plus gap centers
    down to that level for ``cantor-plus-centers``). Interval kinds: the
    multiples of ``2**-depth`` lying in the set.
    """
    if space.is_cantor:
        pts = set(_endpoints(space.lam, depth))
        if space.kind == PLUS_CENTERS:
            for j in range(1, depth + 1):
                pts.update(centers_of_gaps(space, j))
        return sorted(pts)
    step = Fraction(1, 2 ** depth)
    if space.kind == UNIT:
        return [j * step for j in range(2 ** depth + 1)]
    pts = []
    for a, b in solid_set(space):
        j0 = -((-a) // step)
        j = j0
        while j * step <= b:
            pts.append(j * step)
            j += 1
    return sorted(set(pts))


def net_resolution(space: SpaceDescriptor, depth: int) -> Fraction:
    """Every point of the space lies within this distance of ``net(space, depth)``."""
    if space.is_cantor:
        return space.lam ** depth / 2
    return Fraction(1, 2 ** (depth + 1))


# -- natural measure ---------------------------------------------------------

def natural_cdf(space: SpaceDescriptor, x, depth: int = DEFAULT_DEPTH) -> Fraction:
    """Exact natural measure of ``(-inf, x]``.

    On Cantor kinds the descent follows the cylinder containing ``x``; a
    repeated state means the remaining digits are periodic, and the tail is
    summed as a geometric series. Gap centers carry no mass.
    """
    x = as_fraction(x)
    if x <= 0:
        return Fraction(0)
    if x >= 1:
        return Fraction(1)
    if space.kind == UNIT:
        return x
    if space.kind == ALTERNATING:
        mass = Fraction(1, 2 ** branch_count(space, total_levels(space)))
        total = Fraction(0)
        for a, b in solid_set(space):
            for l in _cells(a, b, total_levels(space)):
                size = Fraction(1, 2 ** total_levels(space))
                if x >= l + size:
                    total += mass
                elif x > l:
                    total += mass * (x - l) / size
        return total
    lam = space.lam
    shift = 1 - lam
    y, acc, weight = x, Fraction(0), Fraction(1)
    seen = {}
    for _ in range(depth):
        if y == 0:
            return acc
        if y == 1:
            return acc + weight
        if y in seen:
            acc0, w0 = seen[y]
            # from this state on, the contribution repeats scaled by weight/w0
            return acc0 + (acc - acc0) / (1 - weight / w0)
        seen[y] = (acc, weight)
        weight /= 2
        if y <= lam:
            y = y / lam
        elif y >= shift:
            acc += weight
            y = (y - shift) / lam
        else:
            return acc + weight
    raise Undecided(f"measure of [0, {x}] undecided after {depth} levels")


def _cells(a: Fraction, b: Fraction, M: int):
    size = Fraction(1, 2 ** M)
    l = a
    while l < b:
        yield l
        l += size
