"""Nested ball constructions and the mass they carry.

Level 1 is the single ball ``B(z, q_1**-t)``. Each level-k ball is
``B(p, q_k**-t)`` with ``p in P(q_k)``, placed wholly inside one parent.
Branches that die out before the last level are pruned, and mass is split
equally among surviving children. All radii are inner-rounded, so
containment is certified even when ``q**-t`` is irrational.
"""
from __future__ import annotations

import math
import random
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import schemes as sc
from . import spaces as sp
from .errors import ConstructionFailed, DomainError, InvalidArgument
from .exact import as_fraction, pow_rational


@dataclass
class Node:
    center: Fraction
    radius: Fraction
    parent: Optional[int]
    children: List[int] = field(default_factory=list)
    mass: Fraction = Fraction(0)

    @property
    def left(self) -> Fraction:
        return self.center - self.radius

    @property
    def right(self) -> Fraction:
        return self.center + self.radius


@dataclass
class NestedConstruction:
    space: sp.SpaceDescriptor
    scheme: str
    t: Fraction
    q_seq: Tuple[int, ...]
    levels: List[List[Node]]

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def leaves(self) -> List[Node]:
        return self.levels[-1]

    def child_counts(self, level: int) -> List[int]:
        """Children per node at a 1-based level (all but the last)."""
        return [len(n.children) for n in self.levels[level - 1]]

    def radius(self, level: int) -> Fraction:
        return self.levels[level - 1][0].radius


def build_nested(scheme: sc.Scheme, t, q_seq: Sequence[int], z=None) -> NestedConstruction:
    """Nested balls over ``q_seq``; ``z`` defaults to the leftmost net point."""
    t = as_fraction(t)
    space = scheme.space
    q_seq = tuple(int(q) for q in q_seq)
    if not q_seq or any(b <= a for a, b in zip(q_seq, q_seq[1:])):
        raise InvalidArgument("q_seq must be non-empty and strictly increasing")
    if z is None:
        z = sp.net(space, 4)[0]
    z = as_fraction(z)
    if sp.contains(space, z) is not True:
        raise DomainError(f"seed {z} is not certified to lie in {space.label}")
    levels = [[Node(z, pow_rational(q_seq[0], t).lower, None)]]
    for k, q in enumerate(q_seq[1:], start=2):
        r = pow_rational(q, t).lower
        pts = sc.generate(scheme, q)
        taken = set()
        level = []
        for i, parent in enumerate(levels[-1]):
            lo = bisect_left(pts, parent.left + r)
            hi = bisect_right(pts, parent.right - r)
            for j in range(lo, hi):
                if j in taken:
                    continue
                taken.add(j)
                parent.children.append(len(level))
                level.append(Node(pts[j], r, i))
        if not level:
            widest = max(n.radius for n in levels[-1])
            raise ConstructionFailed(k, f"parent radius {widest} admits no point of P({q}) "
                                        f"with a ball of radius {r} inside it")
        levels.append(level)
    _prune(levels)
    levels[0][0].mass = Fraction(1)
    for k in range(len(levels) - 1):
        for node in levels[k]:
            share = node.mass / len(node.children)
            for c in node.children:
                levels[k + 1][c].mass = share
    return NestedConstruction(space, scheme.label, t, q_seq, levels)


def _prune(levels: List[List[Node]]) -> None:
    """Drop childless nodes above the last level and reindex."""
    keep = list(range(len(levels[-1])))
    for k in range(len(levels) - 2, -1, -1):
        remap = {old: new for new, old in enumerate(keep)}
        for node in levels[k]:
            node.children = [remap[c] for c in node.children if c in remap]
        below = [levels[k + 1][i] for i in keep]
        keep = [i for i, n in enumerate(levels[k]) if n.children]
        levels[k + 1] = below
        remap_up = {old: new for new, old in enumerate(keep)}
        for n in below:
            n.parent = remap_up.get(n.parent)
    levels[0] = [levels[0][i] for i in keep]


def mass_of_ball(nc: NestedConstruction, x, r) -> Fraction:
    """Total mass of the leaves that meet the closed ball ``B(x, r)``.

    The limit measure lives inside the leaves, so this bounds its value on
    the ball from above and is exact for balls that avoid partial leaves.
    """
    x, r = as_fraction(x), as_fraction(r)
    leaves = nc.leaves
    rl = leaves[0].radius
    centers = [n.center for n in leaves]
    lo = bisect_left(centers, x - r - rl)
    hi = bisect_right(centers, x + r + rl)
    return sum((leaves[i].mass for i in range(lo, hi)), Fraction(0))


# -- bounds ------------------------------------------------------------------

@dataclass
class ProductCheck:
    level: int
    bound: Fraction
    worst: Fraction
    predicted: float

    @property
    def ok(self) -> bool:
        return self.worst <= self.bound


def product_bound_checks(nc: NestedConstruction, l: Optional[float] = None) -> List[ProductCheck]:
    """``mu(B(x, r_k)) <= prod_{j<k} 1/min_children(j)`` for every level-k ball.

    ``x`` runs over the centres of all level-k balls. ``predicted`` is the
    closed-form value ``q_1**(t l) (q_2...q_{k-1})**(t l - l) q_k**-l``, which
    matches the product when child counts sit at ``(q_{j+1} q_j**-t)**l``.
    """
    l = nc.space.dimension_s if l is None else l
    t = float(nc.t)
    out = []
    bound = Fraction(1)
    for k in range(1, nc.depth + 1):
        r = nc.radius(k)
        worst = max(mass_of_ball(nc, n.center, r) for n in nc.levels[k - 1])
        qs = nc.q_seq
        logp = t * l * math.log(qs[0]) + sum((t * l - l) * math.log(q) for q in qs[1:k - 1])
        predicted = math.exp(logp - l * math.log(qs[k - 1])) if k > 1 else 1.0
        out.append(ProductCheck(k, bound, worst, predicted))
        if k < nc.depth:
            bound /= min(nc.child_counts(k))
    return out


@dataclass(frozen=True)
class MassSample:
    x: Fraction
    r: float
    level: int
    regime: str
    mass: Fraction
    ratio: float


def child_floors(nc: NestedConstruction, l: Optional[float] = None) -> List[Tuple[int, int, int]]:
    """``(k, min children, floor((q_k**-t q_{k+1})**l))`` for each inner level."""
    l = nc.space.dimension_s if l is None else l
    t = float(nc.t)
    out = []
    for k in range(1, nc.depth):
        target = (nc.q_seq[k] * float(nc.q_seq[k - 1]) ** -t) ** l
        out.append((k, min(nc.child_counts(k)), math.floor(target)))
    return out


@dataclass
class MassBoundReport:
    samples: List[MassSample]
    product: List[ProductCheck]
    children: List[Tuple[int, int, int]] = field(default_factory=list)

    @property
    def product_ok(self) -> bool:
        return all(p.ok for p in self.product)

    @property
    def spread(self) -> float:
        ratios = [s.ratio for s in self.samples]
        return max(ratios) / min(ratios)

    @property
    def cases(self) -> set:
        return {s.regime for s in self.samples}


def verify_mass_bound(nc: NestedConstruction, l: Optional[float] = None,
                      samples: int = 48, seed: int = 0) -> MassBoundReport:
    """Sample ``mu(B(x, r)) / (|log r|**(t s) r**(s/t))`` over both radius regimes.

    For each level k below the last, regime "below" draws ``r`` log-uniformly
    from ``[q_{k+1}**-1, q_k**-t)`` (under the level-k radius) and regime
    "above" from ``[q_k**-t, q_k**-1)``;
    ``x`` is a random leaf centre.
    """
    s = nc.space.dimension_s if l is None else l
    t = float(nc.t)
    rng = random.Random(seed)
    qs = nc.q_seq
    ranges = []
    for k in range(1, nc.depth):
        a, b, c = 1 / qs[k], float(qs[k - 1]) ** -t, 1 / qs[k - 1]
        if a < b:
            ranges.append((k, "below", a, b))
        if b < c:
            ranges.append((k, "above", b, c))
    if not ranges:
        raise InvalidArgument("q_seq leaves no room for either radius regime")
    out = []
    for i in range(samples):
        k, regime, a, b = ranges[i % len(ranges)]
        r = math.exp(rng.uniform(math.log(a), math.log(b)))
        x = rng.choice(nc.leaves).center
        m = mass_of_ball(nc, x, Fraction(r))
        ref = abs(math.log(r)) ** (t * s) * r ** (s / t)
        out.append(MassSample(x, r, k, regime, m, float(m) / ref))
    return MassBoundReport(out, product_bound_checks(nc, s), child_floors(nc, s))
