"""Exact arithmetic substrate.

Rationals are :class:`fractions.Fraction`. Irrational powers ``q**-t`` are
enclosed between two rationals with a guaranteed relative gap, and finite
unions of closed intervals are kept in a normalized, exact form.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

import gmpy2

from .errors import InvalidArgument

Rational = Union[int, Fraction]

DEFAULT_PRECISION = 64


def as_fraction(value) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings into a Fraction.

    Floats are rejected on purpose: every rational entering the library has
    to be exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidArgument(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgument(f"cannot parse rational {value!r}") from exc
    raise InvalidArgument(f"not an exact rational: {value!r}")


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class RoundedPower:
    """Enclosure ``lower <= q**-t <= upper``."""

    lower: Fraction
    upper: Fraction
    relative_gap: Fraction

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def pick(self, mode: str) -> Fraction:
        """``outer``/``upper`` gives the upper end, ``inner``/``lower`` the lower."""
        if mode in ("outer", "upper"):
            return self.upper
        if mode in ("inner", "lower"):
            return self.lower
        raise InvalidArgument(f"unknown rounding mode {mode!r}")


def _int_root_floor(n: int, k: int) -> Tuple[int, bool]:
    root, exact = gmpy2.iroot(gmpy2.mpz(n), k)
    return int(root), bool(exact)


def pow_rational(q: int, t, precision: int = DEFAULT_PRECISION,
                 direction: str = "both") -> RoundedPower:
    """Enclose ``q**-t`` for a positive integer ``q`` and rational ``t > 0``.

    The enclosure is exact when the power is rational (integer ``t``, or
    ``q**num`` a perfect ``den``-th power). Otherwise
    ``(upper - lower) / lower <= 2**-precision``, and raising the precision
    only ever shrinks the enclosure.
    """
    if direction not in ("lower", "upper", "both"):
        raise InvalidArgument(f"direction must be lower|upper|both, got {direction!r}")
    if not isinstance(precision, int) or precision <= 0:
        raise InvalidArgument("precision must be a positive integer")
    if not isinstance(q, int) or q < 1:
        raise InvalidArgument(f"q must be a positive integer, got {q!r}")
    t = as_fraction(t)
    if t <= 0:
        raise InvalidArgument("t must be positive")

    num, den = t.numerator, t.denominator
    big = q ** num
    if den == 1:
        v = Fraction(1, big)
        return RoundedPower(v, v, Fraction(0))
    root, exact = _int_root_floor(big, den)
    if exact:
        v = Fraction(1, root)
        return RoundedPower(v, v, Fraction(0))

    # floor(big**(1/den) * 2**shift) >= 2**(precision+1) keeps the gap small;
    # shift grows monotonically with precision, which gives nesting.
    shift = max(0, precision + 2 - (big.bit_length() - 1) // den)
    r, exact = _int_root_floor(big << (den * shift), den)
    scale = 1 << shift
    if exact:
        v = Fraction(scale, r)
        return RoundedPower(v, v, Fraction(0))
    lower = Fraction(scale, r + 1)
    upper = Fraction(scale, r)
    return RoundedPower(lower, upper, (upper - lower) / lower)


def radius(q: int, t, mode: str = "outer", precision: int = DEFAULT_PRECISION) -> Fraction:
    """Directed-rounded ``q**-t``: ``outer`` rounds up, ``inner`` rounds down."""
    return pow_rational(q, t, precision).pick(mode)


Interval = Tuple[Fraction, Fraction]


class IntervalUnion:
    """A finite union of closed intervals with exact rational endpoints.

    Stored sorted and disjoint; touching intervals are merged, so consecutive
    intervals satisfy ``b_i < a_{i+1}``. Instances are immutable.
    """

    __slots__ = ("_iv", "_starts")

    def __init__(self, intervals: Iterable[Tuple[Rational, Rational]] = ()):
        ivs = []
        for a, b in intervals:
            a, b = as_fraction(a), as_fraction(b)
            if a > b:
                raise InvalidArgument(f"empty interval [{a}, {b}]")
            ivs.append((a, b))
        self._iv = tuple(_normalize(ivs))
        self._starts = None

    @classmethod
    def _from_normalized(cls, ivs: Sequence[Interval]) -> "IntervalUnion":
        obj = cls.__new__(cls)
        obj._iv = tuple(ivs)
        obj._starts = None
        return obj

    @property
    def intervals(self) -> Tuple[Interval, ...]:
        return self._iv

    def __iter__(self):
        return iter(self._iv)

    def __len__(self):
        return len(self._iv)

    def __bool__(self):
        return bool(self._iv)

    def __eq__(self, other):
        return isinstance(other, IntervalUnion) and self._iv == other._iv

    def __hash__(self):
        return hash(self._iv)

    def __repr__(self):
        body = ", ".join(f"[{a}, {b}]" for a, b in self._iv)
        return f"IntervalUnion({body})"

    def measure(self) -> Fraction:
        return sum((b - a for a, b in self._iv), Fraction(0))

    def insert(self, a: Rational, b: Rational) -> "IntervalUnion":
        a, b = as_fraction(a), as_fraction(b)
        if a > b:
            raise InvalidArgument(f"empty interval [{a}, {b}]")
        ivs = self._iv
        # intervals strictly left of a and strictly right of b are untouched
        starts = [iv[0] for iv in ivs]
        ends = [iv[1] for iv in ivs]
        lo = bisect_left(ends, a)
        hi = bisect_right(starts, b)
        if lo < hi:
            a = min(a, ivs[lo][0])
            b = max(b, ivs[hi - 1][1])
        return IntervalUnion._from_normalized(ivs[:lo] + ((a, b),) + ivs[hi:])

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion._from_normalized(_normalize(list(self._iv) + list(other._iv)))

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        i = j = 0
        A, B = self._iv, other._iv
        while i < len(A) and j < len(B):
            a = max(A[i][0], B[j][0])
            b = min(A[i][1], B[j][1])
            if a <= b:
                out.append((a, b))
            if A[i][1] < B[j][1]:
                i += 1
            else:
                j += 1
        return IntervalUnion._from_normalized(_normalize(out))

    def complement_within(self, a: Rational, b: Rational) -> "IntervalUnion":
        """Closure of ``[a, b]`` minus this union.

        Endpoints shared with the union are kept, so the result is again a
        union of closed intervals (its measure is the exact relative
        complement's measure).
        """
        a, b = as_fraction(a), as_fraction(b)
        if a > b:
            raise InvalidArgument(f"empty interval [{a}, {b}]")
        out = []
        cur = a
        for x, y in self._iv:
            if y < cur:
                continue
            if x > b:
                break
            if x > cur:
                out.append((cur, x))
            cur = max(cur, y)
        if cur < b:
            out.append((cur, b))
        return IntervalUnion._from_normalized(out)

    def clip(self, a: Rational, b: Rational) -> "IntervalUnion":
        return self.intersect(IntervalUnion([(a, b)]))

    def _start_list(self):
        if self._starts is None:
            self._starts = [iv[0] for iv in self._iv]
        return self._starts

    def contains_point(self, x: Rational) -> bool:
        i = bisect_right(self._start_list(), x) - 1
        return i >= 0 and self._iv[i][1] >= x

    def contains_interval(self, a: Rational, b: Rational) -> bool:
        i = bisect_right(self._start_list(), a) - 1
        return i >= 0 and self._iv[i][1] >= b

    def intersects(self, a: Rational, b: Rational) -> bool:
        """Whether the closed interval ``[a, b]`` meets the union."""
        i = bisect_right(self._start_list(), b) - 1
        return i >= 0 and self._iv[i][1] >= a


def _normalize(ivs: list) -> list:
    if not ivs:
        return []
    ivs = sorted(ivs)
    out = [list(ivs[0])]
    for a, b in ivs[1:]:
        if a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1][1] = b
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def union_insert(u: IntervalUnion, a, b) -> IntervalUnion:
    return u.insert(a, b)


def union_measure(u: IntervalUnion) -> Fraction:
    return u.measure()


def union_intersect(u: IntervalUnion, v: IntervalUnion) -> IntervalUnion:
    return u.intersect(v)


def union_complement_within(u: IntervalUnion, a, b) -> IntervalUnion:
    return u.complement_within(a, b)
