"""Integer-grid ball unions for large sweeps.

Ball endpoints are rounded outward (or inward) to multiples of ``1/D`` and
stored as int64, so unions of millions of balls merge with numpy. The grid
is ``D = 2**W`` on the unit interval and ``D = m**J`` on a Cantor set of
ratio ``1/m``; Cantor points of P(q) then sit exactly on the grid, and the
natural measure of a grid interval is an exact dyadic rational obtained from
the base-m digits of its endpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from . import spaces as sp
from .errors import UnsupportedSpace

_INT64_BITS = 62


@dataclass(frozen=True)
class Grid:
    base: int
    J: int
    cantor: bool

    @property
    def D(self) -> int:
        return self.base ** self.J

    @property
    def resolution(self) -> Fraction:
        return Fraction(1, self.D)


def grid_for(space: sp.SpaceDescriptor, max_den: int = 1) -> Grid:
    """Finest grid on which ``numerator * D`` still fits in int64.

    ``max_den`` bounds the denominators of points that are not already on
    the grid (``a/q`` on the unit interval).
    """
    if space.kind == sp.UNIT:
        return Grid(2, _INT64_BITS - max_den.bit_length(), False)
    if space.kind in (sp.CANTOR, sp.PLUS_CENTERS) and space.lam.numerator == 1:
        m = space.lam.denominator
        J = 1
        while m ** (J + 1) < 2 ** _INT64_BITS:
            J += 1
        return Grid(m, J, True)
    raise UnsupportedSpace(f"no integer grid for {space.label}")


def radius_units(r: Fraction, grid: Grid, mode: str) -> int:
    """``r * D`` rounded up for ``outer`` and down for ``inner``."""
    x = r * grid.D
    if mode == "outer":
        return -((-x.numerator) // x.denominator)
    return x.numerator // x.denominator


def ball_endpoints(nums: np.ndarray, den: int, R: int, grid: Grid,
                   mode: str = "outer") -> Tuple[np.ndarray, np.ndarray]:
    """Grid endpoints of the balls of radius ``R/D`` around ``nums/den``."""
    D = grid.D
    if D % den == 0:
        c = nums * (D // den)
        return c - R, c + R
    g = math.gcd(den, D)
    num_scale, den = D // g, den // g
    if den * D < 2 ** 63:
        scaled = nums * num_scale
    else:
        scaled = np.asarray(nums, dtype=object) * num_scale
    c_lo = (scaled // den).astype(np.int64)
    c_hi = (-((-scaled) // den)).astype(np.int64)
    if mode == "outer":
        return c_lo - R, c_hi + R
    lo, hi = c_hi - R, c_lo + R
    keep = lo <= hi
    return lo[keep], hi[keep]


def merge(lo: np.ndarray, hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Union of closed grid intervals; touching intervals merge."""
    if lo.size == 0:
        return lo, hi
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    reach = np.maximum.accumulate(hi)
    new = np.empty(lo.size, dtype=bool)
    new[0] = True
    new[1:] = lo[1:] > reach[:-1]
    starts = np.flatnonzero(new)
    return lo[starts], np.maximum.reduceat(hi, starts)


def clip(lo: np.ndarray, hi: np.ndarray, grid: Grid) -> Tuple[np.ndarray, np.ndarray]:
    lo = np.maximum(lo, 0)
    hi = np.minimum(hi, grid.D)
    keep = lo <= hi
    return lo[keep], hi[keep]


def cantor_cdf(x: np.ndarray, grid: Grid) -> np.ndarray:
    """Natural measure of ``[0, x/D]`` for grid points in ``[0, D]``, over ``2**J``.

    Digit 0 descends left, digit m-1 descends right and adds the left
    half's mass, any middle digit lands in a gap and adds the left half's
    mass and stops.
    """
    m, J = grid.base, grid.J
    x = np.asarray(x, dtype=np.int64)
    out = np.zeros_like(x)
    live = x < grid.D
    out[~live] = 1 << J
    rem = x.copy()
    for i in range(1, J + 1):
        p = m ** (J - i)
        digit = rem // p
        rem = rem - digit * p
        w = 1 << (J - i)
        right = live & (digit == m - 1)
        middle = live & (digit > 0) & (digit < m - 1)
        out[right | middle] += w
        live = live & ~middle
    return out


def measure(lo: np.ndarray, hi: np.ndarray, grid: Grid) -> Fraction:
    """Natural measure of a merged union of grid intervals within the space."""
    lo, hi = clip(lo, hi, grid)
    if lo.size == 0:
        return Fraction(0)
    if not grid.cantor:
        return Fraction(int((hi - lo).sum()), grid.D)
    mass = cantor_cdf(hi, grid) - cantor_cdf(lo, grid)
    return Fraction(int(mass.sum()), 1 << grid.J)


def to_fractions(lo: np.ndarray, hi: np.ndarray, grid: Grid):
    D = grid.D
    return [(Fraction(int(a), D), Fraction(int(b), D)) for a, b in zip(lo, hi)]
