"""Independent reference implementations used only by the tests.

Kept deliberately naive: string digit expansions, pairwise loops and a
plain endpoint sweep, sharing no code with the package.
"""
from fractions import Fraction
from itertools import product


def classic_points(q):
    return [Fraction(a, q) for a in range(q + 1)]


def cantor_endpoints(n, base=3):
    """Endpoints of the level-n cylinders of the 1/base Cantor set via digit words."""
    out = set()
    for word in product((0, base - 1), repeat=n):
        left = sum(Fraction(d, base ** (i + 1)) for i, d in enumerate(word))
        out.add(left)
        out.add(left + Fraction(1, base ** n))
    return sorted(out)


def cantor_left_endpoints(n, base=3):
    return sorted(sum(Fraction(d, base ** (i + 1)) for i, d in enumerate(w))
                  for w in product((0, base - 1), repeat=n))


def pairwise_separated(points, q):
    pts = list(points)
    return all(abs(a - b) * q >= 1 for i, a in enumerate(pts) for b in pts[i + 1:])


def unit_maximal(points, q):
    """On [0, 1] a separated set is maximal iff every point is within < 1/q of it."""
    pts = sorted(points)
    if not pts:
        return False
    if pts[0] * q >= 1 or (1 - pts[-1]) * q >= 1:
        return False
    return all((b - a) * q < 2 for a, b in zip(pts, pts[1:]))


def sweep_union(intervals):
    """Closed-interval union by sorting endpoints with opening before closing."""
    events = []
    for a, b in intervals:
        events.append((a, 0))
        events.append((b, 1))
    events.sort()
    out, depth, start = [], 0, None
    for x, kind in events:
        if kind == 0:
            if depth == 0:
                if out and out[-1][1] >= x:
                    start = out.pop()[0]
                else:
                    start = x
            depth += 1
        else:
            depth -= 1
            if depth == 0:
                out.append((start, x))
    return out


def sweep_measure(intervals):
    return sum((b - a for a, b in sweep_union(intervals)), Fraction(0))
