from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from metric_approx import errors
from metric_approx import spaces as sp

from oracles import cantor_endpoints, cantor_left_endpoints

C = sp.middle_third()
QUARTER = sp.central_cantor(Fraction(1, 4))


def cantor_point(digits):
    """Point with finite ternary digits in {0, 2}."""
    return sum(Fraction(2 * d, 3 ** (i + 1)) for i, d in enumerate(digits))


@pytest.mark.parametrize("n", range(0, 7))
def test_endpoints_match_digit_oracle(n):
    assert sp.endpoints(C, n) == cantor_endpoints(n)
    assert sp.left_endpoints(C, n) == cantor_left_endpoints(n)
    assert len(sp.endpoints(C, n)) == 2 ** (n + 1)


def test_quarter_endpoints():
    assert sp.endpoints(QUARTER, 3) == cantor_endpoints(3, base=4)


@pytest.mark.parametrize("x, inside", [
    (Fraction(1, 4), True), (Fraction(3, 4), True), (Fraction(1, 2), False),
    (Fraction(1, 3), True), (Fraction(2, 9), True), (Fraction(4, 9), False),
    (Fraction(1, 10), True), (Fraction(-1, 3), False), (Fraction(4, 3), False),
])
def test_membership(x, inside):
    assert sp.contains(C, x) is inside


def test_locate_reports_the_gap():
    loc = sp.locate(C, Fraction(1, 2))
    assert (loc.status, loc.a, loc.b, loc.level) == ("gap", Fraction(1, 3), Fraction(2, 3), 1)
    loc = sp.locate(C, Fraction(5, 27))
    assert (loc.a, loc.b, loc.level) == (Fraction(1, 9), Fraction(2, 9), 2)


def test_general_ratio_uses_fraction_descent():
    lam = Fraction(2, 5)
    space = sp.central_cantor(lam)
    assert sp.contains(space, Fraction(2, 5)) is True
    assert sp.locate(space, Fraction(1, 2)).status == "gap"


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=12))
def test_digit_points_are_members(digits):
    assert sp.contains(C, cantor_point(digits)) is True


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3 ** 8 - 1))
def test_gap_of_agrees_with_digit_test(num):
    # a finite ternary fraction is in C iff it has a {0,2}-expansion: a 1 digit is
    # allowed only as the last digit followed by all 2s, i.e. 0.x1 == 0.x0222...
    x = Fraction(num, 3 ** 8)
    digits = []
    n, d = x.numerator, x.denominator
    while n:
        n *= 3
        digits.append(n // d)
        n %= d
    ones = [i for i, v in enumerate(digits) if v == 1]
    expected = not ones or (ones == [len(digits) - 1])
    assert sp.contains(C, x) is expected


@pytest.mark.parametrize("x, value", [
    (Fraction(1, 3), Fraction(1, 2)), (Fraction(1, 4), Fraction(1, 3)), (Fraction(3, 4), Fraction(2, 3)),
    (Fraction(2, 9), Fraction(1, 4)), (Fraction(7, 9), Fraction(3, 4)), (Fraction(1, 10), Fraction(1, 5)),
    (Fraction(1, 2), Fraction(1, 2)), (Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)),
])
def test_cantor_function_values(x, value):
    assert sp.natural_cdf(C, x) == value


def test_cantor_function_quarter_ratio():
    assert sp.natural_cdf(QUARTER, Fraction(1, 5)) == Fraction(1, 3)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=10))
def test_cdf_at_left_endpoints(digits):
    # G(0.(2d_1)(2d_2)...) = 0.d_1 d_2 ... in binary
    x = cantor_point(digits)
    expected = sum(Fraction(d, 2 ** (i + 1)) for i, d in enumerate(digits))
    assert sp.natural_cdf(C, x) == expected


def test_alternating_structure():
    A = sp.alternating_ifs((2, 3), 2)
    assert sp.block_boundaries(A) == [0, 4, 10]
    assert sp.branching_levels(A) == (True, True, False, False, True, True, True, False, False, False)
    assert sp.branch_count(A, 10) == 5
    assert len(sp.alt_left_endpoints(A, 10)) == 32
    assert sp.solid_set(A).measure() == Fraction(32, 2 ** 10)


def test_alternating_gaps():
    A = sp.alternating_ifs((2, 3), 2)
    cyl = sp.alternating_cylinders(A, 10)
    assert cyl[0].gap_left is None and cyl[-1].gap_right is None
    assert min(c.gap_right for c in cyl[:-1]) == Fraction(7, 1024)
    with pytest.raises(errors.InvalidArgument):
        sp.alternating_cylinders(A, 7)


def test_cylinder_masses_sum_to_one():
    for space in (C, QUARTER, sp.unit_interval()):
        assert all_mass(space, 5) == 1
    A = sp.alternating_ifs((2, 3), 2)
    assert all_mass(A, 10) == 1


def all_mass(space, n):
    return sp.all_cylinders(space, n).natural_measure()


@pytest.mark.parametrize("space", [C, sp.cantor_plus_centers(), sp.unit_interval(), sp.alternating_ifs()])
def test_net_resolution_covers_space(space):
    depth = 6
    pts = sp.net(space, depth)
    res = sp.net_resolution(space, depth)
    assert pts == sorted(pts)
    probe = sp.net(space, depth + 3)
    j = 0
    for x in probe:
        while j + 1 < len(pts) and pts[j + 1] <= x:
            j += 1
        near = min(abs(x - pts[j]), abs(x - pts[min(j + 1, len(pts) - 1)]))
        assert near <= res


def test_punctured_distance_on_plus_centers():
    P = sp.cantor_plus_centers()
    # the centre of the first gap is isolated at distance 1/6 from C
    assert sp.punctured_distance(P, Fraction(1, 2)) == Fraction(1, 6)
    assert sp.punctured_distance(P, Fraction(0)) == 0


def test_distance_to_space():
    assert sp.distance_to_space(C, Fraction(1, 2)) == Fraction(1, 6)
    assert sp.distance_to_space(C, Fraction(2, 3)) == 0


def test_space_json_round_trip():
    for space in (C, QUARTER, sp.unit_interval(), sp.cantor_plus_centers(), sp.alternating_ifs((2, 4), 3)):
        assert sp.SpaceDescriptor.from_json(space.to_json()) == space


@pytest.mark.parametrize("lam", [Fraction(0), Fraction(3, 5), Fraction(1)])
def test_invalid_ratio_rejected(lam):
    with pytest.raises(errors.InvalidArgument):
        sp.central_cantor(lam)


def test_half_ratio_is_the_whole_interval():
    half = sp.central_cantor(Fraction(1, 2))
    assert sp.contains(half, Fraction(1, 3)) is True
