import math
from fractions import Fraction as F

import pytest

from metric_approx import dimension as dm
from metric_approx import errors
from metric_approx import schemes as sc
from metric_approx import spaces as sp
from metric_approx.exact import IntervalUnion

C = sp.middle_third()
LOG32 = math.log(2) / math.log(3)


def test_separated_count_on_interval():
    u = IntervalUnion([(0, 1)])
    assert dm.separated_count(u, F(1, 4)) == 5
    assert dm.separated_count(u, F(1, 3)) == 4


def test_separated_count_on_points():
    pts = [F(k, 10) for k in range(11)]
    assert dm.separated_count(pts, F(1, 5)) == 6
    assert dm.separated_count(pts, F(2)) == 1


def test_box_dimension_of_interval():
    est = dm.box_dimension(IntervalUnion([(0, 1)]), [F(1, 2 ** k) for k in range(3, 12)])
    assert abs(est.value - 1) < 0.05
    lo, hi = est.confidence_band
    assert lo <= est.value <= hi


def test_box_dimension_of_cantor_endpoints():
    pts = sp.endpoints(C, 10)
    est = dm.box_dimension(pts, [F(1, 3 ** k) for k in range(2, 9)])
    assert abs(est.value - LOG32) < 0.05


def test_box_dimension_of_a_point_is_zero():
    est = dm.box_dimension([F(1, 2)], [F(1, 10 ** k) for k in range(1, 6)])
    assert est.value == 0 and est.confidence_band == (0.0, 0.0)


def test_box_dimension_rejects_thin_scale_sets():
    with pytest.raises(errors.InvalidArgument):
        dm.box_dimension([F(0)], [F(1, 2), F(1, 4)])
    with pytest.raises(errors.InvalidArgument):
        dm.box_dimension([F(0)], [F(1, 2), F(1, 3), F(1, 4), F(1, 5)])


@pytest.mark.parametrize("t", [2, 3])
def test_classic_exponent_small_range(t):
    est = dm.critical_exponent(sc.classic(), t, 20_000)
    assert abs(est.value - 2 / t) < 0.05


def test_endpoint_exponent():
    est = dm.critical_exponent(sc.cantor_endpoint(C), 2, 3 ** 10 - 1)
    assert abs(est.value - LOG32 / 2) < 0.05


def test_partial_sums_grow_with_tau_decreasing():
    scheme = sc.classic()
    data = dm.series_data(scheme, 1000, dm.default_checkpoints(scheme, 1000))
    low = dm.partial_sums(data, 0.5, 2)
    high = dm.partial_sums(data, 1.5, 2)
    assert all(a >= b for a, b in zip(low, high))
    assert all(x <= y for x, y in zip(low, low[1:]))


def test_inconsistent_bracket():
    with pytest.raises(errors.InconsistentBracket):
        dm.critical_exponent(sc.classic(), 2, 10_000, tau_bracket=(2.0, 3.0))


def test_checkpoints_follow_blocks():
    cps = dm.default_checkpoints(sc.cantor_endpoint(C), 3 ** 8 - 1)
    assert cps[-1] == 3 ** 8 - 1
    assert all(c + 1 in {3 ** n for n in range(1, 9)} for c in cps)


@pytest.mark.parametrize("space, expected", [
    (sp.unit_interval(), (1, 1, 1, 1)),
    (C, (LOG32, LOG32, LOG32, LOG32)),
    (sp.cantor_plus_centers(), (LOG32, LOG32, LOG32, 0)),
    (sp.alternating_ifs((2, 3), 2), (0.5, 1, 1, 0)),
])
def test_closed_forms(space, expected):
    cf = dm.closed_form_dimensions(space)
    got = (cf.hausdorff.value, cf.packing.value, cf.box.value, cf.lower.value)
    assert got == pytest.approx(expected)


def test_alternating_closed_form_is_marked_extrapolated():
    cf = dm.closed_form_dimensions(sp.alternating_ifs((2, 3), 2))
    assert cf.hausdorff.extrapolated and cf.packing.extrapolated
    assert any("1/2" in n for n in cf.notes)


def test_prefix_ratios_hit_one_over_t_at_block_ends():
    A = sp.alternating_ifs((2, 3, 4), 2)
    ratios = dm.prefix_ratios(A)
    for M in sp.block_boundaries(A)[1:]:
        assert ratios[M - 1] == F(1, 2)
