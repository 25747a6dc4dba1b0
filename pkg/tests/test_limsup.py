from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from metric_approx import errors
from metric_approx import grid as gr
from metric_approx import limsup as ls
from metric_approx import schemes as sc
from metric_approx import spaces as sp
from metric_approx.exact import pow_rational

from oracles import classic_points, sweep_measure, sweep_union

C = sp.middle_third()


def oracle_classic_union(t, q_lo, q_hi):
    ivs = []
    for q in range(q_lo, q_hi + 1):
        r = pow_rational(q, t).upper
        ivs += [(p - r, p + r) for p in classic_points(q)]
    return sweep_union(ivs)


def clipped_measure(union):
    return sweep_measure([(max(a, F(0)), min(b, F(1))) for a, b in union if b >= 0 and a <= 1])


@pytest.mark.parametrize("t", [1, F(3, 2), 2, 3])
@pytest.mark.parametrize("q_lo, q_hi", [(1, 1), (1, 12), (5, 30)])
def test_cover_equals_sweep_oracle(t, q_lo, q_hi):
    rep = ls.build_cover(ls.CoverSpec(sc.classic(), t, q_lo, q_hi))
    expected = oracle_classic_union(t, q_lo, q_hi)
    assert list(rep.union.intervals) == expected
    assert rep.covered_measure == clipped_measure(expected)


def test_small_cover_values():
    assert ls.build_cover(ls.CoverSpec(sc.classic(), 1, 1, 1)).covered_measure == 1
    assert ls.build_cover(ls.CoverSpec(sc.classic(), 2, 1, 20)).covered_measure == 1


def test_exact_and_grid_routes_agree_on_unit_interval():
    exact = ls.build_cover(ls.CoverSpec(sc.classic(), 3, 2, 10)).covered_measure
    assert exact == sweep_measure([(max(a, F(0)), min(b, F(1))) for a, b in oracle_classic_union(3, 2, 10)])
    grid = ls.grid_measure(sc.classic(), 3, 2, 10)
    inner = ls.grid_measure(sc.classic(), 3, 2, 10, mode="inner")
    assert inner <= exact <= grid
    assert float(grid - inner) < 1e-12


@pytest.mark.parametrize("scheme, t, q_lo, q_hi", [
    (sc.cantor_endpoint(C), 2, 3, 200),
    (sc.cantor_shifted(None), 2, 3, 200),
    (sc.cantor_shifted(F(3, 2)), F(5, 2), 9, 300),
    (sc.gap_centers(), 2, 5, 100),
])
def test_cantor_grid_matches_exact_cover(scheme, t, q_lo, q_hi):
    # with integer t and on-grid centres the routes agree exactly; otherwise
    # inner and outer rounding bracket the exact value
    exact = ls.build_cover(ls.CoverSpec(scheme, t, q_lo, q_hi)).covered_measure
    outer = ls.grid_measure(scheme, t, q_lo, q_hi, use_symmetry=False)
    inner = ls.grid_measure(scheme, t, q_lo, q_hi, mode="inner", use_symmetry=False)
    if F(t).denominator == 1 and scheme.kind != sc.GAP_CENTERS:
        assert outer == exact
    assert inner <= exact <= outer
    assert float(outer - inner) < 1e-9


@pytest.mark.parametrize("scheme, t, q_lo", [
    (sc.cantor_endpoint(C), 2, 3 ** 5),
    (sc.cantor_shifted(None), F(5, 2), 3 ** 5),
    (sc.central_cantor_endpoint(F(1, 4)), 2, 4 ** 4),
])
def test_self_similar_window_is_exact(scheme, t, q_lo):
    q_hi = 40 * q_lo
    assert sc.self_similar_level(scheme, q_lo, t) > 0
    full = ls.grid_measure(scheme, t, q_lo, q_hi, use_symmetry=False)
    assert ls.grid_measure(scheme, t, q_lo, q_hi) == full


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10 ** 6), st.fractions(min_value=1, max_value=4, max_denominator=10))
def test_float_radius_margin_is_directed(q, t):
    grid = gr.grid_for(sp.unit_interval(), 10 ** 6)
    exact = pow_rational(q, t, precision=80)
    outer = int(ls.radius_units_float(np.array([q]), t, grid, "outer")[0])
    inner = int(ls.radius_units_float(np.array([q]), t, grid, "inner")[0])
    assert F(outer, grid.D) >= exact.upper
    assert F(inner, grid.D) <= exact.lower


def test_cantor_cdf_on_grid():
    grid = gr.grid_for(C)
    pts = np.array([0, grid.D // 3, 2 * grid.D // 3, grid.D], dtype=np.int64)
    vals = gr.cantor_cdf(pts, grid)
    assert [F(int(v), 1 << grid.J) for v in vals] == [0, F(1, 2), F(1, 2), 1]


def test_merge_joins_touching():
    lo, hi = gr.merge(np.array([5, 0, 3]), np.array([9, 3, 4]))
    assert lo.tolist() == [0, 5] and hi.tolist() == [4, 9]


def test_cover_spec_validation():
    with pytest.raises(errors.InvalidArgument):
        ls.CoverSpec(sc.classic(), F(1, 2), 1, 5)
    with pytest.raises(errors.InvalidArgument):
        ls.CoverSpec(sc.classic(), 2, 5, 4)


def test_ball_budget_returns_partial_report():
    with pytest.raises(errors.ResourceLimit) as exc:
        ls.build_cover(ls.CoverSpec(sc.classic(), 2, 1, 100), max_balls=50)
    rep = exc.value.partial
    assert rep.partial and rep.distinct_ball_count <= 50


def test_membership_profile_hits():
    hits = ls.membership_profile(ls.CoverSpec(sc.classic(), 2, 1, 10), F(1, 2))
    assert {(h.q, h.p) for h in hits if h.q == 1} == {(1, F(0)), (1, F(1))}
    assert {h.q for h in hits if h.q > 1} == {2, 4, 6, 8, 10}
    assert all(h.distance <= F(1, h.q ** 2) for h in hits)


def test_membership_profile_rejects_outside_points():
    with pytest.raises(errors.DomainError):
        ls.membership_profile(ls.CoverSpec(sc.cantor_endpoint(C), 2, 1, 5), F(1, 2))


@pytest.mark.parametrize("t, q0", [(2, 8), (F(3, 2), 62)])
def test_degeneracy_threshold(t, q0):
    scheme = sc.gap_centers()
    assert ls.degeneracy_threshold(scheme, t) == q0
    assert not ls.ball_degeneracy_check(scheme, t, q0 - 1)
    assert all(ls.ball_degeneracy_check(scheme, t, q) for q in range(q0, q0 + 200))


def _degenerate_oracle(q, t):
    # every point must be the midpoint of a gap with half-length > q**-t
    for p in sc.generate(sc.gap_centers(), q):
        loc = sp.locate(C, p)
        if loc.status != "gap" or p != (loc.a + loc.b) / 2:
            return False
        half = (loc.b - loc.a) / 2
        if not pow_rational(q, t).upper < half:
            return False
    return True


@pytest.mark.parametrize("t", [2, 3])
def test_degeneracy_against_gap_oracle(t):
    scheme = sc.gap_centers()
    for q in range(2, 120):
        assert ls.ball_degeneracy_check(scheme, t, q) == _degenerate_oracle(q, t)


def test_degeneracy_needs_t_above_one():
    with pytest.raises(errors.InvalidArgument):
        ls.degeneracy_threshold(sc.gap_centers(), 1)


def test_trajectory_is_monotone():
    rep = ls.build_cover(ls.CoverSpec(sc.cantor_endpoint(C), 2, 1, 60), trajectory=True)
    values = [m for _, m in rep.trajectory]
    assert values == sorted(values) and values[-1] == rep.covered_measure


@pytest.mark.parametrize("space, level", [
    (sp.unit_interval(), 9), (C, 7), (sp.central_cantor(F(1, 4)), 6), (sp.alternating_ifs((2, 3), 2), 10),
])
@pytest.mark.parametrize("t, q_hi", [(2, 12), (F(5, 2), 30)])
def test_cylinder_bounds_match_per_cylinder_scan(space, level, t, q_hi):
    if space.kind == sp.UNIT:
        scheme = sc.classic()
    elif space.kind == sp.ALTERNATING:
        scheme = sc.greedy(space, 13)
    else:
        scheme = sc.cantor_endpoint(space) if space.lam == F(1, 3) else sc.central_cantor_endpoint(space.lam)
    u = ls.build_cover(ls.CoverSpec(scheme, t, 2, q_hi)).union
    mass = sp.cylinder_mass(space, level)
    over = under = F(0)
    for _, l, r in sp.cylinders(space, level):
        if u.intersects(l, r):
            over += mass
            under += mass if u.contains_interval(l, r) else 0
    assert ls.cylinder_bounds(space, u, level) == (over, under)
    assert under <= ls.covered_measure(space, u) <= over
