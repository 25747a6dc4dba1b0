from fractions import Fraction as F

import pytest

from metric_approx import dirichlet as di
from metric_approx import errors
from metric_approx import limsup as ls
from metric_approx import schemes as sc
from metric_approx import spaces as sp

C = sp.middle_third()
A = sp.alternating_ifs((2, 3), 2)


@pytest.mark.parametrize("scheme, d, N_list, q_max", [
    (sc.classic(), 2, (3, 10, 20), 200),
    (sc.classic(), F(5, 2), (5, 40), 300),
    (sc.cantor_endpoint(C), F(11, 10), (9, 27), 3 ** 6),
    (sc.cantor_shifted(None), 2, (9, 27), 3 ** 6),
])
def test_curve_matches_separate_covers(scheme, d, N_list, q_max):
    curve = di.covered_measure_curve(scheme, d, N_list, q_max)
    for N, m in curve:
        assert m == ls.grid_measure(scheme, d, N + 1, q_max, use_symmetry=False)


def test_curve_agrees_with_exact_cover_for_integer_d():
    curve = dict(di.covered_measure_curve(sc.classic(), 2, (2, 6), 60))
    for N in (2, 6):
        exact = ls.build_cover(ls.CoverSpec(sc.classic(), 2, N + 1, 60)).covered_measure
        assert curve[N] == exact


def test_curve_argument_checks():
    with pytest.raises(errors.InvalidArgument):
        di.covered_measure_curve(sc.classic(), F(1, 2), (3,), 10)
    with pytest.raises(errors.InvalidArgument):
        di.covered_measure_curve(sc.classic(), 2, (), 10)
    with pytest.raises(errors.InvalidArgument):
        di.covered_measure_curve(sc.classic(), 2, (10,), 10)


def test_default_grid_passes_one_plus_inverse_dimension():
    g = di.default_grid(sp.unit_interval())
    assert g[0] == 1 and g[-1] >= F(2) and all(b - a == F(1, 20) for a, b in zip(g, g[1:]))


def test_classic_estimate_on_short_range():
    # a short q range still covers slightly above d = 2; the grid stops well before 3
    rep = di.estimate_dirichlet(sc.classic(), [2, F(21, 10), F(5, 2), 3], N_list=(10, 30), q_max=3000)
    assert rep.estimated_d in (2.0, 2.1) and rep.bracket[1] is not None
    assert rep.monotone_in_d and rep.monotone_in_N
    assert [m for _, m in rep.curves[F(3)]] < [m for _, m in rep.curves[F(2)]]


def test_estimate_empty_grid():
    with pytest.raises(errors.InvalidArgument):
        di.estimate_dirichlet(sc.classic(), [], q_max=100)


def test_estimate_none_when_nothing_is_full():
    rep = di.estimate_dirichlet(sc.classic(), [3], N_list=(10,), q_max=100)
    assert rep.estimated_d is None and rep.bracket == (None, 3.0)
    assert rep.summary()["threshold"] == "1/1024"


@pytest.mark.parametrize("case, d", [("ii", None), ("iii", F(3, 2))])
def test_cantor_cylinder_hits(case, d):
    checks = di.verify_cantor_dirichlet(case, d, n_max=4)
    assert checks and all(c.passed for c in checks)


def test_classic_dirichlet_on_net():
    net = [F(k, 97) for k in range(98)]
    checks = di.verify_classic_dirichlet(net, 12)
    assert all(c.passed for c in checks)


def test_classic_dirichlet_witnesses_recheck():
    for x in (F(1, 3), F(5, 17), F(99, 100)):
        (chk,) = di.verify_classic_dirichlet([x], 7)
        q_part, p_part = chk.detail.split(", ")
        q, p = int(q_part[2:]), int(p_part[2:].split("/")[0])
        assert 1 <= q <= 7 and abs(x - F(p, q)) <= F(1, q * 8)


def test_gap_condition_exact_boundary():
    # gap = 2 * 2**-(kN*delta) exactly is not enough
    assert not di.gap_condition(F(2, 2 ** 6), 3, F(2))
    assert di.gap_condition(F(3, 2 ** 6), 3, F(2))
    assert di.gap_condition(None, 3, F(2))


def test_smallest_admissible_delta():
    delta = di.smallest_admissible_delta(A, 2)
    assert delta == F(137, 50)
    assert di.probe_range(3, delta) == (150, 298)


@pytest.mark.parametrize("delta", [F(137, 50), F(3)])
def test_hole_forcing_passes(delta):
    rep = di.hole_forcing_check(A, sc.greedy(A, 13), delta, 2)
    assert rep.status == "pass" and rep.checks


def test_hole_forcing_inconclusive_below_threshold():
    rep = di.hole_forcing_check(A, sc.greedy(A, 13), F(5, 2), 2)
    assert rep.status == "inconclusive"


def test_cantor_check_rejects_unknown_case():
    with pytest.raises(errors.InvalidArgument):
        di.verify_cantor_dirichlet("i")


def test_hole_forcing_needs_alternating_space():
    with pytest.raises(errors.UnsupportedSpace):
        di.hole_forcing_check(C, None, 3, 1)


def test_hole_forcing_adversarial():
    rep = di.hole_forcing_check(A, None, F(137, 50), 2, adversarial=True, probes=[150, 200, 298])
    assert rep.passed
