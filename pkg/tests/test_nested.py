from fractions import Fraction as F

import pytest

from metric_approx import errors
from metric_approx import nested as ne
from metric_approx import schemes as sc
from metric_approx import spaces as sp

C = sp.middle_third()


def test_classic_two_levels():
    # B(1/2, 1/4) holds B(p/8, 1/64) exactly for p/8 in [17/64, 47/64]
    nc = ne.build_nested(sc.classic(), 2, (2, 8), z=F(1, 2))
    assert [n.center for n in nc.leaves] == [F(3, 8), F(1, 2), F(5, 8)]
    assert all(n.mass == F(1, 3) for n in nc.leaves)
    assert nc.radius(2) == F(1, 64)


def test_endpoint_two_levels():
    nc = ne.build_nested(sc.cantor_endpoint(C), 1, (3, 27), z=0)
    expected = [0, F(1, 27), F(2, 27), F(1, 9), F(2, 9), F(7, 27), F(8, 27)]
    assert [n.center for n in nc.leaves] == expected


def test_single_level_carries_unit_mass():
    nc = ne.build_nested(sc.classic(), 2, (5,), z=F(1, 5))
    assert nc.depth == 1 and nc.leaves[0].mass == 1
    assert ne.mass_of_ball(nc, F(1, 5), 0) == 1


CONFIGS = [
    (sc.classic(), 2, (2, 64, 16384), F(1, 2)),
    (sc.dyadic_block(), 3, (3, 100, 30000), F(1, 2)),
    (sc.cantor_endpoint(C), 2, (3, 243, 3 ** 12), 0),
]


@pytest.fixture(scope="module", params=range(len(CONFIGS)), ids=["classic", "dyadic", "endpoint"])
def construction(request):
    scheme, t, qs, z = CONFIGS[request.param]
    return ne.build_nested(scheme, t, qs, z)


def test_masses_sum_to_one_per_level(construction):
    for level in construction.levels:
        assert sum(n.mass for n in level) == 1


def test_children_sit_inside_their_parent(construction):
    for k in range(1, construction.depth):
        parents = construction.levels[k - 1]
        for node in construction.levels[k]:
            par = parents[node.parent]
            assert par.left <= node.left and node.right <= par.right
            assert construction.levels[k].index(node) in par.children


def test_every_branch_reaches_the_last_level(construction):
    for k in range(1, construction.depth):
        assert all(construction.child_counts(k))


@pytest.mark.parametrize("scheme, t, qs, z", CONFIGS[:2] + [(sc.cantor_endpoint(C), 2, (3, 243, 3 ** 8), 0)])
def test_centres_belong_to_the_scheme(scheme, t, qs, z):
    nc = ne.build_nested(scheme, t, qs, z)
    for k, q in enumerate(qs[1:], start=2):
        centres = [n.center for n in nc.levels[k - 1]]
        assert centres == sorted(set(centres))
        assert set(centres) <= set(sc.generate(scheme, q))


def test_product_bound_holds(construction):
    for chk in ne.product_bound_checks(construction):
        assert chk.ok


def test_mass_of_ball_monotone_in_radius(construction):
    x = construction.leaves[len(construction.leaves) // 2].center
    radii = [F(1, 10 ** k) for k in range(8, 0, -1)] + [F(2)]
    masses = [ne.mass_of_ball(construction, x, r) for r in radii]
    assert masses == sorted(masses) and masses[-1] == 1


def test_verify_mass_bound_samples_both_regimes(construction):
    rep = ne.verify_mass_bound(construction, samples=24, seed=3)
    assert rep.product_ok
    assert rep.cases <= {"below", "above"} and rep.cases
    assert all(s.mass > 0 for s in rep.samples)


def test_verify_mass_bound_is_seeded(construction):
    a = ne.verify_mass_bound(construction, samples=10, seed=5)
    b = ne.verify_mass_bound(construction, samples=10, seed=5)
    assert [s.mass for s in a.samples] == [s.mass for s in b.samples]


def test_construction_fails_when_no_ball_fits():
    with pytest.raises(errors.ConstructionFailed) as exc:
        ne.build_nested(sc.classic(), 2, (10, 11), z=F(1, 2))
    assert exc.value.level == 2


def test_seed_outside_space():
    with pytest.raises(errors.DomainError):
        ne.build_nested(sc.cantor_endpoint(C), 2, (3, 27), z=F(1, 2))


@pytest.mark.parametrize("qs", [(), (8, 8), (8, 3)])
def test_bad_sequences(qs):
    with pytest.raises(errors.InvalidArgument):
        ne.build_nested(sc.classic(), 2, qs)
