import random
from fractions import Fraction
from itertools import combinations

import pytest

from critfan.errors import DeltaTooLarge, NotInFan, OutsideSupport, PointednessViolation, RefinementObstruction
from critfan.exactgeom import (
    Cone,
    Fan,
    Sign,
    cone_partition,
    delta_max,
    dd_convert,
    fan_from_hyperplanes,
    is_valid_fan,
    refinement_parent,
    relint_sign,
    star_fan,
    stellar_refine_to_simplicial,
)
from critfan.exactgeom import linalg as la

D4_ANTI = [(-1, 1, 0, 0), (0, -1, 1, 0), (0, 0, -1, 1), (0, 0, -1, -1)]
UNITS4 = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
SQUARE = Cone.from_rays([(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)])


@pytest.fixture
def quadrants():
    return fan_from_hyperplanes(Cone.whole(2), [(1, 0), (0, 1)])


@pytest.fixture
def d4_fan():
    return fan_from_hyperplanes(dd_convert(D4_ANTI), UNITS4 + [tuple(-x for x in u) for u in UNITS4])


def test_quadrants(quadrants):
    assert len(quadrants.maximal_cones) == 4
    assert len(quadrants.rays) == 4
    assert len(quadrants.cones) == 9
    assert is_valid_fan(quadrants) == []


def test_d4_weight_fan(d4_fan):
    assert len(d4_fan.maximal_cones) == 2
    v = [tuple([-1] * i + [0] * (4 - i)) for i in range(1, 5)] + [(-1, -1, -1, 1)]
    assert set(d4_fan.rays) == set(v)
    assert all(c.is_simplicial for c in d4_fan.cones)
    assert is_valid_fan(d4_fan) == []


def test_pointedness_enforced():
    with pytest.raises(PointednessViolation):
        fan_from_hyperplanes(Cone.whole(2), [(1, 0)])


def test_locate(quadrants):
    assert quadrants.locate((3, 5)).rays == ((0, 1), (1, 0))
    assert quadrants.locate((0, -2)).rays == ((0, -1),)
    assert quadrants.locate((0, 0)).rays == ()
    half = fan_from_hyperplanes(Cone.from_rays([(1, 0), (0, 1)]), [(1, -1)])
    with pytest.raises(OutsideSupport):
        half.locate((-1, 0))


def test_invalid_overlap():
    bad = Fan.from_maximal([Cone.from_rays([(1, 0), (1, 2)]), Cone.from_rays([(1, 1), (0, 1)])])
    diags = is_valid_fan(bad)
    assert any("intersection not a common face" in d for d in diags)


def test_missing_face():
    q = Cone.from_rays([(1, 0), (0, 1)])
    f = Fan(2, (Cone.zero(2), Cone.from_rays([(1, 0)]), q), q)
    assert any("not face-closed" in d for d in is_valid_fan(f))


def test_uncovered_support():
    q = Cone.from_rays([(1, 0), (0, 1)])
    f = Fan.from_maximal([Cone.from_rays([(1, 0), (1, 1)])], q)
    assert is_valid_fan(f)


def test_star_of_ray_in_quadrants(quadrants):
    s = star_fan(quadrants, quadrants.get([(1, 0)]))
    assert s.fan.ambient == 1
    assert sorted(c.rays for c in s.fan.cones) == [(), ((-1,),), ((1,),)]
    assert is_valid_fan(s.fan) == []


def test_star_of_maximal(quadrants):
    s = star_fan(quadrants, quadrants.get([(1, 0), (0, 1)]))
    assert s.fan.ambient == 0
    assert [c.rays for c in s.fan.cones] == [()]


def test_star_d4(d4_fan):
    s = star_fan(d4_fan, d4_fan.get([(-1, 0, 0, 0)]))
    assert len(s.fan.maximal_cones) == 2
    assert all(c.dim == 3 and c.is_pointed for c in s.fan.maximal_cones)
    # brute force: maximal cones containing v_1
    assert len([c for c in d4_fan.maximal_cones if (-1, 0, 0, 0) in c.rays]) == 2


def test_star_not_in_fan(quadrants):
    with pytest.raises(NotInFan):
        star_fan(quadrants, Cone.from_rays([(1, 1)]))


def test_refine_simplicial_is_fixpoint(d4_fan):
    r = stellar_refine_to_simplicial(d4_fan)
    assert [c.rays for c in r.cones] == [c.rays for c in d4_fan.cones]


def test_refine_square_pull():
    f = Fan.from_maximal([SQUARE])
    r = stellar_refine_to_simplicial(f)
    assert len(r.maximal_cones) == 2
    assert set(r.rays) == set(SQUARE.rays)
    assert is_valid_fan(r) == []


def _brute_triangulations_of_square():
    # the two diagonals give the only triangulations without new vertices
    rays = SQUARE.rays
    out = []
    for a, b in combinations(rays, 2):
        if Cone.from_rays([a, b]).is_face_of(SQUARE):
            continue
        others = [r for r in rays if r not in (a, b)]
        out.append({tuple(sorted((a, b, o))) for o in others})
    return out


def test_refine_square_matches_a_brute_force_triangulation():
    r = stellar_refine_to_simplicial(Fan.from_maximal([SQUARE]))
    got = {c.rays for c in r.maximal_cones}
    assert got in _brute_triangulations_of_square()


def test_refine_interior_avoids_functional():
    f = Fan.from_maximal([SQUARE])
    r = stellar_refine_to_simplicial(f, avoid=(1, 1, 0), strategy="interior")
    new = set(r.rays) - set(SQUARE.rays)
    assert new and all(la.dot((1, 1, 0), v) != 0 for v in new)
    assert is_valid_fan(r) == []


def test_refine_obstruction():
    f = Fan.from_maximal([SQUARE])
    with pytest.raises(RefinementObstruction):
        stellar_refine_to_simplicial(f, avoid=(0, 0, 0), strategy="interior")


def _random_point(c, rng):
    coeffs = [Fraction(rng.randint(1, 9), rng.randint(1, 5)) for _ in c.rays]
    return tuple(sum(a * r[i] for a, r in zip(coeffs, c.rays)) for i in range(c.ambient))


@pytest.mark.parametrize("strategy", ["pull", "interior"])
def test_refinement_soundness(strategy):
    pyramid = Cone.from_rays([(1, 0, 0, 1), (0, 1, 0, 1), (-1, 0, 0, 1), (0, -1, 0, 1), (0, 0, 1, 1)])
    f = Fan.from_maximal([pyramid])
    r = stellar_refine_to_simplicial(f, strategy=strategy)
    assert all(c.is_simplicial for c in r.cones)
    assert is_valid_fan(r) == []
    parent = refinement_parent(f, r)
    for c in r.cones:
        p = parent[c.rays]
        assert p.contains_cone(c)
        assert p.in_relint(c.relint_point()) or not c.rays
    rng = random.Random(7)
    for _ in range(50):
        x = _random_point(pyramid, rng)
        r.locate(x)  # covered by the refinement
    assert r.support == f.support


def test_partition_quadrant():
    q = Cone.from_rays([(1, 0), (0, 1)])
    assert delta_max(q) == Fraction(1, 4)
    regions = cone_partition(q, Fraction(1, 4))
    assert len(regions) == 3
    assert {len(r.facets) for r in regions} == {0, 1}
    with pytest.raises(DeltaTooLarge):
        cone_partition(q, 1)


def test_partition_simplicial_3():
    c = Cone.from_rays([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert len(cone_partition(c)) == 7


def test_partition_covering():
    c = dd_convert(D4_ANTI)
    regions = cone_partition(c)
    rng = random.Random(3)
    for _ in range(1000):
        x = _random_point(c, rng)
        hits = [r for r in regions if r.contains(x)]
        assert len(hits) == 1
        # the region's face is the closest in the labelled sense: far from facets outside I_D
        h = hits[0]
        tight = [i for i, g in enumerate(c.ineqs) if all(la.dot(g, r) == 0 for r in h.face.rays)]
        assert set(tight) == set(h.facets)


def test_sign_constancy_on_random_fans():
    rng = random.Random(11)
    for _ in range(20):
        hyps = [tuple(rng.randint(-2, 2) for _ in range(3)) for _ in range(rng.randint(3, 6))]
        hyps += [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        f = fan_from_hyperplanes(Cone.whole(3), hyps)
        assert is_valid_fan(f) == []
        for c in f.cones:
            assert all(relint_sign(h, c) is not Sign.MIXED for h in hyps)
