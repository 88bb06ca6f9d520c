import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from critfan.arrangement import (
    ExponentArrangement,
    build_arrangement,
    check_compatibility,
    derivative_arrangement,
    eval_exponent,
    refine_arrangement,
    shift,
)
from critfan.errors import CentralTorusActsTrivially, NotInFan, OutsideSupport
from critfan.exactgeom import Cone, Fan, is_valid_fan
from critfan.randomized import random_instance
from critfan.repspec import Adjoint, DirectWeights, Mult, Std, Sum, weights_of
from critfan.rootdata import GroupSpec, build_root_datum

F = Fraction


def arr(factors, e):
    rd = build_root_datum(GroupSpec(tuple(factors)))
    return build_arrangement(rd, weights_of(e, rd)), rd


def pair(chi, v):
    return sum(F(x) * y for x, y in zip(chi, v))


@pytest.fixture
def tate():
    return arr([("Torus", 1)], Std())[0]


def test_tate_exponents(tate):
    f = tate.fan
    assert len(f.cones) == 3
    assert tate.chi(f.get([(1,)])) == (F(-1),)
    assert tate.chi(f.get([(-1,)])) == (F(0),)
    assert tate.chi(f.get([])) == (F(0),)


def test_so8_exponents():
    for n in (1, 2, 5):
        a, _ = arr([("SO_even", 4)], Mult(Std(), n))
        for i in range(1, 5):
            v = tuple([-1] * i + [0] * (4 - i))
            c = a.fan.get([v])
            assert pair(a.chi(c), v) == n * i * -1


def test_so7_chamber():
    a, rd = arr([("SO_odd", 3)], Sum(Adjoint(), Std()))
    (top,) = a.fan.maximal_cones
    assert top.dim == 3
    assert a.chi(top) == tuple(F(x + 1) for x in rd.two_rho)


def test_central_trivial_rejected():
    with pytest.raises(CentralTorusActsTrivially):
        arr([("Torus", 1)], DirectWeights([(0,)]))


def test_singletons_and_compatible():
    a, _ = arr([("SO_even", 4)], Mult(Std(), 2))
    assert all(len(ms) == 1 for ms in a.exponents.values())
    assert check_compatibility(a) == []


def test_hand_built_violation():
    q = Cone.from_rays([(1, 0), (0, 1)])
    fan = Fan.from_maximal([q])
    good = {
        q.rays: (((F(-1), F(-1)), 1),),
        ((1, 0),): (((F(-1), F(0)), 1),),
        ((0, 1),): (((F(0), F(-1)), 1),),
        (): (((F(0), F(0)), 1),),
    }
    a = ExponentArrangement(fan, good)
    assert check_compatibility(a) == []
    bad = dict(good)
    bad[((1, 0),)] = (((F(0), F(0)), 1),)
    diags = check_compatibility(a.with_exponents(bad))
    assert len(diags) == 1
    assert "(1, 0)" in diags[0]


def test_max_multiplicity_rule():
    # two exponents with the same restriction to {0}: the face needs max(1, 2) = 2, not 3
    a, _ = arr([("Torus", 1)], Std())
    ex = dict(a.exponents)
    ex[((1,),)] = (((F(-1),), 1), ((F(4),), 2))
    ex[()] = (((F(0),), 2),)
    ex[((-1,),)] = (((F(0),), 2),)
    assert check_compatibility(a.with_exponents(ex)) == []
    ex[()] = (((F(0),), 1),)
    assert len(check_compatibility(a.with_exponents(ex))) == 2


def test_shift(tate):
    s = shift(tate, (1,))
    assert s.chi(s.fan.get([(1,)])) == (F(0),)
    assert s.chi(s.fan.get([(-1,)])) == (F(1),)
    assert check_compatibility(s) == []
    assert shift(tate, (0,)).exponents == tate.exponents
    assert shift(shift(tate, (F(2, 3),)), (F(-2, 3),)).exponents == tate.exponents


def test_derivative(tate):
    d0 = derivative_arrangement(tate, tate.fan.get([]))
    assert len(d0.fan.cones) == len(tate.fan.cones)
    d1 = derivative_arrangement(tate, tate.fan.get([(1,)]))
    assert d1.fan.ambient == 0
    assert list(d1.exponents.values()) == [(((F(-1),), 1),)]
    with pytest.raises(NotInFan):
        derivative_arrangement(tate, Cone.whole(1))


def test_derivative_so8():
    a, _ = arr([("SO_even", 4)], Mult(Std(), 2))
    v1 = a.fan.get([(-1, 0, 0, 0)])
    d = derivative_arrangement(a, v1)
    assert is_valid_fan(d.fan) == []
    assert len(d.fan.maximal_cones) == 2
    for rays, ms in d.exponents.items():
        assert ms == a.exponents_of(d.star.source[rays])
        assert set(v1.rays) <= set(d.star.source[rays].rays)


def test_eval(tate):
    assert eval_exponent(tate, (1,)) == -1
    assert eval_exponent(tate, (-1,)) == 0
    a, _ = arr([("SO_even", 4)], Mult(Std(), 2))
    assert eval_exponent(a, (-1, -1, -1, 0)) == -6
    with pytest.raises(OutsideSupport):
        eval_exponent(a, (1, 0, 0, 0))


def _random_arrangements(count, seed):
    rng = random.Random(seed)
    for _ in range(count):
        g, e = random_instance(rng, max_rank=3, max_weights=6)
        rd = build_root_datum(g)
        yield build_arrangement(rd, weights_of(e, rd)), rd


def test_face_restriction_and_antidominance():
    for a, rd in _random_arrangements(15, 7):
        for c in a.fan.cones:
            for r in c.rays:
                assert pair(a.chi(c), r) == pair(a.chi(a.fan.get([r])), r)
        if a.weights.is_self_dual():
            for c in a.fan.cones:
                assert all(pair(a.chi(c), v) <= 0 for v in c.rays)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["pull", "interior"]))
def test_refinement_inheritance(seed, strategy):
    (a, rd), = _random_arrangements(1, seed)
    r = refine_arrangement(a, strategy=strategy)
    assert all(c.is_simplicial for c in r.fan.cones)
    rng = random.Random(seed)
    for _ in range(10):
        coeffs = [F(rng.randint(0, 5), rng.randint(1, 4)) for _ in a.fan.support.rays]
        p = tuple(sum(c * v[i] for c, v in zip(coeffs, a.fan.support.rays)) for i in range(a.fan.ambient))
        assert eval_exponent(r, p) == eval_exponent(a, p)
