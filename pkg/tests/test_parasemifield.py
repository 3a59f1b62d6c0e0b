import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import forests
from treelex import tlex
from treelex.exceptions import CertificateNotFound, LengthMismatch, NonPositive, NotPrime
from treelex.forest import chain, singletons
from treelex.fuzz import random_assignment
from treelex.parasemifield import (
    GeneratorAssignment,
    cone_member,
    def2_check,
    def2_unit_from_cone,
    fallback_unit,
    find_interior_cone_point,
    graded_lex,
    monomial_eval,
    p_adic_valuation,
    padic_member,
    unwrap,
    wrap,
)
from treelex.tlex import element

ONE = singletons(1)
C2 = chain(2)


def ga(F, *gens):
    return GeneratorAssignment(F, tuple(element(F, g) for g in gens))


PM = ga(ONE, (1,), (-1,))


def test_semiring_examples():
    P = wrap(C2)
    a = element(C2, (1, 5))
    assert P.ps_add(a, a) == a
    assert P.ps_mul(a, element(C2, (0, -2))) == element(C2, (1, 3))
    assert P.ps_one == tlex.zero(C2)
    assert P.ps_pow(a, 3) == element(C2, (3, 15))
    assert P.ps_leq(element(C2, (0, 9)), a)


def test_unwrap_recovers_lgroup():
    rng = random.Random(1)
    for _ in range(1000):
        F = chain(3) if rng.random() < 0.5 else singletons(3)
        a, b = tlex.random_element(F, rng, 9), tlex.random_element(F, rng, 9)
        L = unwrap(wrap(F))
        assert L.meet(a, b) == tlex.meet(a, b)
        assert L.join(a, b) == tlex.join(a, b)
        assert L.add(a, b) == tlex.add(a, b)
        assert L.neg(a) == tlex.neg(a)
        assert L.zero == tlex.zero(F)


def test_monomial_examples():
    assert monomial_eval(PM, (0, 0)) == tlex.zero(ONE)
    assert monomial_eval(PM, (1, 0)) == element(ONE, (1,))
    assert monomial_eval(PM, (2, 3)) == element(ONE, (-1,))
    with pytest.raises(LengthMismatch):
        monomial_eval(PM, (1,))


def test_cone_examples():
    assert cone_member(PM, (1, 2))
    assert cone_member(PM, (0, 0))
    assert not cone_member(PM, (2, 1))


def test_interior_point_examples():
    assert find_interior_cone_point(PM, 6) == (0, 1)
    zeros = ga(C2, (0, 0), (0, 0))
    assert find_interior_cone_point(zeros, 0) == (0, 0)
    single = ga(ONE, (1,))
    assert find_interior_cone_point(single, 20) is None


def test_graded_lex_order():
    assert list(graded_lex(2, 2)) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    assert list(graded_lex(0, 3)) == [()]


def test_def2_examples():
    u = def2_unit_from_cone(PM, (0, 1))
    assert u == element(ONE, (-1,))
    assert def2_check(u, element(ONE, (7,)), 100) == 7
    assert def2_check(u, tlex.zero(ONE), 100) == 1
    fb = fallback_unit(C2)
    assert def2_check(fb, element(C2, (3, 100)), 100) == 4
    with pytest.raises(CertificateNotFound):
        def2_check(u, element(ONE, (7,)), 6)
    with pytest.raises(CertificateNotFound):
        def2_check(element(ONE, (1,)), element(ONE, (0,)), 50)


def test_def2_check_is_least():
    rng = random.Random(9)
    for _ in range(300):
        F = chain(rng.randint(1, 3))
        u = tlex.random_element(F, rng, 3)
        s = tlex.random_element(F, rng, 20)
        expected = next((n for n in range(1, 60) if tlex.leq(tlex.scale(n, u) + s, tlex.zero(F))), None)
        if expected is None:
            with pytest.raises(CertificateNotFound):
                def2_check(u, s, 59)
        else:
            assert def2_check(u, s, 59) == expected


def test_padic_examples():
    assert padic_member(4, 2)
    assert not padic_member(1, 2)
    assert padic_member(3, 2)
    assert p_adic_valuation(Fraction(9, 4), 3) == 2
    assert p_adic_valuation(Fraction(5, 12), 2) == -2
    with pytest.raises(NotPrime):
        padic_member(3, 4)
    with pytest.raises(NonPositive):
        padic_member(0, 2)
    with pytest.raises(NonPositive):
        padic_member(Fraction(-1, 2), 3)


def test_padic_set_is_closed_under_products():
    # spot check the semiring closure of the example set
    xs = [Fraction(a, b) for a in range(1, 30) for b in range(1, 30)]
    for p in (2, 3, 5):
        S = [x for x in xs if padic_member(x, p)]
        for x in S[:40]:
            for y in S[:40]:
                assert padic_member(x * y, p)


def test_assignment_json_round_trip():
    GA = ga(C2, (1, -2), (0, 3))
    assert GeneratorAssignment.from_json(GA.to_json()) == GA


@given(st.integers(0, 2 ** 32))
def test_absorbing_sum_property(seed):
    rng = random.Random(seed)
    F = chain(3)
    P = wrap(F)
    a = tlex.random_element(F, rng, 20)
    # b, c <= a forces a + b + c = a
    b = tlex.meet(a, tlex.random_element(F, rng, 20))
    c = tlex.meet(a, tlex.random_element(F, rng, 20))
    assert P.ps_add(P.ps_add(a, b), c) == a
    assert P.ps_add(a, b) == a


@given(forests(max_vertices=6), st.integers(0, 2 ** 32))
def test_join_below_unit_splits(F, seed):
    rng = random.Random(seed)
    s, t = tlex.random_element(F, rng, 3), tlex.random_element(F, rng, 3)
    z = tlex.zero(F)
    assert tlex.leq(tlex.join(s, t), z) == (tlex.leq(s, z) and tlex.leq(t, z))


@given(st.integers(0, 2 ** 32))
def test_cone_closed_under_addition(seed):
    rng = random.Random(seed)
    GA = random_assignment(rng)
    a = tuple(rng.randint(0, 3) for _ in range(GA.m))
    b = tuple(rng.randint(0, 3) for _ in range(GA.m))
    if cone_member(GA, a) and cone_member(GA, b):
        assert cone_member(GA, tuple(x + y for x, y in zip(a, b)))


@given(st.integers(0, 2 ** 32))
def test_fallback_unit_always_certifies(seed):
    rng = random.Random(seed)
    F = chain(rng.randint(1, 4))
    s = tlex.random_element(F, rng, 1000)
    u = fallback_unit(F)
    n = def2_check(u, s, 10 ** 4)
    assert 1 <= n <= max(1, 1 + s.coords[0])
    assert tlex.leq(tlex.scale(n, u) + s, tlex.zero(F))
    assert n == 1 or not tlex.leq(tlex.scale(n - 1, u) + s, tlex.zero(F))
