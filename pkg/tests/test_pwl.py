import itertools
import random
from fractions import Fraction as Fr

import pytest

from treelex.exceptions import DimensionMismatch, OutOfBox, SizeOverflow, UnsupportedDimension
from treelex.fuzz import random_convex, random_simplex
from treelex.geometry import Delete, GeometricComplex, Subdivide, WeightedComplex, apply_stellar_script
from treelex.pwl import (
    AffineForm,
    PwlFunction,
    affine,
    constant,
    convex_check,
    eval_at,
    ideal_member_at_depth,
    projection,
    pw_add,
    pw_join,
    pw_meet,
    pw_neg,
    vanishes_on,
)

HALF = Fr(1, 2)
X = projection(1, 0)
ONE_MINUS_X = affine([-1], 1)


def fn(n, terms):
    return PwlFunction.of(n, [[AffineForm(tuple(c), k) for c, k in t] for t in terms])


def random_pwl(rng, n, outer=3, inner=2, bound=3):
    return fn(n, [[([rng.randint(-bound, bound) for _ in range(n)], rng.randint(-bound, bound))
                   for _ in range(rng.randint(1, inner))] for _ in range(rng.randint(1, outer))])


def random_point(rng, n, q=16):
    return tuple(Fr(rng.randint(0, q), q) for _ in range(n))


def test_eval_examples():
    f = fn(1, [[([2], -1), ([1], 0)]])
    assert eval_at(f, [Fr(1, 3)]) == Fr(-1, 3)
    assert eval_at(constant(2, 1), [Fr(1, 7), 1]) == 1
    assert eval_at(projection(2, 0), [HALF, 1]) == HALF
    with pytest.raises(DimensionMismatch):
        eval_at(f, [0, 0])
    with pytest.raises(OutOfBox):
        eval_at(f, [Fr(3, 2)])


def test_operation_examples():
    s = pw_add(X, ONE_MINUS_X)
    assert all(s((Fr(k, 9),)) == 1 for k in range(10))
    j = pw_join(X, ONE_MINUS_X)
    assert j((HALF,)) == HALF and j((0,)) == 1
    rng = random.Random(0)
    f = random_pwl(rng, 2)
    g = pw_neg(pw_neg(f))
    for _ in range(200):
        p = random_point(rng, 2)
        assert g(p) == f(p)
    with pytest.raises(DimensionMismatch):
        pw_add(X, projection(2, 0))


def test_pointwise_soundness():
    rng = random.Random(1)
    for n in (1, 2, 3):
        f, g = random_pwl(rng, n), random_pwl(rng, n)
        ops = {
            "add": (pw_add(f, g), lambda a, b: a + b),
            "join": (pw_join(f, g), max),
            "meet": (pw_meet(f, g), min),
            "neg": (pw_neg(f), lambda a, b: -a),
        }
        for _ in range(1000):
            p = random_point(rng, n, 60)
            a, b = f(p), g(p)
            for h, op in ops.values():
                assert h(p) == op(a, b)


def test_lattice_group_laws_pointwise():
    rng = random.Random(2)
    for _ in range(10):
        a, b, c = (random_pwl(rng, 2, outer=2) for _ in range(3))
        left = pw_add(a, pw_join(b, c))
        right = pw_join(pw_add(a, b), pw_add(a, c))
        dist = pw_meet(a, pw_join(b, c))
        dist_r = pw_join(pw_meet(a, b), pw_meet(a, c))
        for _ in range(100):
            p = random_point(rng, 2)
            assert left(p) == right(p)
            assert dist(p) == dist_r(p)


def test_size_cap():
    f = fn(1, [[([k], j) for j in range(3)] for k in range(12)])
    with pytest.raises(SizeOverflow):
        pw_neg(f)


def test_normal_form_drops_dominated_terms():
    f = fn(1, [[([1], 0)], [([1], 0), ([2], -1)]])
    assert f.terms == ((AffineForm((1,), 0),),)


def test_json_round_trip():
    f = random_pwl(random.Random(3), 2)
    assert PwlFunction.from_json(f.to_json()) == f


def test_convex_examples():
    unit = [(0,), (1,)]
    assert not convex_check(pw_meet(X, ONE_MINUS_X), unit)
    assert convex_check(pw_join(X, ONE_MINUS_X), unit)
    assert convex_check(affine([3, -2], 5), [(0, 0), (1, 0), (0, 1)])
    assert convex_check(pw_meet(X, ONE_MINUS_X), [(0,), (HALF,)])
    with pytest.raises(UnsupportedDimension):
        convex_check(projection(3, 0), [(0, 0, 0), (1, 0, 0)])


def _midpoint_violation(f, S, rng, tries=400):
    for _ in range(tries):
        w1 = [Fr(rng.randint(0, 8)) for _ in S]
        w2 = [Fr(rng.randint(0, 8)) for _ in S]
        if not sum(w1) or not sum(w2):
            continue
        x = tuple(sum(w * p[i] for w, p in zip(w1, S)) / sum(w1) for i in range(len(S[0])))
        y = tuple(sum(w * p[i] for w, p in zip(w2, S)) / sum(w2) for i in range(len(S[0])))
        mid = tuple((a + b) / 2 for a, b in zip(x, y))
        if 2 * f.value(mid) > f.value(x) + f.value(y):
            return True
    return False


def test_convex_check_agrees_with_sampling():
    rng = random.Random(4)
    verdicts = set()
    for _ in range(150):
        n = rng.randint(1, 2)
        f = random_pwl(rng, n)
        S = random_simplex(rng, n)
        verdict = convex_check(f, S)
        verdicts.add(verdict)
        if _midpoint_violation(f, S, rng):
            assert not verdict
        if not verdict:
            # a non-convex PWL function has a violation near some fold; dense sampling finds it
            assert _midpoint_violation(f, S, rng, tries=4000)
    assert verdicts == {True, False}


def test_convex_closure_small():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(1, 2)
        f, g = random_convex(rng, n), random_convex(rng, n)
        S = random_simplex(rng, n)
        assert convex_check(f, S) and convex_check(g, S)
        assert convex_check(pw_add(f, g), S)
        assert convex_check(pw_join(f, g), S)


def segment(a, b):
    return GeometricComplex.from_simplexes(1, [[(a,), (b,)]])


def test_vanish_examples():
    f = fn(1, [[([2], -1)], [([0], 0)]])
    assert vanishes_on(f, segment(0, HALF))
    assert not vanishes_on(f, segment(0, 1))
    assert vanishes_on(constant(2, 0), GeometricComplex.from_simplexes(2, [[(0, 0), (1, 0), (0, 1)]]))
    assert vanishes_on(X, GeometricComplex.from_simplexes(1, [[(0,)]]))
    assert not vanishes_on(X, GeometricComplex.from_simplexes(1, [[(HALF,)]]))
    with pytest.raises(UnsupportedDimension):
        vanishes_on(projection(3, 0), GeometricComplex.from_simplexes(3, [[(0, 0, 0)]]))


def _sample_simplex(S, q):
    k = len(S)
    for w in itertools.product(range(q + 1), repeat=k - 1):
        if sum(w) <= q:
            lam = [Fr(x, q) for x in w] + [1 - Fr(sum(w), q)]
            yield tuple(sum(l * p[i] for l, p in zip(lam, S)) for i in range(len(S[0])))


def test_vanish_agrees_with_dense_sampling():
    rng = random.Random(6)
    verdicts = set()
    for _ in range(60):
        n = rng.randint(1, 2)
        # max(0, a) and min(0, a) style functions vanish on sizeable regions
        a = random_pwl(rng, n, outer=2, inner=2, bound=2)
        f = pw_join(a, constant(n, 0)) if rng.random() < 0.5 else pw_meet(a, constant(n, 0))
        S = random_simplex(rng, n)
        K = GeometricComplex.from_simplexes(n, [S])
        verdict = vanishes_on(f, K)
        verdicts.add(verdict)
        sampled_zero = all(f.value(p) == 0 for p in _sample_simplex(S, 64))
        if not sampled_zero:
            assert not verdict
    assert verdicts == {True, False}


def _edge_stages():
    W = WeightedComplex.from_maximal(["v1", "v2"], {"v1": 1, "v2": 1}, [["v1", "v2"]])
    script = [
        Subdivide(("v1", "v2"), "a"),
        Delete(frozenset({"a", "v2"})),
        Delete(frozenset({"v2"})),
        Delete(frozenset({"v1", "a"})),
        Delete(frozenset({"a"})),
    ]
    return apply_stellar_script(W, script)


def test_ideal_examples():
    stages = _edge_stages()
    last = len(stages) - 1
    f = affine([-1, 0], 1)
    assert set(stages[last].delta.maximal()) == {frozenset({(1, 0)})}
    assert ideal_member_at_depth(f, stages, last)
    assert not ideal_member_at_depth(f, stages, 0)
    assert ideal_member_at_depth(constant(2, 0), stages, 0)
    assert not any(ideal_member_at_depth(constant(2, 1), stages, i) for i in range(len(stages)))
    with pytest.raises(IndexError):
        ideal_member_at_depth(f, stages, len(stages))
