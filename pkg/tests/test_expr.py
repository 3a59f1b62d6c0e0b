import random

import pytest
from hypothesis import given, strategies as st

from treelex import tlex
from treelex.exceptions import ExpressionSyntaxError, ForestMismatch, UnboundName, UnknownOperatorInMode
from treelex.expr import Add, Join, Meet, Name, Neg, Scale, Zero, evaluate, names, parse, to_string
from treelex.forest import chain, random_forest
from treelex.tlex import element

C2 = chain(2)
ENV = {"g1": element(C2, (1, 0)), "g2": element(C2, (0, 1))}
G1, G2 = Name("g1"), Name("g2")


def test_parse_examples():
    assert parse("g1 v g2") == Join(G1, G2)
    assert parse("3*g1 + -(g2 ^ g1)") == Add(Scale(3, G1), Neg(Meet(G2, G1)))
    assert parse("g1 * inv(g2)", "semiring") == Add(G1, Neg(G2))


def test_precedence_and_associativity():
    assert parse("a + b v c ^ d") == Add(Name("a"), Join(Name("b"), Meet(Name("c"), Name("d"))))
    assert parse("a ^ b v c") == Join(Meet(Name("a"), Name("b")), Name("c"))
    assert parse("a + b + c") == Add(Add(Name("a"), Name("b")), Name("c"))
    assert parse("a v b v c") == Join(Join(Name("a"), Name("b")), Name("c"))
    assert parse("a + b * c", "semiring") == Join(Name("a"), Add(Name("b"), Name("c")))
    assert parse("v1 v v2") == Join(Name("v1"), Name("v2"))
    assert parse("0 + x") == Add(Zero(), Name("x"))
    assert parse("1 + x", "semiring") == Join(Zero(), Name("x"))


@pytest.mark.parametrize("src, mode, err, pos", [
    ("g1 * g2", "lgroup", UnknownOperatorInMode, 3),
    ("g1 v g2", "semiring", UnknownOperatorInMode, 3),
    ("inv(g1)", "lgroup", UnknownOperatorInMode, 0),
    ("-g1", "semiring", UnknownOperatorInMode, 0),
    ("g1 +", "lgroup", ExpressionSyntaxError, 4),
    ("(g1", "lgroup", ExpressionSyntaxError, 3),
    ("g1 g2", "lgroup", ExpressionSyntaxError, 3),
    ("g1 $ g2", "lgroup", ExpressionSyntaxError, 3),
    ("5", "lgroup", ExpressionSyntaxError, 0),
    ("0", "semiring", ExpressionSyntaxError, 0),
    ("--g1", "lgroup", ExpressionSyntaxError, 1),
    ("", "lgroup", ExpressionSyntaxError, 0),
])
def test_parse_errors(src, mode, err, pos):
    with pytest.raises(err) as info:
        parse(src, mode)
    assert info.value.position == pos


def test_evaluate_examples():
    assert evaluate(parse("g1 v g2"), ENV) == element(C2, (1, 0))
    assert evaluate(parse("g1 * inv(g1)", "semiring"), ENV) == tlex.zero(C2)
    assert evaluate(parse("2*g1"), ENV) == element(C2, (2, 0))
    assert evaluate(parse("0"), {}, C2) == tlex.zero(C2)
    with pytest.raises(UnboundName):
        evaluate(parse("g3 + g1"), ENV)
    with pytest.raises(ForestMismatch):
        evaluate(parse("g1 + h"), {**ENV, "h": element(chain(2, prefix="d"), (0, 0))})


def test_names():
    assert sorted(set(names(parse("a + -(b ^ 2*a)")))) == ["a", "b"]


NAME = st.sampled_from(["a", "b", "g1", "x_2"])


def lgroup_ast():
    leaf = st.one_of(NAME.map(Name), st.just(Zero()))
    return st.recursive(leaf, lambda sub: st.one_of(
        st.builds(Add, sub, sub), st.builds(Join, sub, sub), st.builds(Meet, sub, sub),
        st.builds(Neg, sub), st.builds(Scale, st.integers(0, 9), sub),
    ), max_leaves=12)


def semiring_ast():
    leaf = st.one_of(NAME.map(Name), st.just(Zero()))
    return st.recursive(leaf, lambda sub: st.one_of(
        st.builds(Add, sub, sub), st.builds(Join, sub, sub), st.builds(Neg, sub),
    ), max_leaves=12)


@given(lgroup_ast())
def test_lgroup_round_trip(e):
    assert parse(to_string(e)) == e


@given(semiring_ast())
def test_semiring_round_trip(e):
    assert parse(to_string(e, "semiring"), "semiring") == e


@given(lgroup_ast(), st.integers(0, 2 ** 32))
def test_modes_agree(e, seed):
    rng = random.Random(seed)
    F = random_forest(rng, rng.randint(1, 6))
    env = {n: tlex.random_element(F, rng, 50) for n in ["a", "b", "g1", "x_2"]}
    lg = evaluate(parse(to_string(e, "lgroup")), env, F)
    sr = evaluate(parse(to_string(e, "semiring"), "semiring"), env, F)
    assert lg == sr == evaluate(e, env, F)


def test_semiring_plus_is_join():
    rng = random.Random(1)
    for _ in range(200):
        env = {"a": tlex.random_element(C2, rng, 9), "b": tlex.random_element(C2, rng, 9)}
        assert evaluate(parse("a + b", "semiring"), env) == evaluate(parse("a v b"), env)
