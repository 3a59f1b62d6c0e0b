import itertools
import random

import pytest
from hypothesis import given

from conftest import forests, relabelled
from treelex.exceptions import (
    CycleDetected,
    DanglingParent,
    DuplicateVertex,
    NotInitialSegment,
    RootMismatch,
    UnknownVertex,
)
from treelex.forest import (
    RootedForest,
    ahu_canonical,
    chain,
    iso,
    next_vertices,
    random_forest,
    singletons,
    star,
    subtree,
    validate,
)

ABC = validate({"vertices": ["a", "b", "c"], "parent": {"b": "a", "c": "b"}, "roots": ["a"]})
STAR = validate({"vertices": ["a", "b", "c"], "parent": {"b": "a", "c": "a"}, "roots": ["a"]})


def test_validate_examples():
    F = validate({"vertices": ["a"], "parent": {}, "roots": ["a"]})
    assert F.vertices == ("a",) and F.roots == ("a",)
    G = validate({"vertices": ["a", "b"], "parent": {"b": "a"}, "roots": ["a"]})
    assert G.parent == {"b": "a"}
    with pytest.raises(CycleDetected):
        validate({"vertices": ["a", "b"], "parent": {"a": "b", "b": "a"}, "roots": []})


@pytest.mark.parametrize("raw, err", [
    ({"vertices": ["a", "a"], "parent": {}, "roots": ["a"]}, DuplicateVertex),
    ({"vertices": ["a"], "parent": {"a": "z"}, "roots": []}, DanglingParent),
    ({"vertices": ["a", "b"], "parent": {"b": "a"}, "roots": ["a", "b"]}, RootMismatch),
    ({"vertices": ["a", "b"], "parent": {}, "roots": ["a"]}, RootMismatch),
    ({"vertices": ["a"], "parent": {"a": "a"}, "roots": []}, CycleDetected),
    ({"vertices": ["r", "a", "b", "c"], "parent": {"a": "b", "b": "c", "c": "a"}, "roots": ["r"]},
     CycleDetected),
])
def test_validate_errors(raw, err):
    with pytest.raises(err):
        validate(raw)


def test_empty_forest_is_allowed():
    F = validate({"vertices": [], "parent": {}, "roots": []})
    assert len(F) == 0
    assert ahu_canonical(F) == ""


def test_json_round_trip():
    F = random_forest(random.Random(5), 9)
    assert RootedForest.from_json(F.to_json()) == F


def test_next_vertices_examples():
    assert next_vertices(ABC, {"a"}) == {"b"}
    assert next_vertices(ABC, set()) == {"a"}
    assert next_vertices(STAR, {"a"}) == {"b", "c"}


def test_next_vertices_needs_initial_segment():
    with pytest.raises(NotInitialSegment):
        next_vertices(ABC, {"b"})
    F = singletons(2)
    with pytest.raises(NotInitialSegment):
        next_vertices(F, set())
    assert next_vertices(F, set(), root="r1") == {"r1"}


def test_subtree_examples():
    assert subtree(ABC, "b") == {"b", "c"}
    assert subtree(ABC, "a") == {"a", "b", "c"}
    assert subtree(ABC, "c") == {"c"}
    with pytest.raises(UnknownVertex):
        subtree(ABC, "zz")


def test_ahu_examples():
    assert ahu_canonical(validate({"vertices": ["a"], "parent": {}, "roots": ["a"]})) == "()"
    assert ahu_canonical(chain(2)) != ahu_canonical(star(2))
    two = validate({"vertices": ["x", "y"], "parent": {}, "roots": ["x", "y"]})
    owt = validate({"vertices": ["x", "y"], "parent": {}, "roots": ["y", "x"]})
    assert ahu_canonical(two) == ahu_canonical(owt)
    assert ahu_canonical(chain(3)) == "((()))"
    assert ahu_canonical(star(2)) == "(()())"


def test_iso_examples():
    res = iso(ABC, ABC)
    assert res and res.mapping == {v: v for v in ABC.vertices}
    assert not iso(chain(3), star(2))
    F = validate({"vertices": ["a", "b", "s"], "parent": {"b": "a"}, "roots": ["a", "s"]})
    G = validate({"vertices": ["s", "a", "b"], "parent": {"b": "a"}, "roots": ["s", "a"]})
    assert iso(F, G)


def _all_initial_segments(F, root):
    tree = sorted(F.tree(root))
    for r in range(len(tree) + 1):
        for seg in itertools.combinations(tree, r):
            s = set(seg)
            if all(F.parent.get(v) in s for v in s if v in F.parent):
                yield s


@given(forests(max_vertices=7))
def test_next_vertices_extends_segments(F):
    for root in F.roots:
        for seg in _all_initial_segments(F, root):
            grown = seg | next_vertices(F, seg, root=root)
            assert all(F.parent.get(v) in grown for v in grown if v in F.parent)
            assert grown > seg or seg == set(F.tree(root))


@given(forests(max_vertices=10))
def test_sibling_subtrees_are_disjoint(F):
    for v in F.vertices:
        kids = F.children[v]
        for a, b in itertools.combinations(kids, 2):
            assert not subtree(F, a) & subtree(F, b)
        assert v in subtree(F, v)


def _ahu_oracle(F):
    """Independent canonical form: recursively sorted nested tuples."""
    def enc(v):
        return tuple(sorted(enc(c) for c in F.children[v]))
    return tuple(sorted(enc(r) for r in F.roots))


def test_relabelling_invariance():
    rng = random.Random(2024)
    for _ in range(100):
        F = random_forest(rng, rng.randint(1, 12))
        s = ahu_canonical(F)
        for _ in range(10):
            G, mapping = relabelled(F, rng)
            assert ahu_canonical(G) == s
            res = iso(F, G)
            assert res
            m = res.mapping
            assert sorted(m.values()) == sorted(G.vertices)
            assert {m[r] for r in F.roots} == set(G.roots)
            assert all(G.parent[m[c]] == m[p] for c, p in F.parent.items())


def test_canonical_string_agrees_with_oracle():
    rng = random.Random(7)
    sample = [random_forest(rng, rng.randint(1, 7)) for _ in range(150)]
    for F, G in itertools.combinations(sample[:60], 2):
        assert (ahu_canonical(F) == ahu_canonical(G)) == (_ahu_oracle(F) == _ahu_oracle(G))


def test_iso_is_an_equivalence():
    rng = random.Random(11)
    sample = [random_forest(rng, rng.randint(1, 5)) for _ in range(25)]
    for F in sample:
        assert iso(F, F)
    for F, G in itertools.permutations(sample, 2):
        assert bool(iso(F, G)) == bool(iso(G, F))
    for F, G, H in itertools.permutations(sample[:12], 3):
        if iso(F, G) and iso(G, H):
            assert iso(F, H)
