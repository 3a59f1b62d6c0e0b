"""Finite rooted forests: validation, initial segments, subtrees, AHU canonical form.

A forest is stored as an ordered vertex tuple, a child -> parent mapping and
an ordered tuple of roots. The vertex order fixes coordinate positions for
group elements (see :mod:`treelex.tlex`) but plays no role in isomorphism.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

from treelex.exceptions import (
    CycleDetected,
    DanglingParent,
    DuplicateVertex,
    NotInitialSegment,
    RootMismatch,
    UnknownVertex,
)

__all__ = [
    "RootedForest",
    "IsoResult",
    "validate",
    "next_vertices",
    "subtree",
    "ahu_canonical",
    "iso",
    "chain",
    "star",
    "singletons",
    "random_forest",
]


@dataclass(frozen=True, eq=False)
class RootedForest:
    """A validated finite rooted forest. Build instances with :func:`validate`."""

    vertices: tuple[str, ...]
    parent: Mapping[str, str]
    roots: tuple[str, ...]
    _index: dict = field(repr=False, compare=False)

    def __eq__(self, other):
        if not isinstance(other, RootedForest):
            return NotImplemented
        return (
            self is other
            or (self.vertices == other.vertices
                and self.roots == other.roots
                and dict(self.parent) == dict(other.parent))
        )

    def __hash__(self):
        return hash((self.vertices, self.roots, frozenset(self.parent.items())))

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return v in self._index

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnknownVertex(v) from None

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        kids: dict[str, list[str]] = {v: [] for v in self.vertices}
        for v in self.vertices:
            p = self.parent.get(v)
            if p is not None:
                kids[p].append(v)
        return {v: tuple(c) for v, c in kids.items()}

    @cached_property
    def root_of(self) -> dict[str, str]:
        out = {}
        for r in self.roots:
            for u in self._walk(r):
                out[u] = r
        return out

    @cached_property
    def depth(self) -> dict[str, int]:
        out = {}
        for r in self.roots:
            out[r] = 0
            for u in self._walk(r):
                if u != r:
                    out[u] = out[self.parent[u]] + 1
        return out

    def _walk(self, w: str) -> list[str]:
        """Preorder listing of the subtree rooted at ``w``."""
        out, stack = [], [w]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self.children[u]))
        return out

    @cached_property
    def _subtree_idx(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(self._index[u] for u in self._walk(v)) for v in self.vertices
        )

    @cached_property
    def _children_idx(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(self._index[c] for c in self.children[v]) for v in self.vertices
        )

    @cached_property
    def _roots_idx(self) -> tuple[int, ...]:
        return tuple(self._index[r] for r in self.roots)

    def ancestors(self, v: str) -> list[str]:
        """Strict ancestors of ``v``, nearest first."""
        self.index(v)
        out = []
        while v in self.parent:
            v = self.parent[v]
            out.append(v)
        return out

    def tree(self, root: str) -> frozenset[str]:
        if root not in self.roots:
            raise UnknownVertex(root)
        return frozenset(self._walk(root))

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "parent": {v: self.parent[v] for v in self.vertices if v in self.parent},
            "roots": list(self.roots),
        }

    @classmethod
    def from_json(cls, raw: Mapping) -> "RootedForest":
        return validate(raw)

    def relabel(self, mapping: Mapping[str, str], order: Iterable[str] | None = None,
                root_order: Iterable[str] | None = None) -> "RootedForest":
        """Rename vertices through ``mapping`` (a bijection)."""
        verts = list(order) if order is not None else [mapping[v] for v in self.vertices]
        roots = list(root_order) if root_order is not None else [mapping[r] for r in self.roots]
        return validate({
            "vertices": verts,
            "parent": {mapping[c]: mapping[p] for c, p in self.parent.items()},
            "roots": roots,
        })


def validate(raw: Mapping) -> RootedForest:
    """Check a ``{"vertices", "parent", "roots"}`` description and build a forest."""
    verts = [str(v) for v in raw.get("vertices", [])]
    parent = {str(c): str(p) for c, p in dict(raw.get("parent", {})).items()}
    roots = [str(r) for r in raw.get("roots", [])]

    index: dict[str, int] = {}
    for i, v in enumerate(verts):
        if v in index:
            raise DuplicateVertex(f"vertex {v!r} listed twice")
        index[v] = i
    for c, p in parent.items():
        if c not in index:
            raise DanglingParent(f"parent entry for unknown vertex {c!r}")
        if p not in index:
            raise DanglingParent(f"{c!r} has unknown parent {p!r}")
        if c == p:
            raise CycleDetected(f"{c!r} is its own parent")

    # every vertex must reach a parentless vertex
    state: dict[str, int] = {}
    for v in verts:
        path = []
        u = v
        while u in parent and state.get(u) != 2:
            if state.get(u) == 1:
                raise CycleDetected(f"cycle through {u!r}")
            state[u] = 1
            path.append(u)
            u = parent[u]
        for w in path:
            state[w] = 2

    parentless = [v for v in verts if v not in parent]
    if len(set(roots)) != len(roots):
        raise RootMismatch("root listed twice")
    if set(roots) != set(parentless):
        raise RootMismatch(
            f"roots {sorted(roots)} differ from parentless vertices {sorted(parentless)}"
        )
    return RootedForest(tuple(verts), parent, tuple(roots), index)


def _tree_root(F: RootedForest, seg: frozenset[str], root: str | None) -> str:
    if root is not None:
        if root not in F.roots:
            raise UnknownVertex(root)
        return root
    if seg:
        rs = {F.root_of[v] for v in seg}
        if len(rs) == 1:
            return rs.pop()
        raise NotInitialSegment("segment spans several trees; pass root=")
    if len(F.roots) == 1:
        return F.roots[0]
    raise NotInitialSegment("empty segment in a forest with several trees; pass root=")


def next_vertices(F: RootedForest, seg: Iterable[str], root: str | None = None) -> frozenset[str]:
    """Frontier of an initial segment ``seg`` of one tree of ``F``.

    For an empty segment the frontier is the root of the tree.
    """
    seg = frozenset(seg)
    for v in seg:
        F.index(v)
    r = _tree_root(F, seg, root)
    for v in seg:
        if F.root_of[v] != r:
            raise NotInitialSegment(f"{v!r} is not in the tree of {r!r}")
        if v in F.parent and F.parent[v] not in seg:
            raise NotInitialSegment(f"parent of {v!r} missing from segment")
    if not seg:
        return frozenset([r])
    return frozenset(c for v in seg for c in F.children[v] if c not in seg)


def subtree(F: RootedForest, w: str) -> frozenset[str]:
    """All vertices whose path to their root passes through ``w``."""
    F.index(w)
    return frozenset(F._walk(w))


def _encodings(F: RootedForest) -> dict[str, str]:
    """AHU string of the subtree below every vertex (iterative post-order)."""
    enc: dict[str, str] = {}
    for r in F.roots:
        for u in reversed(F._walk(r)):
            enc[u] = "(" + "".join(sorted(enc[c] for c in F.children[u])) + ")"
    return enc


def ahu_canonical(F: RootedForest) -> str:
    """Canonical string: sorted concatenation of the AHU codes of the trees."""
    enc = _encodings(F)
    return "".join(sorted(enc[r] for r in F.roots))


class IsoResult(NamedTuple):
    isomorphic: bool
    mapping: dict[str, str] | None

    def __bool__(self):
        return self.isomorphic


def iso(F: RootedForest, G: RootedForest) -> IsoResult:
    """Decide rooted-forest isomorphism; on success return a vertex bijection F -> G."""
    ef, eg = _encodings(F), _encodings(G)
    if "".join(sorted(ef[r] for r in F.roots)) != "".join(sorted(eg[r] for r in G.roots)):
        return IsoResult(False, None)

    mapping: dict[str, str] = {}
    pairs = list(zip(sorted(F.roots, key=ef.__getitem__), sorted(G.roots, key=eg.__getitem__)))
    while pairs:
        a, b = pairs.pop()
        mapping[a] = b
        pairs.extend(zip(sorted(F.children[a], key=ef.__getitem__),
                         sorted(G.children[b], key=eg.__getitem__)))
    return IsoResult(True, mapping)


# constructors used by tests, the fuzzer and the CLI

def chain(n: int, prefix: str = "c") -> RootedForest:
    names = [f"{prefix}{i}" for i in range(n)]
    return validate({
        "vertices": names,
        "parent": {names[i + 1]: names[i] for i in range(n - 1)},
        "roots": names[:1],
    })


def star(leaves: int, prefix: str = "s") -> RootedForest:
    names = [f"{prefix}{i}" for i in range(leaves + 1)]
    return validate({
        "vertices": names,
        "parent": {v: names[0] for v in names[1:]},
        "roots": names[:1],
    })


def singletons(k: int, prefix: str = "r") -> RootedForest:
    names = [f"{prefix}{i}" for i in range(k)]
    return validate({"vertices": names, "parent": {}, "roots": names})


def random_forest(rng: random.Random, n: int, p_new_root: float = 0.2) -> RootedForest:
    """Random forest on ``n`` vertices; vertex ``i`` attaches to a uniform earlier vertex."""
    names = [f"v{i}" for i in range(n)]
    parent = {}
    roots = []
    for i, v in enumerate(names):
        if i == 0 or rng.random() < p_new_root:
            roots.append(v)
        else:
            parent[v] = names[rng.randrange(i)]
    return validate({"vertices": names, "parent": parent, "roots": roots})
