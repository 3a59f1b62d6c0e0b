"""Rational simplicial complexes, Farey blow-ups and weighted stellar sequences.

Everything here is exact: points are tuples of :class:`fractions.Fraction`.
A geometric complex is kept as the full set of its simplexes (each a frozenset
of vertex points), so the face-closure condition holds by construction.
Weighted abstract complexes mirror them combinatorially; the canonical
realization sends vertex ``v_i`` to ``e_i / w(v_i)`` and a binary subdivision
on the abstract side becomes a Farey blow-up on the geometric side.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from treelex._rational import (
    Point,
    affine_rank,
    affinely_independent,
    fmt_rational,
    in_hull,
    parse_point,
)
from treelex.exceptions import (
    ConditionVViolated,
    DimensionMismatch,
    EdgeNotPresent,
    EqualPoints,
    GeometryError,
    MissingRootCell,
    NameCollision,
    NotATree,
    NotMaximal,
    NotPairwiseDisjoint,
    NotPresent,
    PointOutsideSupport,
    StellarStepError,
)
from treelex.forest import RootedForest, validate

__all__ = [
    "den",
    "farey_mediant",
    "GeometricComplex",
    "blow_up",
    "WeightedComplex",
    "binary_subdivision",
    "delete_maximal",
    "canonical_realization",
    "realize",
    "Subdivide",
    "Delete",
    "Identity",
    "Stage",
    "apply_stellar_script",
    "script_from_json",
    "script_to_json",
    "germ_tree",
]

Simplex = frozenset  # of Points


def den(p: Sequence) -> int:
    """Least common denominator of the coordinates."""
    return math.lcm(1, *(Fraction(x).denominator for x in p))


def farey_mediant(v: Sequence, w: Sequence) -> Point:
    """``(den(v) v + den(w) w) / (den(v) + den(w))``."""
    v = tuple(Fraction(x) for x in v)
    w = tuple(Fraction(x) for x in w)
    if len(v) != len(w):
        raise DimensionMismatch(f"{len(v)} vs {len(w)} coordinates")
    if v == w:
        raise EqualPoints("the segment is degenerate")
    dv, dw = den(v), den(w)
    return tuple((dv * a + dw * b) / (dv + dw) for a, b in zip(v, w))


def _faces(vertices: Iterable[Point]) -> Iterable[Simplex]:
    vs = tuple(vertices)
    for r in range(1, len(vs) + 1):
        for sub in itertools.combinations(vs, r):
            yield frozenset(sub)


def _sorted(s: Iterable[Point]) -> list[Point]:
    return sorted(s)


@dataclass(frozen=True)
class GeometricComplex:
    """Finite rational simplicial complex in R^n, stored face-closed."""

    n: int
    simplexes: frozenset

    @classmethod
    def from_simplexes(cls, n: int, simplexes: Iterable[Iterable]) -> "GeometricComplex":
        out = set()
        for s in simplexes:
            pts = tuple(dict.fromkeys(tuple(Fraction(x) for x in p) for p in s))
            if any(len(p) != n for p in pts):
                raise DimensionMismatch(f"vertex outside R^{n}")
            if not pts:
                continue
            if not affinely_independent(pts):
                raise GeometryError(f"affinely dependent vertices {pts}")
            out.update(_faces(pts))
        return cls(n, frozenset(out))

    def maximal(self) -> list[Simplex]:
        ms = [s for s in self.simplexes
              if not any(s < t for t in self.simplexes if len(t) > len(s))]
        return sorted(ms, key=lambda s: (len(s), _sorted(s)))

    @property
    def vertices(self) -> frozenset:
        return frozenset(p for s in self.simplexes if len(s) == 1 for p in s)

    def contains_point(self, p: Sequence) -> bool:
        p = tuple(Fraction(x) for x in p)
        return any(in_hull(_sorted(s), p) for s in self.maximal())

    def certify_support_contains(self, other: "GeometricComplex") -> bool:
        """True when every simplex of ``other`` lies inside a single simplex of ``self``.

        This certifies ``|other| ⊆ |self|``; a False answer is inconclusive.
        """
        mine = self.maximal()
        return all(
            any(all(in_hull(_sorted(t), p) for p in s) for t in mine)
            for s in other.maximal()
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "simplexes": [[[fmt_rational(x) for x in p] for p in _sorted(s)]
                          for s in self.maximal()],
        }

    @classmethod
    def from_json(cls, raw: Mapping) -> "GeometricComplex":
        return cls.from_simplexes(
            int(raw["n"]), [[parse_point(p) for p in s] for s in raw["simplexes"]]
        )


def blow_up(K: GeometricComplex, p: Sequence) -> GeometricComplex:
    """Replace each simplex containing ``p`` by the cones ``conv(F ∪ {p})`` over its faces F avoiding ``p``."""
    p = tuple(Fraction(x) for x in p)
    if len(p) != K.n:
        raise DimensionMismatch(f"point in R^{len(p)}, complex in R^{K.n}")
    touched = [s for s in K.simplexes if in_hull(_sorted(s), p)]
    if not touched:
        raise PointOutsideSupport(f"{p} is not in the support")
    out = set(K.simplexes) - set(touched)
    out.add(frozenset([p]))
    for T in touched:
        for F in _faces(T):
            if not in_hull(_sorted(F), p):
                out.add(F | {p})
    return GeometricComplex(K.n, frozenset(out))


@dataclass(frozen=True)
class WeightedComplex:
    """Weighted abstract simplicial complex; ``sets`` is subset-closed (no empty set)."""

    vertices: tuple[str, ...]
    sets: frozenset
    weights: Mapping[str, int]

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise NameCollision("duplicate vertex name")
        used = set().union(*self.sets) if self.sets else set()
        if used != vs:
            raise GeometryError("vertex set differs from the union of the sets")
        for s in self.sets:
            for r in range(1, len(s)):
                for sub in itertools.combinations(sorted(s), r):
                    if frozenset(sub) not in self.sets:
                        raise GeometryError(f"{sorted(s)} present but subset {sub} missing")
        if set(self.weights) != vs:
            raise GeometryError("weights must cover exactly the vertices")
        if any(int(w) < 1 for w in self.weights.values()):
            raise GeometryError("weights must be positive integers")

    @classmethod
    def from_maximal(cls, vertices: Sequence[str], weights: Mapping[str, int],
                     sets: Iterable[Iterable[str]]) -> "WeightedComplex":
        closed = set()
        for s in sets:
            closed.update(frozenset(f) for f in _name_faces(s))
        return cls(tuple(vertices), frozenset(closed), {v: int(weights[v]) for v in vertices})

    def maximal(self) -> list[frozenset]:
        ms = [s for s in self.sets if not any(s < t for t in self.sets)]
        return sorted(ms, key=lambda s: (len(s), sorted(s)))

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "weights": {v: self.weights[v] for v in self.vertices},
            "sets": [sorted(s) for s in self.maximal()],
        }

    @classmethod
    def from_json(cls, raw: Mapping) -> "WeightedComplex":
        return cls.from_maximal(raw["vertices"], raw["weights"], raw["sets"])


def _name_faces(s: Iterable[str]) -> Iterable[tuple[str, ...]]:
    s = sorted(set(s))
    for r in range(1, len(s) + 1):
        yield from itertools.combinations(s, r)


def binary_subdivision(W: WeightedComplex, edge: Iterable[str], a: str) -> WeightedComplex:
    """Split ``edge = {v, w}`` at a new vertex ``a`` of weight ``w(v) + w(w)``."""
    e = frozenset(edge)
    if len(e) != 2 or e not in W.sets:
        raise EdgeNotPresent(f"{sorted(e)} is not an edge")
    if a in W.weights:
        raise NameCollision(f"{a!r} already names a vertex")
    v, w = sorted(e)
    out = set()
    for s in W.sets:
        if e <= s:
            rest = s - e
            out.update(frozenset(f) for f in _name_faces(rest | {v, a}))
            out.update(frozenset(f) for f in _name_faces(rest | {a, w}))
        else:
            out.add(s)
    weights = dict(W.weights)
    weights[a] = W.weights[v] + W.weights[w]
    return WeightedComplex(W.vertices + (a,), frozenset(out), weights)


def delete_maximal(W: WeightedComplex, M: Iterable[str]) -> WeightedComplex:
    """Remove the maximal set ``M``; vertices left in no set disappear."""
    M = frozenset(M)
    if M not in W.sets:
        raise NotPresent(f"{sorted(M)} is not a set of the complex")
    if any(M < s for s in W.sets):
        raise NotMaximal(f"{sorted(M)} is a proper face")
    sets = W.sets - {M}
    alive = set().union(*sets) if sets else set()
    verts = tuple(v for v in W.vertices if v in alive)
    return WeightedComplex(verts, sets, {v: W.weights[v] for v in verts})


def canonical_realization(W: WeightedComplex) -> tuple[GeometricComplex, dict[str, Point]]:
    """Vertex ``i`` (in ``W.vertices`` order) goes to ``e_i / w(v_i)`` in [0,1]^n."""
    n = len(W.vertices)
    iota = {}
    for i, v in enumerate(W.vertices):
        pt = [Fraction(0)] * n
        pt[i] = Fraction(1, W.weights[v])
        iota[v] = tuple(pt)
    return realize(W, iota), iota


def realize(W: WeightedComplex, iota: Mapping[str, Point]) -> GeometricComplex:
    """Geometric complex spanned by the images of the sets under ``iota``."""
    n = len(next(iter(iota.values()))) if iota else 0
    return GeometricComplex.from_simplexes(n, [[iota[v] for v in s] for s in W.maximal()])


@dataclass(frozen=True)
class Subdivide:
    edge: tuple[str, str]
    new: str


@dataclass(frozen=True)
class Delete:
    set: frozenset


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class Stage:
    weighted: WeightedComplex
    delta: GeometricComplex
    iota: Mapping[str, Point]

    def to_json(self, step: int) -> dict:
        return {
            "step": step,
            "weighted": self.weighted.to_json(),
            "delta": self.delta.to_json(),
            "iota": {v: [fmt_rational(x) for x in self.iota[v]] for v in self.weighted.vertices},
        }


def script_from_json(raw: Sequence[Mapping]) -> list:
    out = []
    for step in raw:
        op = step.get("op")
        if op == "subdivide":
            v, w = step["edge"]
            out.append(Subdivide((v, w), step["new"]))
        elif op == "delete":
            out.append(Delete(frozenset(step["set"])))
        elif op == "identity":
            out.append(Identity())
        else:
            raise ValueError(f"unknown script op {op!r}")
    return out


def script_to_json(script: Sequence) -> list[dict]:
    out = []
    for step in script:
        if isinstance(step, Subdivide):
            out.append({"op": "subdivide", "edge": list(step.edge), "new": step.new})
        elif isinstance(step, Delete):
            out.append({"op": "delete", "set": sorted(step.set)})
        else:
            out.append({"op": "identity"})
    return out


def apply_stellar_script(W0: WeightedComplex, script: Sequence) -> list[Stage]:
    """Run a stellar script, keeping abstract and geometric complexes in lockstep.

    Subdivisions become Farey blow-ups at the mediant of the realized edge,
    deletions remove the matching maximal simplex, identities copy the stage.
    """
    delta, iota = canonical_realization(W0)
    stages = [Stage(W0, delta, iota)]
    W = W0
    for i, step in enumerate(script):
        try:
            if isinstance(step, Subdivide):
                v, w = step.edge
                W_next = binary_subdivision(W, step.edge, step.new)
                m = farey_mediant(iota[v], iota[w])
                delta = blow_up(delta, m)
                iota = {**iota, step.new: m}
            elif isinstance(step, Delete):
                W_next = delete_maximal(W, step.set)
                simplex = frozenset(iota[v] for v in step.set)
                delta = GeometricComplex(delta.n, delta.simplexes - {simplex})
                iota = {v: iota[v] for v in W_next.vertices}
            elif isinstance(step, Identity):
                W_next = W
            else:
                raise ValueError(f"unknown step {step!r}")
        except GeometryError as exc:
            raise StellarStepError(i, exc) from exc
        W = W_next
        stages.append(Stage(W, delta, iota))
    return stages


def _relints_meet(P: Sequence[Point], Q: Sequence[Point]) -> bool:
    """Exact LP: do the relative interiors of conv(P) and conv(Q) intersect?"""
    from sympy import Rational
    from sympy.solvers.simplex import InfeasibleLPError, linprog

    kp, kq = len(P), len(Q)
    nvar = kp + kq + 1  # lambda, mu, t
    A, b = [], []
    for i in range(kp + kq):
        row = [0] * nvar
        row[i] = -1
        row[-1] = 1
        A.append(row)
        b.append(0)
    A_eq, b_eq = [], []
    A_eq.append([1] * kp + [0] * kq + [0])
    b_eq.append(1)
    A_eq.append([0] * kp + [1] * kq + [0])
    b_eq.append(1)
    for c in range(len(P[0])):
        A_eq.append([Rational(p[c]) for p in P] + [-Rational(q[c]) for q in Q] + [0])
        b_eq.append(0)
    c = [0] * (nvar - 1) + [-1]
    try:
        opt, _ = linprog(c, A, b, A_eq, b_eq)
    except InfeasibleLPError:
        return False
    return -opt > 0


def germ_tree(cells: Sequence[Sequence], d: Sequence) -> RootedForest:
    """Tree with a vertex per open cell, edges between cells of adjacent dimension
    where the smaller lies in the closure of the larger, rooted at the cell ``{d}``.

    Cells are given by vertex lists of their closures. Checks pairwise
    disjointness and that each cell's closure holds exactly one cell of every
    lower dimension.
    """
    d = tuple(Fraction(x) for x in d)
    cells = [tuple(dict.fromkeys(tuple(Fraction(x) for x in p) for p in c)) for c in cells]
    for c in cells:
        if not c or not affinely_independent(c):
            raise GeometryError(f"cell {c} is not a simplex")
        if any(len(p) != len(d) for p in c):
            raise DimensionMismatch("cells and root point live in different spaces")
    dims = [affine_rank(c) for c in cells]
    names = [f"P{i}" for i in range(len(cells))]
    try:
        root = next(i for i, c in enumerate(cells) if c == (d,))
    except StopIteration:
        raise MissingRootCell(f"no cell equal to {{{d}}}") from None

    for i, j in itertools.combinations(range(len(cells)), 2):
        if _relints_meet(cells[i], cells[j]):
            raise NotPairwiseDisjoint(f"{names[i]} and {names[j]} overlap")

    n = len(cells)
    below = [[all(in_hull(cells[j], p) for p in cells[i]) for j in range(n)] for i in range(n)]
    for j in range(n):
        for e in range(dims[j]):
            hits = [i for i in range(n) if dims[i] == e and below[i][j]]
            if len(hits) != 1:
                raise ConditionVViolated(
                    f"closure of {names[j]} holds {len(hits)} cells of dimension {e}"
                )

    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    edges = 0
    for i in range(n):
        for j in range(n):
            if below[i][j] and dims[i] == dims[j] - 1:
                adj[i].append(j)
                adj[j].append(i)
                edges += 1
    parent = {}
    seen = {root}
    queue = [root]
    while queue:
        u = queue.pop(0)
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                parent[names[w]] = names[u]
                queue.append(w)
    if edges != n - 1 or len(seen) != n:
        raise NotATree(f"{n} cells, {edges} edges, {len(seen)} reachable from the root")
    return validate({"vertices": names, "parent": parent, "roots": [names[root]]})
