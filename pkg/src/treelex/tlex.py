"""Arithmetic in the lattice-ordered group G(F) attached to a rooted forest.

As a group G(F) is Z^|F|, one integer per vertex. The lattice operations are
tree-lexicographic: walking down from each root, coordinates that agree are
copied, and at the first vertex ``w`` where the operands differ the operand with
the larger value at ``w`` supplies the whole subtree below ``w`` to the join
(the other operand supplies it to the meet). Trees are independent factors.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from treelex.exceptions import ForestMismatch, UnknownVertex
from treelex.forest import RootedForest, validate

__all__ = [
    "TlexElement",
    "AsymptoticSign",
    "element",
    "add",
    "neg",
    "sub",
    "scale",
    "zero",
    "basis",
    "join",
    "meet",
    "leq",
    "is_positive",
    "inf_less",
    "is_infinitesimal",
    "infinitesimal_witness",
    "group_order_unit",
    "order_unit_certificate",
    "is_group_order_unit",
    "random_element",
    "rank",
]


@dataclass(frozen=True)
class TlexElement:
    forest: RootedForest
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != len(self.forest):
            raise ValueError(
                f"{len(self.coords)} coordinates for a forest with {len(self.forest)} vertices"
            )

    def __getitem__(self, vertex: str) -> int:
        return self.coords[self.forest.index(vertex)]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.forest.vertices, self.coords))

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return neg(self)

    def __rmul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return scale(k, self)

    def __or__(self, other):
        return join(self, other)

    def __and__(self, other):
        return meet(self, other)

    def __le__(self, other):
        return leq(self, other)

    def __ge__(self, other):
        return leq(other, self)

    def __lt__(self, other):
        return leq(self, other) and self.coords != other.coords

    def __gt__(self, other):
        return leq(other, self) and self.coords != other.coords

    def __repr__(self):
        return f"TlexElement({self.as_dict()})"

    def to_json(self, inline_forest: bool = True) -> dict:
        return {
            "forest": self.forest.to_json() if inline_forest else None,
            "coords": {v: str(c) for v, c in zip(self.forest.vertices, self.coords)},
        }

    @classmethod
    def from_json(cls, raw: Mapping, forest: RootedForest | None = None) -> "TlexElement":
        f = raw.get("forest")
        if isinstance(f, Mapping):
            forest = validate(f)
        if forest is None:
            raise ValueError("element JSON needs a forest")
        return element(forest, {v: int(c) for v, c in raw["coords"].items()})


def element(forest: RootedForest, coords: Mapping[str, int] | Sequence[int]) -> TlexElement:
    """Build an element from a vertex->int mapping or a sequence in vertex order."""
    if isinstance(coords, Mapping):
        extra = set(coords) - set(forest.vertices)
        if extra:
            raise UnknownVertex(f"coordinates for unknown vertices {sorted(extra)}")
        missing = set(forest.vertices) - set(coords)
        if missing:
            raise ValueError(f"missing coordinates for {sorted(missing)}")
        return TlexElement(forest, tuple(int(coords[v]) for v in forest.vertices))
    return TlexElement(forest, tuple(int(c) for c in coords))


def _same(g: TlexElement, h: TlexElement) -> RootedForest:
    if g.forest is not h.forest and g.forest != h.forest:
        raise ForestMismatch("elements belong to different forests")
    return g.forest


def add(g: TlexElement, h: TlexElement) -> TlexElement:
    F = _same(g, h)
    return TlexElement(F, tuple(a + b for a, b in zip(g.coords, h.coords)))


def neg(g: TlexElement) -> TlexElement:
    return TlexElement(g.forest, tuple(-a for a in g.coords))


def sub(g: TlexElement, h: TlexElement) -> TlexElement:
    F = _same(g, h)
    return TlexElement(F, tuple(a - b for a, b in zip(g.coords, h.coords)))


def scale(k: int, g: TlexElement) -> TlexElement:
    return TlexElement(g.forest, tuple(k * a for a in g.coords))


def zero(F: RootedForest) -> TlexElement:
    return TlexElement(F, (0,) * len(F))


def basis(F: RootedForest, w: str) -> TlexElement:
    coords = [0] * len(F)
    coords[F.index(w)] = 1
    return TlexElement(F, tuple(coords))


def _lattice(F: RootedForest, g: Sequence[int], h: Sequence[int]):
    k = list(g)
    m = list(h)
    stack = list(F._roots_idx)
    kids, sub_idx = F._children_idx, F._subtree_idx
    while stack:
        i = stack.pop()
        if g[i] == h[i]:
            stack.extend(kids[i])
        elif g[i] < h[i]:
            for u in sub_idx[i]:
                k[u] = h[u]
                m[u] = g[u]
        # g wins at i: k and m already hold g and h below i
    return tuple(k), tuple(m)


def join(g: TlexElement, h: TlexElement) -> TlexElement:
    F = _same(g, h)
    return TlexElement(F, _lattice(F, g.coords, h.coords)[0])


def meet(g: TlexElement, h: TlexElement) -> TlexElement:
    F = _same(g, h)
    return TlexElement(F, _lattice(F, g.coords, h.coords)[1])


def _nonneg(F: RootedForest, diff: Sequence, zero_value=0) -> bool:
    """True iff ``diff`` lies in the positive cone.

    A tuple is non-negative when, in every tree, each vertex that is nonzero
    but has only zero ancestors carries a positive value. ``diff`` may hold
    ints or any totally ordered values comparable with ``zero_value``.
    """
    stack = list(F._roots_idx)
    kids = F._children_idx
    while stack:
        i = stack.pop()
        d = diff[i]
        if d == zero_value:
            stack.extend(kids[i])
        elif d < zero_value:
            return False
    return True


def leq(g: TlexElement, h: TlexElement) -> bool:
    """``g <= h``, i.e. ``join(g, h) == h``."""
    F = _same(g, h)
    return _nonneg(F, [b - a for a, b in zip(g.coords, h.coords)])


def is_positive(g: TlexElement) -> bool:
    return any(g.coords) and _nonneg(g.forest, g.coords)


class AsymptoticSign(NamedTuple):
    """Sign of ``h_w - n*g_w`` as ``n`` runs to one end of Z.

    Compared lexicographically against ``(0, 0)``: a nonzero ``slope``
    dominates, otherwise ``offset`` decides.
    """

    slope: int
    offset: int

    @classmethod
    def towards(cls, direction: int, g_w: int, h_w: int) -> "AsymptoticSign":
        return cls(-direction * g_w, h_w)


def inf_less(g: TlexElement, h: TlexElement) -> bool:
    """Exact test of ``n*g < h`` for every integer ``n`` (written ``g << h``).

    The difference ``h - n*g`` is affine in ``n`` at each vertex, so its
    position relative to the positive cone is constant for large ``|n|``.
    Both asymptotic directions are checked with lexicographic
    (slope, offset) pairs; the set of ``n`` with ``n*g <= h`` is convex, so
    success at both ends covers every ``n`` in between.
    """
    F = _same(g, h)
    origin = AsymptoticSign(0, 0)
    for direction in (1, -1):
        diff = [AsymptoticSign.towards(direction, a, b) for a, b in zip(g.coords, h.coords)]
        if not _nonneg(F, diff, origin):
            return False
        if all(d == origin for d in diff):
            return False
    return True


def infinitesimal_witness(g: TlexElement) -> TlexElement | None:
    """An ``h`` with ``g << h`` when one exists, else ``None``.

    ``g`` is infinitesimal exactly when it vanishes at every root; then the
    sum of the root basis vectors dominates it.
    """
    F = g.forest
    if not F.roots or any(g.coords[i] for i in F._roots_idx):
        return None
    return group_order_unit(F)


def is_infinitesimal(g: TlexElement) -> bool:
    return infinitesimal_witness(g) is not None


def group_order_unit(F: RootedForest) -> TlexElement:
    """Sum of the root basis vectors (zero for the empty forest)."""
    coords = [0] * len(F)
    for i in F._roots_idx:
        coords[i] = 1
    return TlexElement(F, tuple(coords))


def order_unit_certificate(g: TlexElement) -> int:
    """The ``n`` used to certify ``n*u >= g`` for ``u = group_order_unit``."""
    F = g.forest
    return max([1] + [1 + g.coords[i] for i in F._roots_idx])


def is_group_order_unit(u: TlexElement, samples: Iterable[TlexElement]) -> tuple[bool, list[int | None]]:
    """Check ``n*u >= g`` for each sample with ``n = 1 + max root coordinate of g``.

    Returns the overall verdict and the per-sample certificate (``None`` where
    the check failed).
    """
    certs: list[int | None] = []
    for g in samples:
        _same(u, g)
        n = order_unit_certificate(g)
        certs.append(n if leq(g, scale(n, u)) else None)
    return all(c is not None for c in certs), certs


def random_element(F: RootedForest, seed: int | random.Random, bound: int) -> TlexElement:
    """Seeded element with coordinates uniform in ``[-bound, bound]``."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return TlexElement(F, tuple(rng.randint(-bound, bound) for _ in F.vertices))


def rank(F: RootedForest) -> int:
    """Rank of G(F) as a free abelian group: the basis ``b(w)`` has one vector per vertex."""
    return len(F)
