"""Recover the rooted forest behind an abstractly presented G(F).

A :class:`ScrambledPresentation` exposes only the six l-group operations on
opaque integer tuples plus a generating set. :func:`recover_forest` never looks
inside the tuples: it grows a finite candidate pool from the generators,
selects elements playing the role of root basis vectors (up to infinitesimals),
restricts to the elements infinitesimally smaller than each of them and
recurses. The shape of the recursion is the forest.
"""
from __future__ import annotations

import logging
import operator
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from treelex import tlex
from treelex.exceptions import (
    EmptySelection,
    PoolOverflow,
    ReconstructionIncomplete,
)
from treelex.forest import RootedForest, ahu_canonical, validate

__all__ = [
    "ScrambledPresentation",
    "CandidatePool",
    "scramble",
    "build_pool",
    "bb_inf_less",
    "select_B0",
    "recover_forest",
    "canonical_string",
    "decide_iso",
    "POOL_CAP",
    "DEPTH_LADDER",
    "INF_EXPONENT",
]

log = logging.getLogger(__name__)

#: Hard cap on the candidate pool; generation stops once it is reached.
POOL_CAP = 512
#: Depths tried in order by :func:`recover_forest`; the last entry is the hard cap.
DEPTH_LADDER = (2, 3, 4)
#: ``g << h`` is tested with ``n = 2**INF_EXPONENT``.
INF_EXPONENT = 40
#: Shear multipliers are drawn from ``[-SHEAR_RANGE, SHEAR_RANGE] \ {0}``.
SHEAR_RANGE = 3

Vec = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class ScrambledPresentation:
    """G(F) seen only through its operations.

    ``_ops_forest`` fixes the meaning of tuple positions and is used solely to
    evaluate the lattice operations. ``source``, ``positions`` and ``shears``
    record how the presentation was produced; they exist for test harnesses
    and are ``None`` for presentations read from disk.
    """

    dimension: int
    gens: tuple[Vec, ...]
    _ops_forest: RootedForest = field(repr=False)
    source: RootedForest | None = field(default=None, repr=False)
    positions: Mapping[str, int] | None = field(default=None, repr=False)
    shears: tuple[tuple[str, str, int], ...] = field(default=(), repr=False)

    def zero(self) -> Vec:
        return (0,) * self.dimension

    def add(self, x: Vec, y: Vec) -> Vec:
        return tuple(map(operator.add, x, y))

    def neg(self, x: Vec) -> Vec:
        return tuple(map(operator.neg, x))

    def join(self, x: Vec, y: Vec) -> Vec:
        return tlex._lattice(self._ops_forest, x, y)[0]

    def meet(self, x: Vec, y: Vec) -> Vec:
        return tlex._lattice(self._ops_forest, x, y)[1]

    def eq(self, x: Vec, y: Vec) -> bool:
        return x == y

    # harness-side helpers

    def embed(self, g: tlex.TlexElement) -> Vec:
        """Image of a source element under the hidden shears and permutation."""
        if self.source is None:
            raise ValueError("presentation carries no source forest")
        y = dict(g.as_dict())
        for anc, desc, k in self.shears:
            y[desc] += k * y[anc]
        out = [0] * self.dimension
        for v, c in y.items():
            out[self.positions[v]] = c
        return tuple(out)

    def unscramble(self, x: Vec) -> tlex.TlexElement:
        """Inverse of :meth:`embed`."""
        if self.source is None:
            raise ValueError("presentation carries no source forest")
        y = {v: x[i] for v, i in self.positions.items()}
        for anc, desc, k in reversed(self.shears):
            y[desc] -= k * y[anc]
        return tlex.element(self.source, y)

    def to_json(self) -> dict:
        out = {
            "dimension": self.dimension,
            "forest": self._ops_forest.to_json(),
            "gens": [[str(c) for c in g] for g in self.gens],
        }
        if self.source is not None:
            out["source"] = self.source.to_json()
        return out

    @classmethod
    def from_json(cls, raw: Mapping) -> "ScrambledPresentation":
        F = validate(raw["forest"])
        n = int(raw.get("dimension", len(F)))
        if n != len(F):
            raise ValueError(f"dimension {n} but the forest has {len(F)} vertices")
        gens = tuple(tuple(int(c) for c in g) for g in raw["gens"])
        for g in gens:
            if len(g) != n:
                raise ValueError(f"generator of length {len(g)} in dimension {n}")
        source = validate(raw["source"]) if "source" in raw else None
        return cls(n, gens, F, source)


def _shear_pairs(F: RootedForest) -> list[tuple[str, str]]:
    return [(a, d) for d in F.vertices for a in F.ancestors(d)]


def scramble(F: RootedForest, seed: int | random.Random, shear_count: int,
             permute: bool = True) -> ScrambledPresentation:
    """Present G(F) through a random coordinate permutation and descendant shears.

    A shear adds ``k`` times an ancestor's coordinate to a descendant's; it is
    an l-automorphism of G(F). Generators are the images of all basis vectors,
    listed in random order.
    """
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    n = len(F)
    order = list(range(n))
    if permute:
        rng.shuffle(order)
    positions = {v: order[i] for i, v in enumerate(F.vertices)}

    pairs = _shear_pairs(F)
    shears = []
    if pairs:
        for _ in range(shear_count):
            anc, desc = rng.choice(pairs)
            k = rng.choice([k for k in range(-SHEAR_RANGE, SHEAR_RANGE + 1) if k])
            shears.append((anc, desc, k))

    names = {v: f"x{positions[v]}" for v in F.vertices}
    by_pos = sorted(F.vertices, key=positions.__getitem__)
    roots = list(F.roots)
    if permute:
        rng.shuffle(roots)
    ops_forest = F.relabel(names, order=[names[v] for v in by_pos],
                           root_order=[names[r] for r in roots])

    P = ScrambledPresentation(n, (), ops_forest, F, positions, tuple(shears))
    gens = [P.embed(tlex.basis(F, w)) for w in F.vertices]
    if permute:
        rng.shuffle(gens)
    return ScrambledPresentation(n, tuple(gens), ops_forest, F, positions, tuple(shears))


@dataclass(frozen=True)
class CandidatePool:
    """Deduplicated finite set of elements in a fixed order (generators first)."""

    elements: tuple[Vec, ...]
    depth: int
    truncated: bool = False

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self._members

    @property
    def _members(self) -> frozenset:
        return frozenset(self.elements)


def build_pool(P: ScrambledPresentation, depth: int, cap: int = POOL_CAP,
               strict: bool = False) -> CandidatePool:
    """Close ``gens + [zero]`` under one-step add/neg/join/meet, ``depth`` times.

    Elements are inserted together with their negatives, so the pool is closed
    under negation even when truncated. Reaching ``cap`` stops generation;
    with ``strict=True`` it raises :class:`PoolOverflow` instead.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    seen: dict[Vec, None] = {}

    def put(x: Vec) -> bool:
        new = [y for y in dict.fromkeys((x, P.neg(x))) if y not in seen]
        if len(seen) + len(new) > cap:
            if strict:
                raise PoolOverflow(f"pool exceeds {cap} elements at depth {depth}")
            return False
        for y in new:
            seen[y] = None
        return True

    for g in (*P.gens, P.zero()):
        if not put(g):
            break
    truncated = False
    for _ in range(depth):
        current = list(seen)
        ops = (P.add, P.join, P.meet)
        full = True
        for i, x in enumerate(current):
            for y in current[i:]:
                for op in ops:
                    if not put(op(x, y)):
                        full = False
                        break
                if not full:
                    break
            if not full:
                break
        if not full:
            truncated = True
            log.debug("candidate pool truncated at %d elements (depth %d)", cap, depth)
            break
    return CandidatePool(tuple(seen), depth, truncated)


class _Oracle:
    """Black-box order tests with cached large multiples."""

    def __init__(self, P: ScrambledPresentation):
        self.P = P
        self._big: dict[Vec, tuple[Vec, Vec]] = {}

    def big(self, x: Vec) -> tuple[Vec, Vec]:
        got = self._big.get(x)
        if got is None:
            y = x
            for _ in range(INF_EXPONENT):
                y = self.P.add(y, y)
            got = (y, self.P.neg(y))
            self._big[x] = got
        return got

    def leq(self, x: Vec, y: Vec) -> bool:
        return self.P.eq(self.P.join(x, y), y)

    def positive(self, x: Vec) -> bool:
        z = self.P.zero()
        return not self.P.eq(x, z) and self.leq(z, x)

    def inf_less(self, g: Vec, h: Vec) -> bool:
        # n*g <= h at n = +-N gives it for all |n| <= N by convexity
        up, down = self.big(g)
        if not (self.leq(up, h) and self.leq(down, h)):
            return False
        return not (self.P.eq(g, self.P.zero()) and self.P.eq(h, self.P.zero()))

    def absolute(self, x: Vec) -> Vec:
        return self.P.join(x, self.P.neg(x))


def bb_inf_less(P: ScrambledPresentation, g: Vec, h: Vec) -> bool:
    """Black-box ``g << h``: ``N*g <= h`` and ``-N*g <= h`` for ``N = 2**40``."""
    return _Oracle(P).inf_less(g, h)


def _select(oracle: _Oracle, elements: Sequence[Vec]) -> list[Vec]:
    P = oracle.P
    z = P.zero()
    # dominates every element whose root coordinates vanish, once each root is hit
    dominator = z
    for x in elements:
        dominator = P.add(dominator, oracle.absolute(x))

    positive_big = [x for x in elements
                    if oracle.positive(x) and not oracle.inf_less(x, dominator)]
    big_set = set(positive_big)

    chosen: list[Vec] = []
    for g in positive_big:
        if any(not P.eq(P.join(g, c), P.add(g, c)) for c in chosen):
            continue
        if any(P.add(g, P.neg(p)) in big_set for p in positive_big):
            continue
        chosen.append(g)
    return chosen


def select_B0(P: ScrambledPresentation, pool: CandidatePool | Sequence[Vec]) -> list[Vec]:
    """Greedy maximal set of root-like elements of the pool.

    Members are positive, not infinitesimal, not a sum of two positive
    non-infinitesimal pool elements, and pairwise satisfy ``g v h = g + h``.
    Infinitesimality is tested against the sum of absolute values of the pool.
    """
    elements = pool.elements if isinstance(pool, CandidatePool) else tuple(pool)
    chosen = _select(_Oracle(P), elements)
    if not chosen:
        raise EmptySelection("no root candidates in the pool")
    return chosen


def _recover(oracle: _Oracle, elements: Sequence[Vec], counter: list[int],
             parent: dict[str, str], vertices: list[str]) -> list[str]:
    z = oracle.P.zero()
    if all(x == z for x in elements):
        return []
    roots = []
    for g in _select(oracle, elements):
        name = f"n{counter[0]}"
        counter[0] += 1
        vertices.append(name)
        roots.append(name)
        below = [x for x in elements if oracle.inf_less(x, g)]
        for child in _recover(oracle, below, counter, parent, vertices):
            parent[child] = name
    return roots


def _recover_from_pool(P: ScrambledPresentation, pool: CandidatePool) -> RootedForest:
    parent: dict[str, str] = {}
    vertices: list[str] = []
    roots = _recover(_Oracle(P), pool.elements, [0], parent, vertices)
    if P.dimension and not roots:
        raise EmptySelection("no root candidates in the pool")
    F = validate({"vertices": vertices, "parent": parent, "roots": roots})
    if len(F) != P.dimension:
        raise ReconstructionIncomplete(
            f"recovered {len(F)} vertices, dimension is {P.dimension} (pool depth {pool.depth})"
        )
    return F


def recover_forest(P: ScrambledPresentation, depth: int | None = None,
                   cap: int = POOL_CAP) -> RootedForest:
    """Reconstruct the forest. Without ``depth`` the :data:`DEPTH_LADDER` is tried."""
    depths = (depth,) if depth is not None else DEPTH_LADDER
    err: Exception | None = None
    for d in depths:
        try:
            return _recover_from_pool(P, build_pool(P, d, cap))
        except ReconstructionIncomplete as exc:
            log.info("depth %d insufficient: %s", d, exc)
            err = exc
    raise err


def canonical_string(P: ScrambledPresentation, depth: int | None = None) -> str:
    return ahu_canonical(recover_forest(P, depth))


def decide_iso(P: ScrambledPresentation, Q: ScrambledPresentation,
               depth: int | None = None) -> bool:
    return canonical_string(P, depth) == canonical_string(Q, depth)
