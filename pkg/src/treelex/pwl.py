"""Piecewise-linear functions on [0,1]^n with integral affine pieces.

A function is stored in max-of-mins form: ``f(x) = max_i min_j a_ij(x)`` with
each ``a_ij`` an affine form with integer coefficients. The l-group operations
act symbolically on this form. Exact decisions (convexity, vanishing on a
complex) are provided for n <= 2 by walking the arrangement of the lines
``a = b`` for pairs of forms; on every cell of that arrangement ``f`` agrees
with a single form.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from treelex._rational import Point, affine_rank, in_hull
from treelex.exceptions import DimensionMismatch, OutOfBox, SizeOverflow, UnsupportedDimension
from treelex.geometry import GeometricComplex, Stage

__all__ = [
    "AffineForm",
    "PwlFunction",
    "constant",
    "projection",
    "affine",
    "pw_add",
    "pw_join",
    "pw_meet",
    "pw_neg",
    "convex_check",
    "vanishes_on",
    "ideal_member_at_depth",
    "TERM_CAP",
]

#: Upper bound on the total number of affine forms in one function.
TERM_CAP = 20000


@dataclass(frozen=True, order=True)
class AffineForm:
    coeffs: tuple[int, ...]
    const: int

    def __call__(self, x: Sequence) -> Fraction:
        return Fraction(self.const) + sum(Fraction(c) * xi for c, xi in zip(self.coeffs, x))

    def __add__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                          self.const + other.const)

    def __neg__(self) -> "AffineForm":
        return AffineForm(tuple(-a for a in self.coeffs), -self.const)

    def __sub__(self, other: "AffineForm") -> "AffineForm":
        return self + (-other)

    def to_json(self) -> dict:
        return {"coeffs": list(self.coeffs), "const": self.const}


def _normalize(terms: Iterable[Iterable[AffineForm]]) -> tuple[tuple[AffineForm, ...], ...]:
    inner = {tuple(sorted(set(t))) for t in terms}
    if any(not t for t in inner):
        raise ValueError("empty inner list")
    # min over a superset is pointwise smaller, so a superset term never wins the max
    kept = [t for t in inner
            if not any(o != t and set(o) < set(t) for o in inner)]
    return tuple(sorted(kept))


@dataclass(frozen=True)
class PwlFunction:
    n: int
    terms: tuple[tuple[AffineForm, ...], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a PWL function needs at least one term")
        for t in self.terms:
            if not t:
                raise ValueError("empty inner list")
            for a in t:
                if len(a.coeffs) != self.n:
                    raise DimensionMismatch(f"form with {len(a.coeffs)} coefficients in dimension {self.n}")
        if self.size > TERM_CAP:
            raise SizeOverflow(f"{self.size} forms exceed the cap {TERM_CAP}")

    @classmethod
    def of(cls, n: int, terms: Iterable[Iterable[AffineForm]]) -> "PwlFunction":
        return cls(n, _normalize(terms))

    @property
    def size(self) -> int:
        return sum(len(t) for t in self.terms)

    @property
    def forms(self) -> list[AffineForm]:
        return sorted({a for t in self.terms for a in t})

    def value(self, x: Sequence) -> Fraction:
        """Evaluate without the domain check."""
        return max(min(a(x) for a in t) for t in self.terms)

    def __call__(self, x: Sequence) -> Fraction:
        return eval_at(self, x)

    def __add__(self, other):
        return pw_add(self, other)

    def __neg__(self):
        return pw_neg(self)

    def __sub__(self, other):
        return pw_add(self, pw_neg(other))

    def __or__(self, other):
        return pw_join(self, other)

    def __and__(self, other):
        return pw_meet(self, other)

    def to_json(self) -> dict:
        return {"n": self.n, "terms": [[a.to_json() for a in t] for t in self.terms]}

    @classmethod
    def from_json(cls, raw: Mapping) -> "PwlFunction":
        n = int(raw["n"])
        return cls.of(n, [[AffineForm(tuple(int(c) for c in a["coeffs"]), int(a["const"]))
                           for a in t] for t in raw["terms"]])


def eval_at(f: PwlFunction, x: Sequence) -> Fraction:
    x = tuple(Fraction(v) for v in x)
    if len(x) != f.n:
        raise DimensionMismatch(f"point in R^{len(x)}, function on [0,1]^{f.n}")
    if any(v < 0 or v > 1 for v in x):
        raise OutOfBox(f"{x} is outside the unit cube")
    return f.value(x)


def constant(n: int, c: int) -> PwlFunction:
    return PwlFunction(n, ((AffineForm((0,) * n, c),),))


def projection(n: int, i: int) -> PwlFunction:
    coeffs = [0] * n
    coeffs[i] = 1
    return PwlFunction(n, ((AffineForm(tuple(coeffs), 0),),))


def affine(coeffs: Sequence[int], const: int) -> PwlFunction:
    return PwlFunction(len(coeffs), ((AffineForm(tuple(coeffs), const),),))


def _same_n(f: PwlFunction, g: PwlFunction) -> int:
    if f.n != g.n:
        raise DimensionMismatch(f"dimensions {f.n} and {g.n}")
    return f.n


def _guard(count: int) -> None:
    if count > TERM_CAP:
        raise SizeOverflow(f"{count} forms exceed the cap {TERM_CAP}")


def pw_join(f: PwlFunction, g: PwlFunction) -> PwlFunction:
    n = _same_n(f, g)
    return PwlFunction.of(n, f.terms + g.terms)


def pw_meet(f: PwlFunction, g: PwlFunction) -> PwlFunction:
    n = _same_n(f, g)
    _guard(sum(len(a) + len(b) for a in f.terms for b in g.terms))
    return PwlFunction.of(n, [a + b for a in f.terms for b in g.terms])


def pw_add(f: PwlFunction, g: PwlFunction) -> PwlFunction:
    n = _same_n(f, g)
    _guard(sum(len(a) * len(b) for a in f.terms for b in g.terms))
    return PwlFunction.of(n, [[x + y for x in a for y in b] for a in f.terms for b in g.terms])


def pw_neg(f: PwlFunction) -> PwlFunction:
    """``-max_i min_j a_ij = max over choices (j_i) of min_i (-a_{i j_i})``."""
    count = 1
    for t in f.terms:
        count *= len(t)
        _guard(count * len(f.terms))
    return PwlFunction.of(f.n, [[-a for a in choice] for choice in itertools.product(*f.terms)])


# exact arrangement machinery, n <= 2


def _points(S: Iterable) -> list[Point]:
    return list(dict.fromkeys(tuple(Fraction(x) for x in p) for p in S))


def _check_simplex(f: PwlFunction, S: list[Point]) -> int:
    if f.n > 2:
        raise UnsupportedDimension(f"exact checks need n <= 2, got {f.n}")
    for p in S:
        if len(p) != f.n:
            raise DimensionMismatch("simplex and function dimensions differ")
        if any(v < 0 or v > 1 for v in p):
            raise OutOfBox(f"{p} is outside the unit cube")
    dim = affine_rank(S)
    if dim != len(S) - 1:
        raise ValueError("simplex vertices are affinely dependent")
    return dim


def _segment_breaks(f: PwlFunction, A: Point, B: Point) -> list[Fraction]:
    """Parameters ``t`` in (0,1) where two forms cross along ``A + t(B - A)``."""
    restricted = set()
    for a in f.forms:
        alpha = sum(Fraction(c) * (b - x) for c, x, b in zip(a.coeffs, A, B))
        restricted.add((alpha, a(A)))
    ts = set()
    for (a1, b1), (a2, b2) in itertools.combinations(restricted, 2):
        if a1 != a2:
            t = (b2 - b1) / (a1 - a2)
            if 0 < t < 1:
                ts.add(t)
    return sorted(ts)


def _lerp(A: Point, B: Point, t: Fraction) -> Point:
    return tuple(a + t * (b - a) for a, b in zip(A, B))


def _segment_convex(f: PwlFunction, A: Point, B: Point) -> bool:
    ts = _segment_breaks(f, A, B)
    grid = [Fraction(0)] + ts + [Fraction(1)]
    for k in range(1, len(grid) - 1):
        eps = min(grid[k] - grid[k - 1], grid[k + 1] - grid[k]) / 2
        mid = f.value(_lerp(A, B, grid[k]))
        lo = f.value(_lerp(A, B, grid[k] - eps))
        hi = f.value(_lerp(A, B, grid[k] + eps))
        if 2 * mid > lo + hi:
            return False
    return True


@dataclass(frozen=True)
class _Line:
    """``a*x + b*y + c = 0`` with (a, b) != (0, 0)."""

    a: Fraction
    b: Fraction
    c: Fraction

    def __call__(self, p: Point) -> Fraction:
        return self.a * p[0] + self.b * p[1] + self.c

    def key(self) -> tuple:
        # scale so the first nonzero of (a, b) is 1
        s = self.a if self.a != 0 else self.b
        return (self.a / s, self.b / s, self.c / s)


def _arrangement(f: PwlFunction) -> list[_Line]:
    lines = {}
    for p, q in itertools.combinations(f.forms, 2):
        d = p - q
        if d.coeffs[0] or d.coeffs[1]:
            ln = _Line(Fraction(d.coeffs[0]), Fraction(d.coeffs[1]), Fraction(d.const))
            lines.setdefault(ln.key(), ln)
    return list(lines.values())


def _edge_line(P: Point, Q: Point) -> _Line:
    return _Line(-(Q[1] - P[1]), Q[0] - P[0], (Q[1] - P[1]) * P[0] - (Q[0] - P[0]) * P[1])


def _chord(line: _Line, tri: list[Point]) -> tuple[Point, Point] | None:
    """Intersection of ``line`` with the triangle when it is a segment through the interior."""
    hits = []
    for P, Q in itertools.combinations(tri, 2):
        gP, gQ = line(P), line(Q)
        if gP == 0 and gQ == 0:
            return None  # runs along the boundary
        if gP == 0:
            hits.append(P)
        elif gQ == 0:
            hits.append(Q)
        elif (gP > 0) != (gQ > 0):
            hits.append(_lerp(P, Q, gP / (gP - gQ)))
    hits = list(dict.fromkeys(hits))
    if len(hits) < 2:
        return None
    return hits[0], hits[1]


def _triangle_convex(f: PwlFunction, tri: list[Point]) -> bool:
    lines = _arrangement(f)
    walls = [_edge_line(P, Q) for P, Q in itertools.combinations(tri, 2)]
    for L in lines:
        ch = _chord(L, tri)
        if ch is None:
            continue
        E0, E1 = ch
        cuts = set()
        for M in lines:
            if M is L:
                continue
            g0, g1 = M(E0), M(E1)
            if g0 != g1:
                t = g0 / (g0 - g1)
                if 0 < t < 1:
                    cuts.add(t)
        grid = [Fraction(0)] + sorted(cuts) + [Fraction(1)]
        normal = (L.a, L.b)
        for t0, t1 in zip(grid, grid[1:]):
            m = _lerp(E0, E1, (t0 + t1) / 2)
            steps = []
            for M in lines + walls:
                if M is L:
                    continue
                rate = M.a * normal[0] + M.b * normal[1]
                val = M(m)
                if rate != 0 and val != 0:
                    steps.append(abs(val / rate))
            eps = min(steps) / 2
            plus = (m[0] + eps * normal[0], m[1] + eps * normal[1])
            minus = (m[0] - eps * normal[0], m[1] - eps * normal[1])
            if 2 * f.value(m) > f.value(plus) + f.value(minus):
                return False
    return True


def convex_check(f: PwlFunction, S: Sequence) -> bool:
    """Exact convexity of ``f`` restricted to the rational simplex ``S`` (n <= 2).

    ``f`` is affine on each cell of the arrangement, so it is convex iff it
    bends upwards across every interior wall: at the midpoint of each wall
    piece the value is at most the average of the two reflected points.
    """
    S = _points(S)
    dim = _check_simplex(f, S)
    if dim == 0:
        return True
    if dim == 1:
        return _segment_convex(f, S[0], S[1])
    return _triangle_convex(f, S)


def _line_meet(L: _Line, M: _Line) -> Point | None:
    det = L.a * M.b - L.b * M.a
    if det == 0:
        return None
    x = (L.b * M.c - M.b * L.c) / det
    y = (M.a * L.c - L.a * M.c) / det
    return (x, y)


def _critical_points(f: PwlFunction, S: list[Point]) -> list[Point]:
    """Every vertex of every arrangement cell inside the simplex ``S``."""
    dim = affine_rank(S)
    pts = list(S)
    if dim == 1:
        pts += [_lerp(S[0], S[1], t) for t in _segment_breaks(f, S[0], S[1])]
    elif dim == 2:
        lines = _arrangement(f)
        for L in lines:
            for P, Q in itertools.combinations(S, 2):
                gP, gQ = L(P), L(Q)
                if gP != gQ and (gP == 0 or gQ == 0 or (gP > 0) != (gQ > 0)):
                    pts.append(_lerp(P, Q, gP / (gP - gQ)))
        for L, M in itertools.combinations(lines, 2):
            p = _line_meet(L, M)
            if p is not None and in_hull(S, p):
                pts.append(p)
    return list(dict.fromkeys(pts))


def vanishes_on(f: PwlFunction, K: GeometricComplex) -> bool:
    """Exact test of ``f = 0`` on the support of ``K`` (n <= 2)."""
    if f.n > 2:
        raise UnsupportedDimension(f"exact checks need n <= 2, got {f.n}")
    if K.n != f.n:
        raise DimensionMismatch(f"complex in R^{K.n}, function on [0,1]^{f.n}")
    for s in K.maximal():
        S = sorted(s)
        _check_simplex(f, S)
        if any(f.value(p) != 0 for p in _critical_points(f, S)):
            return False
    return True


def ideal_member_at_depth(f: PwlFunction, stages: Sequence[Stage], i: int) -> bool:
    """Whether ``f`` vanishes on the ``i``-th complex of a stellar sequence.

    True certifies membership in the ideal of the sequence; False only says
    that depth ``i`` is not yet a witness.
    """
    if not 0 <= i < len(stages):
        raise IndexError(f"depth {i} outside 0..{len(stages) - 1}")
    return vanishes_on(f, stages[i].delta)
