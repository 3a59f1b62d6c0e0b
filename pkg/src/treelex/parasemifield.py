"""Additively idempotent parasemifield view of G(F), cones and order-units.

The semiring addition is the lattice join, the semiring multiplication is the
group addition, inversion is group negation and the multiplicative unit is the
group zero. A generator assignment sends the polynomial variables x_1..x_m to
elements g_1..g_m; the monomial x^a then evaluates to sum(a_i * g_i).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, NamedTuple, Sequence

from treelex import tlex
from treelex.exceptions import (
    CertificateNotFound,
    ForestMismatch,
    LengthMismatch,
    NonPositive,
    NotPrime,
)
from treelex.forest import RootedForest, validate
from treelex.tlex import TlexElement

__all__ = [
    "Parasemifield",
    "LGroupView",
    "GeneratorAssignment",
    "wrap",
    "unwrap",
    "monomial_eval",
    "cone_member",
    "graded_lex",
    "find_interior_cone_point",
    "def2_unit_from_cone",
    "fallback_unit",
    "def2_check",
    "p_adic_valuation",
    "padic_member",
]


class LGroupView(NamedTuple):
    add: object
    neg: object
    zero: TlexElement
    join: object
    meet: object


@dataclass(frozen=True)
class Parasemifield:
    """G(F) in semiring signature (+ = join, * = group add)."""

    forest: RootedForest

    def ps_add(self, a: TlexElement, b: TlexElement) -> TlexElement:
        return tlex.join(a, b)

    def ps_mul(self, a: TlexElement, b: TlexElement) -> TlexElement:
        return tlex.add(a, b)

    def ps_inv(self, a: TlexElement) -> TlexElement:
        return tlex.neg(a)

    @property
    def ps_one(self) -> TlexElement:
        return tlex.zero(self.forest)

    def ps_pow(self, a: TlexElement, n: int) -> TlexElement:
        return tlex.scale(n, a)

    def ps_leq(self, a: TlexElement, b: TlexElement) -> bool:
        """Semiring order: ``a <= b`` iff ``a = b`` or ``a + c = b`` for some ``c``."""
        # ``a + b = b`` already witnesses c = b; conversely a + c = b forces a + b = b
        return self.ps_add(a, b) == b

    def ps_meet(self, a: TlexElement, b: TlexElement) -> TlexElement:
        """Meet recovered from the semiring operations: (a^-1 + b^-1)^-1."""
        return self.ps_inv(self.ps_add(self.ps_inv(a), self.ps_inv(b)))


def wrap(F: RootedForest) -> Parasemifield:
    return Parasemifield(F)


def unwrap(P: Parasemifield) -> LGroupView:
    """Recover the lattice-group signature purely from semiring operations."""
    return LGroupView(
        add=P.ps_mul,
        neg=P.ps_inv,
        zero=P.ps_one,
        join=P.ps_add,
        meet=P.ps_meet,
    )


@dataclass(frozen=True)
class GeneratorAssignment:
    forest: RootedForest
    gens: tuple[TlexElement, ...]

    def __post_init__(self):
        for g in self.gens:
            if g.forest != self.forest:
                raise ForestMismatch("generator over a different forest")

    @property
    def m(self) -> int:
        return len(self.gens)

    def to_json(self) -> dict:
        return {
            "forest": self.forest.to_json(),
            "gens": [{"coords": g.to_json()["coords"]} for g in self.gens],
        }

    @classmethod
    def from_json(cls, raw: Mapping) -> "GeneratorAssignment":
        F = validate(raw["forest"])
        gens = tuple(TlexElement.from_json({"coords": g["coords"]}, forest=F) for g in raw["gens"])
        return cls(F, gens)


def _check_len(GA: GeneratorAssignment, a: Sequence[int]) -> None:
    if len(a) != GA.m:
        raise LengthMismatch(f"exponent of length {len(a)} for {GA.m} generators")
    if any(x < 0 for x in a):
        raise ValueError("exponents must be non-negative")


def monomial_eval(GA: GeneratorAssignment, a: Sequence[int]) -> TlexElement:
    _check_len(GA, a)
    coords = [0] * len(GA.forest)
    for ai, g in zip(a, GA.gens):
        if ai:
            for j, c in enumerate(g.coords):
                coords[j] += ai * c
    return TlexElement(GA.forest, tuple(coords))


def cone_member(GA: GeneratorAssignment, a: Sequence[int]) -> bool:
    """``a`` is in the cone iff the monomial x^a evaluates to something <= 1.

    In an idempotent parasemifield the prime subparasemifield is {1}, so the
    bounded part Q is exactly the elements below the unit.
    """
    return tlex.leq(monomial_eval(GA, a), tlex.zero(GA.forest))


def _compositions(d: int, m: int) -> Iterator[tuple[int, ...]]:
    if m == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in _compositions(d - first, m - 1):
            yield (first,) + rest


def graded_lex(m: int, max_degree: int) -> Iterator[tuple[int, ...]]:
    """Exponent vectors by total degree, lexicographically ascending within a degree."""
    if m == 0:
        yield ()
        return
    for d in range(max_degree + 1):
        yield from _compositions(d, m)


def find_interior_cone_point(GA: GeneratorAssignment, degree_bound: int) -> tuple[int, ...] | None:
    """First ``c`` (graded-lex) with ``c`` and every ``c + e_i`` in the cone; ``None`` if absent."""
    if degree_bound < 0:
        raise ValueError("degree_bound must be non-negative")
    m = GA.m
    for c in graded_lex(m, degree_bound):
        if not cone_member(GA, c):
            continue
        if all(cone_member(GA, c[:i] + (c[i] + 1,) + c[i + 1:]) for i in range(m)):
            return c
    return None


def def2_unit_from_cone(GA: GeneratorAssignment, c: Sequence[int]) -> TlexElement:
    return monomial_eval(GA, c)


def fallback_unit(F: RootedForest) -> TlexElement:
    """Inverse of the group order-unit; certifies every element."""
    return tlex.neg(tlex.group_order_unit(F))


def _certifies(u: TlexElement, s: TlexElement, n: int) -> bool:
    return tlex._nonneg(u.forest, [-(n * a + b) for a, b in zip(u.coords, s.coords)])


def def2_check(u: TlexElement, s: TlexElement, n_bound: int) -> int:
    """Least ``n`` in ``1..n_bound`` with ``u^n s + 1 = 1`` (``n*u + s <= 0``).

    Raises :class:`CertificateNotFound` when no such ``n`` exists in range.
    For ``u <= 0`` the valid ``n`` form an up-set, so a galloping search is used.
    """
    tlex._same(u, s)
    if n_bound < 1:
        raise CertificateNotFound(n_bound)
    if tlex.leq(u, tlex.zero(u.forest)):
        if not _certifies(u, s, n_bound):
            raise CertificateNotFound(n_bound)
        lo, hi = 0, 1
        while hi < n_bound and not _certifies(u, s, hi):
            lo, hi = hi, min(2 * hi, n_bound)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if _certifies(u, s, mid):
                hi = mid
            else:
                lo = mid
        return hi
    for n in range(1, n_bound + 1):
        if _certifies(u, s, n):
            return n
    raise CertificateNotFound(n_bound)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def p_adic_valuation(x: Fraction, p: int) -> int:
    x = Fraction(x)
    if x == 0:
        raise NonPositive("valuation of 0 is undefined")
    v = 0
    num, den = abs(x.numerator), x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def padic_member(x, p: int) -> bool:
    """Membership of ``x`` in the subsemiring {x in Q+ : 2^(-v_p(x)) < x}."""
    x = Fraction(x)
    if not _is_prime(p):
        raise NotPrime(p)
    if x <= 0:
        raise NonPositive(x)
    return Fraction(2) ** (-p_adic_valuation(x, p)) < x
