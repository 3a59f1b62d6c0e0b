"""Seeded property fuzzer and the random generators it shares with the tests.

Every trial draws from its own ``random.Random`` seeded by a string built from
the master seed, the property name and the trial number, so reports are
reproducible and independent of the order properties run in.
"""
from __future__ import annotations

import json
import random
from fractions import Fraction
from typing import Callable

from treelex import tlex
from treelex._rational import affinely_independent
from treelex.exceptions import UnknownSuite
from treelex.forest import RootedForest, iso, random_forest
from treelex.geometry import (
    Delete,
    Identity,
    Subdivide,
    WeightedComplex,
    apply_stellar_script,
    blow_up,
    den,
    farey_mediant,
    realize,
)
from treelex.parasemifield import GeneratorAssignment, Parasemifield, cone_member, unwrap
from treelex.pwl import AffineForm, PwlFunction, convex_check, pw_add, pw_join, pw_meet, projection
from treelex.reconstruct import recover_forest, scramble

__all__ = [
    "SUITES",
    "run",
    "report_json",
    "random_assignment",
    "random_convex",
    "random_simplex",
    "random_weighted_complex",
    "random_script",
]


# generators


def random_assignment(rng: random.Random, max_vertices: int = 6, max_gens: int = 4,
                      bound: int = 3) -> GeneratorAssignment:
    F = random_forest(rng, rng.randint(1, max_vertices))
    m = rng.randint(1, max_gens)
    return GeneratorAssignment(F, tuple(tlex.random_element(F, rng, bound) for _ in range(m)))


def random_convex(rng: random.Random, n: int, pieces: int = 3, bound: int = 3) -> PwlFunction:
    """A max of random integral affine forms, hence convex."""
    forms = [[AffineForm(tuple(rng.randint(-bound, bound) for _ in range(n)), rng.randint(-bound, bound))]
             for _ in range(rng.randint(1, pieces))]
    return PwlFunction.of(n, forms)


def random_simplex(rng: random.Random, n: int, max_den: int = 8) -> list[tuple[Fraction, ...]]:
    """Affinely independent rational points in [0,1]^n, of random dimension 0..n."""
    k = rng.randint(0, n) + 1
    while True:
        pts = [tuple(Fraction(rng.randint(0, q), q) for q in (rng.randint(1, max_den) for _ in range(n)))
               for _ in range(k)]
        if len(set(pts)) == k and affinely_independent(pts):
            return pts


def random_weighted_complex(rng: random.Random, max_vertices: int = 6) -> WeightedComplex:
    k = rng.randint(1, max_vertices)
    names = [f"v{i}" for i in range(k)]
    weights = {v: rng.randint(1, 3) for v in names}
    sets = [rng.sample(names, rng.randint(1, min(3, k))) for _ in range(rng.randint(1, 3))]
    covered = {v for s in sets for v in s}
    sets += [[v] for v in names if v not in covered]
    return WeightedComplex.from_maximal(names, weights, sets)


def random_script(rng: random.Random, W: WeightedComplex, length: int) -> list:
    """A valid stellar script; the complex never becomes empty."""
    script = []
    fresh = 0
    for _ in range(length):
        edges = sorted(sorted(s) for s in W.sets if len(s) == 2)
        maximal = W.maximal()
        roll = rng.random()
        if edges and roll < 0.6:
            v, w = rng.choice(edges)
            step = Subdivide((v, w), f"a{fresh}")
            fresh += 1
        elif len(maximal) > 1 and roll < 0.9:
            step = Delete(rng.choice(maximal))
        else:
            step = Identity()
        script.append(step)
        W = apply_stellar_script(W, [step])[-1].weighted
    return script


# properties: each takes an rng and returns None or a JSON-able counterexample


def _lgroup_case(rng: random.Random):
    F = random_forest(rng, rng.randint(1, 10))
    a, b, c = (tlex.random_element(F, rng, 10 ** 6) for _ in range(3))
    return F, a, b, c


def _show(*elements) -> list:
    return [list(e.coords) for e in elements]


def _lgroup_identity(check: Callable) -> Callable:
    def prop(rng):
        F, a, b, c = _lgroup_case(rng)
        if not check(a, b, c):
            return {"forest": F.to_json(), "elements": _show(a, b, c)}
        return None
    return prop


_LGROUP = {
    "add-assoc": lambda a, b, c: (a + b) + c == a + (b + c),
    "add-comm": lambda a, b, c: a + b == b + a,
    "add-inverse": lambda a, b, c: a + (-a) == tlex.zero(a.forest),
    "join-assoc": lambda a, b, c: (a | b) | c == a | (b | c),
    "meet-assoc": lambda a, b, c: (a & b) & c == a & (b & c),
    "join-comm": lambda a, b, c: a | b == b | a,
    "meet-comm": lambda a, b, c: a & b == b & a,
    "idempotent": lambda a, b, c: a | a == a and a & a == a,
    "absorption": lambda a, b, c: a | (a & b) == a and a & (a | b) == a,
    "add-over-join": lambda a, b, c: a + (b | c) == (a + b) | (a + c),
    "add-over-meet": lambda a, b, c: a + (b & c) == (a + b) & (a + c),
    "lattice-distributive": lambda a, b, c: a & (b | c) == (a & b) | (a & c),
    "neg-swaps": lambda a, b, c: -(a | b) == (-a) & (-b),
    "order-by-join": lambda a, b, c: (a <= b) == ((a | b) == b),
    "order-compatible": lambda a, b, c: not (a <= b) or a + c <= b + c,
    "join-is-upper-bound": lambda a, b, c: a <= (a | b) and b <= (a | b),
    "meet-plus-join": lambda a, b, c: (a | b) + (a & b) == a + b,
}


def _ps_case(rng):
    F = random_forest(rng, rng.randint(1, 8))
    P = Parasemifield(F)
    a, b, c = (tlex.random_element(F, rng, 20) for _ in range(3))
    return F, P, a, b, c


def _ps_prop(check: Callable) -> Callable:
    def prop(rng):
        F, P, a, b, c = _ps_case(rng)
        if not check(P, a, b, c):
            return {"forest": F.to_json(), "elements": _show(a, b, c)}
        return None
    return prop


def _p3a(P, a, b, c):
    # force the hypothesis a + b + c = a by replacing a with a + b + c
    a = P.ps_add(P.ps_add(a, b), c)
    return P.ps_add(P.ps_add(a, b), c) == a and P.ps_add(a, b) == a


_PARASEMIFIELD = {
    "add-idempotent": lambda P, a, b, c: P.ps_add(a, a) == a,
    "mul-distributes": lambda P, a, b, c: P.ps_mul(a, P.ps_add(b, c)) == P.ps_add(P.ps_mul(a, b), P.ps_mul(a, c)),
    "mul-inverse": lambda P, a, b, c: P.ps_mul(a, P.ps_inv(a)) == P.ps_one,
    "one-neutral": lambda P, a, b, c: P.ps_mul(a, P.ps_one) == a,
    "absorbing-sum": _p3a,
    "meet-recovery": lambda P, a, b, c: P.ps_meet(a, b) == tlex.meet(a, b),
    "unwrap-signature": lambda P, a, b, c: (unwrap(P).join(a, b) == tlex.join(a, b)
                                            and unwrap(P).add(a, b) == tlex.add(a, b)
                                            and unwrap(P).meet(a, b) == tlex.meet(a, b)),
}


def _antisymmetry(rng):
    F, P, a, b, c = _ps_case(rng)
    # build pairs that are comparable in both directions as well as one-way pairs
    y = P.ps_add(a, b) if rng.random() < 0.5 else a
    if P.ps_leq(a, y) and P.ps_leq(y, a) and a != y:
        return {"forest": F.to_json(), "elements": _show(a, y)}
    return None


def _purity(rng):
    GA = random_assignment(rng)
    a = tuple(rng.randint(0, 4) for _ in range(GA.m))
    n = rng.randint(1, 10)
    if cone_member(GA, a) != cone_member(GA, tuple(n * x for x in a)):
        return {"assignment": GA.to_json(), "a": list(a), "n": n}
    return None


def _convexity(rng):
    n = rng.randint(1, 2)
    f, g = random_convex(rng, n), random_convex(rng, n)
    S = random_simplex(rng, n)
    for name, h in (("add", pw_add(f, g)), ("join", pw_join(f, g))):
        if not convex_check(h, S):
            return {"op": name, "f": f.to_json(), "g": g.to_json(),
                    "simplex": [[str(x) for x in p] for p in S]}
    return None


def _nonconvex_witness(rng):
    x = projection(1, 0)
    tent = pw_meet(x, -x + PwlFunction.of(1, [[AffineForm((0,), 1)]]))
    if convex_check(tent, [(0,), (1,)]):
        return {"f": tent.to_json()}
    return None


def _weight_denominator(rng):
    W = random_weighted_complex(rng)
    script = random_script(rng, W, rng.randint(0, 10))
    stages = apply_stellar_script(W, script)
    for i, st in enumerate(stages):
        bad = [v for v in st.weighted.vertices if st.weighted.weights[v] != den(st.iota[v])]
        if bad:
            return {"step": i, "vertices": bad}
        if realize(st.weighted, st.iota) != st.delta:
            return {"step": i, "reason": "realization differs"}
        if i and not stages[i - 1].delta.certify_support_contains(st.delta):
            return {"step": i, "reason": "support grew"}
        if i and isinstance(script[i - 1], Subdivide):
            prev = stages[i - 1]
            v, w = script[i - 1].edge
            if blow_up(prev.delta, farey_mediant(prev.iota[v], prev.iota[w])) != st.delta:
                return {"step": i, "reason": "blow-up differs"}
    return None


def _roundtrip(rng):
    F = random_forest(rng, rng.randint(1, 8))
    P = scramble(F, rng, rng.randint(0, 5))
    G = recover_forest(P)
    if not iso(F, G):
        return {"forest": F.to_json(), "recovered": G.to_json()}
    return None


SUITES: dict[str, dict[str, Callable]] = {
    "lgroup-axioms": {k: _lgroup_identity(v) for k, v in _LGROUP.items()},
    "parasemifield-axioms": {k: _ps_prop(v) for k, v in _PARASEMIFIELD.items()},
    "antisymmetry": {"antisymmetry": _antisymmetry},
    "purity": {"cone-purity": _purity},
    "convexity-closure": {"closure": _convexity, "nonconvex-witness": _nonconvex_witness},
    "weight-denominator": {"weight-denominator": _weight_denominator},
    "reconstruction-roundtrip": {"roundtrip": _roundtrip},
}


def run(suite: str, seed: int, trials: int) -> dict:
    """Run every property of ``suite`` ``trials`` times; the report is plain JSON data."""
    if suite not in SUITES:
        raise UnknownSuite(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    props = {}
    for name, prop in SUITES[suite].items():
        passed = 0
        first = None
        for t in range(trials):
            cex = prop(random.Random(f"{seed}/{suite}/{name}/{t}"))
            if cex is None:
                passed += 1
            elif first is None:
                first = {"trial": t, "case": cex}
        props[name] = {"passed": passed, "failed": trials - passed, "counterexample": first}
    return {
        "suite": suite,
        "seed": seed,
        "trials": trials,
        "ok": all(p["failed"] == 0 for p in props.values()),
        "properties": props,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)
