"""``treelex`` command line.

Exit status: 0 on success (boolean queries print ``true``/``false``), 1 when a
check fails or the input is mathematically invalid, 2 on usage and parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Mapping, Sequence

from treelex import expr as ex
from treelex import fuzz, parasemifield as psf, pwl, tlex
from treelex._rational import fmt_rational, parse_point
from treelex.exceptions import CertificateNotFound, ExpressionSyntaxError, TreelexError
from treelex.forest import RootedForest, ahu_canonical, iso, validate
from treelex.geometry import (
    GeometricComplex,
    WeightedComplex,
    apply_stellar_script,
    script_from_json,
)
from treelex.reconstruct import ScrambledPresentation, recover_forest


class UsageError(Exception):
    pass


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def _emit(args, payload, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


def _bool(args, value: bool, **extra) -> int:
    _emit(args, {"result": value, **extra}, "true" if value else "false")
    return 0


def _coords_text(g: tlex.TlexElement) -> str:
    return " ".join(f"{v}={c}" for v, c in zip(g.forest.vertices, g.coords))


def _forest_or_canon(raw: Mapping, depth: int | None) -> tuple[RootedForest, str]:
    if "gens" in raw:
        F = recover_forest(ScrambledPresentation.from_json(raw), depth)
    else:
        F = validate(raw)
    return F, ahu_canonical(F)


# commands


def cmd_canon(args) -> int:
    F = validate(_load(args.forest))
    s = ahu_canonical(F)
    _emit(args, {"canonical": s}, s)
    return 0


def cmd_iso(args) -> int:
    F, cf = _forest_or_canon(_load(args.a), args.depth)
    G, cg = _forest_or_canon(_load(args.b), args.depth)
    res = iso(F, G)
    return _bool(args, res.isomorphic, mapping=res.mapping, canonical=[cf, cg])


def cmd_reconstruct(args) -> int:
    P = ScrambledPresentation.from_json(_load(args.presentation))
    F = recover_forest(P, args.depth)
    s = ahu_canonical(F)
    _emit(args, {"forest": F.to_json(), "canonical": s}, s)
    return 0


def _env(raw: Mapping) -> tuple[RootedForest, dict[str, tlex.TlexElement]]:
    F = validate(raw["forest"])
    env = {}
    for name, val in raw.get("elements", {}).items():
        if isinstance(val, Mapping) and "coords" in val:
            val = val["coords"]
        env[name] = tlex.element(F, val)
    return F, env


def cmd_eval(args) -> int:
    F, env = _env(_load(args.env))
    e = ex.parse(args.expr, args.mode)
    g = ex.evaluate(e, env, F)
    _emit(args, {"coords": g.to_json()["coords"], "expr": ex.to_string(e, args.mode)},
          _coords_text(g))
    return 0


def cmd_stellar(args) -> int:
    W0 = WeightedComplex.from_json(_load(args.complex))
    script = script_from_json(_load(args.script))
    stages = apply_stellar_script(W0, script)
    if args.emit_steps:
        out = Path(args.emit_steps)
        out.mkdir(parents=True, exist_ok=True)
        for i, st in enumerate(stages):
            (out / f"step_{i:03d}.json").write_text(json.dumps(st.to_json(i), indent=2) + "\n")
    final = stages[-1]
    lines = [f"step {i}: {len(st.weighted.vertices)} vertices, {len(st.delta.maximal())} maximal simplexes"
             for i, st in enumerate(stages)]
    _emit(args, {"steps": len(stages), "final": final.to_json(len(stages) - 1)}, "\n".join(lines))
    return 0


def _simplex(text: str) -> list:
    return [parse_point(p) for p in text.split(";") if p.strip()]


def _load_steps(directory: str) -> list:
    files = sorted(Path(directory).glob("step_*.json"))
    if not files:
        raise UsageError(f"no step_*.json files in {directory}")
    return files


def cmd_pwl(args) -> int:
    f = pwl.PwlFunction.from_json(_load(args.fn))
    if args.action == "eval":
        if args.point is None:
            raise UsageError("pwl eval needs --point")
        v = pwl.eval_at(f, parse_point(args.point))
        _emit(args, {"value": fmt_rational(v)}, fmt_rational(v))
        return 0
    if args.action == "convex":
        if args.simplex:
            simplexes = [_simplex(args.simplex)]
        elif args.complex:
            K = GeometricComplex.from_json(_load(args.complex))
            simplexes = [sorted(s) for s in K.maximal()]
        elif f.n == 1:
            simplexes = [[(0,), (1,)]]
        else:
            raise UsageError("pwl convex needs --simplex or --complex when n > 1")
        return _bool(args, all(pwl.convex_check(f, S) for S in simplexes))
    if args.action == "vanish":
        if not args.complex:
            raise UsageError("pwl vanish needs --complex")
        return _bool(args, pwl.vanishes_on(f, GeometricComplex.from_json(_load(args.complex))))
    # ideal
    if args.steps is None or args.depth is None:
        raise UsageError("pwl ideal needs --steps and --depth")
    files = _load_steps(args.steps)
    if not 0 <= args.depth < len(files):
        raise UsageError(f"depth {args.depth} outside 0..{len(files) - 1}")
    delta = GeometricComplex.from_json(json.loads(files[args.depth].read_text())["delta"])
    return _bool(args, pwl.vanishes_on(f, delta), depth=args.depth)


def cmd_cone(args) -> int:
    GA = psf.GeneratorAssignment.from_json(_load(args.gens))
    a = tuple(int(x) for x in args.exp.split(",") if x.strip())
    return _bool(args, psf.cone_member(GA, a))


def cmd_unit(args) -> int:
    GA = psf.GeneratorAssignment.from_json(_load(args.gens))
    c = psf.find_interior_cone_point(GA, args.degree_bound)
    if c is not None:
        u, source = psf.def2_unit_from_cone(GA, c), "cone"
    else:
        u, source = psf.fallback_unit(GA.forest), "fallback"
    # u <= 0 in both cases, so the certificate search is a bounded bisection
    bound = 1
    certs = []
    for g in GA.gens:
        while True:
            try:
                certs.append(psf.def2_check(u, g, bound))
                break
            except CertificateNotFound:
                bound *= 2
    payload = {"source": source, "c": list(c) if c is not None else None,
               "unit": u.to_json()["coords"], "certificates": certs}
    text = f"{source} unit {_coords_text(u)}\ncertificates {' '.join(map(str, certs))}"
    _emit(args, payload, text)
    return 0


def cmd_fuzz(args) -> int:
    if args.seed is None:
        raise UsageError("fuzz needs an explicit --seed")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    report = fuzz.run(args.suite, args.seed, args.trials)
    if args.format == "json":
        print(fuzz.report_json(report))
    else:
        for name, p in report["properties"].items():
            status = "ok" if p["failed"] == 0 else "FAIL"
            print(f"{status:4} {name}: {p['passed']}/{report['trials']}")
            if p["counterexample"] is not None:
                print("     " + json.dumps(p["counterexample"], sort_keys=True))
    return 0 if report["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="treelex", description="Tree-lexicographic l-groups and friends.")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized commands")
    p.add_argument("--format", choices=("text", "json"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("canon", parents=[common], help="AHU canonical string of a forest")
    s.add_argument("--forest", required=True)
    s.set_defaults(func=cmd_canon)

    s = sub.add_parser("iso", parents=[common], help="isomorphism of forests or presentations")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--depth", type=int)
    s.set_defaults(func=cmd_iso)

    s = sub.add_parser("reconstruct", parents=[common], help="recover the forest of a presentation")
    s.add_argument("--presentation", required=True)
    s.add_argument("--depth", type=int)
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("eval", parents=[common], help="evaluate an expression")
    s.add_argument("--env", required=True)
    s.add_argument("--expr", required=True)
    s.add_argument("--mode", choices=ex.MODES, default="lgroup")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("stellar", parents=[common], help="apply a stellar script")
    s.add_argument("--complex", required=True)
    s.add_argument("--script", required=True)
    s.add_argument("--emit-steps", metavar="DIR")
    s.set_defaults(func=cmd_stellar)

    s = sub.add_parser("pwl", parents=[common], help="piecewise-linear function checks")
    s.add_argument("action", choices=("eval", "convex", "vanish", "ideal"))
    s.add_argument("--fn", required=True)
    s.add_argument("--complex")
    s.add_argument("--steps")
    s.add_argument("--depth", type=int)
    s.add_argument("--point")
    s.add_argument("--simplex", help='vertices separated by ";", e.g. "0,0;1,0;0,1"')
    s.set_defaults(func=cmd_pwl)

    s = sub.add_parser("cone", parents=[common], help="cone membership of an exponent vector")
    s.add_argument("--gens", required=True)
    s.add_argument("--exp", required=True)
    s.set_defaults(func=cmd_cone)

    s = sub.add_parser("unit", parents=[common], help="order-unit with certificates")
    s.add_argument("--gens", required=True)
    s.add_argument("--degree-bound", type=int, default=6)
    s.set_defaults(func=cmd_unit)

    s = sub.add_parser("fuzz", parents=[common], help="seeded property fuzzer")
    s.add_argument("--suite", required=True, choices=sorted(fuzz.SUITES))
    s.add_argument("--trials", type=int, default=100)
    s.set_defaults(func=cmd_fuzz)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ExpressionSyntaxError) as exc:
        print(f"treelex: {exc}", file=sys.stderr)
        return 2
    except KeyError as exc:
        if not isinstance(exc, TreelexError):
            print(f"treelex: input is missing the field {exc}", file=sys.stderr)
            return 2
        print(f"treelex: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (TreelexError, ValueError) as exc:
        print(f"treelex: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
