"""``k0calc``: command-line front end.

Exit codes: 0 for success and true verdicts, 1 for false verdicts and
obstructions, 2 for errors.
"""

from __future__ import annotations

import argparse
import io
import json
import random
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .core_sets import closure, s_measure
from .decompose import BasicSet, disjointify
from .k0 import class_of, dim_semiring_value, parse_poly
from .maps import ClassMismatch, NoInjection, basic_of_poly, injection_into_complement, synthesize_bijection
from .oracle import (
    OracleError,
    count_threshold,
    counts,
    cross_check_class,
    export_counts_csv,
    fit_counting_polynomial,
)
from .qe import eliminate
from .syntax import ParseError, parse


class UsageError(Exception):
    pass


def _read(text: str) -> str:
    if text.startswith("@"):
        return Path(text[1:]).read_text()
    return text


def _vars(args) -> list[str]:
    return [v.strip() for v in (args.vars or "").split(",") if v.strip()]


def _formula(args, text: str):
    return parse(_read(text), _vars(args), args.modulus)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _dim_text(d) -> str:
    return "-inf" if d == float("-inf") else str(d)


def _dim_json(d):
    return None if d == float("-inf") else d


def _pipeline(args, text: str):
    phi = _formula(args, text)
    qf = eliminate(phi, args.modulus)
    return phi, qf, disjointify(qf, _vars(args))


# ---------------------------------------------------------------------------
# subcommands


def cmd_qe(args) -> int:
    phi = _formula(args, args.formula)
    qf = eliminate(phi, args.modulus)
    _emit(args, {"formula": str(phi), "qf": str(qf), "disjuncts": len(qf.disjuncts)}, str(qf))
    return 0


def cmd_decompose(args) -> int:
    _, _, d = _pipeline(args, args.formula)
    lines = [str(c) for c in d.cells] or ["empty"]
    _emit(args, d.to_json(), "\n".join(lines))
    return 0


def cmd_class(args) -> int:
    _, _, d = _pipeline(args, args.formula)
    c = class_of(d, args.modulus)
    _emit(args, c.to_json(), str(c))
    return 0


def cmd_dim(args) -> int:
    _, _, d = _pipeline(args, args.formula)
    dim = dim_semiring_value(d)
    _emit(args, {"dimension": _dim_json(dim)}, _dim_text(dim))
    return 0


def cmd_equal(args) -> int:
    a = class_of(_pipeline(args, args.left)[2], args.modulus)
    b = class_of(_pipeline(args, args.right)[2], args.modulus)
    same = a == b
    text = f"equal: {a}" if same else f"not equal: {a} vs {b}"
    _emit(args, {"equal": same, "left": a.to_json(), "right": b.to_json()}, text)
    return 0 if same else 1


def cmd_count(args) -> int:
    _, qf, _ = _pipeline(args, args.formula)
    names = _vars(args)
    poly = fit_counting_polynomial(qf, names, args.modulus)
    boxes = [args.box] if args.box is not None else [b for b, _ in poly.samples]
    got = counts(qf, names, boxes, args.modulus)
    if args.csv:
        buf = io.StringIO()
        export_counts_csv(sorted(got.items()), buf)
        print(buf.getvalue(), end="")
        return 0
    payload = {
        "counts": {str(b): c for b, c in sorted(got.items())},
        "polynomial": list(poly.coeffs),
        "polynomial_text": str(poly),
        "threshold": poly.threshold,
    }
    lines = [f"B={b}: {c}" for b, c in sorted(got.items())]
    lines.append(f"polynomial: {poly} (exact for B >= {poly.threshold})")
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_check(args) -> int:
    phi = _formula(args, args.formula)
    rep = cross_check_class(phi, _vars(args), args.modulus)
    text = (
        f"{'pass' if rep.passed else 'fail'}: class {rep.class_poly}, counting {rep.counting}, "
        f"dimension {_dim_text(rep.dimension)}"
    )
    _emit(args, rep.to_json(), text)
    return 0 if rep.passed else 1


def _basic(text: str, modulus: int, start: int) -> BasicSet:
    raw = _read(text)
    if text.startswith("@") and raw.lstrip().startswith("{"):
        return BasicSet.from_json(json.loads(raw))
    poly = parse_poly(raw)
    if any(a < 0 for a in poly.coeffs):
        raise UsageError("basic sets need nonnegative coefficients")
    return corpus_mod.basic_with_points(poly, start)


def cmd_witness(args) -> int:
    n = args.modulus
    if args.kind == "injection":
        if args.k is None:
            raise UsageError("witness injection needs -k")
        try:
            w = injection_into_complement(args.k, n)
        except NoInjection as e:
            payload = {"status": "obstruction", "k": args.k, "left": e.left.to_json(), "right": e.right.to_json()}
            print(json.dumps(payload, sort_keys=True))
            return 1
    else:
        if args.left is None or args.right is None:
            raise UsageError("witness bijection needs --left and --right")
        u = _basic(args.left, n, 0)
        v = _basic(args.right, n, sum(len(l.fiber) for l in u.layers))
        try:
            w = synthesize_bijection(u, v, n)
        except ClassMismatch as e:
            _emit(
                args,
                {"status": "obstruction", "left": e.left.to_json(), "right": e.right.to_json()},
                f"obstruction: {e.left} vs {e.right}",
            )
            return 1
    rep = w.verify(n)
    payload = {"status": rep.status, "witness": w.to_json(), "report": rep.to_json()}
    text = str(w.map) + f"\nverification: {rep.status}"
    # witnesses are machine-readable by default
    print(json.dumps(payload, sort_keys=True) if args.json or args.kind == "injection" else text)
    return 0 if rep.passed else 1


def cmd_components(args) -> int:
    _, _, d = _pipeline(args, args.formula)
    comps = closure(d.cells)
    m = s_measure(comps)
    payload = {"components": [c.to_json() for c in comps], "s_measure": list(m.coeffs), "s_measure_text": str(m)}
    lines = [str(c) for c in comps] + [f"s-measure: {m}"]
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_fuzz(args) -> int:
    rng = random.Random(args.seed)
    failures = []
    for _ in range(args.count):
        item = corpus_mod.random_formula(rng, args.modulus)
        rep = cross_check_class(item.formula, item.variables, args.modulus)
        if not rep.passed:
            failures.append(rep.to_json())
    payload = {"seed": args.seed, "count": args.count, "failures": failures}
    _emit(args, payload, f"{args.count - len(failures)}/{args.count} passed")
    return 0 if not failures else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-N", "--modulus", type=int, required=True, help="number of named constants")
    common.add_argument("--vars", default="", help="comma-separated free variables, fixing the ambient power")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="k0calc", description="Definable sets, classes and witnesses for T_N.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, helptext in [
        ("qe", cmd_qe, "eliminate quantifiers"),
        ("decompose", cmd_decompose, "disjoint cell decomposition"),
        ("class", cmd_class, "class in (Z/NZ)[X]"),
        ("dim", cmd_dim, "dimension"),
        ("components", cmd_components, "irreducible components of the closure and s-measure"),
        ("check", cmd_check, "cross-check the class against oracle counts"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("formula", help="formula text or @path")
        sp.set_defaults(func=fn)
    sp = sub.add_parser("count", parents=[common], help="oracle counts and fitted polynomial")
    sp.add_argument("formula")
    sp.add_argument("--box", type=int, help="count only in [0, B)^n")
    sp.add_argument("--csv", action="store_true", help="print (B, count) samples as CSV")
    sp.set_defaults(func=cmd_count)
    sp = sub.add_parser("equal", parents=[common], help="compare the classes of two formulas")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.set_defaults(func=cmd_equal)
    sp = sub.add_parser("witness", parents=[common], help="explicit bijection or injection witness")
    sp.add_argument("kind", choices=["bijection", "injection"])
    sp.add_argument("-k", type=int, help="number of removed points (injection)")
    sp.add_argument("--left", help="basic set U: polynomial text or @file.json (bijection)")
    sp.add_argument("--right", help="basic set V: polynomial text or @file.json (bijection)")
    sp.set_defaults(func=cmd_witness)
    sp = sub.add_parser("fuzz", parents=[common], help="random class cross-checks")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=50)
    sp.set_defaults(func=cmd_fuzz)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        if args.modulus < 1:
            raise UsageError("N must be at least 1")
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except OracleError as e:
        print(f"oracle error: {e}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
