"""Command-line pipeline: choose a space, solve for its QES operators, analyze."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import random
import sys
import time
from pathlib import Path

from . import nsusy
from .exactcore import rat_to_json
from .liestruct import ClosureFailure, algebra_profile, closure, quadratic_envelope, span_equal
from .opdsl import ParseError, parse_op, print_op
from .qsolver import QESBasis, VerificationError, check_invariant, is_independent, solve
from .spectral import InvarianceError, spectrum
from .subspaces import MonoSpace, annihilating_set, family_space, ideal_reduce
from .weylops import DOp, compose, formal_adjoint

log = logging.getLogger("qesalg")

OUT_DIR_ENV = "QESALG_OUT_DIR"


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(obj, out: str | None):
    text = _dump(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _default_out(name: str) -> str | None:
    d = os.environ.get(OUT_DIR_ENV)
    if not d:
        return None
    Path(d).mkdir(parents=True, exist_ok=True)
    return str(Path(d) / name)


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})")


def _space_from_args(args) -> MonoSpace:
    if args.family == "custom":
        if not args.space:
            raise UsageError("--family custom needs --space FILE")
        return MonoSpace.from_json(_load_json(args.space))
    if args.n is None:
        raise UsageError(f"--family {args.family} needs --n")
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    return family_space(args.family, args.n)


def _load_ops(spec: str, dim: int) -> list[DOp]:
    """An expression, or a JSON file holding one operator or a QES basis."""
    if os.path.isfile(spec):
        obj = _load_json(spec)
        if isinstance(obj, dict) and "basis" in obj:
            return QESBasis.from_json(obj).basis
        if isinstance(obj, list):
            return [DOp.from_json(o) for o in obj]
        return [DOp.from_json(obj)]
    try:
        return [parse_op(spec, dim)]
    except ParseError as exc:
        raise UsageError(str(exc))


# ------------------------------------------------------------------ solve

def cmd_solve(args) -> int:
    space = _space_from_args(args)
    if args.order < 0:
        raise UsageError("--order must be >= 0")
    t0 = time.perf_counter()
    try:
        basis = solve(space, args.order, args.bound_shift)
    except VerificationError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - t0
    label = space.label or "custom"
    out = args.out or _default_out(f"{label.replace(':', '-')}-r{args.order}.json")
    summary = sys.stdout if out else sys.stderr
    print(f"space {label} (size {len(space)}), order {args.order}: dim {basis.dim} "
          f"[{elapsed:.3f} s]", file=summary)
    for w in basis.warnings:
        print(f"warning: {w}", file=summary)
    _emit(basis.to_json(), out)
    if out:
        print(f"wrote {out}", file=summary)
    return 0


# ----------------------------------------------------------------- verify

def verify_basis(basis: QESBasis) -> list[tuple[str, bool, str]]:
    """(check name, passed, detail) in the order the checks run."""
    report = []
    for i, op in enumerate(basis.basis):
        bad = check_invariant(op, basis.space)
        if bad is not None:
            m, res = bad
            report.append(("invariance", False,
                           f"element {i} maps monomial {list(m)} outside the space: {res.to_text()}"))
            return report
    report.append(("invariance", True, f"{basis.dim} elements preserve the space"))
    if basis.space.family is not None:
        ops = annihilating_set(basis.space)
        for i, op in enumerate(basis.basis):
            for k, a in enumerate(ops):
                red = ideal_reduce(a, op, ops)
                if not red.exact:
                    report.append(("ideal_reduce", False,
                                   f"element {i}, A_{k}: remainder {print_op(red.remainder)}"))
                    return report
        report.append(("ideal_reduce", True, f"zero remainder against {len(ops)} annihilators"))
    else:
        report.append(("ideal_reduce", True, "skipped (custom space has no built-in annihilators)"))
    if basis.basis and not is_independent(basis.basis):
        report.append(("independence", False, "basis elements are linearly dependent"))
        return report
    report.append(("independence", True, "linearly independent"))
    return report


def cmd_verify(args) -> int:
    basis = QESBasis.from_json(_load_json(args.basis))
    report = verify_basis(basis)
    for name, ok, detail in report:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return 0 if all(ok for _, ok, _ in report) else 1


# -------------------------------------------------------------- lie / env

def lie_report(ops: list[DOp]) -> dict:
    res = closure(ops)
    if isinstance(res, ClosureFailure):
        a, b = res.pair
        return {"closes": False, "dim": len(ops),
                "failure": {"pair": [a, b], "residual": print_op(res.residual)}}
    derived, center = algebra_profile(res)
    return {"closes": True, "dim": len(ops), "structure_constants": res.to_json(),
            "derived_dim": derived, "center_dim": center}


def cmd_lie(args) -> int:
    basis = QESBasis.from_json(_load_json(args.basis))
    rep = lie_report(basis.basis)
    _emit(rep, args.out)
    if rep["closes"]:
        print(f"closes: (dim, derived, center) = ({rep['dim']}, {rep['derived_dim']}, "
              f"{rep['center_dim']})", file=sys.stderr)
    elif args.require_closure:
        return 1
    return 0


def cmd_envelope(args) -> int:
    basis = QESBasis.from_json(_load_json(args.basis))
    env = quadratic_envelope(basis.basis)
    rep = {"envelope_dim": len(env)}
    if args.compare:
        other = QESBasis.from_json(_load_json(args.compare))
        rep["compare_dim"] = other.dim
        rep["span_equal"] = span_equal(env, other.basis)
    _emit(rep, args.out)
    return 0 if rep.get("span_equal", True) else 1


# -------------------------------------------------------------- spectrum

def cmd_spectrum(args) -> int:
    space = _space_from_args(args)
    ops = _load_ops(args.op, space.dim)
    if len(ops) != 1:
        if args.element is None:
            raise UsageError("--op file holds several operators; pick one with --element")
        ops = [ops[args.element]]
    try:
        spec = spectrum(ops[0], space, args.tol)
    except InvarianceError as exc:
        _emit({"error": "invariance", "monomial": list(exc.monomial),
               "residual": exc.residual.to_text()}, None)
        return 1
    obj = {"op": print_op(ops[0]), "space": space.to_json(), **spec.to_json()}
    _emit(obj, args.out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im", "mult"])
            for r in spec.roots:
                w.writerow([repr(r.re), repr(r.im), r.mult])
    return 0


# ------------------------------------------------------------------ susy

def cmd_susy(args) -> int:
    a, h = _load_ops(args.a, args.dim)[0], _load_ops(args.h, args.dim)[0]
    try:
        pair = nsusy.build_superpair(a, h)
    except nsusy.CofactorError as exc:
        _emit({"error": "cofactor", "A": print_op(a), "H": print_op(h),
               "remainder": print_op(exc.remainder)}, None)
        return 1
    aad = compose(a, formal_adjoint(a))
    coeffs = nsusy.polynomial_in(aad, h, max(a.order, 0))
    hb = pair.Hbold
    obj = {
        "A": print_op(a),
        "H": print_op(h),
        "L": print_op(pair.L),
        "Q": [[print_op(x) for x in row] for row in pair.Q],
        "Hbold": [[print_op(x) for x in row] for row in hb],
        "commutator_vanishes": pair.commutes(),
        "A_Adag": print_op(aad),
        "P": None if coeffs is None else [rat_to_json(c) for c in coeffs],
    }
    if coeffs is None:
        obj["P_note"] = f"A*A^dag is not a polynomial in H of degree <= {a.order}"
    _emit(obj, args.out)
    return 0


# ---------------------------------------------------------------- reduce

def cmd_reduce(args) -> int:
    space = _space_from_args(args)
    if space.family is None:
        raise UsageError("reduce needs a built-in family")
    ops = annihilating_set(space)
    hs = _load_ops(args.op, space.dim)
    if args.element is not None:
        hs = [hs[args.element]]
    results = []
    for i, h in enumerate(hs):
        for k, a in enumerate(ops):
            red = ideal_reduce(a, h, ops)
            results.append({
                "element": i if args.element is None else args.element,
                "k": k,
                "A": print_op(a),
                "M": [print_op(m) for m in red.multipliers],
                "remainder": print_op(red.remainder),
            })
    all_zero = all(r["remainder"] == "0" for r in results)
    _emit({"space": space.label, "all_zero": all_zero, "reductions": results}, args.out)
    return 0 if all_zero or not args.strict else 1


# -------------------------------------------------------------- selftest

def cmd_selftest(args) -> int:
    from .selftest import run_all
    results = run_all(random.Random(args.seed), args.cases)
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 0 if all(ok for _, ok in results) else 1


# ------------------------------------------------------------------ main

def _add_space_args(p, need_family=True):
    p.add_argument("--family", choices=["triangle", "rectangle", "custom"], required=need_family)
    p.add_argument("--n", type=int)
    p.add_argument("--space", help="MonoSpace JSON file for --family custom")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qesalg", description=__doc__)
    ap.add_argument("--threads", type=int, default=1,
                    help="worker threads (accepted for pipeline compatibility; results never depend on it)")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve for the QES operators of a space")
    _add_space_args(p)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--bound-shift", type=int, default=0,
                   help="raise every coefficient degree bound by this much")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="re-check a saved basis")
    p.add_argument("basis")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lie", help="closure and (dim, derived, center) profile")
    p.add_argument("basis")
    p.add_argument("--require-closure", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_lie)

    p = sub.add_parser("envelope", help="span of pairwise products, optionally compared")
    p.add_argument("basis")
    p.add_argument("--compare")
    p.add_argument("--out")
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("spectrum", help="characteristic polynomial and roots on the space")
    p.add_argument("--op", required=True, help="expression or JSON file")
    p.add_argument("--element", type=int)
    _add_space_args(p)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("susy", help="supercharge / superhamiltonian for A, H")
    p.add_argument("--a", required=True)
    p.add_argument("--h", required=True)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_susy)

    p = sub.add_parser("reduce", help="write A_k∘H as Σ M_kl∘A_l + remainder")
    p.add_argument("--op", required=True, help="expression or JSON file")
    p.add_argument("--element", type=int)
    _add_space_args(p)
    p.add_argument("--strict", action="store_true", help="exit 1 on a nonzero remainder")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("selftest", help="seeded randomized property checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=50)
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        ap.error("--threads must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
