"""Command-line surface.

Subcommands: ``algebra build|analyze``, ``cpa check|solve|verify-family|prove``,
``der basis|nilpotent``, ``scenario run|list``.

Exit codes: 0 pass, 1 fail/counterexample, 2 unresolved, 64 usage error,
66 file error.  ``CPALAB_MAX_SPLITS`` overrides the default split budget.
Reports are printed as deterministic JSON with ``--json``, as short text
otherwise.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import documents
from .catalog import (
    ALGEBRA_FAMILIES,
    CPA_FAMILIES,
    build_algebra,
    build_cpa_family,
    triangular_reduction_ideals,
)
from .derivations import derivation_space, is_nilpotent_matrix, ln_derivation_basis
from .exact import ParamPoly
from .lie import (
    Subspace,
    center,
    characteristic_ideals,
    classes_and_predicates,
    lower_central_series,
)
from .scenarios import list_scenarios, run_scenario
from .solver import (
    build_cpa_system,
    prove_annihilation,
    solve_cpa,
    split_solve,
    verify_family,
)
from .structures import check_cpa, check_implications, check_lr, check_pa, check_poisson, poisson_admissible

EX_OK = 0
EX_FAIL = 1
EX_UNRESOLVED = 2
EX_USAGE = 64
EX_FILE = 66


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _emit(args, report: dict, text: str = "") -> None:
    if getattr(args, "json", False):
        sys.stdout.write(documents.dumps(report))
    else:
        sys.stdout.write((text or json.dumps(report, sort_keys=True)) + "\n")


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"cannot read {path}: {exc}\n")
        raise SystemExit(EX_FILE)


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        sys.stderr.write(f"cannot write {path}: {exc}\n")
        raise SystemExit(EX_FILE)


def _parse_params(pairs) -> dict:
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise SystemExit(EX_USAGE)
        key, value = pair.split("=", 1)
        out[key.strip()] = Fraction(value.strip())
    return out


def _subspace(selector: str, g) -> Subspace:
    full = Subspace.full(g.dim)
    if selector == "g":
        return full
    if selector == "derived":
        return lower_central_series(g)[1]
    if selector == "center":
        return center(g)
    if selector == "zero":
        return Subspace.zero(g.dim)
    if selector.startswith("lcs:"):
        k = int(selector.split(":", 1)[1])
        chain = lower_central_series(g)
        return chain[k] if k < len(chain) else Subspace.zero(g.dim)
    if selector.startswith("ideal:"):
        j = int(selector.split(":", 1)[1])
        ideals = characteristic_ideals(g)
        return ideals[j - 1] if j <= g.dim else Subspace.zero(g.dim)
    raise SystemExit(EX_USAGE)


def _default_splits() -> int:
    return int(os.environ.get("CPALAB_MAX_SPLITS", "256"))


# -- subcommand handlers -----------------------------------------------------


def _cmd_algebra_build(args) -> int:
    g = build_algebra(args.family, args.n, _parse_params(args.param))
    doc = documents.algebra_to_doc(g)
    if args.out:
        _write(args.out, documents.dumps(doc))
        _emit(args, {"written": args.out, "name": g.name, "dim": g.dim},
              f"wrote {g.name} (dim {g.dim}) to {args.out}")
    else:
        sys.stdout.write(documents.dumps(doc))
    return EX_OK


def _cmd_algebra_analyze(args) -> int:
    g = documents.algebra_from_doc(_load_json(args.file))
    jac = g.jacobi_check()
    report = {"name": g.name, "dim": g.dim, "jacobi": jac.passed}
    if g.is_parameter_free():
        rep = classes_and_predicates(g)
        report.update(rep.render())
        text = (
            f"{g.name}: dim {g.dim}, jacobi {'ok' if jac.passed else 'FAIL'}, "
            f"series {rep.lower_central_dims}, filiform={rep.is_filiform}, "
            f"metabelian={rep.is_metabelian}, stem={rep.is_stem}"
        )
    else:
        report["params"] = list(g.params)
        text = f"{g.name}: dim {g.dim} (parametric), jacobi {'ok' if jac.passed else 'FAIL'}"
    _emit(args, report, text)
    return EX_OK if jac.passed else EX_FAIL


def _cmd_cpa_check(args) -> int:
    g = documents.algebra_from_doc(_load_json(args.algebra))
    p = documents.product_from_doc(_load_json(args.product))
    report: dict = {"algebra": g.name, "axioms": args.axioms}
    if args.axioms == "cpa":
        rep = check_cpa(g, p)
    elif args.axioms == "lr":
        rep = check_lr(g, p)
    else:
        if not args.pair_algebra:
            sys.stderr.write("--axioms pa needs --pair-algebra\n")
            return EX_USAGE
        n = documents.algebra_from_doc(_load_json(args.pair_algebra))
        rep = check_pa(g, n, p)
    report["passed"] = rep.passed
    report["violations"] = [v.render() for v in rep.violations[:20]]
    ok = rep.passed
    if args.poisson:
        pd = poisson_admissible(p)
        poisson = check_poisson(pd)
        report["poisson"] = poisson.passed
        ok = ok and poisson.passed
    if args.implications:
        imp = check_implications(g, p, lr=args.axioms == "lr")
        report["implications"] = imp.render()
        ok = ok and imp.passed
    _emit(args, report, f"{args.axioms} check: {'pass' if report['passed'] else 'fail'}")
    return EX_OK if ok else EX_FAIL


def _cmd_cpa_solve(args) -> int:
    g = documents.algebra_from_doc(_load_json(args.algebra))
    ideals = ()
    if args.quotient_preprocess:
        n = 1
        while n * (n - 1) // 2 < g.dim:
            n += 1
        if n * (n - 1) // 2 != g.dim or n < 5:
            sys.stderr.write(
                "--quotient-preprocess needs a strictly-upper-triangular algebra of size >= 5\n"
            )
            return EX_USAGE
        red = triangular_reduction_ideals(n)
        ideals = (red["a"], red["b"])
    system, branches = solve_cpa(
        g,
        assume=args.assume,
        max_splits=args.max_splits,
        preprocess_ideals=ideals,
    )
    doc = documents.branches_to_doc(system, branches)
    if args.out:
        _write(args.out, documents.dumps(doc))
    closed = sum(1 for b in branches if b.closed)
    unresolved = len(branches) - closed
    report = {
        "branches": len(branches),
        "closed": closed,
        "unresolved": unresolved,
        "counts": system.counts(),
        "out": args.out,
    }
    _emit(args, report,
          f"solve: {len(branches)} branches ({closed} closed, {unresolved} unresolved)")
    return EX_OK if unresolved == 0 else EX_UNRESOLVED


def _cmd_cpa_verify_family(args) -> int:
    fam = build_cpa_family(args.family, args.n)
    rep = verify_family(None, fam)
    report = {
        "family": fam.name,
        "n": fam.n,
        "passed": rep.passed,
        "violations": [v.render() for v in rep.violations[:10]],
    }
    _emit(args, report, f"verify-family {fam.name} n={fam.n}: "
          f"{'pass' if rep.passed else 'fail'}")
    return EX_OK if rep.passed else EX_FAIL


def _cmd_cpa_prove(args) -> int:
    system, branches = documents.branches_from_doc(_load_json(args.branches))
    g = system.algebra
    left = _subspace(args.left, g)
    right = _subspace(args.right, g)
    target = _subspace(args.target, g) if args.target else None
    rep = prove_annihilation(system, branches, left, right, target=target)
    report = rep.render()
    _emit(args, report, f"prove: {rep.status}")
    if rep.status == "proven":
        return EX_OK
    if rep.status == "unproven":
        return EX_UNRESOLVED
    return EX_FAIL


def _cmd_der_basis(args) -> int:
    g = documents.algebra_from_doc(_load_json(args.algebra))
    space = derivation_space(g)
    report = {"algebra": g.name, "dim": space.dim}
    ok = True
    if args.check_ln:
        try:
            explicit = ln_derivation_basis(g.dim)
            report["explicit_basis"] = explicit.dim
            report["span_matches"] = explicit.dim == space.dim
            ok = report["span_matches"]
        except AssertionError as exc:
            report["explicit_basis_error"] = str(exc)
            ok = False
    if args.json:
        report["basis"] = [documents.matrix_to_doc(m) for m in space.basis]
    _emit(args, report, f"Der({g.name}): dimension {space.dim}")
    return EX_OK if ok else EX_FAIL


def _cmd_der_nilpotent(args) -> int:
    g = documents.algebra_from_doc(_load_json(args.algebra))
    m = documents.matrix_from_doc(_load_json(args.matrix))
    nil = is_nilpotent_matrix(m)
    _emit(args, {"nilpotent": nil}, f"nilpotent: {nil}")
    return EX_OK if nil else EX_FAIL


def _cmd_scenario_run(args) -> int:
    try:
        passed, report = run_scenario(args.name)
    except KeyError:
        sys.stderr.write(f"unknown scenario {args.name!r}\n")
        return EX_USAGE
    text = documents.dumps(report)
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    return EX_OK if passed else EX_FAIL


def _cmd_scenario_list(args) -> int:
    for name in list_scenarios():
        sys.stdout.write(name + "\n")
    return EX_OK


# -- parser ------------------------------------------------------------------


def make_parser() -> _Parser:
    parser = _Parser(prog="cpalab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    algebra = sub.add_parser("algebra", help="build and analyze algebras")
    asub = algebra.add_subparsers(dest="subcommand", required=True)
    build = asub.add_parser("build")
    build.add_argument("--family", required=True, choices=ALGEBRA_FAMILIES)
    build.add_argument("--n", type=int, default=None)
    build.add_argument("--param", action="append", metavar="K=V")
    build.add_argument("--out")
    build.add_argument("--json", action="store_true")
    build.set_defaults(func=_cmd_algebra_build)
    analyze = asub.add_parser("analyze")
    analyze.add_argument("file")
    analyze.add_argument("--json", action="store_true")
    analyze.set_defaults(func=_cmd_algebra_analyze)

    cpa = sub.add_parser("cpa", help="product axioms, solving and proofs")
    csub = cpa.add_subparsers(dest="subcommand", required=True)
    check = csub.add_parser("check")
    check.add_argument("--algebra", required=True)
    check.add_argument("--product", required=True)
    check.add_argument("--axioms", choices=("pa", "cpa", "lr"), default="cpa")
    check.add_argument("--pair-algebra")
    check.add_argument("--poisson", action="store_true")
    check.add_argument("--implications", action="store_true")
    check.add_argument("--json", action="store_true")
    check.set_defaults(func=_cmd_cpa_check)
    solve = csub.add_parser("solve")
    solve.add_argument("--algebra", required=True)
    solve.add_argument("--assume", choices=("none", "filiform-adapted"), default="none")
    solve.add_argument("--max-splits", type=int, default=_default_splits())
    solve.add_argument("--quotient-preprocess", action="store_true")
    solve.add_argument("--out")
    solve.add_argument("--json", action="store_true")
    solve.set_defaults(func=_cmd_cpa_solve)
    vf = csub.add_parser("verify-family")
    vf.add_argument("--family", required=True, choices=CPA_FAMILIES)
    vf.add_argument("--n", type=int, default=None)
    vf.add_argument("--json", action="store_true")
    vf.set_defaults(func=_cmd_cpa_verify_family)
    prove = csub.add_parser("prove")
    prove.add_argument("--branches", required=True)
    prove.add_argument("--left", default="g")
    prove.add_argument("--right", default="derived")
    prove.add_argument("--target")
    prove.add_argument("--json", action="store_true")
    prove.set_defaults(func=_cmd_cpa_prove)

    der = sub.add_parser("der", help="derivation algebra tools")
    dsub = der.add_subparsers(dest="subcommand", required=True)
    basis = dsub.add_parser("basis")
    basis.add_argument("--algebra", required=True)
    basis.add_argument("--check-ln", action="store_true")
    basis.add_argument("--json", action="store_true")
    basis.set_defaults(func=_cmd_der_basis)
    nilp = dsub.add_parser("nilpotent")
    nilp.add_argument("--algebra", required=True)
    nilp.add_argument("--matrix", required=True)
    nilp.add_argument("--json", action="store_true")
    nilp.set_defaults(func=_cmd_der_nilpotent)

    scenario = sub.add_parser("scenario", help="reproduction scenarios")
    ssub = scenario.add_subparsers(dest="subcommand", required=True)
    run = ssub.add_parser("run")
    run.add_argument("name")
    run.add_argument("--out")
    run.add_argument("--seed", type=int, default=0)
    run.set_defaults(func=_cmd_scenario_run)
    lst = ssub.add_parser("list")
    lst.set_defaults(func=_cmd_scenario_list)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except (ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EX_FAIL


if __name__ == "__main__":
    sys.exit(main())
