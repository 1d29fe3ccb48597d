"""Named reproduction scenarios: each one rebuilds its inputs from the
catalog, replays a computation end to end, and reports the key facts as a
deterministic JSON-ready dict."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Tuple

from .catalog import (
    build_algebra,
    build_cpa_family,
    build_example_products,
)
from .derivations import (
    derivation_space,
    is_nilpotent_matrix,
    ln_derivation_basis,
)
from .lie import (
    LieAlgebra,
    Subspace,
    classes_and_predicates,
    lower_central_series,
)
from .solver import (
    build_cpa_system,
    find_nonassociative_cpa,
    match_union,
    prove_annihilation,
    split_solve,
)
from .structures import (
    annihilates_subspace,
    associator_report,
    check_cpa,
    check_implications,
    check_lr,
    check_pa,
    is_associative_structure,
)


def _scenario_empty() -> Tuple[bool, dict]:
    return True, {"steps": []}


def _scenario_l6_analyze() -> Tuple[bool, dict]:
    g = build_algebra("ln", 6)
    rep = classes_and_predicates(g)
    facts = rep.render()
    ok = (
        facts["lower_central_dims"] == [6, 4, 3, 2, 1, 0]
        and facts["filiform"]
        and facts["metabelian"]
        and facts["stem"]
    )
    return ok, {"report": facts}


def _scenario_example9() -> Tuple[bool, dict]:
    g, p = build_example_products("example9")
    cpa = check_cpa(g, p)
    assoc = is_associative_structure(g, p)
    witness = None
    for v in assoc.associator.violations:
        if v.where == (2, 1, 1):
            witness = v.render()
    imp = check_implications(g, p)
    ok = (
        cpa.passed
        and not assoc.passed
        and witness is not None
        and witness["residual"][7] == "1"
        and imp.passed
    )
    return ok, {
        "cpa": cpa.passed,
        "associative": assoc.passed,
        "witness_2_1_1": witness,
        "implications": imp.render(),
    }


def _scenario_a4() -> Tuple[bool, dict]:
    n3, a4 = build_example_products("a4")
    lr = check_lr(n3, a4)
    assoc = associator_report(a4)
    witness = None
    for v in assoc.violations:
        if v.where == (2, 1, 2):
            witness = v.render()
    nil = is_nilpotent_matrix(a4.left_mult(1))
    abelian = LieAlgebra(3, {}, name="abelian3")
    pa = check_pa(abelian, n3, a4.negate())
    imp = check_implications(n3, a4, lr=True)
    ok = (
        lr.passed
        and witness is not None
        and witness["residual"][2] == "-1"
        and not nil
        and pa.passed
        and imp.passed
    )
    return ok, {
        "lr": lr.passed,
        "associator_witness_2_1_2": witness,
        "left_mult_e2_nilpotent": nil,
        "negated_passes_pa": pa.passed,
        "implications": imp.render(),
    }


def _scenario_l5_classification() -> Tuple[bool, dict]:
    g = build_algebra("ln", 5)
    system = build_cpa_system(g, assume="filiform-adapted")
    branches = split_solve(system, 256)
    fams = [build_cpa_family("ln-type1", 5), build_cpa_family("ln-type2", 5)]
    closed = all(b.closed for b in branches)
    match = match_union(system, branches, fams, samples=20, seed=0)
    ok = closed and match.passed
    return ok, {
        "branches": [b.render(system) for b in branches],
        "match": match.render(),
    }


def _scenario_q6_classification() -> Tuple[bool, dict]:
    g = build_algebra("qn", 6)
    system = build_cpa_system(g, assume="filiform-adapted")
    branches = split_solve(system, 256)
    fam = build_cpa_family("qn", 6)
    closed = all(b.closed for b in branches)
    match = match_union(system, branches, [fam], samples=20, seed=0)
    ok = closed and match.passed
    return ok, {
        "branches": [b.render(system) for b in branches],
        "match": match.render(),
    }


def _scenario_filiform6_classification() -> Tuple[bool, dict]:
    point = {"a1": Fraction(0), "a2": Fraction(0), "a3": Fraction(1)}
    g = build_algebra("filiform6", params=point)
    system = build_cpa_system(g, assume="filiform-adapted")
    branches = split_solve(system, 256)
    fam = build_cpa_family("filiform6").specialize(point)
    closed = all(b.closed for b in branches)
    match = match_union(system, branches, [fam], samples=20, seed=0)
    derived = lower_central_series(g)[1]
    prove = prove_annihilation(system, branches, Subspace.full(6), derived)
    ok = closed and match.passed and prove.proven
    return ok, {
        "branches": [b.render(system) for b in branches],
        "match": match.render(),
        "annihilation": prove.render(),
    }


def _scenario_heisenberg_classification() -> Tuple[bool, dict]:
    g = build_algebra("heisenberg")
    system = build_cpa_system(g, assume="filiform-adapted")
    branches = split_solve(system, 256)
    derived = lower_central_series(g)[1]
    prove = prove_annihilation(system, branches, Subspace.full(3), derived)
    ok = all(b.closed for b in branches) and prove.proven
    return ok, {
        "branches": [b.render(system) for b in branches],
        "annihilation": prove.render(),
    }


def _scenario_l6_derivations() -> Tuple[bool, dict]:
    g = build_algebra("ln", 6)
    space = derivation_space(g)
    explicit = ln_derivation_basis(6)
    ok = space.dim == 11 and explicit.dim == 11
    return ok, {"dim": space.dim, "explicit": explicit.dim}


def _scenario_n4_witness() -> Tuple[bool, dict]:
    g = build_algebra("nn", 4)
    derived = lower_central_series(g)[1]
    found = find_nonassociative_cpa(g, derived, max_splits=2048)
    if found is None:
        return False, {"witness": None}
    product = found["product"]
    entries = []
    for (i, j) in sorted(product.table):
        for k, c in sorted(product.table[(i, j)].items()):
            entries.append({"i": i + 1, "j": j + 1, "k": k + 1, "value": str(c)})
    ok = (
        check_cpa(g, product).passed
        and not annihilates_subspace(product, derived).passed
    )
    return ok, {
        "witness": {"branch": str(found["branch"]), "entries": entries},
        "cpa": check_cpa(g, product).passed,
    }


def _annihilation_scenario(n: int, max_splits: int) -> Tuple[bool, dict]:
    g = build_algebra("nn", n)
    system = build_cpa_system(g, assume="none")
    branches = split_solve(system, max_splits)
    lcs = lower_central_series(g)
    full = Subspace.full(g.dim)
    prove1 = prove_annihilation(system, branches, full, lcs[1])
    prove2 = prove_annihilation(system, branches, full, full, target=lcs[n - 3])
    ok = all(b.closed for b in branches) and prove1.proven and prove2.proven
    return ok, {
        "branch_count": len(branches),
        "closed": all(b.closed for b in branches),
        "free_parameters": [
            len(b.free_unknowns(system)) for b in branches
        ],
        "derived_annihilated": prove1.render(),
        "products_in_deep_term": prove2.render(),
    }


def _scenario_n5() -> Tuple[bool, dict]:
    return _annihilation_scenario(5, 4096)


def _scenario_n6() -> Tuple[bool, dict]:
    return _annihilation_scenario(6, 4096)


SCENARIOS: Dict[str, Callable[[], Tuple[bool, dict]]] = {
    "empty": _scenario_empty,
    "l6-analyze": _scenario_l6_analyze,
    "example9-checks": _scenario_example9,
    "a4-lr-checks": _scenario_a4,
    "l5-classification": _scenario_l5_classification,
    "q6-classification": _scenario_q6_classification,
    "filiform6-classification": _scenario_filiform6_classification,
    "heisenberg-classification": _scenario_heisenberg_classification,
    "l6-derivations": _scenario_l6_derivations,
    "n4-witness": _scenario_n4_witness,
    "n5-annihilation": _scenario_n5,
    "n6-annihilation": _scenario_n6,
}


def list_scenarios() -> list:
    return sorted(SCENARIOS)


def run_scenario(name: str) -> Tuple[bool, dict]:
    """Execute a named scenario; returns (passed, report dict)."""
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}")
    passed, facts = SCENARIOS[name]()
    return passed, {"scenario": name, "passed": passed, "facts": facts}
