"""Canonical JSON documents for algebras, products, matrices and solver
branches.

Every document uses the canonical polynomial text format for coefficients
and 1-based indices, and every dump is byte-deterministic (sorted keys,
two-space indent, trailing newline), so reproduction logs are diffable.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Dict, List, Tuple

from .exact import Matrix, ParamPoly
from .lie import LieAlgebra
from .solver import PolySystem, SolutionBranch, unknown_name
from .structures import BilinearProduct


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def algebra_to_doc(g: LieAlgebra) -> dict:
    brackets = []
    for (i, j) in sorted(g.table):
        comps = g.table[(i, j)]
        terms = {str(k + 1): str(c) for k, c in sorted(comps.items())}
        brackets.append({"i": i + 1, "j": j + 1, "terms": terms})
    return {
        "name": g.name,
        "dim": g.dim,
        "params": list(g.params),
        "basis": list(g.basis_labels),
        "brackets": brackets,
    }


def algebra_from_doc(doc: dict) -> LieAlgebra:
    params = tuple(doc.get("params", ()))
    brackets: Dict[Tuple[int, int], Dict[int, ParamPoly]] = {}
    for entry in doc.get("brackets", ()):
        i, j = entry["i"] - 1, entry["j"] - 1
        comps = {}
        for k, text in entry["terms"].items():
            comps[int(k) - 1] = ParamPoly.from_text(text, params)
        brackets[(i, j)] = comps
    return LieAlgebra(
        doc["dim"],
        brackets,
        name=doc.get("name", ""),
        basis_labels=doc.get("basis"),
        params=params,
    )


def product_to_doc(p: BilinearProduct, algebra: str = "") -> dict:
    entries = []
    for (i, j) in sorted(p.table):
        for k, c in sorted(p.table[(i, j)].items()):
            entries.append({"i": i + 1, "j": j + 1, "k": k + 1, "value": str(c)})
    return {
        "algebra": algebra or "inline",
        "symmetric": p.symmetric,
        "params": list(p.params),
        "entries": entries,
    }


def product_from_doc(doc: dict) -> BilinearProduct:
    params = tuple(doc.get("params", ()))
    entries: Dict[Tuple[int, int], Dict[int, ParamPoly]] = {}
    dim = 0
    for entry in doc["entries"]:
        i, j, k = entry["i"] - 1, entry["j"] - 1, entry["k"] - 1
        dim = max(dim, i + 1, j + 1, k + 1)
        entries.setdefault((i, j), {})[k] = ParamPoly.from_text(entry["value"], params)
    dim = max(dim, doc.get("dim", 0))
    return BilinearProduct(
        dim,
        entries,
        symmetric=bool(doc.get("symmetric", False)),
        params=params,
        name=doc.get("name", ""),
    )


def matrix_to_doc(m: Matrix) -> dict:
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [[str(x) for x in row] for row in m.entries],
    }


def matrix_from_doc(doc: dict) -> Matrix:
    entries = []
    for row in doc["entries"]:
        entries.append([ParamPoly.from_text(x) for x in row])
    out = []
    for row in entries:
        out.append(
            [x.constant_value() if x.is_constant() else x for x in row]
        )
    return Matrix(out)


def branches_to_doc(system: PolySystem, branches: List[SolutionBranch]) -> dict:
    return {
        "algebra": algebra_to_doc(system.algebra),
        "assume": system.assume,
        "unknowns": list(system.unknowns),
        "forced_zero": list(system.forced_zero),
        "counts": system.counts(),
        "branches": [b.render(system) for b in branches],
    }


def branches_from_doc(doc: dict) -> Tuple[PolySystem, List[SolutionBranch]]:
    """Rebuild the system (by regenerating the equations) and its branches."""
    from .solver import build_cpa_system

    g = algebra_from_doc(doc["algebra"])
    system = build_cpa_system(g, assume=doc.get("assume", "none"))
    if list(system.unknowns) != list(doc["unknowns"]):
        raise ValueError("branch document does not match the regenerated system")
    branches = []
    for bdoc in doc["branches"]:
        substitution = {
            name: ParamPoly.from_text(text, system.params)
            for name, text in bdoc["substitution"].items()
        }
        residual = [
            ParamPoly.from_text(text, system.params) for text in bdoc.get("residual", ())
        ]
        branches.append(
            SolutionBranch(
                substitution=substitution,
                residual=residual,
                trace=tuple(bdoc.get("trace", ())),
                status=bdoc["status"],
            )
        )
    return system, branches
