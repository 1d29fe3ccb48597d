"""Bilinear products on a Lie algebra carrier and exact axiom checkers.

Every check runs on basis tuples only (bilinearity makes that sufficient)
and decides each law as a zero-polynomial identity, so "holds for all
parameter values" is an exact test.  Violations carry the basis-index
witness and the exact residual vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

from .exact import Matrix, ParamPoly, poly_is_zero
from .lie import (
    LieAlgebra,
    Subspace,
    center,
    centralizer,
    characteristic_ideals,
    ideal_at,
    product_subspace,
)
from .report import CheckReport


def _coerce(value, params: tuple) -> ParamPoly:
    if isinstance(value, ParamPoly):
        return value._remap(params) if value.params != params else value
    return ParamPoly.constant(value, params)


class BilinearProduct:
    """Product constants zeta_{ij}^k for x . y on a dim-dimensional carrier.

    Entries are stored sparsely per ordered pair (i, j); with
    ``symmetric=True`` only one representative per unordered pair needs to
    be supplied and the mirror entry is implied.
    """

    def __init__(
        self,
        dim: int,
        entries: Dict[Tuple[int, int], Dict[int, object]],
        symmetric: bool = False,
        params: tuple = (),
        name: str = "",
    ):
        self.dim = dim
        self.symmetric = symmetric
        self.params = params
        self.name = name or ("product" if not symmetric else "symmetric-product")
        table: Dict[Tuple[int, int], Dict[int, ParamPoly]] = {}
        for (i, j), comps in entries.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise ValueError(f"product key ({i},{j}) out of range")
            key = (min(i, j), max(i, j)) if symmetric else (i, j)
            row = {}
            for k, v in comps.items():
                p = _coerce(v, params)
                if not p.is_zero():
                    row[k] = p
            if not row:
                continue
            if key in table and table[key] != row:
                raise ValueError(f"conflicting entries for pair {key}")
            table[key] = row
        self.table = table

    def entry(self, i: int, j: int) -> Dict[int, ParamPoly]:
        """e_i . e_j as a sparse coordinate map."""
        if self.symmetric and i > j:
            i, j = j, i
        return self.table.get((i, j), {})

    def apply(self, x: Sequence, y: Sequence) -> list:
        out = [Fraction(0)] * self.dim
        for i in range(self.dim):
            if poly_is_zero(x[i]):
                continue
            for j in range(self.dim):
                if poly_is_zero(y[j]):
                    continue
                comps = self.entry(i, j)
                if not comps:
                    continue
                coef = x[i] * y[j]
                for k, c in comps.items():
                    out[k] = out[k] + (
                        c.constant_value() if c.is_constant() else c
                    ) * coef
        return out

    def left_mult(self, i: int) -> Matrix:
        """Matrix of L(e_i): y -> e_i . y."""
        m = Matrix.zeros(self.dim, self.dim)
        for j in range(self.dim):
            for k, c in self.entry(i, j).items():
                m.entries[k][j] = c.constant_value() if c.is_constant() else c
        return m

    def is_parameter_free(self) -> bool:
        return all(
            c.is_constant() for comps in self.table.values() for c in comps.values()
        )

    def is_symmetric_table(self) -> bool:
        if self.symmetric:
            return True
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                a, b = self.entry(i, j), self.entry(j, i)
                keys = set(a) | set(b)
                for k in keys:
                    if not poly_is_zero(a.get(k, Fraction(0)) - b.get(k, Fraction(0))):
                        return False
        return True

    def specialize(self, assignment, name: str = "") -> "BilinearProduct":
        entries = {
            key: {k: c.substitute(assignment) for k, c in comps.items()}
            for key, comps in self.table.items()
        }
        remaining = tuple(p for p in self.params if p not in assignment)
        return BilinearProduct(
            self.dim,
            entries,
            symmetric=self.symmetric,
            params=remaining if remaining else (),
            name=name or self.name,
        )

    def negate(self) -> "BilinearProduct":
        entries = {
            key: {k: -c for k, c in comps.items()} for key, comps in self.table.items()
        }
        return BilinearProduct(
            self.dim, entries, symmetric=self.symmetric, params=self.params,
            name=f"-{self.name}",
        )

    def symmetric_part(self) -> "BilinearProduct":
        """(p + p^T)/2 as a symmetric product."""
        entries: Dict[Tuple[int, int], Dict[int, ParamPoly]] = {}
        for i in range(self.dim):
            for j in range(i, self.dim):
                comps = {}
                a, b = self.entry(i, j), self.entry(j, i)
                for k in set(a) | set(b):
                    v = (
                        a.get(k, ParamPoly.zero(self.params))
                        + b.get(k, ParamPoly.zero(self.params))
                    ) * Fraction(1, 2)
                    if not poly_is_zero(v):
                        comps[k] = v
                if comps:
                    entries[(i, j)] = comps
        return BilinearProduct(
            self.dim, entries, symmetric=True, params=self.params,
            name=f"sym({self.name})",
        )

    def skew_bracket(self) -> LieAlgebra:
        """Candidate Lie bracket [x,y] = x.y - y.x (Jacobi not assumed)."""
        brackets = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                comps = {}
                a, b = self.entry(i, j), self.entry(j, i)
                for k in set(a) | set(b):
                    v = a.get(k, ParamPoly.zero(self.params)) - b.get(
                        k, ParamPoly.zero(self.params)
                    )
                    if not poly_is_zero(v):
                        comps[k] = v
                if comps:
                    brackets[(i, j)] = comps
        return LieAlgebra(
            self.dim, brackets, name=f"skew({self.name})", params=self.params
        )

    def __repr__(self):
        return f"BilinearProduct({self.name}, dim={self.dim})"


@dataclass
class PoissonData:
    """Commutative product and bracket extracted from a bilinear product."""

    circle: BilinearProduct
    bracket: LieAlgebra


# ---------------------------------------------------------------------------
# residual helpers
# ---------------------------------------------------------------------------


def _prod_sparse(p: BilinearProduct, sparse: Dict[int, ParamPoly], j: int) -> list:
    """(sum_m v_m e_m) . e_j given sparse coordinates v."""
    out = [Fraction(0)] * p.dim
    for m, vm in sparse.items():
        if poly_is_zero(vm):
            continue
        for k, c in p.entry(m, j).items():
            out[k] = out[k] + vm * c
    return out


def _prod_right_sparse(p: BilinearProduct, i: int, sparse: Dict[int, ParamPoly]) -> list:
    """e_i . (sum_m v_m e_m)."""
    out = [Fraction(0)] * p.dim
    for m, vm in sparse.items():
        if poly_is_zero(vm):
            continue
        for k, c in p.entry(i, m).items():
            out[k] = out[k] + vm * c
    return out


def _bracket_vec_sparse(g: LieAlgebra, sparse: Dict[int, object], j: int) -> list:
    """[sum_m v_m e_m, e_j]."""
    out = [Fraction(0)] * g.dim
    for m, vm in sparse.items():
        if poly_is_zero(vm):
            continue
        for k, c in g.bracket_basis(m, j).items():
            out[k] = out[k] + vm * c
    return out


def _bracket_right_sparse(g: LieAlgebra, i: int, sparse: Dict[int, object]) -> list:
    out = [Fraction(0)] * g.dim
    for m, vm in sparse.items():
        if poly_is_zero(vm):
            continue
        for k, c in g.bracket_basis(i, m).items():
            out[k] = out[k] + vm * c
    return out


def _entry_vec(p: BilinearProduct, i: int, j: int) -> Dict[int, ParamPoly]:
    return p.entry(i, j)


def _nonzero(vec) -> bool:
    return any(not poly_is_zero(x) for x in vec)


def _sub(a, b) -> list:
    return [x - y for x, y in zip(a, b)]


# ---------------------------------------------------------------------------
# axiom checkers
# ---------------------------------------------------------------------------


def check_pa(g: LieAlgebra, n: LieAlgebra, p: BilinearProduct) -> CheckReport:
    """Post-Lie axioms for a product on the pair (g, n).

    Laws: antisymmetrization x.y - y.x = [x,y] - {x,y}; representation
    [x,y].z = x.(y.z) - y.(x.z); derivation x.{y,z} = {x.y,z} + {y,x.z}.
    """
    if g.dim != n.dim or g.dim != p.dim:
        raise ValueError("dimension mismatch between brackets and product")
    d = g.dim
    report = CheckReport()
    for i in range(d):
        for j in range(i + 1, d):
            lhs = _sub(
                _dense(p.entry(i, j), d),
                _dense(p.entry(j, i), d),
            )
            rhs = _sub(
                _dense(g.bracket_basis(i, j), d),
                _dense(n.bracket_basis(i, j), d),
            )
            res = _sub(lhs, rhs)
            if _nonzero(res):
                report.add("antisymmetrization", (i + 1, j + 1), res)
    for i in range(d):
        for j in range(i + 1, d):
            w = g.bracket_basis(i, j)
            for k in range(d):
                lhs = _prod_sparse(p, w, k)
                rhs = _sub(
                    _prod_right_sparse(p, i, p.entry(j, k)),
                    _prod_right_sparse(p, j, p.entry(i, k)),
                )
                res = _sub(lhs, rhs)
                if _nonzero(res):
                    report.add("representation", (i + 1, j + 1, k + 1), res)
    for i in range(d):
        for j in range(d):
            for k in range(j + 1, d):
                w = n.bracket_basis(j, k)
                lhs = _prod_right_sparse(p, i, w)
                rhs = [
                    a + b
                    for a, b in zip(
                        _bracket_vec_sparse(n, p.entry(i, j), k),
                        _bracket_right_sparse(n, j, p.entry(i, k)),
                    )
                ]
                res = _sub(lhs, rhs)
                if _nonzero(res):
                    report.add("derivation", (i + 1, j + 1, k + 1), res)
    return report


def _dense(sparse, d) -> list:
    v = [Fraction(0)] * d
    for k, c in sparse.items():
        v[k] = c
    return v


def check_cpa(g: LieAlgebra, p: BilinearProduct) -> CheckReport:
    """Commutative post-Lie axioms for a product on a single Lie algebra."""
    if g.dim != p.dim:
        raise ValueError("dimension mismatch between bracket and product")
    d = g.dim
    report = CheckReport()
    if not p.symmetric:
        for i in range(d):
            for j in range(i + 1, d):
                res = _sub(_dense(p.entry(i, j), d), _dense(p.entry(j, i), d))
                if _nonzero(res):
                    report.add("commutativity", (i + 1, j + 1), res)
    for i in range(d):
        for j in range(i + 1, d):
            w = g.bracket_basis(i, j)
            for k in range(d):
                lhs = _prod_sparse(p, w, k)
                rhs = _sub(
                    _prod_right_sparse(p, i, p.entry(j, k)),
                    _prod_right_sparse(p, j, p.entry(i, k)),
                )
                res = _sub(lhs, rhs)
                if _nonzero(res):
                    report.add("representation", (i + 1, j + 1, k + 1), res)
    for i in range(d):
        for j in range(d):
            for k in range(j + 1, d):
                w = g.bracket_basis(j, k)
                lhs = _prod_right_sparse(p, i, w)
                rhs = [
                    a + b
                    for a, b in zip(
                        _bracket_vec_sparse(g, p.entry(i, j), k),
                        _bracket_right_sparse(g, j, p.entry(i, k)),
                    )
                ]
                res = _sub(lhs, rhs)
                if _nonzero(res):
                    report.add("derivation", (i + 1, j + 1, k + 1), res)
    return report


def check_lr(n: LieAlgebra, p: BilinearProduct) -> CheckReport:
    """LR axioms: left-commutation, antisymmetrization to the bracket,
    and the derivation law.

    Convention: x.y - y.x = {x,y} (the convention the A_4 example satisfies;
    equivalently, the negated product is the post-Lie product on the pair
    (abelian, n)).
    """
    if n.dim != p.dim:
        raise ValueError("dimension mismatch between bracket and product")
    d = n.dim
    report = CheckReport()
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(d):
                lhs = _prod_right_sparse(p, i, p.entry(j, k))
                rhs = _prod_right_sparse(p, j, p.entry(i, k))
                res = _sub(lhs, rhs)
                if _nonzero(res):
                    report.add("left-commutation", (i + 1, j + 1, k + 1), res)
    for i in range(d):
        for j in range(i + 1, d):
            lhs = _sub(_dense(p.entry(i, j), d), _dense(p.entry(j, i), d))
            rhs = _dense(n.bracket_basis(i, j), d)
            res = _sub(lhs, rhs)
            if _nonzero(res):
                report.add("antisymmetrization", (i + 1, j + 1), res)
    for i in range(d):
        for j in range(d):
            for k in range(j + 1, d):
                w = n.bracket_basis(j, k)
                lhs = _prod_right_sparse(p, i, w)
                rhs = [
                    a + b
                    for a, b in zip(
                        _bracket_vec_sparse(n, p.entry(i, j), k),
                        _bracket_right_sparse(n, j, p.entry(i, k)),
                    )
                ]
                res = _sub(lhs, rhs)
                if _nonzero(res):
                    report.add("derivation", (i + 1, j + 1, k + 1), res)
    return report


def associator_report(p: BilinearProduct) -> CheckReport:
    """(x.y).z - x.(y.z) on all basis triples."""
    d = p.dim
    report = CheckReport()
    for i in range(d):
        for j in range(d):
            for k in range(d):
                lhs = _prod_sparse(p, p.entry(i, j), k)
                rhs = _prod_right_sparse(p, i, p.entry(j, k))
                res = _sub(lhs, rhs)
                if _nonzero(res):
                    report.add("associativity", (i + 1, j + 1, k + 1), res)
    return report


def derived_subspace(g: LieAlgebra) -> Subspace:
    return product_subspace(g, Subspace.full(g.dim), Subspace.full(g.dim))


def annihilates_subspace(p: BilinearProduct, s: Subspace) -> CheckReport:
    """g . s = 0, coordinate by coordinate (parameter-aware)."""
    report = CheckReport()
    for idx, v in enumerate(s.basis_vectors()):
        sparse = {m: x for m, x in enumerate(v) if not poly_is_zero(x)}
        for i in range(p.dim):
            res = _prod_right_sparse(p, i, sparse)
            if _nonzero(res):
                report.add("annihilation", (i + 1, idx + 1), res)
    return report


def products_in_subspace(p: BilinearProduct, s: Subspace) -> CheckReport:
    """All products of basis vectors lie in s (reduction-based membership)."""
    report = CheckReport()
    for i in range(p.dim):
        for j in range(i if p.symmetric else 0, p.dim):
            vec = _dense(p.entry(i, j), p.dim)
            res = s.reduce(vec)
            if _nonzero(res):
                report.add("containment", (i + 1, j + 1), res)
    return report


@dataclass
class AssociativityReport:
    annihilation: CheckReport
    associator: CheckReport

    @property
    def passed(self) -> bool:
        return self.annihilation.passed

    @property
    def verdicts_agree(self) -> bool:
        return self.annihilation.passed == self.associator.passed


def is_associative_structure(
    g: LieAlgebra,
    p: BilinearProduct,
    derived: Optional[Subspace] = None,
    lr_center: Optional[Subspace] = None,
    lr: bool = False,
) -> AssociativityReport:
    """Annihilation verdict plus raw associator residuals.

    For the CPA reading the annihilation condition is g.[g,g] = 0; for the
    LR reading (``lr=True``) it is n.n contained in Z(n).  For a product
    satisfying the corresponding axioms the two verdicts agree.
    """
    if lr:
        z = lr_center if lr_center is not None else center(g)
        pins = products_in_subspace(p, z)
        ann = CheckReport()
        for v in pins.violations:
            ann.add("central-image", v.where, v.residual)
    else:
        s = derived if derived is not None else derived_subspace(g)
        ann = annihilates_subspace(p, s)
    return AssociativityReport(annihilation=ann, associator=associator_report(p))


def is_central(g: LieAlgebra, p: BilinearProduct, z: Optional[Subspace] = None) -> CheckReport:
    """g . g contained in Z(g)."""
    z = z if z is not None else center(g)
    return products_in_subspace(p, z)


def poisson_admissible(p: BilinearProduct) -> PoissonData:
    """Symmetrization and antisymmetrization of a product."""
    return PoissonData(circle=p.symmetric_part(), bracket=p.skew_bracket())


def check_poisson(d: PoissonData) -> CheckReport:
    """Commutative-associative product, Jacobi bracket, and the Leibniz law
    [x, y o z] = [z,x] o y + x o [z,y]."""
    report = CheckReport()
    if not d.circle.is_symmetric_table():
        report.add("commutativity", (), [])
    report.merge(associator_report(d.circle))
    report.merge(d.bracket.jacobi_check())
    g, c = d.bracket, d.circle
    dim = g.dim
    for i in range(dim):
        for j in range(dim):
            for k in range(dim):
                lhs = _bracket_right_sparse(g, i, c.entry(j, k))
                rhs = [
                    a + b
                    for a, b in zip(
                        _prod_sparse(c, g.bracket_basis(k, i), j),
                        _prod_right_sparse(c, i, g.bracket_basis(k, j)),
                    )
                ]
                res = _sub(lhs, rhs)
                if _nonzero(res):
                    report.add("leibniz", (i + 1, j + 1, k + 1), res)
    return report


@dataclass
class ImplicationReport:
    facts: dict
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures

    def render(self) -> dict:
        return {"passed": self.passed, "facts": self.facts, "failures": self.failures}


def check_implications(g: LieAlgebra, p: BilinearProduct, lr: bool = False) -> ImplicationReport:
    """Evaluate the implication chain between centrality, associativity,
    vanishing associator and the Poisson property, and assert each link.

    CPA reading: central => associative => g.g in Z([g,g]); central <=>
    (V, ., [,]) Poisson; annihilation <=> associator == 0 <=> the
    symmetrization/antisymmetrization data is Poisson.

    LR reading: products-in-center <=> associator == 0; when associative and
    Z(n) in {n,n}: n.(n.n) = (n.n).n = 0 and all left multiplications are
    nilpotent.
    """
    facts = {}
    failures = []
    if lr:
        ax = check_lr(g, p)
        facts["axioms"] = ax.passed
        z = center(g)
        in_center = products_in_subspace(p, z).passed
        assoc = associator_report(p).passed
        facts["products_in_center"] = in_center
        facts["associator_zero"] = assoc
        if in_center != assoc:
            failures.append("central-image and associator verdicts disagree")
        derived = derived_subspace(g)
        facts["center_in_derived"] = derived.contains(z)
        if in_center and facts["center_in_derived"]:
            nn = product_subspace(g, Subspace.full(g.dim), Subspace.full(g.dim), p.apply)
            left = product_subspace(g, Subspace.full(g.dim), nn, p.apply)
            facts["triple_products_vanish"] = left.is_zero()
            if not left.is_zero():
                failures.append("n.(n.n) does not vanish for an associative LR structure")
            for i in range(g.dim):
                m = p.left_mult(i)
                if not (m ** g.dim).is_zero():
                    failures.append(f"left multiplication L(e{i+1}) is not nilpotent")
                    break
        return ImplicationReport(facts, failures)

    ax = check_cpa(g, p)
    facts["axioms"] = ax.passed
    z = center(g)
    derived = derived_subspace(g)
    central = products_in_subspace(p, z).passed
    annihilates = annihilates_subspace(p, derived).passed
    assoc = associator_report(p).passed
    pd = poisson_admissible(p)
    poisson = check_poisson(pd).passed
    facts["central"] = central
    facts["annihilates_derived"] = annihilates
    facts["associator_zero"] = assoc
    facts["poisson_admissible"] = poisson
    if not (annihilates == assoc == poisson):
        failures.append("annihilation / associator / Poisson verdicts disagree")
    if central and not annihilates:
        failures.append("central structure is not associative")
    if annihilates:
        zder = centralizer(g, derived).intersect(derived)
        ok = products_in_subspace(p, zder).passed
        facts["products_in_center_of_derived"] = ok
        if not ok:
            failures.append("associative structure with g.g outside Z([g,g])")
    # (V, ., [,]) is Poisson iff the structure is central
    own = PoissonData(circle=p.symmetric_part(), bracket=g)
    own_poisson = check_poisson(own).passed
    facts["poisson_with_own_bracket"] = own_poisson
    if own_poisson != central:
        failures.append("Poisson-with-own-bracket does not match centrality")
    return ImplicationReport(facts, failures)


def check_filtration_profile(g: LieAlgebra, p: BilinearProduct, level: int) -> dict:
    """Membership profile of the products against the coordinate ideals.

    At level l the profile requires e1.e_j in I_{j+l+2} for 3 <= j <= n and
    e_i.e_j in I_{i+j+l} for pairs other than (1,1),(1,2),(2,1),(2,2).
    Reports whether the profile holds at ``level`` and at ``level + 1``.
    """
    if level < 0:
        raise ValueError("level must be nonnegative")
    ideals = characteristic_ideals(g)
    n = g.dim

    def holds(lv: int):
        witnesses = []
        for j in range(3, n + 1):
            target = ideal_at(ideals, j + lv + 2)
            vec = _dense(p.entry(0, j - 1), n)
            if _nonzero(target.reduce(vec)):
                witnesses.append((1, j))
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if (i, j) in ((1, 1), (1, 2), (2, 1), (2, 2)):
                    continue
                target = ideal_at(ideals, i + j + lv)
                vec = _dense(p.entry(i - 1, j - 1), n)
                if _nonzero(target.reduce(vec)):
                    witnesses.append((i, j))
        return witnesses

    w0 = holds(level)
    w1 = holds(level + 1)
    return {
        "level": level,
        "holds": not w0,
        "holds_next": not w1,
        "witnesses": w0,
        "witnesses_next": w1,
    }
