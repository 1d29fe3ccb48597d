"""Structure-constant model of finite-dimensional Lie algebras.

A Lie algebra is stored as antisymmetric structure constants c_{ij}^k over
``ParamPoly`` coefficients (indices 0-based internally, 1-based in all
rendered output).  Subspaces are canonicalized by reduced row echelon form,
so subspace equality and containment are exact matrix tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .exact import (
    Matrix,
    ParamPoly,
    ParametricEliminationError,
    poly_is_zero,
    solve_linear,
)
from .report import CheckReport


class AdaptedBasisError(ValueError):
    """Raised when a filiform-adapted basis is required but absent."""


class NotAnIdealError(ValueError):
    """Raised when a quotient is requested by a subspace that is not an ideal."""


def _coerce_coeff(value, params: tuple) -> ParamPoly:
    if isinstance(value, ParamPoly):
        return value._remap(params) if value.params != params else value
    return ParamPoly.constant(value, params)


class LieAlgebra:
    """dim, basis labels and the sparse bracket table [e_i, e_j] for i < j."""

    def __init__(
        self,
        dim: int,
        brackets: Dict[Tuple[int, int], Dict[int, object]],
        name: str = "",
        basis_labels: Optional[Sequence[str]] = None,
        params: tuple = (),
    ):
        if dim < 0:
            raise ValueError("dimension must be nonnegative")
        self.dim = dim
        self.name = name or f"lie{dim}"
        self.params = params
        self.basis_labels = (
            list(basis_labels)
            if basis_labels is not None
            else [f"e{i+1}" for i in range(dim)]
        )
        if len(self.basis_labels) != dim:
            raise ValueError("basis label count does not match dimension")
        table: Dict[Tuple[int, int], Dict[int, ParamPoly]] = {}
        for (i, j), comps in brackets.items():
            if not (0 <= i < j < dim):
                raise ValueError(f"bracket key ({i},{j}) must satisfy 0 <= i < j < dim")
            row = {}
            for k, v in comps.items():
                if not 0 <= k < dim:
                    raise ValueError(f"bracket target {k} out of range")
                p = _coerce_coeff(v, params)
                if not p.is_zero():
                    row[k] = p
            if row:
                table[(i, j)] = row
        self.table = table

    # -- basic access ----------------------------------------------------

    def bracket_basis(self, i: int, j: int) -> Dict[int, ParamPoly]:
        """[e_i, e_j] as a sparse coordinate map (antisymmetry applied)."""
        if i == j:
            return {}
        if i < j:
            return self.table.get((i, j), {})
        return {k: -v for k, v in self.table.get((j, i), {}).items()}

    def bracket(self, x: Sequence, y: Sequence) -> list:
        """Bilinear expansion of [x, y] for coordinate vectors."""
        if len(x) != self.dim or len(y) != self.dim:
            raise ValueError("vector length does not match algebra dimension")
        out = [Fraction(0)] * self.dim
        for (i, j), comps in self.table.items():
            coef = x[i] * y[j] - x[j] * y[i]
            if poly_is_zero(coef):
                continue
            for k, c in comps.items():
                out[k] = out[k] + (c.constant_value() if c.is_constant() else c) * coef
        return out

    def is_parameter_free(self) -> bool:
        return all(
            c.is_constant() for comps in self.table.values() for c in comps.values()
        )

    def specialize(self, assignment: Dict[str, Fraction], name: str = "") -> "LieAlgebra":
        """Substitute rational values for (some) declared parameters."""
        brackets = {
            key: {k: c.substitute(assignment) for k, c in comps.items()}
            for key, comps in self.table.items()
        }
        remaining = tuple(p for p in self.params if p not in assignment)
        return LieAlgebra(
            self.dim,
            brackets,
            name=name or self.name,
            basis_labels=self.basis_labels,
            params=remaining if remaining else (),
        )

    def ad_matrix(self, x: Sequence) -> Matrix:
        """Matrix of ad(x): y -> [x, y] (columns are images of basis vectors)."""
        cols = []
        for j in range(self.dim):
            ej = [Fraction(0)] * self.dim
            ej[j] = Fraction(1)
            cols.append(self.bracket(x, ej))
        return Matrix([[cols[j][i] for j in range(self.dim)] for i in range(self.dim)])

    def jacobi_check(self) -> CheckReport:
        """Jacobi identity on all basis triples, as zero-polynomial residuals."""
        report = CheckReport()
        zero = [Fraction(0)] * self.dim
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(j + 1, self.dim):
                    res = list(zero)
                    for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
                        inner = self.bracket_basis(a, b)
                        for m, cm in inner.items():
                            outer = self.bracket_basis(m, c)
                            for t, ct in outer.items():
                                res[t] = res[t] + cm * ct
                    if any(not poly_is_zero(r) for r in res):
                        report.add("jacobi", (i + 1, j + 1, k + 1), res)
        return report

    def __repr__(self):
        return f"LieAlgebra({self.name}, dim={self.dim})"


class Subspace:
    """Linear subspace with a canonical rref basis over the rationals."""

    def __init__(self, ambient_dim: int, basis_matrix: Matrix):
        red, pivots, rank = basis_matrix.rref() if basis_matrix.rows else (
            Matrix.zeros(0, ambient_dim),
            (),
            0,
        )
        self.ambient_dim = ambient_dim
        self.pivots = pivots
        self.basis = Matrix([red.entries[r] for r in range(rank)]) if rank else Matrix.zeros(0, ambient_dim)

    @classmethod
    def from_vectors(cls, ambient_dim: int, vectors: Sequence[Sequence]) -> "Subspace":
        if not vectors:
            return cls.zero(ambient_dim)
        return cls(ambient_dim, Matrix(vectors))

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix.zeros(0, ambient_dim))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Matrix.identity(ambient_dim))

    @classmethod
    def span_of_indices(cls, ambient_dim: int, indices: Sequence[int]) -> "Subspace":
        rows = []
        for i in indices:
            v = [Fraction(0)] * ambient_dim
            v[i] = Fraction(1)
            rows.append(v)
        return cls.from_vectors(ambient_dim, rows)

    @property
    def dim(self) -> int:
        return self.basis.rows

    def is_zero(self) -> bool:
        return self.dim == 0

    def basis_vectors(self) -> list:
        return [list(row) for row in self.basis.entries]

    def reduce(self, vector: Sequence) -> list:
        """Subtract the projection onto this subspace coordinate-wise.

        Works for ParamPoly coordinates as well: the pivot coordinates of
        the result are zero, and membership is equivalent to the reduced
        vector vanishing entirely.
        """
        v = list(vector)
        for r, p in enumerate(self.pivots):
            coef = v[p]
            if poly_is_zero(coef):
                continue
            row = self.basis.entries[r]
            for c in range(self.ambient_dim):
                if row[c] != 0:
                    v[c] = v[c] - coef * row[c]
        return v

    def contains_vector(self, vector: Sequence) -> bool:
        return all(poly_is_zero(x) for x in self.reduce(vector))

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_vector(row) for row in other.basis.entries)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.pivots == other.pivots
            and self.basis == other.basis
        )

    def sum(self, other: "Subspace") -> "Subspace":
        rows = self.basis_vectors() + other.basis_vectors()
        return Subspace.from_vectors(self.ambient_dim, rows)

    def intersect(self, other: "Subspace") -> "Subspace":
        """Exact intersection via the kernel of [A^T | -B^T]."""
        if self.is_zero() or other.is_zero():
            return Subspace.zero(self.ambient_dim)
        a, b = self.basis, other.basis
        stacked = Matrix(
            [
                [a.entries[i][r] for i in range(a.rows)]
                + [-b.entries[j][r] for j in range(b.rows)]
                for r in range(self.ambient_dim)
            ]
        )
        vectors = []
        for ker in stacked.nullspace():
            coeffs = ker[: a.rows]
            v = [Fraction(0)] * self.ambient_dim
            for i, c in enumerate(coeffs):
                if c == 0:
                    continue
                for t in range(self.ambient_dim):
                    v[t] += c * a.entries[i][t]
            vectors.append(v)
        return Subspace.from_vectors(self.ambient_dim, vectors)

    def __repr__(self):
        return f"Subspace(dim={self.dim} of {self.ambient_dim})"


@dataclass
class AlgebraReport:
    lower_central_dims: List[int]
    derived_dims: List[int]
    nilpotency_class: Optional[int]
    solvability_class: Optional[int]
    is_nilpotent: bool
    is_solvable: bool
    is_filiform: bool
    is_metabelian: bool
    is_stem: bool

    def render(self) -> dict:
        return {
            "lower_central_dims": self.lower_central_dims,
            "derived_dims": self.derived_dims,
            "nilpotency_class": self.nilpotency_class,
            "solvability_class": self.solvability_class,
            "nilpotent": self.is_nilpotent,
            "solvable": self.is_solvable,
            "filiform": self.is_filiform,
            "metabelian": self.is_metabelian,
            "stem": self.is_stem,
        }


def _require_parameter_free(g: LieAlgebra, what: str) -> None:
    if not g.is_parameter_free():
        raise ParametricEliminationError(
            f"{what} requires parameter-free structure constants; "
            f"specialize {g.name} first"
        )


def product_subspace(
    g: LieAlgebra,
    a: Subspace,
    b: Subspace,
    product: Optional[Callable[[Sequence, Sequence], Sequence]] = None,
) -> Subspace:
    """Span of all pairwise products of basis vectors of a and b.

    ``product`` defaults to the Lie bracket; any bilinear map on coordinate
    vectors may be passed (e.g. a BilinearProduct.apply).  Both argument
    orders are taken for a general product, one for the bracket.
    """
    if a.ambient_dim != g.dim or b.ambient_dim != g.dim:
        raise ValueError("subspace ambient dimension does not match the algebra")
    if product is None:
        _require_parameter_free(g, "product_subspace")
        op = g.bracket
        both_orders = False
    else:
        op = product
        both_orders = True
    vectors = []
    for u in a.basis_vectors():
        for v in b.basis_vectors():
            w = op(u, v)
            vectors.append([_scalar(x) for x in w])
            if both_orders:
                w2 = op(v, u)
                vectors.append([_scalar(x) for x in w2])
    return Subspace.from_vectors(g.dim, vectors)


def _scalar(x) -> Fraction:
    if isinstance(x, ParamPoly):
        if not x.is_constant():
            raise ParametricEliminationError(f"parametric span rejected: {x}")
        return x.constant_value()
    return Fraction(x)


def lower_central_series(g: LieAlgebra) -> List[Subspace]:
    """g^0 = g, g^{i} = [g, g^{i-1}], listed until stabilization."""
    _require_parameter_free(g, "lower_central_series")
    chain = [Subspace.full(g.dim)]
    while True:
        nxt = product_subspace(g, Subspace.full(g.dim), chain[-1])
        if nxt == chain[-1]:
            break
        chain.append(nxt)
        if nxt.is_zero():
            break
    return chain


def derived_series(g: LieAlgebra) -> List[Subspace]:
    _require_parameter_free(g, "derived_series")
    chain = [Subspace.full(g.dim)]
    while True:
        nxt = product_subspace(g, chain[-1], chain[-1])
        if nxt == chain[-1]:
            break
        chain.append(nxt)
        if nxt.is_zero():
            break
    return chain


def center(g: LieAlgebra) -> Subspace:
    return centralizer(g, Subspace.full(g.dim))

def centralizer(g: LieAlgebra, s: Subspace) -> Subspace:
    """All x with [x, s] = 0, as the kernel of the stacked ad-action."""
    _require_parameter_free(g, "centralizer")
    rows = []
    for w in s.basis_vectors():
        # coordinate k of [e_i, w], as a row over the unknown x_i
        for k in range(g.dim):
            row = [Fraction(0)] * g.dim
            nonzero = False
            for i in range(g.dim):
                acc = Fraction(0)
                for j, wj in enumerate(w):
                    if wj == 0:
                        continue
                    c = g.bracket_basis(i, j).get(k)
                    if c is not None:
                        acc += _scalar(c) * wj
                if acc != 0:
                    row[i] = acc
                    nonzero = True
            if nonzero:
                rows.append(row)
    if not rows:
        return Subspace.full(g.dim)
    return Subspace.from_vectors(g.dim, Matrix(rows).nullspace())


def classes_and_predicates(g: LieAlgebra) -> AlgebraReport:
    """Series dimensions, classes and the standard structural predicates."""
    _require_parameter_free(g, "classes_and_predicates")
    lcs = lower_central_series(g)
    der = derived_series(g)
    lcs_dims = [s.dim for s in lcs]
    der_dims = [s.dim for s in der]
    nilpotent = lcs[-1].is_zero()
    solvable = der[-1].is_zero()
    c = len(lcs) - 1 if nilpotent else None
    d = len(der) - 1 if solvable else None
    z = center(g)
    derived1 = der[1] if len(der) > 1 else Subspace.zero(g.dim)
    return AlgebraReport(
        lower_central_dims=lcs_dims,
        derived_dims=der_dims,
        nilpotency_class=c,
        solvability_class=d,
        is_nilpotent=nilpotent,
        is_solvable=solvable,
        is_filiform=nilpotent and c == g.dim - 1,
        is_metabelian=solvable and d is not None and d <= 2,
        is_stem=derived1.contains(z),
    )


def is_adapted_filiform_basis(g: LieAlgebra) -> bool:
    """[e1, e_i] = e_{i+1} for 2 <= i <= n-1 (1-based), exactly."""
    n = g.dim
    for i in range(1, n - 1):
        comps = g.bracket_basis(0, i)
        expected = {i + 1: ParamPoly.constant(1, g.params)}
        keys = {k for k, v in comps.items() if not v.is_zero()}
        if keys != {i + 1}:
            return False
        if not (comps[i + 1] - 1).is_zero():
            return False
    return True


def characteristic_ideals(g: LieAlgebra) -> List[Subspace]:
    """The coordinate ideals span{e_j, ..., e_n} of an adapted filiform basis.

    Returns the list [I_1, ..., I_n]; callers treat I_m for m > n as zero.
    Validated against the lower central series when the algebra is
    parameter-free.
    """
    if not is_adapted_filiform_basis(g):
        raise AdaptedBasisError(
            f"{g.name} does not carry an adapted filiform basis"
        )
    n = g.dim
    ideals = [Subspace.span_of_indices(n, range(j, n)) for j in range(n)]
    if g.is_parameter_free():
        rep = classes_and_predicates(g)
        if not rep.is_filiform:
            raise AdaptedBasisError(f"{g.name} is not filiform")
        lcs = lower_central_series(g)
        for j in range(2, n):
            if ideals[j] != lcs[j - 1]:
                raise AdaptedBasisError(
                    f"ideal chain mismatch at index {j + 1}: adapted basis "
                    "does not refine the lower central series"
                )
    return ideals


def ideal_at(ideals: List[Subspace], j: int) -> Subspace:
    """1-based lookup with the convention I_m = 0 for m > n."""
    n = ideals[0].ambient_dim
    if j <= 0:
        raise ValueError("ideal index is 1-based")
    if j > n:
        return Subspace.zero(n)
    return ideals[j - 1]


def quotient(g: LieAlgebra, ideal: Subspace) -> Tuple[LieAlgebra, Matrix]:
    """Quotient algebra by a Lie ideal plus the projection matrix.

    The complement basis is the set of non-pivot standard basis vectors of
    the ideal, in index order, so quotient structure constants are
    deterministic.
    """
    if ideal.ambient_dim != g.dim:
        raise ValueError("ideal ambient dimension does not match the algebra")
    # ideal check: [e_i, w] reduces to zero modulo the ideal for all basis w
    for w in ideal.basis_vectors():
        for i in range(g.dim):
            ei = [Fraction(0)] * g.dim
            ei[i] = Fraction(1)
            if not all(poly_is_zero(x) for x in ideal.reduce(g.bracket(ei, w))):
                raise NotAnIdealError(
                    f"subspace is not an ideal of {g.name}: bracket with e{i+1} escapes"
                )
    pivot_set = set(ideal.pivots)
    complement = [c for c in range(g.dim) if c not in pivot_set]
    qdim = len(complement)
    if qdim == 0:
        return (
            LieAlgebra(0, {}, name=f"{g.name}/full", basis_labels=[], params=()),
            Matrix.zeros(0, g.dim),
        )

    # projection of an ambient vector: reduce modulo the ideal, read
    # complement coordinates
    def project(v):
        red = ideal.reduce(v)
        return [red[c] for c in complement]

    brackets = {}
    for a in range(qdim):
        for b in range(a + 1, qdim):
            ea = [Fraction(0)] * g.dim
            ea[complement[a]] = Fraction(1)
            eb = [Fraction(0)] * g.dim
            eb[complement[b]] = Fraction(1)
            img = project(g.bracket(ea, eb))
            comps = {k: v for k, v in enumerate(img) if not poly_is_zero(v)}
            if comps:
                brackets[(a, b)] = comps
    proj = Matrix(
        [[Fraction(1) if c == complement[t] else Fraction(0) for c in range(g.dim)]
         for t in range(qdim)]
    )
    # fold the reduction into the projection matrix: pi(e_p) for pivot
    # columns p is minus the complement part of the ideal basis row
    for r, p in enumerate(ideal.pivots):
        ep = [Fraction(0)] * g.dim
        ep[p] = Fraction(1)
        img = project(ep)
        for t in range(qdim):
            proj.entries[t][p] = img[t]
    labels = [g.basis_labels[c] for c in complement]
    q = LieAlgebra(
        qdim,
        brackets,
        name=f"{g.name}/ideal{ideal.dim}",
        basis_labels=labels,
        params=g.params,
    )
    return q, proj


def is_isomorphic_table(g: LieAlgebra, h: LieAlgebra, phi: Matrix) -> CheckReport:
    """Check phi[x,y]_g = [phi x, phi y]_h on basis pairs for a given map."""
    if g.dim != h.dim or phi.rows != g.dim or phi.cols != g.dim:
        raise ValueError("map shape does not match the algebras")
    if phi.rank() != g.dim:
        raise ValueError("supplied basis map is singular")
    report = CheckReport()
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            lhs = phi.mul_vec(
                _dense(g.bracket_basis(i, j), g.dim)
            )
            rhs = h.bracket(phi.column(i), phi.column(j))
            res = [a - b for a, b in zip(lhs, rhs)]
            if any(not poly_is_zero(x) for x in res):
                report.add("bracket-compatibility", (i + 1, j + 1), res)
    return report


def _dense(sparse: Dict[int, ParamPoly], dim: int) -> list:
    v = [Fraction(0)] * dim
    for k, c in sparse.items():
        v[k] = c.constant_value() if c.is_constant() else c
    return v


def basis_vector(dim: int, i: int) -> list:
    v = [Fraction(0)] * dim
    v[i] = Fraction(1)
    return v


def coordinate_positions(s: Subspace) -> List[int]:
    """Standard-basis positions spanning a coordinate subspace.

    Raises ValueError when the subspace is not spanned by standard basis
    vectors.
    """
    positions = []
    for row in s.basis.entries:
        nz = [c for c, x in enumerate(row) if x != 0]
        if len(nz) != 1 or row[nz[0]] != 1:
            raise ValueError("subspace is not spanned by standard basis vectors")
        positions.append(nz[0])
    return positions
