"""Derivation algebras, nilpotency tests and the inner-plus-deep
decomposition of nilpotent derivations of the strictly upper-triangular
algebras.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .exact import Matrix, ParametricEliminationError, solve_linear
from .lie import (
    LieAlgebra,
    Subspace,
    basis_vector,
    coordinate_positions,
    lower_central_series,
)
from .report import CheckReport


class DecompositionError(ValueError):
    """Raised when the inner-plus-deep decomposition system is infeasible."""


@dataclass
class DerivationSpace:
    algebra: LieAlgebra
    basis: List[Matrix]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def span(self) -> Subspace:
        d = self.algebra.dim
        return Subspace.from_vectors(
            d * d, [[m.entries[r][c] for r in range(d) for c in range(d)] for m in self.basis]
        )


def _scalar_bracket(g: LieAlgebra, i: int, j: int) -> dict:
    return {k: c.constant_value() for k, c in g.bracket_basis(i, j).items()}


def derivation_space(g: LieAlgebra) -> DerivationSpace:
    """Canonical basis of Der(g) as the kernel of the derivation system.

    Equations are ordered by (i < j, k), unknowns D_{r,c} row-major, so the
    output basis is deterministic.
    """
    if not g.is_parameter_free():
        raise ParametricEliminationError("derivation_space needs a parameter-free algebra")
    d = g.dim
    rows = []
    for i in range(d):
        for j in range(i + 1, d):
            cij = _scalar_bracket(g, i, j)
            for k in range(d):
                row = [Fraction(0)] * (d * d)
                # D[e_i,e_j]_k = sum_m c_ij^m D_km
                for m, c in cij.items():
                    row[k * d + m] += c
                # -[D e_i, e_j]_k = -sum_m D_mi c_mj^k
                for m in range(d):
                    c = _scalar_bracket(g, m, j).get(k)
                    if c:
                        row[m * d + i] -= c
                # -[e_i, D e_j]_k = -sum_m D_mj c_im^k
                for m in range(d):
                    c = _scalar_bracket(g, i, m).get(k)
                    if c:
                        row[m * d + j] -= c
                if any(row):
                    rows.append(row)
    if not rows:
        basis_vecs = [basis_vector(d * d, t) for t in range(d * d)]
    else:
        basis_vecs = Matrix(rows).nullspace()
    basis = [
        Matrix([[v[r * d + c] for c in range(d)] for r in range(d)]) for v in basis_vecs
    ]
    return DerivationSpace(g, basis)


def is_derivation(g: LieAlgebra, D: Matrix) -> CheckReport:
    """D[x,y] = [Dx,y] + [x,Dy] on basis pairs."""
    if D.rows != g.dim or D.cols != g.dim:
        raise ValueError("matrix shape does not match the algebra")
    report = CheckReport()
    d = g.dim
    for i in range(d):
        for j in range(i + 1, d):
            ei, ej = basis_vector(d, i), basis_vector(d, j)
            lhs = D.mul_vec(g.bracket(ei, ej))
            rhs = [
                a + b
                for a, b in zip(
                    g.bracket(D.column(i), ej), g.bracket(ei, D.column(j))
                )
            ]
            res = [a - b for a, b in zip(lhs, rhs)]
            if any(x != 0 for x in res):
                report.add("derivation", (i + 1, j + 1), res)
    return report


def ad(g: LieAlgebra, x: Sequence) -> Matrix:
    """Adjoint matrix of x."""
    return g.ad_matrix(list(x))


def is_nilpotent_matrix(D: Matrix) -> bool:
    """Exact test D^dim = 0."""
    if D.rows != D.cols:
        raise ValueError("nilpotency test needs a square matrix")
    return (D ** D.rows).is_zero()


def ln_derivation_basis(n: int) -> DerivationSpace:
    """The explicit 2n-1 endomorphism basis of Der(l_n).

    ad(e_1) ... ad(e_{n-1}), the torus maps t1 (identity off e1),
    t2 (weights 1, i-1), the corner map t3 (e1 -> e2), and the shifts
    h_k (e_i -> e_{i+k} for 2 <= i <= n-k), for 2 <= k <= n-2.  Each map is
    checked to be a derivation and the span is checked against
    derivation_space.
    """
    from .catalog import build_algebra

    if n < 5:
        raise ValueError("the explicit basis needs n >= 5")
    g = build_algebra("ln", n)
    maps = []
    for i in range(n - 1):
        maps.append(ad(g, basis_vector(n, i)))
    t1 = Matrix.zeros(n, n)
    for i in range(1, n):
        t1.entries[i][i] = Fraction(1)
    maps.append(t1)
    t2 = Matrix.zeros(n, n)
    t2.entries[0][0] = Fraction(1)
    for i in range(1, n):
        t2.entries[i][i] = Fraction(i)
    maps.append(t2)
    t3 = Matrix.zeros(n, n)
    t3.entries[1][0] = Fraction(1)
    maps.append(t3)
    for k in range(2, n - 1):
        hk = Matrix.zeros(n, n)
        for i in range(1, n - k):
            hk.entries[i + k][i] = Fraction(1)
        maps.append(hk)
    for idx, m in enumerate(maps):
        rep = is_derivation(g, m)
        if not rep.passed:
            raise AssertionError(f"explicit map #{idx} is not a derivation of l{n}")
    explicit = DerivationSpace(g, maps)
    computed = derivation_space(g)
    if explicit.span() != computed.span() or explicit.span().dim != len(maps):
        raise AssertionError(f"explicit derivation basis of l{n} does not span Der")
    return explicit


@dataclass
class DerivationSplit:
    """D = ad(u) + psi with psi(g) in the deep ideal and psi([g,g]) = 0."""

    u: List[Fraction]
    psi: Matrix


def deep_derivation_space(
    g: LieAlgebra, deep: Subspace, killed: Subspace
) -> List[Matrix]:
    """Basis of the derivations with image in ``deep`` and kernel
    containing ``killed``."""
    space = derivation_space(g)
    d = g.dim
    killed_cols = set(coordinate_positions(killed))
    rows = []
    for m in space.basis:
        rows.append([m.entries[r][c] for r in range(d) for c in range(d)])
    # unknowns are coefficients over the derivation basis; conditions: for
    # killed columns every entry vanishes, for the rest the reduction of
    # the column modulo deep vanishes
    cond_rows = []
    for c in range(d):
        cols = [[v[r * d + c] for r in range(d)] for v in rows]
        if c in killed_cols:
            for r in range(d):
                row = [cols[t][r] for t in range(len(rows))]
                if any(row):
                    cond_rows.append(row)
        else:
            reduced = [deep.reduce(col) for col in cols]
            for r in range(d):
                row = [reduced[t][r] for t in range(len(rows))]
                if any(row):
                    cond_rows.append(row)
    if not cond_rows:
        coeffs = [basis_vector(len(rows), t) for t in range(len(rows))]
    else:
        coeffs = Matrix(cond_rows).nullspace()
    out = []
    for x in coeffs:
        m = Matrix.zeros(d, d)
        for t, coef in enumerate(x):
            if coef == 0:
                continue
            for r in range(d):
                for c in range(d):
                    m.entries[r][c] += coef * space.basis[t].entries[r][c]
        out.append(m)
    return out


def split_nilpotent_derivation(
    g: LieAlgebra,
    D: Matrix,
    deep: Optional[Subspace] = None,
    killed: Optional[Subspace] = None,
) -> DerivationSplit:
    """Write a nilpotent derivation as ad(u) plus a map psi with image in
    the deep ideal and kernel containing the derived subalgebra.

    For the strictly upper-triangular algebra of n x n matrices the deep
    ideal defaults to g^{n-3} and the killed subspace to [g,g].  The system
    is solved exactly; the returned solution is the deterministic one with
    all free coordinates zero.  Infeasibility raises DecompositionError
    rather than being silently ignored.
    """
    if not is_derivation(g, D).passed:
        raise ValueError("input matrix is not a derivation")
    if not is_nilpotent_matrix(D):
        raise ValueError("input derivation is not nilpotent")
    lcs = lower_central_series(g)
    if killed is None:
        killed = lcs[1]
    if deep is None:
        # invert dim = n(n-1)/2 and take g^{n-3}
        n = 1
        while n * (n - 1) // 2 < g.dim:
            n += 1
        if n * (n - 1) // 2 != g.dim or n < 5:
            raise ValueError("cannot infer the matrix size; pass deep explicitly")
        deep = lcs[n - 3]
    rows_allowed = coordinate_positions(deep)
    killed_cols = set(coordinate_positions(killed))
    cols_allowed = [c for c in range(g.dim) if c not in killed_cols]

    d = g.dim
    unknowns = d + len(rows_allowed) * len(cols_allowed)
    psi_pos = {}
    for a, r in enumerate(rows_allowed):
        for b, c in enumerate(cols_allowed):
            psi_pos[(r, c)] = d + a * len(cols_allowed) + b
    rows = []
    rhs = []
    for r in range(d):
        for c in range(d):
            row = [Fraction(0)] * unknowns
            # ad(u)_{r,c} = [u, e_c]_r = sum_m u_m c_{mc}^r
            for m in range(d):
                coeff = _scalar_bracket(g, m, c).get(r)
                if coeff:
                    row[m] += coeff
            if (r, c) in psi_pos:
                row[psi_pos[(r, c)]] += 1
            rows.append(row)
            rhs.append(D.entries[r][c])
    sol = solve_linear(Matrix(rows), rhs)
    if sol is None:
        raise DecompositionError(
            "no inner-plus-deep decomposition exists for this derivation"
        )
    x, _ = sol
    u = x[:d]
    psi = Matrix.zeros(d, d)
    for (r, c), idx in psi_pos.items():
        psi.entries[r][c] = x[idx]
    return DerivationSplit(u=u, psi=psi)
