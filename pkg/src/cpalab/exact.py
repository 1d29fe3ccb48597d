"""Exact arithmetic core: rationals, sparse multivariate polynomials and
deterministic linear algebra over Q.

Nothing in this package ever touches floating point.  Scalars are
``fractions.Fraction`` (always reduced, positive denominator), polynomials
are sparse maps from monomials to scalars over a declared, ordered list of
parameter names, and elimination routines refuse to divide by anything that
is not a plain rational.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

Rat = Union[int, Fraction]

# A monomial is a tuple of (parameter_index, exponent) pairs, sorted by
# index, with all exponents > 0.  The empty tuple is the constant monomial.
Monomial = tuple


class ParametricEliminationError(ValueError):
    """Raised when an elimination routine meets a non-constant entry."""


class ReductionUndefinedError(ValueError):
    """Raised when a reduction constraint has a non-constant leading coefficient."""


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, ParamPoly):
        if x.is_constant():
            return x.constant_value()
        raise ParametricEliminationError(
            f"expected a rational constant, got the polynomial {x}"
        )
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for i, e in b:
        merged[i] = merged.get(i, 0) + e
    return tuple(sorted(merged.items()))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_sort_key(m: Monomial):
    # Graded lexicographic, descending: higher total degree first, then
    # earlier parameters / higher exponents first.
    return (-_mono_degree(m), tuple((i, -e) for i, e in m))


def merge_params(a: tuple, b: tuple) -> tuple:
    """Union of two ordered parameter lists, keeping the left order first."""
    if a is b or a == b:
        return a
    seen = set(a)
    return a + tuple(name for name in b if name not in seen)


_NUM_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")
_VAR_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(\d+))?$")


class ParamPoly:
    """Sparse multivariate polynomial with Fraction coefficients.

    Immutable.  ``params`` is the declared, ordered tuple of parameter
    names; monomial exponent vectors are stored sparsely against it.  The
    canonical form never stores zero coefficients, and the canonical text
    rendering lists terms in descending graded-lexicographic order.
    """

    __slots__ = ("params", "terms")

    def __init__(self, params: tuple, terms: dict):
        self.params = params
        self.terms = {m: c for m, c in terms.items() if c != 0}

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, value: Rat, params: tuple = ()) -> "ParamPoly":
        value = Fraction(value)
        return cls(params, {(): value} if value else {})

    @classmethod
    def variable(cls, name: str, params: Optional[tuple] = None) -> "ParamPoly":
        if params is None:
            params = (name,)
        idx = params.index(name)
        return cls(params, {((idx, 1),): Fraction(1)})

    @classmethod
    def zero(cls, params: tuple = ()) -> "ParamPoly":
        return cls(params, {})

    # -- classification ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if self.is_constant():
            return self.terms[()]
        raise ParametricEliminationError(f"{self} is not constant")

    def variables(self) -> set:
        """Indices of parameters that actually occur."""
        out = set()
        for m in self.terms:
            for i, _ in m:
                out.add(i)
        return out

    def variable_names(self) -> set:
        return {self.params[i] for i in self.variables()}

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=0)

    def degree_in(self, name: str) -> int:
        if name not in self.params:
            return 0
        idx = self.params.index(name)
        deg = 0
        for m in self.terms:
            for i, e in m:
                if i == idx:
                    deg = max(deg, e)
        return deg

    # -- arithmetic ----------------------------------------------------

    def _align(self, other) -> tuple:
        if not isinstance(other, ParamPoly):
            other = ParamPoly.constant(other, self.params)
        if self.params is other.params or self.params == other.params:
            return self, other
        params = merge_params(self.params, other.params)
        return self._remap(params), other._remap(params)

    def _remap(self, params: tuple) -> "ParamPoly":
        if params is self.params or params == self.params:
            return ParamPoly(params, self.terms)
        remap = {i: params.index(self.params[i]) for i in self.variables()}
        terms = {}
        for m, c in self.terms.items():
            terms[tuple(sorted((remap[i], e) for i, e in m))] = c
        return ParamPoly(params, terms)

    def __add__(self, other):
        a, b = self._align(other)
        terms = dict(a.terms)
        for m, c in b.terms.items():
            s = terms.get(m, Fraction(0)) + c
            if s:
                terms[m] = s
            else:
                terms.pop(m, None)
        return ParamPoly(a.params, terms)

    __radd__ = __add__

    def __neg__(self):
        return ParamPoly(self.params, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._align(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return ParamPoly.zero(self.params)
            return ParamPoly(self.params, {m: c * other for m, c in self.terms.items()})
        a, b = self._align(other)
        terms: dict = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                m = _mono_mul(m1, m2)
                s = terms.get(m, Fraction(0)) + c1 * c2
                if s:
                    terms[m] = s
                else:
                    terms.pop(m, None)
        return ParamPoly(a.params, terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_fraction(other)
        if other == 0:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (Fraction(1) / other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        out = ParamPoly.constant(1, self.params)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, ParamPoly):
            return NotImplemented
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant_value())
        return hash((self.params, tuple(sorted(self.terms.items()))))

    # -- substitution and evaluation ------------------------------------

    def substitute(self, assignment: Mapping) -> "ParamPoly":
        """Simultaneously substitute parameters by polynomials or rationals."""
        if not assignment:
            return self
        result = ParamPoly.zero(self.params)
        cache = {}
        for name, value in assignment.items():
            if not isinstance(value, ParamPoly):
                value = ParamPoly.constant(value, self.params)
            cache[name] = value
        for m, c in self.terms.items():
            term = ParamPoly.constant(c, self.params)
            for i, e in m:
                name = self.params[i]
                if name in cache:
                    term = term * cache[name] ** e
                else:
                    term = term * ParamPoly.variable(name, self.params) ** e
            result = result + term
        return result

    def substitute_index(self, idx: int, repl: "ParamPoly") -> "ParamPoly":
        """Fast path: substitute one parameter (by index) by a polynomial
        over the *same* parameter list."""
        if repl.is_zero():
            terms = {
                m: c
                for m, c in self.terms.items()
                if all(i != idx for i, _ in m)
            }
            return ParamPoly(self.params, terms)
        terms: dict = {}
        powers = {0: ParamPoly.constant(1, self.params)}

        def power(e):
            if e not in powers:
                powers[e] = powers[e - 1] * repl if e - 1 in powers else repl ** e
            return powers[e]

        for m, c in self.terms.items():
            e = 0
            rest = m
            for i, ex in m:
                if i == idx:
                    e = ex
                    rest = tuple(p for p in m if p[0] != idx)
                    break
            if e == 0:
                s = terms.get(m, Fraction(0)) + c
                if s:
                    terms[m] = s
                else:
                    terms.pop(m, None)
                continue
            for m2, c2 in power(e).terms.items():
                mm = _mono_mul(rest, m2)
                s = terms.get(mm, Fraction(0)) + c * c2
                if s:
                    terms[mm] = s
                else:
                    terms.pop(mm, None)
        return ParamPoly(self.params, terms)

    def evaluate(self, assignment: Mapping[str, Rat]) -> Fraction:
        """Evaluate at a full rational point (all occurring parameters bound)."""
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for i, e in m:
                name = self.params[i]
                if name not in assignment:
                    raise KeyError(f"no value supplied for parameter {name}")
                v *= Fraction(assignment[name]) ** e
            total += v
        return total

    def coefficient_of_power(self, name: str, power: int) -> "ParamPoly":
        """Polynomial coefficient of name**power (over the remaining parameters)."""
        idx = self.params.index(name)
        terms = {}
        for m, c in self.terms.items():
            e = dict(m).get(idx, 0)
            if e == power:
                terms[tuple(p for p in m if p[0] != idx)] = c
        return ParamPoly(self.params, terms)

    def reduce_mod(self, constraints: Sequence[tuple]) -> "ParamPoly":
        """Reduce by constraint polynomials, each with a declared leading
        parameter.

        A constraint (v, c) rewrites v**d (d the top power of v in c) into
        lower powers of v; the leading coefficient must be a nonzero
        rational.  Reduction repeats, in the given constraint order, until
        no term is divisible by any constraint's leading power.
        """
        if not constraints:
            return self
        poly = self
        prepared = []
        for lead, c in constraints:
            if not isinstance(c, ParamPoly):
                raise TypeError("constraints must be ParamPoly")
            poly, c = poly._align(c)
            prepared = [(l, cc._remap(poly.params)) for l, cc in prepared]
            prepared.append((lead, c))
        rules = []
        for lead, c in prepared:
            d = c.degree_in(lead)
            if d == 0:
                raise ReductionUndefinedError(
                    f"constraint {c} does not involve its leading parameter {lead}"
                )
            lc = c.coefficient_of_power(lead, d)
            if not lc.is_constant() or lc.is_zero():
                raise ReductionUndefinedError(
                    f"constraint {c} has non-constant leading coefficient {lc} in {lead}"
                )
            idx = poly.params.index(lead)
            # v^d == rem  with  rem = v^d - c/lc
            rem = ParamPoly.variable(lead, poly.params) ** d - c * (
                Fraction(1) / lc.constant_value()
            )
            rules.append((idx, d, rem))

        for _ in range(1000):
            changed = False
            for idx, d, rem in rules:
                while True:
                    hit = None
                    for m in poly.terms:
                        e = dict(m).get(idx, 0)
                        if e >= d:
                            hit = (m, e)
                            break
                    if hit is None:
                        break
                    m, e = hit
                    c = poly.terms[m]
                    rest = tuple(p for p in m if p[0] != idx)
                    lower = ((idx, e - d),) if e > d else ()
                    factor = ParamPoly(
                        poly.params, {_mono_mul(rest, lower): c}
                    )
                    poly = poly - ParamPoly(poly.params, {m: c}) + factor * rem
                    changed = True
            if not changed:
                return poly
        raise ReductionUndefinedError("constraint reduction did not terminate")

    # -- rendering -------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=_mono_sort_key):
            bits = [str(self.terms[m])]
            for i, e in m:
                name = self.params[i]
                bits.append(name if e == 1 else f"{name}^{e}")
            parts.append("*".join(bits))
        return " + ".join(parts)

    def __repr__(self):
        return f"ParamPoly({self})"

    @classmethod
    def from_text(cls, text: str, params: tuple = ()) -> "ParamPoly":
        """Parse the canonical text format, e.g. ``-1*a2*d + 3/2*b^2``."""
        text = text.strip()
        if not text or text == "0":
            return cls.zero(params)
        poly = cls.zero(params)
        for chunk in text.replace("-", "+-").split("+"):
            chunk = chunk.strip()
            if not chunk:
                continue
            coef = Fraction(1)
            mono: dict = {}
            negate = chunk.startswith("-")
            if negate:
                chunk = chunk[1:].strip()
            for factor in chunk.split("*"):
                factor = factor.strip()
                if not factor:
                    raise ValueError(f"empty factor in term {chunk!r}")
                if _NUM_RE.match(factor):
                    coef *= Fraction(factor)
                    continue
                m = _VAR_RE.match(factor)
                if not m:
                    raise ValueError(f"cannot parse factor {factor!r}")
                name, exp = m.group(1), int(m.group(2) or 1)
                if name not in params:
                    params = params + (name,)
                idx = params.index(name)
                mono[idx] = mono.get(idx, 0) + exp
            if negate:
                coef = -coef
            poly = poly._remap(params) + ParamPoly(
                params, {tuple(sorted(mono.items())): coef}
            )
        return poly


def poly_is_zero(x) -> bool:
    if isinstance(x, ParamPoly):
        return x.is_zero()
    return x == 0


class Matrix:
    """Dense rectangular matrix; entries are Fractions or ParamPoly.

    Elimination (rref / nullspace / solve) requires rational entries and
    raises ParametricEliminationError otherwise; arithmetic works for both.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("ragged matrix rows")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls([[Fraction(0)] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        m = cls.zeros(n, n)
        for i in range(n):
            m.entries[i][i] = Fraction(1)
        return m

    def copy(self) -> "Matrix":
        return Matrix(self.entries)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        for r1, r2 in zip(self.entries, other.entries):
            for a, b in zip(r1, r2):
                if not poly_is_zero(a - b):
                    return False
        return True

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in matrix addition")
        return Matrix(
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Matrix([[-a for a in row] for row in self.entries])

    def scale(self, c) -> "Matrix":
        return Matrix([[a * c for a in row] for row in self.entries])

    def __mul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = Fraction(0)
                for k in range(self.cols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if poly_is_zero(a) or poly_is_zero(b):
                        continue
                    acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Matrix(out)

    def __pow__(self, n: int) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("matrix power needs a square matrix")
        out = Matrix.identity(self.rows)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def mul_vec(self, v: Sequence) -> list:
        if len(v) != self.cols:
            raise ValueError("shape mismatch in matrix-vector product")
        out = []
        for i in range(self.rows):
            acc = Fraction(0)
            for k in range(self.cols):
                a = self.entries[i][k]
                if poly_is_zero(a) or poly_is_zero(v[k]):
                    continue
                acc = acc + a * v[k]
            out.append(acc)
        return out

    def transpose(self) -> "Matrix":
        return Matrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def is_zero(self) -> bool:
        return all(poly_is_zero(a) for row in self.entries for a in row)

    def column(self, j: int) -> list:
        return [self.entries[i][j] for i in range(self.rows)]

    def to_fraction_rows(self) -> list:
        return [[_as_fraction(a) for a in row] for row in self.entries]

    # -- elimination ----------------------------------------------------

    def rref(self) -> tuple:
        """Reduced row echelon form with deterministic pivoting.

        Returns (rref matrix, pivot column indices, rank).  Pivot choice is
        the first row (top to bottom) with a nonzero entry in the leftmost
        unfinished column.
        """
        m = self.to_fraction_rows()
        rows, cols = self.rows, self.cols
        pivots = []
        r = 0
        for c in range(cols):
            pivot_row = None
            for i in range(r, rows):
                if m[i][c] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            m[r], m[pivot_row] = m[pivot_row], m[r]
            pv = m[r][c]
            if pv != 1:
                m[r] = [x / pv for x in m[r]]
            for i in range(rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [x - f * y for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == rows:
                break
        return Matrix(m), tuple(pivots), len(pivots)

    def rank(self) -> int:
        return self.rref()[2]

    def nullspace(self) -> list:
        """Canonical kernel basis read off the rref free columns."""
        red, pivots, rank = self.rref()
        pivot_set = set(pivots)
        free = [c for c in range(self.cols) if c not in pivot_set]
        basis = []
        for f in free:
            v = [Fraction(0)] * self.cols
            v[f] = Fraction(1)
            for r, p in enumerate(pivots):
                v[p] = -red.entries[r][f]
            basis.append(v)
        return basis

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols})"


def solve_linear(a: Matrix, b: Sequence) -> Optional[tuple]:
    """Solve a x = b exactly.

    Returns None when inconsistent, otherwise (particular solution with all
    free variables zero, canonical nullspace basis of a).
    """
    if len(b) != a.rows:
        raise ValueError("right-hand side length does not match row count")
    aug = Matrix([list(row) + [bv] for row, bv in zip(a.entries, b)])
    red, pivots, rank = aug.rref()
    if a.cols in pivots:
        return None
    x = [Fraction(0)] * a.cols
    for r, p in enumerate(pivots):
        x[p] = red.entries[r][a.cols]
    return x, a.nullspace()
