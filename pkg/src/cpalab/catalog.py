"""Constructors for the concrete algebras, example products and product
families handled by this package, all with exact structure constants.

Families:

* ``ln`` (n >= 3)    -- the standard graded filiform algebra,
  [e1, e_i] = e_{i+1}.
* ``qn`` (n >= 6 even) -- filiform with the extra pairing into e_n.
* ``rn`` (n >= 5)    -- filiform with [e2, e_i] = e_{i+2}.
* ``wn`` (n >= 5)    -- truncated Witt algebra with rational coefficients
  6(j-i) / (j(j-1) * C(j+i-2, i-2)).
* ``nn`` (n >= 2)    -- strictly upper-triangular n x n matrices.
* ``tn`` (n >= 2)    -- all upper-triangular n x n matrices.
* ``filiform6``      -- the generic 6-dimensional filiform algebra with
  symbolic parameters a1, a2, a3.
* ``metafiliform`` (n >= 4) -- metabelian filiform with symbolic
  parameters a2_5 ... a2_n.
* ``heisenberg``     -- dim 3, [e1, e2] = e3.
* ``example9``       -- the 9-dimensional stem algebra carrying a
  commutative post-Lie product that is not associative.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from .exact import ParamPoly
from .lie import LieAlgebra, Subspace
from .structures import BilinearProduct, check_cpa

ALGEBRA_FAMILIES = (
    "ln",
    "qn",
    "rn",
    "wn",
    "nn",
    "tn",
    "filiform6",
    "example9",
    "heisenberg",
    "metafiliform",
)

CPA_FAMILIES = (
    "ln-type1",
    "ln-type2",
    "l4-merged",
    "qn",
    "rn-type1",
    "rn-type2",
    "r5-type3",
    "wn",
    "filiform6",
    "metafiliform",
)


def _var(name: str, params: tuple) -> ParamPoly:
    return ParamPoly.variable(name, params)


def _shift_brackets(n: int) -> Dict[Tuple[int, int], Dict[int, object]]:
    """[e1, e_i] = e_{i+1} for 2 <= i <= n-1 (1-based)."""
    return {(0, i): {i + 1: 1} for i in range(1, n - 1)}


def pair_basis(n: int, strict: bool = True) -> List[Tuple[int, int]]:
    """Matrix-unit index pairs (j, k), row-major, j < k (or j <= k)."""
    if strict:
        return [(j, k) for j in range(1, n + 1) for k in range(j + 1, n + 1)]
    return [(j, k) for j in range(1, n + 1) for k in range(j, n + 1)]


def _matrix_unit_brackets(pairs: List[Tuple[int, int]]):
    """Commutators [E_ab, E_cd] = d_bc E_ad - d_da E_cb on the given basis."""
    index = {p: t for t, p in enumerate(pairs)}
    brackets: Dict[Tuple[int, int], Dict[int, int]] = {}
    for s in range(len(pairs)):
        for t in range(s + 1, len(pairs)):
            (a, b), (c, d) = pairs[s], pairs[t]
            comps: Dict[int, int] = {}
            if b == c and (a, d) in index:
                comps[index[(a, d)]] = comps.get(index[(a, d)], 0) + 1
            if d == a and (c, b) in index:
                comps[index[(c, b)]] = comps.get(index[(c, b)], 0) - 1
            comps = {k: v for k, v in comps.items() if v}
            if comps:
                brackets[(s, t)] = comps
    return brackets


def build_algebra(
    family: str, n: Optional[int] = None, params: Optional[Dict[str, Fraction]] = None
) -> LieAlgebra:
    """Build a catalog Lie algebra; symbolic families accept a ``params``
    map of rational specializations."""
    family = family.lower()
    if family == "ln":
        if n is None or n < 3:
            raise ValueError("ln requires n >= 3")
        return LieAlgebra(n, _shift_brackets(n), name=f"l{n}")
    if family == "qn":
        if n is None or n < 6 or n % 2:
            raise ValueError("qn requires even n >= 6")
        brackets = _shift_brackets(n)
        for i in range(2, n // 2 + 1):
            j = n - i + 1
            brackets[(i - 1, j - 1)] = {n - 1: (-1) ** (i + 1)}
        return LieAlgebra(n, brackets, name=f"q{n}")
    if family == "rn":
        if n is None or n < 5:
            raise ValueError("rn requires n >= 5")
        brackets = _shift_brackets(n)
        for i in range(3, n - 1):
            brackets[(1, i - 1)] = {i + 1: 1}
        return LieAlgebra(n, brackets, name=f"r{n}")
    if family == "wn":
        if n is None or n < 5:
            raise ValueError("wn requires n >= 5")
        brackets = _shift_brackets(n)
        for i in range(2, (n - 1) // 2 + 1):
            for j in range(i + 1, n - i + 1):
                coeff = Fraction(6 * (j - i), j * (j - 1) * math.comb(j + i - 2, i - 2))
                brackets[(i - 1, j - 1)] = {i + j - 1: coeff}
        return LieAlgebra(n, brackets, name=f"w{n}")
    if family == "nn":
        if n is None or n < 2:
            raise ValueError("nn requires n >= 2")
        pairs = pair_basis(n, strict=True)
        labels = [f"E{j}{k}" if n < 10 else f"E{j}_{k}" for j, k in pairs]
        return LieAlgebra(
            len(pairs), _matrix_unit_brackets(pairs), name=f"n{n}", basis_labels=labels
        )
    if family == "tn":
        if n is None or n < 2:
            raise ValueError("tn requires n >= 2")
        pairs = pair_basis(n, strict=False)
        labels = [f"E{j}{k}" if n < 10 else f"E{j}_{k}" for j, k in pairs]
        return LieAlgebra(
            len(pairs), _matrix_unit_brackets(pairs), name=f"t{n}", basis_labels=labels
        )
    if family == "heisenberg":
        return LieAlgebra(3, {(0, 1): {2: 1}}, name="heisenberg")
    if family == "example9":
        brackets = {
            (0, 1): {2: 1},
            (0, 2): {3: 1},
            (0, 3): {4: 1},
            (0, 5): {7: 1},
            (1, 2): {6: 1},
            (1, 4): {8: -1},
            (2, 3): {8: 1},
        }
        return LieAlgebra(9, brackets, name="example9")
    if family == "filiform6":
        plist = ("a1", "a2", "a3")
        a1, a2, a3 = (_var(p, plist) for p in plist)
        brackets = dict(_shift_brackets(6))
        brackets[(1, 2)] = {4: a1, 5: a2}
        brackets[(1, 3)] = {5: a1}
        brackets[(1, 4)] = {5: -a3}
        brackets[(2, 3)] = {5: a3}
        g = LieAlgebra(6, brackets, name="filiform6", params=plist)
        if params:
            g = g.specialize(params, name="filiform6")
        return g
    if family == "metafiliform":
        if n is None or n < 4:
            raise ValueError("metafiliform requires n >= 4")
        plist = tuple(f"a2_{s}" for s in range(5, n + 1))
        brackets = dict(_shift_brackets(n))
        for k in range(3, n - 1):
            comps = {}
            for s in range(5, n - k + 3 + 1):
                comps[k + s - 3 - 1] = _var(f"a2_{s}", plist)
            if comps:
                brackets[(1, k - 1)] = comps
        g = LieAlgebra(n, brackets, name=f"metafiliform{n}", params=plist)
        if params:
            g = g.specialize(params, name=f"metafiliform{n}")
        return g
    raise ValueError(f"unknown algebra family {family!r}")


def nn_matrix_index(n: int) -> Dict[Tuple[int, int], int]:
    """Map (j, k) -> basis position for the strictly upper-triangular algebra."""
    return {p: t for t, p in enumerate(pair_basis(n, strict=True))}


def triangular_reduction_ideals(n: int) -> Dict[str, Subspace]:
    """The ideals used to shrink the product solve on the strictly
    upper-triangular algebra: the first row span I, the last column span J,
    the deep term g^{n-3} of the lower central series, and the two sums
    a = I + deep, b = J + deep."""
    if n < 5:
        raise ValueError("reduction ideals need n >= 5")
    index = nn_matrix_index(n)
    dim = len(index)
    first_row = [index[(1, i)] for i in range(2, n + 1)]
    last_col = [index[(i, n)] for i in range(1, n)]
    deep = [index[(j, k)] for (j, k) in index if k - j >= n - 3]
    mk = lambda idxs: Subspace.span_of_indices(dim, sorted(set(idxs)))
    return {
        "first_row": mk(first_row),
        "last_column": mk(last_col),
        "deep": mk(deep),
        "a": mk(first_row + deep),
        "b": mk(last_col + deep),
    }


# ---------------------------------------------------------------------------
# example products
# ---------------------------------------------------------------------------


def build_example_products(
    name: str, n: Optional[int] = None, params: Optional[Dict[str, Fraction]] = None
) -> Tuple[LieAlgebra, BilinearProduct]:
    """Concrete (algebra, product) pairs ready for the axiom checkers."""
    name = name.lower()
    if name == "example9":
        g = build_algebra("example9")
        entries = {
            (0, 0): {5: 1},
            (0, 1): {5: 1},
            (1, 1): {5: 1},
            (0, 2): {7: 1},
            (1, 2): {7: 1},
            (0, 5): {7: 1},
        }
        return g, BilinearProduct(9, entries, symmetric=True, name="example9-product")
    if name == "a4":
        g = build_algebra("heisenberg")
        entries = {
            (1, 0): {2: -1},
            (1, 2): {2: 1},
            (1, 1): {1: 1},
            (2, 1): {2: 1},
        }
        return g, BilinearProduct(3, entries, symmetric=False, name="a4")
    if name == "metafiliform":
        if n is None or n < 4:
            raise ValueError("metafiliform products require n >= 4")
        g = build_algebra("metafiliform", n)
        entries: Dict[Tuple[int, int], Dict[int, object]] = {}
        for i in range(1, n - 1):
            entries[(0, i)] = dict(g.table.get((0, i), {}))
        for j in range(2, n):
            comps = g.table.get((1, j), {})
            if comps:
                entries[(1, j)] = dict(comps)
        square = {}
        for s in range(5, n + 1):
            square[s - 1 - 1] = _var(f"a2_{s}", g.params) * 2
        if square:
            entries[(1, 1)] = square
        p = BilinearProduct(
            n, entries, symmetric=True, params=g.params, name=f"metafiliform{n}-product"
        )
        if params:
            g = g.specialize(params)
            p = p.specialize(params)
        return g, p
    raise ValueError(f"unknown example product {name!r}")


# ---------------------------------------------------------------------------
# product families
# ---------------------------------------------------------------------------


@dataclass
class CPAFamily:
    """Affine family of commutative products with constraint polynomials.

    ``constraints`` is a list of (leading parameter, polynomial) pairs; a
    member of the family is any rational parameter point at which every
    constraint vanishes.  ``sampler`` draws such a point deterministically
    from a seeded RNG.
    """

    name: str
    n: int
    algebra: LieAlgebra
    product: BilinearProduct
    params: tuple
    constraints: list = field(default_factory=list)
    sampler: Optional[Callable[[random.Random], Dict[str, Fraction]]] = None

    def sample(self, rng: random.Random) -> Dict[str, Fraction]:
        if self.sampler is not None:
            return self.sampler(rng)
        point = {p: _rand_rat(rng) for p in self.params}
        return point

    def product_at(self, point: Dict[str, Fraction]) -> BilinearProduct:
        full = dict(point)
        return self.product.specialize(full, name=f"{self.name}@point")

    def algebra_at(self, point: Dict[str, Fraction]) -> LieAlgebra:
        if not self.algebra.params:
            return self.algebra
        sub = {p: point[p] for p in self.algebra.params if p in point}
        return self.algebra.specialize(sub)

    def specialize(self, assignment: Dict[str, Fraction]) -> "CPAFamily":
        """Pin some parameters (typically the carrier algebra's) to
        rationals, keeping the rest free."""
        remaining = tuple(p for p in self.params if p not in assignment)
        constraints = [
            (lead, c.substitute(assignment)) for lead, c in self.constraints
        ]
        constraints = [(lead, c) for lead, c in constraints if not c.is_zero()]
        sampler = self.sampler
        if sampler is not None:
            base = sampler

            def pinned(rng: random.Random) -> Dict[str, Fraction]:
                point = base(rng)
                for k in assignment:
                    point.pop(k, None)
                return point

            sampler = pinned
        return CPAFamily(
            self.name,
            self.n,
            self.algebra.specialize(assignment)
            if any(p in self.algebra.params for p in assignment)
            else self.algebra,
            self.product.specialize(assignment),
            remaining,
            constraints,
            sampler,
        )


def _rand_rat(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-6, 6), rng.choice((1, 1, 2, 3)))


def _rand_nonzero(rng: random.Random) -> Fraction:
    while True:
        v = _rand_rat(rng)
        if v:
            return v


def build_cpa_family(name: str, n: Optional[int] = None) -> CPAFamily:
    """The explicitly classified commutative product families."""
    name = name.lower()
    if name == "ln-type1":
        if n is None or n < 5:
            raise ValueError("ln-type1 requires n >= 5")
        g = build_algebra("ln", n)
        plist = tuple(f"a{i}" for i in range(2, n + 1)) + ("b", "g", "d")
        b, ga, d = (_var(x, plist) for x in ("b", "g", "d"))
        entries = {
            (0, 0): {i - 1: _var(f"a{i}", plist) for i in range(2, n + 1)},
            (0, 1): {n - 2: b, n - 1: ga},
            (0, 2): {n - 1: b},
            (1, 1): {n - 1: d},
        }
        a2 = _var("a2", plist)
        constraint = a2 * d + b

        def sampler(rng: random.Random) -> Dict[str, Fraction]:
            point = {p: _rand_rat(rng) for p in plist if p != "b"}
            point["b"] = -point["a2"] * point["d"]
            return point

        return CPAFamily(
            name, n, g,
            BilinearProduct(n, entries, symmetric=True, params=plist, name=name),
            plist, [("b", constraint)], sampler,
        )
    if name == "ln-type2":
        if n is None or n < 5:
            raise ValueError("ln-type2 requires n >= 5")
        g = build_algebra("ln", n)
        plist = tuple(f"a{i}" for i in range(2, n + 1)) + ("b", "g", "d")
        b, ga, d = (_var(x, plist) for x in ("b", "g", "d"))
        one = ParamPoly.constant(1, plist)
        entries = {
            (0, 0): {i - 1: _var(f"a{i}", plist) for i in range(2, n + 1)},
            (0, 1): {2: one, n - 2: b, n - 1: ga},
            (0, 2): {3: one, n - 1: b},
            (1, 1): {n - 1: d},
        }
        for k in range(4, n):
            entries[(0, k - 1)] = {k: one}
        # merge the shift into (0,1)/(0,2) when indices collide (small n)
        a2 = _var("a2", plist)
        constraint = a2 * d - b

        def sampler(rng: random.Random) -> Dict[str, Fraction]:
            point = {p: _rand_rat(rng) for p in plist if p != "b"}
            point["b"] = point["a2"] * point["d"]
            return point

        return CPAFamily(
            name, n, g,
            BilinearProduct(n, entries, symmetric=True, params=plist, name=name),
            plist, [("b", constraint)], sampler,
        )
    if name == "l4-merged":
        g = build_algebra("ln", 4)
        plist = ("a2", "a3", "a4", "b", "g", "d")
        a2, a3, a4, b, ga, d = (_var(x, plist) for x in plist)
        entries = {
            (0, 0): {1: a2, 2: a3, 3: a4},
            (0, 1): {2: b, 3: ga},
            (0, 2): {3: b},
            (1, 1): {3: d},
        }
        constraint = b * b - b - a2 * d

        def sampler(rng: random.Random) -> Dict[str, Fraction]:
            bb = _rand_rat(rng)
            dd = _rand_nonzero(rng)
            return {
                "b": bb,
                "d": dd,
                "a2": (bb * bb - bb) / dd,
                "a3": _rand_rat(rng),
                "a4": _rand_rat(rng),
                "g": _rand_rat(rng),
            }

        return CPAFamily(
            name, 4, g,
            BilinearProduct(4, entries, symmetric=True, params=plist, name=name),
            plist, [("b", constraint)], sampler,
        )
    if name == "qn":
        if n is None or n < 6 or n % 2:
            raise ValueError("qn family requires even n >= 6")
        g = build_algebra("qn", n)
        plist = ("a", "b", "g", "d")
        a, b, ga, d = (_var(x, plist) for x in plist)
        entries = {
            (0, 0): {n - 2: a, n - 1: b},
            (0, 1): {n - 2: -a, n - 1: ga},
            (1, 1): {n - 2: a, n - 1: d},
        }
        return CPAFamily(
            name, n, g,
            BilinearProduct(n, entries, symmetric=True, params=plist, name=name),
            plist, [], None,
        )
    if name in ("rn-type1", "rn-type2"):
        if n is None or n < 6:
            raise ValueError(f"{name} requires n >= 6")
        g = build_algebra("rn", n)
        plist = tuple(f"a{i}" for i in range(3, n + 1)) + ("b", "g")
        b, ga = _var("b", plist), _var("g", plist)
        e11 = {s - 1: _var(f"a{s}", plist) for s in range(3, n + 1)}
        e12 = {s: _var(f"a{s}", plist) for s in range(3, n - 1)}
        e12[n - 1] = e12.get(n - 1, ParamPoly.zero(plist)) + b
        e22 = {s + 1: _var(f"a{s}", plist) for s in range(3, n - 2)}
        e22[n - 1] = e22.get(n - 1, ParamPoly.zero(plist)) + ga
        if name == "rn-type1":
            entries = {(0, 0): e11, (0, 1): e12, (1, 1): e22}
            return CPAFamily(
                name, n, g,
                BilinearProduct(n, entries, symmetric=True, params=plist, name=name),
                plist, [], None,
            )
        # type 2: offset the type-1 product by the left brackets
        entries = {(0, 0): dict(e11), (0, 1): dict(e12), (1, 1): dict(e22)}
        for i in range(1, n):
            comps = entries.setdefault((0, i), {})
            for k, c in g.bracket_basis(0, i).items():
                comps[k] = comps.get(k, ParamPoly.zero(plist)) + c
        sq = entries[(1, 1)]
        sq[3] = sq.get(3, ParamPoly.zero(plist)) + 2
        for i in range(2, n):
            comps = {k: c for k, c in g.bracket_basis(1, i).items()}
            if comps:
                entries[(1, i)] = comps
        return CPAFamily(
            name, n, g,
            BilinearProduct(n, entries, symmetric=True, params=plist, name=name),
            plist, [], None,
        )
    if name == "r5-type3":
        g = build_algebra("rn", 5)
        plist = ("a", "b", "g", "d", "e")
        a, b, ga, d, e = (_var(x, plist) for x in plist)
        half = Fraction(1, 2)
        entries = {
            (0, 0): {1: -half, 2: a, 3: b, 4: ga},
            (0, 1): {2: half, 3: d, 4: e},
            (0, 2): {3: half, 4: d - a},
            (1, 1): {3: half, 4: d - a},
        }
        return CPAFamily(
            name, 5, g,
            BilinearProduct(5, entries, symmetric=True, params=plist, name=name),
            plist, [], None,
        )
    if name == "wn":
        if n is None or n < 7:
            raise ValueError("wn family requires n >= 7")
        g = build_algebra("wn", n)
        plist = ("a", "b", "g", "d", "e")
        a, b, ga, d, e = (_var(x, plist) for x in plist)
        coeff = Fraction(6 * (n - 4), (n - 2) * (n - 3))
        entries = {
            (0, 0): {n - 3: a, n - 2: b, n - 1: ga},
            (0, 1): {n - 2: a * coeff, n - 1: d},
            (1, 1): {n - 1: e},
        }
        return CPAFamily(
            name, n, g,
            BilinearProduct(n, entries, symmetric=True, params=plist, name=name),
            plist, [], None,
        )
    if name == "filiform6":
        g = build_algebra("filiform6")
        plist = g.params + ("z1_1_5", "z1_1_6", "z1_2_6", "z2_2_6")
        a3 = _var("a3", plist)
        u = _var("z1_1_5", plist)
        entries = {
            (0, 0): {4: u, 5: _var("z1_1_6", plist)},
            (0, 1): {4: -a3 * u, 5: _var("z1_2_6", plist)},
            (1, 1): {4: a3 * a3 * u, 5: _var("z2_2_6", plist)},
        }
        return CPAFamily(
            name, 6, g,
            BilinearProduct(6, entries, symmetric=True, params=plist, name=name),
            plist, [], None,
        )
    if name == "metafiliform":
        if n is None or n < 4:
            raise ValueError("metafiliform family requires n >= 4")
        g, p = build_example_products("metafiliform", n)
        return CPAFamily(name, n, g, p, g.params, [], None)
    raise ValueError(f"unknown product family {name!r}")


def metafiliform_variant(n: int) -> str:
    """Which reading of the metabelian-filiform product validates.

    The printed reading (e1.e1 = 0, e2.e2 = 2 * sum a2_s e_{s-1}) passes the
    axiom checker symbolically; returns "literal" when it does.
    """
    g, p = build_example_products("metafiliform", n)
    return "literal" if check_cpa(g, p).passed else "unvalidated"
