"""Polynomial systems for commutative post-Lie products and their exact
reduction: linear elimination, bounded splitting on factorable equations,
family verification, solution matching and annihilation proofs.

The pipeline deliberately avoids Groebner bases.  The commutativity and
derivation laws are linear in the product constants, so a deterministic
linear pass eliminates most unknowns; the remaining representation-law
quadratics are handled by branching on equations that factor into linear
factors in a single unknown.  Residual systems the pipeline cannot close
are reported as unresolved, never forced.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exact import Matrix, ParamPoly, poly_is_zero, solve_linear
from .lie import LieAlgebra, Subspace, is_adapted_filiform_basis, quotient
from .report import CheckReport
from .structures import BilinearProduct, check_cpa

ASSUME_CHOICES = ("none", "filiform-adapted")


def unknown_name(a: int, b: int, m: int) -> str:
    """Product constant name for the e_m coefficient of e_a . e_b (1-based)."""
    return f"z{a}_{b}_{m}"


@dataclass
class PolySystem:
    """Equations in the product constants of a prospective commutative
    post-Lie product on ``algebra``.

    ``params`` lists the unknowns in elimination order (coordinate index
    descending, then the product pair), followed by any extrinsic algebra
    parameters.  Symmetry of the product is imposed structurally: only
    pairs a <= b carry unknowns.
    """

    algebra: LieAlgebra
    params: tuple
    unknowns: tuple
    pair_of: dict
    equations: List[ParamPoly]
    forced_zero: tuple
    assume: str

    @property
    def extrinsic(self) -> tuple:
        return self.params[len(self.unknowns):]

    def counts(self) -> dict:
        linear = sum(1 for e in self.equations if e.degree() <= 1)
        return {
            "unknowns": len(self.unknowns),
            "equations": len(self.equations),
            "linear": linear,
            "quadratic": len(self.equations) - linear,
        }

    def variable(self, name: str) -> ParamPoly:
        idx = self.params.index(name)
        return ParamPoly(self.params, {((idx, 1),): Fraction(1)})

    def product_from_point(self, point: Dict[str, Fraction]) -> BilinearProduct:
        """Concrete product from a full unknown assignment."""
        d = self.algebra.dim
        entries: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
        for name in self.unknowns:
            a, b, m = self.pair_of[name]
            v = Fraction(point.get(name, 0))
            if v:
                entries.setdefault((a, b), {})[m] = v
        return BilinearProduct(d, entries, symmetric=True, name="solved-product")

    def point_from_product(self, p: BilinearProduct) -> Optional[Dict[str, Fraction]]:
        """Unknown assignment reproducing a concrete symmetric product, or
        None when the product does not fit the assumed zero pattern."""
        d = self.algebra.dim
        point = {name: Fraction(0) for name in self.unknowns}
        for i in range(d):
            for j in range(i, d):
                for k, c in p.entry(i, j).items():
                    if poly_is_zero(c):
                        continue
                    value = c.constant_value() if isinstance(c, ParamPoly) else Fraction(c)
                    name = unknown_name(i + 1, j + 1, k + 1)
                    if name not in point:
                        return None
                    point[name] = value
        return point


def build_cpa_system(g: LieAlgebra, assume: str = "none") -> PolySystem:
    """Generate the polynomial system for symmetric products on g.

    The derivation law contributes linear equations, the representation law
    quadratic ones.  With ``assume="filiform-adapted"`` (valid only for an
    adapted filiform basis) the coefficients e_a . e_b on e_m with
    m <= max(a, b) are forced to zero before generation, which makes every
    left multiplication lower triangular.
    """
    if assume not in ASSUME_CHOICES:
        raise ValueError(f"unknown assumption {assume!r}")
    d = g.dim
    if assume == "filiform-adapted" and not is_adapted_filiform_basis(g):
        raise ValueError(f"{g.name} has no adapted filiform basis; cannot assume it")

    names = []
    pair_of = {}
    forced = []
    for m in range(d - 1, -1, -1):
        for a in range(d):
            for b in range(a, d):
                name = unknown_name(a + 1, b + 1, m + 1)
                if assume == "filiform-adapted" and m <= max(a, b):
                    forced.append(name)
                    continue
                names.append(name)
                pair_of[name] = (a, b, m)
    unknowns = tuple(names)
    params = unknowns + g.params
    nvar = {name: t for t, name in enumerate(unknowns)}
    ext_index = {p: len(unknowns) + t for t, p in enumerate(g.params)}

    def zeta(a: int, b: int, m: int) -> Optional[int]:
        if a > b:
            a, b = b, a
        return nvar.get(unknown_name(a + 1, b + 1, m + 1))

    # bracket coefficients remapped into the system parameter space
    bracket: Dict[Tuple[int, int], Dict[int, dict]] = {}
    for (i, j), comps in g.table.items():
        row = {}
        for k, c in comps.items():
            terms = {}
            for mono, coef in c.terms.items():
                terms[tuple(sorted((ext_index[c.params[t]], e) for t, e in mono))] = coef
            row[k] = terms
        bracket[(i, j)] = row

    def bracket_terms(i: int, j: int) -> Dict[int, dict]:
        if i == j:
            return {}
        if i < j:
            return bracket.get((i, j), {})
        return {
            k: {m: -v for m, v in t.items()} for k, t in bracket.get((j, i), {}).items()
        }

    def add(acc: dict, mono: tuple, coef: Fraction) -> None:
        s = acc.get(mono, Fraction(0)) + coef
        if s:
            acc[mono] = s
        else:
            acc.pop(mono, None)

    equations: List[ParamPoly] = []

    # derivation law (linear): e_i . [e_j, e_k] = [e_i.e_j, e_k] + [e_j, e_i.e_k]
    for i in range(d):
        for j in range(d):
            for k in range(j + 1, d):
                accs = [dict() for _ in range(d)]
                for m, cterms in bracket_terms(j, k).items():
                    for t in range(d):
                        v = zeta(i, m, t)
                        if v is None:
                            continue
                        for cm, cc in cterms.items():
                            add(accs[t], _mono_mul(cm, ((v, 1),)), cc)
                for m in range(d):
                    v = zeta(i, j, m)
                    if v is not None:
                        for t, cterms in bracket_terms(m, k).items():
                            for cm, cc in cterms.items():
                                add(accs[t], _mono_mul(cm, ((v, 1),)), -cc)
                    v = zeta(i, k, m)
                    if v is not None:
                        for t, cterms in bracket_terms(j, m).items():
                            for cm, cc in cterms.items():
                                add(accs[t], _mono_mul(cm, ((v, 1),)), -cc)
                for acc in accs:
                    if acc:
                        equations.append(ParamPoly(params, acc))

    # representation law (quadratic):
    # [e_i,e_j] . e_k = e_i.(e_j.e_k) - e_j.(e_i.e_k)
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(d):
                accs = [dict() for _ in range(d)]
                for m, cterms in bracket_terms(i, j).items():
                    for t in range(d):
                        v = zeta(m, k, t)
                        if v is None:
                            continue
                        for cm, cc in cterms.items():
                            add(accs[t], _mono_mul(cm, ((v, 1),)), cc)
                for m in range(d):
                    v1 = zeta(j, k, m)
                    if v1 is not None:
                        for t in range(d):
                            v2 = zeta(i, m, t)
                            if v2 is not None:
                                mono = ((v1, 2),) if v1 == v2 else tuple(
                                    sorted(((v1, 1), (v2, 1)))
                                )
                                add(accs[t], mono, Fraction(-1))
                    v1 = zeta(i, k, m)
                    if v1 is not None:
                        for t in range(d):
                            v2 = zeta(j, m, t)
                            if v2 is not None:
                                mono = ((v1, 2),) if v1 == v2 else tuple(
                                    sorted(((v1, 1), (v2, 1)))
                                )
                                add(accs[t], mono, Fraction(1))
                for acc in accs:
                    if acc:
                        equations.append(ParamPoly(params, acc))

    return PolySystem(
        algebra=g,
        params=params,
        unknowns=unknowns,
        pair_of=pair_of,
        equations=equations,
        forced_zero=tuple(forced),
        assume=assume,
    )


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for i, e in b:
        merged[i] = merged.get(i, 0) + e
    return tuple(sorted(merged.items()))


# ---------------------------------------------------------------------------
# linear elimination
# ---------------------------------------------------------------------------


class _Eliminator:
    """Deterministic repeated elimination of unknowns that occur linearly
    with a rational coefficient.  Unknown order is the system's parameter
    order; among candidate equations the shortest (then lowest index) wins.
    """

    def __init__(self, nunknowns: int, equations: Sequence[ParamPoly]):
        self.n = nunknowns
        self.eqs: List[Optional[ParamPoly]] = []
        self.eqvars: List[set] = []
        self.eqcand: List[set] = []
        self.occ: Dict[int, set] = {}
        self.cand: Dict[int, set] = {}
        self.heap: List[int] = []
        self.inconsistent = False
        for eq in equations:
            self._push(eq)

    def _scan(self, eq: ParamPoly):
        """Unknown variables of an equation and the subset eliminable from
        it (single occurrence, as a bare degree-1 monomial)."""
        counts: Dict[int, int] = {}
        impure = set()
        n = self.n
        for m in eq.terms:
            single = len(m) == 1
            for i, e in m:
                if i >= n:
                    continue
                counts[i] = counts.get(i, 0) + 1
                if e != 1 or not single:
                    impure.add(i)
        vars_ = set(counts)
        cand = {i for i, c in counts.items() if c == 1 and i not in impure}
        return vars_, cand

    def _push(self, eq: ParamPoly) -> int:
        idx = len(self.eqs)
        if eq.is_zero():
            self.eqs.append(None)
            self.eqvars.append(set())
            self.eqcand.append(set())
            return idx
        vars_, cand = self._scan(eq)
        self.eqs.append(eq)
        self.eqvars.append(vars_)
        self.eqcand.append(cand)
        if not vars_:
            # constant (or purely extrinsic) equation: a nonzero constant
            # means an empty solution set; extrinsic-only residuals are kept
            if eq.is_constant():
                self.inconsistent = True
            return idx
        for v in vars_:
            self.occ.setdefault(v, set()).add(idx)
        for v in cand:
            self.cand.setdefault(v, set()).add(idx)
            heapq.heappush(self.heap, v)
        return idx

    def _replace(self, idx: int, eq: Optional[ParamPoly]) -> None:
        for v in self.eqvars[idx]:
            self.occ[v].discard(idx)
        for v in self.eqcand[idx]:
            self.cand[v].discard(idx)
        if eq is None or eq.is_zero():
            self.eqs[idx] = None
            self.eqvars[idx] = set()
            self.eqcand[idx] = set()
            return
        vars_, cand = self._scan(eq)
        self.eqs[idx] = eq
        self.eqvars[idx] = vars_
        self.eqcand[idx] = cand
        if not vars_:
            if eq.is_constant():
                self.inconsistent = True
            return
        for v in vars_:
            self.occ.setdefault(v, set()).add(idx)
        for v in cand:
            self.cand.setdefault(v, set()).add(idx)
            heapq.heappush(self.heap, v)

    def run(self) -> Dict[int, ParamPoly]:
        subs: Dict[int, ParamPoly] = {}
        sub_occ: Dict[int, set] = {}
        while not self.inconsistent:
            v = None
            while self.heap:
                i = heapq.heappop(self.heap)
                if self.cand.get(i):
                    v = i
                    break
            if v is None:
                break
            eq_idx = min(self.cand[v], key=lambda t: (len(self.eqs[t].terms), t))
            eq = self.eqs[eq_idx]
            coef = eq.terms[((v, 1),)]
            rest = {m: c for m, c in eq.terms.items() if m != ((v, 1),)}
            repl = ParamPoly(eq.params, {m: -c / coef for m, c in rest.items()})
            self._replace(eq_idx, None)
            subs[v] = repl
            # keep previously recorded substitutions fully resolved
            for w in list(sub_occ.get(v, ())):
                subs[w] = subs[w].substitute_index(v, repl)
                sub_occ[v].discard(w)
                for u in self._vars_of(subs[w]):
                    sub_occ.setdefault(u, set()).add(w)
            for u in self._vars_of(repl):
                sub_occ.setdefault(u, set()).add(v)
            for idx in sorted(self.occ.get(v, set()).copy()):
                cur = self.eqs[idx]
                if cur is None:
                    continue
                self._replace(idx, cur.substitute_index(v, repl))
        return subs

    def residual(self) -> List[ParamPoly]:
        return [e for e in self.eqs if e is not None]


def linear_reduce(system: PolySystem) -> Tuple[Dict[str, ParamPoly], List[ParamPoly]]:
    """Eliminate all unknowns occurring linearly with rational coefficient.

    Returns the (fully back-substituted) substitution keyed by unknown name
    and the residual equation list.
    """
    elim = _Eliminator(len(system.unknowns), system.equations)
    subs = elim.run()
    named = {system.params[v]: p for v, p in subs.items()}
    return named, elim.residual()


# ---------------------------------------------------------------------------
# splitting
# ---------------------------------------------------------------------------


@dataclass
class SolutionBranch:
    """Affine parametrization of the product constants, possibly with
    unresolved residual constraints."""

    substitution: Dict[str, ParamPoly]
    residual: List[ParamPoly]
    trace: tuple
    status: str  # "closed" or "unresolved"

    @property
    def closed(self) -> bool:
        return self.status == "closed" and not self.residual

    def free_unknowns(self, system: PolySystem) -> list:
        return [u for u in system.unknowns if u not in self.substitution]

    def value(self, system: PolySystem, name: str) -> ParamPoly:
        if name in self.substitution:
            return self.substitution[name]
        return system.variable(name)

    def zeta(self, system: PolySystem, a: int, b: int, m: int) -> ParamPoly:
        if a > b:
            a, b = b, a
        name = unknown_name(a + 1, b + 1, m + 1)
        if name in system.pair_of:
            return self.value(system, name)
        return ParamPoly.zero(system.params)

    def render(self, system: PolySystem) -> dict:
        return {
            "status": self.status,
            "trace": list(self.trace),
            "free": self.free_unknowns(system),
            "substitution": {
                k: str(v) for k, v in sorted(self.substitution.items())
            },
            "residual": [str(e) for e in self.residual],
        }


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    num, den = x.numerator, x.denominator
    rn = _isqrt(num)
    rd = _isqrt(den)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _isqrt(n: int) -> Optional[int]:
    r = int(n ** 0.5)
    for c in (r - 1, r, r + 1, r + 2):
        if c >= 0 and c * c == n:
            return c
    return None


def _linear_factors(eq: ParamPoly, nunknowns: int) -> Optional[List[ParamPoly]]:
    """Factor an equation into linear factors in single unknowns.

    Handles common-variable extraction, univariate quadratics with rational
    roots, and the bilinear shape A vw + B v + C w + D with AD = BC.
    Returns None when no useful factorization exists.  Equations touching
    extrinsic parameters are never split.
    """
    for m in eq.terms:
        for i, _ in m:
            if i >= nunknowns:
                return None
    params = eq.params
    factors: List[ParamPoly] = []
    work = dict(eq.terms)
    while True:
        common = None
        for m in work:
            s = {i for i, _ in m}
            common = s if common is None else (common & s)
            if not common:
                break
        if not common:
            break
        v = min(common)
        factors.append(ParamPoly(params, {((v, 1),): Fraction(1)}))
        nxt = {}
        for m, c in work.items():
            md = dict(m)
            md[v] -= 1
            if md[v] == 0:
                del md[v]
            nxt[tuple(sorted(md.items()))] = c
        work = nxt
    rem = ParamPoly(params, work)
    # dedupe repeated common factors
    seen = set()
    factors = [f for f in factors if not (str(f) in seen or seen.add(str(f)))]
    if rem.is_constant():
        return factors or None
    uvars = sorted(rem.variables())
    if len(uvars) == 1:
        v = uvars[0]
        deg = max(dict(m).get(v, 0) for m in rem.terms)
        if deg == 1:
            factors.append(rem)
            return factors
        if deg == 2:
            a = rem.terms.get(((v, 2),), Fraction(0))
            b = rem.terms.get(((v, 1),), Fraction(0))
            c = rem.terms.get((), Fraction(0))
            disc = b * b - 4 * a * c
            root = _rational_sqrt(disc)
            if root is not None:
                r1 = (-b - root) / (2 * a)
                r2 = (-b + root) / (2 * a)
                var = ParamPoly(params, {((v, 1),): Fraction(1)})
                factors.append(var - r1)
                if r2 != r1:
                    factors.append(var - r2)
                return factors
        return factors + [rem] if factors else None
    if len(uvars) == 2:
        v, w = uvars
        shapes = {((v, 1), (w, 1)), ((v, 1),), ((w, 1),), ()}
        if set(rem.terms) <= shapes:
            A = rem.terms.get(((v, 1), (w, 1)), Fraction(0))
            B = rem.terms.get(((v, 1),), Fraction(0))
            C = rem.terms.get(((w, 1),), Fraction(0))
            D = rem.terms.get((), Fraction(0))
            if A != 0 and A * D == B * C:
                f1 = ParamPoly(params, {((v, 1),): A, (): C})
                f2 = ParamPoly(params, {((w, 1),): A, (): B})
                factors.extend([f1, f2])
                return factors
    return factors + [rem] if factors else None


def _compose(old: Dict[int, ParamPoly], new: Dict[int, ParamPoly]) -> Dict[int, ParamPoly]:
    out = {}
    for v, p in old.items():
        for w, q in new.items():
            p = p.substitute_index(w, q)
        out[v] = p
    out.update(new)
    return out


def _split(
    system: PolySystem,
    equations: List[ParamPoly],
    initial_subs: Dict[int, ParamPoly],
    budget: list,
) -> List[SolutionBranch]:
    n = len(system.unknowns)
    out: List[SolutionBranch] = []

    def explore(eqs: List[ParamPoly], subs: Dict[int, ParamPoly], trace: tuple):
        elim = _Eliminator(n, eqs)
        local = elim.run()
        if elim.inconsistent:
            return
        subs2 = _compose(subs, local)
        residual = elim.residual()
        if not residual:
            out.append(
                SolutionBranch(
                    substitution={system.params[v]: p for v, p in subs2.items()},
                    residual=[],
                    trace=trace,
                    status="closed",
                )
            )
            return
        split_at = None
        factors = None
        for t, eq in enumerate(residual):
            factors = _linear_factors(eq, n)
            if factors:
                split_at = t
                break
        if split_at is None or budget[0] <= 0:
            out.append(
                SolutionBranch(
                    substitution={system.params[v]: p for v, p in subs2.items()},
                    residual=residual,
                    trace=trace,
                    status="unresolved",
                )
            )
            return
        budget[0] -= 1
        eq = residual[split_at]
        for f in factors:
            child = list(residual)
            child[split_at] = f
            explore(child, subs2, trace + (f"{eq} :: {f}",))

    explore(equations, initial_subs, ())
    out.sort(key=lambda b: b.trace)
    return out


def split_solve(system: PolySystem, max_splits: int = 256) -> List[SolutionBranch]:
    """Depth-first branch-and-reduce over the system.

    Branches whose residual admits no linear-univariate factorization, or
    that would exceed the split budget, come back flagged unresolved.
    Output order is deterministic (sorted by split trace).
    """
    return _split(system, system.equations, {}, [max_splits])


# ---------------------------------------------------------------------------
# verification against explicit families
# ---------------------------------------------------------------------------


def verify_family(g: Optional[LieAlgebra], fam) -> CheckReport:
    """Substitute an explicit product family into the axioms; every residual
    must reduce to the zero polynomial modulo the family constraints."""
    algebra = g if g is not None else fam.algebra
    raw = check_cpa(algebra, fam.product)
    if raw.passed or not fam.constraints:
        return raw
    reduced = CheckReport()
    for v in raw.violations:
        kept = []
        bad = False
        for x in v.residual:
            if isinstance(x, ParamPoly):
                x = x.reduce_mod(fam.constraints)
            if not poly_is_zero(x):
                bad = True
            kept.append(x)
        if bad:
            reduced.add(v.law, v.where, kept)
    return reduced


# ---------------------------------------------------------------------------
# matching solver output against families
# ---------------------------------------------------------------------------


@dataclass
class MatchReport:
    branch_points_checked: int
    family_points_checked: int
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures

    def render(self) -> dict:
        return {
            "passed": self.passed,
            "branch_points": self.branch_points_checked,
            "family_points": self.family_points_checked,
            "failures": self.failures[:10],
        }


def _rand_rat(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-6, 6), rng.choice((1, 1, 2, 3)))


def branch_point_product(
    system: PolySystem, branch: SolutionBranch, assignment: Dict[str, Fraction]
) -> BilinearProduct:
    """Concrete product at a rational specialization of the branch's free
    unknowns."""
    point = {}
    for name in system.unknowns:
        poly = branch.value(system, name)
        point[name] = poly.evaluate(assignment)
    return system.product_from_point(point)


def _solve_family_parameters(fam, product: BilinearProduct) -> Optional[Dict[str, Fraction]]:
    """Find family parameters reproducing a concrete product exactly."""
    plist = list(fam.params)
    pidx = {p: t for t, p in enumerate(plist)}
    rows, rhs = [], []
    d = fam.product.dim
    for i in range(d):
        for j in range(i, d):
            fam_entry = fam.product.entry(i, j)
            got_entry = product.entry(i, j)
            for k in set(fam_entry) | set(got_entry):
                poly = fam_entry.get(k, ParamPoly.zero(fam.product.params))
                target = got_entry.get(k, Fraction(0))
                if isinstance(target, ParamPoly):
                    target = target.constant_value()
                row = [Fraction(0)] * len(plist)
                const = Fraction(0)
                ok = True
                for mono, c in poly.terms.items():
                    if not mono:
                        const += c
                        continue
                    if len(mono) != 1 or mono[0][1] != 1:
                        ok = False
                        break
                    name = poly.params[mono[0][0]]
                    if name not in pidx:
                        ok = False
                        break
                    row[pidx[name]] += c
                if not ok:
                    raise ValueError(
                        f"family {fam.name} is not affine in its parameters"
                    )
                rows.append(row)
                rhs.append(target - const)
    if not rows:
        rows = [[Fraction(0)] * len(plist)]
        rhs = [Fraction(0)]
    sol = solve_linear(Matrix(rows), rhs)
    if sol is None:
        return None
    x, null = sol
    point = {p: x[t] for t, p in enumerate(plist)}
    if not null:
        for lead, c in fam.constraints:
            if c.evaluate(point) != 0:
                return None
        return point
    # under-determined: accept when the constraints vanish identically on
    # the affine solution set
    for lead, c in fam.constraints:
        free_names = tuple(f"_t{t}" for t in range(len(null)))
        params = c.params + free_names
        assign = {}
        for t, p in enumerate(plist):
            expr = ParamPoly.constant(x[t], params)
            for s, v in enumerate(null):
                if v[t]:
                    expr = expr + ParamPoly.variable(free_names[s], params) * v[t]
            assign[p] = expr
        if not c.substitute(assign).is_zero():
            return None
    return point


def match_union(
    system: PolySystem,
    branches: List[SolutionBranch],
    families: Sequence,
    samples: int = 20,
    seed: int = 0,
) -> MatchReport:
    """Mutual containment between the branch union and a union of families:
    every sampled branch point lies in some family, and every sampled point
    of every family satisfies the original equations and lies in some
    branch."""
    for b in branches:
        if not b.closed:
            raise ValueError("match_union needs fully closed branches")
    failures: list = []
    rng = random.Random(seed)
    branch_points = 0
    for bi, b in enumerate(branches):
        free = b.free_unknowns(system)
        for s in range(samples):
            assignment = {u: _rand_rat(rng) for u in free}
            product = branch_point_product(system, b, assignment)
            branch_points += 1
            if all(_solve_family_parameters(f, product) is None for f in families):
                failures.append(
                    f"branch {bi} point {s} lies in no supplied family"
                )
    family_points = 0
    for fi, fam in enumerate(families):
        rng = random.Random(seed + 1 + fi)
        for s in range(samples):
            point = fam.sample(rng)
            product = fam.product_at(point)
            family_points += 1
            assignment = system.point_from_product(product)
            if assignment is None:
                failures.append(
                    f"family {fam.name} point {s} violates the assumed zero pattern"
                )
                continue
            if any(eq.evaluate(assignment) != 0 for eq in system.equations):
                failures.append(
                    f"family {fam.name} point {s} violates an original equation"
                )
                continue
            covered = False
            for b in branches:
                if all(
                    poly.evaluate(assignment) == assignment.get(name, Fraction(0))
                    for name, poly in b.substitution.items()
                ):
                    covered = True
                    break
            if not covered:
                failures.append(
                    f"family {fam.name} point {s} is not covered by any branch"
                )
    return MatchReport(branch_points, family_points, failures)


def match_solutions(
    system: PolySystem,
    branches: List[SolutionBranch],
    fam,
    samples: int = 20,
    seed: int = 0,
) -> MatchReport:
    """Two-sided containment between the solver branches and a family.

    (a) sampled branch points must be reproducible as family members;
    (b) sampled family members must satisfy every original equation and lie
    in some branch.  Unresolved branches are not matchable.
    """
    for b in branches:
        if not b.closed:
            raise ValueError("match_solutions needs fully closed branches")
    failures = []
    rng = random.Random(seed)
    branch_points = 0
    for bi, b in enumerate(branches):
        free = b.free_unknowns(system)
        for s in range(samples):
            assignment = {u: _rand_rat(rng) for u in free}
            product = branch_point_product(system, b, assignment)
            branch_points += 1
            point = _solve_family_parameters(fam, product)
            if point is None:
                failures.append(
                    f"branch {bi} point {s} is not a member of family {fam.name}"
                )
    rng = random.Random(seed + 1)
    family_points = 0
    for s in range(samples):
        point = fam.sample(rng)
        product = fam.product_at(point)
        family_points += 1
        assignment = system.point_from_product(product)
        if assignment is None:
            failures.append(f"family point {s} violates the assumed zero pattern")
            continue
        bad_eq = None
        for eq in system.equations:
            if eq.evaluate(assignment) != 0:
                bad_eq = eq
                break
        if bad_eq is not None:
            failures.append(f"family point {s} violates an original equation")
            continue
        covered = False
        for b in branches:
            ok = True
            for name, poly in b.substitution.items():
                if poly.evaluate(assignment) != assignment.get(name, Fraction(0)):
                    ok = False
                    break
            if ok:
                covered = True
                break
        if not covered:
            failures.append(f"family point {s} is not covered by any branch")
    return MatchReport(branch_points, family_points, failures)


# ---------------------------------------------------------------------------
# annihilation proofs across branches
# ---------------------------------------------------------------------------


@dataclass
class ProveReport:
    status: str  # proven | false | unproven
    witnesses: list

    @property
    def proven(self) -> bool:
        return self.status == "proven"

    def render(self) -> dict:
        return {"status": self.status, "witnesses": self.witnesses[:10]}


def prove_annihilation(
    system: PolySystem,
    branches: List[SolutionBranch],
    left: Subspace,
    right: Subspace,
    target: Optional[Subspace] = None,
) -> ProveReport:
    """Certify left . right = 0 (or membership in ``target``) on every
    branch, as zero-polynomial identities in the surviving free unknowns.

    Unresolved branches yield the verdict "unproven", never "false"; a
    closed branch with a nonzero coordinate is an exact counterexample
    family and yields "false".
    """
    d = system.algebra.dim
    witnesses = []
    unresolved = False
    for bi, b in enumerate(branches):
        if not b.closed:
            unresolved = True
            continue
        cache: Dict[Tuple[int, int, int], ParamPoly] = {}

        def zeta(a, bb, m):
            key = (a, bb, m) if a <= bb else (bb, a, m)
            if key not in cache:
                cache[key] = b.zeta(system, key[0], key[1], key[2])
            return cache[key]

        for li, u in enumerate(left.basis_vectors()):
            for ri, v in enumerate(right.basis_vectors()):
                coords = []
                for m in range(d):
                    acc = ParamPoly.zero(system.params)
                    for a, ua in enumerate(u):
                        if ua == 0:
                            continue
                        for bb, vb in enumerate(v):
                            if vb == 0:
                                continue
                            z = zeta(a, bb, m)
                            if not z.is_zero():
                                acc = acc + z * (ua * vb)
                    coords.append(acc)
                if target is not None:
                    coords = target.reduce(coords)
                for m, poly in enumerate(coords):
                    if not poly_is_zero(poly):
                        witnesses.append(
                            {
                                "branch": bi,
                                "left": li + 1,
                                "right": ri + 1,
                                "coordinate": m + 1,
                                "value": str(poly),
                            }
                        )
    if witnesses:
        return ProveReport("false", witnesses)
    if unresolved:
        return ProveReport("unproven", [])
    return ProveReport("proven", [])


# ---------------------------------------------------------------------------
# quotient preprocessing (constraint import from smaller quotients)
# ---------------------------------------------------------------------------


def quotient_zero_imports(
    g: LieAlgebra,
    ideal: Subspace,
    max_splits: int = 1024,
    derivation_basis: Optional[list] = None,
) -> List[str]:
    """Unknown names provably zero for every product on g, imported from a
    complete solve on the quotient g / ideal.

    Soundness requires the ideal to be invariant under every derivation of
    g (then any product satisfying the derivation law descends to the
    quotient) and the quotient solve to close completely.  Returns [] when
    either precondition fails.
    """
    from .derivations import derivation_space

    basis = derivation_basis
    if basis is None:
        basis = derivation_space(g).basis
    for D in basis:
        for w in ideal.basis_vectors():
            if not ideal.contains_vector(D.mul_vec(w)):
                return []
    q, _proj = quotient(g, ideal)
    complement = [c for c in range(g.dim) if c not in set(ideal.pivots)]
    qsystem = build_cpa_system(q, assume="none")
    qbranches = split_solve(qsystem, max_splits)
    if not qbranches or any(not b.closed for b in qbranches):
        return []
    imports = []
    for name in qsystem.unknowns:
        a, bb, m = qsystem.pair_of[name]
        if all(b.value(qsystem, name).is_zero() for b in qbranches):
            imports.append(
                unknown_name(complement[a] + 1, complement[bb] + 1, complement[m] + 1)
            )
    return imports


def solve_cpa(
    g: LieAlgebra,
    assume: str = "none",
    max_splits: int = 256,
    preprocess_ideals: Sequence[Subspace] = (),
    quotient_max_splits: int = 1024,
) -> Tuple[PolySystem, List[SolutionBranch]]:
    """Build the product system for g, optionally import zero constraints
    from quotient solves, and run the split solver."""
    system = build_cpa_system(g, assume=assume)
    if preprocess_ideals:
        from .derivations import derivation_space

        basis = derivation_space(g).basis
        extra = []
        for ideal in preprocess_ideals:
            for name in quotient_zero_imports(
                g, ideal, quotient_max_splits, derivation_basis=basis
            ):
                if name in system.pair_of:
                    extra.append(system.variable(name))
        if extra:
            system = PolySystem(
                algebra=system.algebra,
                params=system.params,
                unknowns=system.unknowns,
                pair_of=system.pair_of,
                equations=extra + system.equations,
                forced_zero=system.forced_zero,
                assume=system.assume,
            )
    branches = split_solve(system, max_splits)
    return system, branches


# ---------------------------------------------------------------------------
# witness search
# ---------------------------------------------------------------------------


def _witness_from_branch(system, branch, g, derived) -> Optional[dict]:
    from .structures import annihilates_subspace

    free = branch.free_unknowns(system)
    for attempt in range(50):
        rng = random.Random(attempt)
        assignment = {u: _rand_rat(rng) for u in free}
        product = branch_point_product(system, branch, assignment)
        if not check_cpa(g, product).passed:
            continue
        if not annihilates_subspace(product, derived).passed:
            return {
                "assignment": {k: str(v) for k, v in sorted(assignment.items())},
                "product": product,
            }
    return None


def find_nonassociative_cpa(
    g: LieAlgebra,
    derived: Subspace,
    max_splits: int = 2048,
) -> Optional[dict]:
    """Search the solution variety for a product with g . [g,g] != 0 and
    return a concrete rational witness product.

    Closed branches are scanned directly; unresolved branches are probed by
    pinning one unknown of a residual equation to small rational values and
    re-solving, which is sound (probed varieties are subvarieties).
    """
    system, branches = solve_cpa(g, assume="none", max_splits=max_splits)
    full = Subspace.full(g.dim)
    pindex = {name: t for t, name in enumerate(system.params)}

    def scan(branch) -> Optional[dict]:
        report = prove_annihilation(system, [branch], full, derived)
        if report.status != "false":
            return None
        return _witness_from_branch(system, branch, g, derived)

    probes = [Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(0)]
    stack = []
    for bi, b in enumerate(branches):
        if b.closed:
            found = scan(b)
            if found:
                found["branch"] = bi
                return found
        else:
            stack.append((b, 0))
    while stack:
        branch, depth = stack.pop(0)
        if depth > 3 or not branch.residual:
            continue
        var = min(v for v in branch.residual[0].variables() if v < len(system.unknowns))
        var_poly = ParamPoly(system.params, {((var, 1),): Fraction(1)})
        base_subs = {
            pindex[name]: poly for name, poly in branch.substitution.items()
        }
        for val in probes:
            eqs = list(branch.residual) + [var_poly - val]
            for child in _split(system, eqs, base_subs, [64]):
                if child.closed:
                    found = scan(child)
                    if found:
                        found["branch"] = f"probe:{system.params[var]}={val}"
                        return found
                else:
                    stack.append((child, depth + 1))
    return None
