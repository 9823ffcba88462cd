"""Lie-Poisson structure on the dual coordinates of a Lie algebra.

``{x_i, x_j} = sum_k c_ij^k x_k`` extended as a biderivation.  The
characteristic fields ``X_i = sum_{j,k} c_ij^k x_k d/dx_j`` satisfy
``X_i(g) = {x_i, g}``; polynomial Casimirs are the common kernel of the X_i.

Rational-power invariants ``P * x_d^q`` are checked without leaving the
polynomial ring: ``X(P x_d^q) = x_d^(q-1) (x_d X(P) + q P X(x_d))``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .lie import LieAlgebra
from .linalg import nullspace
from .poly import Polynomial, VarSet, as_fraction
from .weyl import DiffOp

__all__ = [
    "PoissonStructure",
    "PoissonCasimirResult",
    "RationalPowerCandidate",
    "MalformedCandidate",
    "poisson_casimir_search",
    "verify_rational_invariant",
    "verify_functional_relations",
]


class MalformedCandidate(ValueError):
    pass


class PoissonStructure:
    def __init__(self, L: LieAlgebra, coords: Sequence[str] | Mapping[str, str] | None = None):
        """``coords`` names the dual coordinate of each basis element.

        A mapping ``{coordinate: generator}`` may list coordinates in any order.
        """
        self.L = L
        if coords is None:
            names = [f"x{i + 1}" for i in range(L.dim)]
        elif isinstance(coords, Mapping):
            by_gen = {g: x for x, g in coords.items()}
            names = [by_gen[n] for n in L.names]
        else:
            names = list(coords)
        if len(names) != L.dim:
            raise ValueError("one coordinate per basis element is required")
        self.vs = VarSet(names)
        self.gen_of = dict(zip(names, L.names))
        self._fields: list[DiffOp] | None = None

    def xbracket(self, i: int, j: int) -> Polynomial:
        """``{x_i, x_j}`` as a linear polynomial."""
        out = self.vs.zero()
        for k, c in self.L.bracket_basis(i, j).items():
            out = out + self.vs.var(self.vs.names[k]).scale(c)
        return out

    def bracket(self, f: Polynomial, g: Polynomial) -> Polynomial:
        df = [f.diff(i) for i in range(len(self.vs))]
        dg = [g.diff(i) for i in range(len(self.vs))]
        total = self.vs.zero()
        for (i, j), res in self.L.sc.items():
            a = df[i] * dg[j] - df[j] * dg[i]
            if not a:
                continue
            lin = self.vs.zero()
            for k, c in res.items():
                lin = lin + self.vs.var(self.vs.names[k]).scale(c)
            total = total + lin * a
        return total

    def characteristic_fields(self) -> list[DiffOp]:
        if self._fields is None:
            fields = []
            for i in range(self.L.dim):
                comps = {}
                for j in range(self.L.dim):
                    p = self.xbracket(i, j)
                    if p:
                        comps[self.vs.names[j]] = p
                fields.append(DiffOp.from_vector(self.vs, comps))
            self._fields = fields
        return self._fields

    def parse(self, text: str) -> Polynomial:
        return self.vs.parse(text)


# ---------------------------------------------------------------------------


@dataclass
class PoissonCasimirResult:
    monomials: int
    equations: int
    basis: list[Polynomial]
    seconds: float = 0.0
    restrict: list[str] | None = None


def _monomials(nvars: int, allowed: Sequence[int], max_degree: int) -> list[tuple[int, ...]]:
    out = []

    def rec(pos: int, left: int, cur: list[int]):
        if pos == len(allowed):
            out.append(tuple(cur))
            return
        for e in range(left, -1, -1):
            cur[allowed[pos]] = e
            rec(pos + 1, left - e, cur)
        cur[allowed[pos]] = 0

    rec(0, max_degree, [0] * nvars)
    out.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return out


def poisson_casimir_search(
    S: PoissonStructure,
    max_degree: int,
    restrict: Sequence[str] | None = None,
    max_monomials: int = 2_000_000,
) -> PoissonCasimirResult:
    """Polynomials of degree <= N (in the allowed coordinates) annihilated by every X_i.

    ``equations`` counts the distinct nonzero rows of the assembled system.
    """
    t0 = time.perf_counter()
    n = len(S.vs)
    allowed = list(range(n)) if restrict is None else [S.vs.index[v] for v in restrict]
    mons = _monomials(n, allowed, max_degree)
    if len(mons) > max_monomials:
        from .enveloping import TooManyMonomials

        raise TooManyMonomials(f"{len(mons)} candidate monomials exceed the cap {max_monomials}")
    fields = S.characteristic_fields()
    rows: dict[tuple[int, tuple[int, ...]], dict[int, Fraction]] = {}
    for col, e in enumerate(mons):
        m = Polynomial.monomial(S.vs, e)
        for i, X in enumerate(fields):
            for exps, c in X.apply(m).terms.items():
                rows.setdefault((i, exps), {})[col] = c
    ordered = [rows[k] for k in sorted(rows)]
    null = nullspace(ordered, len(mons))
    basis = [Polynomial(S.vs, {mons[c]: v for c, v in vec.items()}) for vec in null]
    return PoissonCasimirResult(
        monomials=len(mons),
        equations=len(ordered),
        basis=basis,
        seconds=time.perf_counter() - t0,
        restrict=list(restrict) if restrict is not None else None,
    )


# ---------------------------------------------------------------------------
# rational-power candidates


@dataclass
class RationalPowerCandidate:
    numerator: Polynomial
    base: str
    exponent: Fraction
    label: str = ""

    def __post_init__(self):
        self.exponent = as_fraction(self.exponent)
        if self.base not in self.numerator.vs.index:
            raise MalformedCandidate(f"unknown base variable {self.base!r}")
        if not self.numerator:
            raise MalformedCandidate("zero numerator")

    def __str__(self):
        if self.exponent == 0:
            return f"({self.numerator})"
        return f"({self.numerator})*{self.base}^({self.exponent})"


@dataclass
class InvariantReport:
    label: str
    failures: list[tuple[int, Polynomial]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_rational_invariant(c: RationalPowerCandidate, S: PoissonStructure) -> InvariantReport:
    """Check ``x_d X_i(P) + q P X_i(x_d) = 0`` for every characteristic field."""
    if c.numerator.vs != S.vs:
        c = RationalPowerCandidate(c.numerator.embed(S.vs), c.base, c.exponent, c.label)
    xd = S.vs.var(c.base)
    report = InvariantReport(c.label or str(c))
    for i, X in enumerate(S.characteristic_fields()):
        lhs = xd * X.apply(c.numerator) + (c.numerator * X.apply(xd)).scale(c.exponent)
        if lhs:
            report.failures.append((i, lhs))
    return report


def _power_terms(expr_terms, candidates: Mapping[str, RationalPowerCandidate], vs: VarSet):
    """Expand a polynomial in candidate symbols into ``{exponent of base: polynomial}``."""
    out: dict[Fraction, Polynomial] = {}
    for coeff, factors in expr_terms:
        p = Polynomial.constant(vs, coeff)
        q = Fraction(0)
        for name, k in factors:
            if name in candidates:
                cand = candidates[name]
                p = p * cand.numerator ** k
                q += cand.exponent * k
            else:
                p = p * vs.var(name) ** k
        out[q] = out[q] + p if q in out else p
    return out


def verify_functional_relations(
    relations: Sequence[Mapping[str, str]],
    polynomials: Mapping[str, Polynomial],
    candidates: Mapping[str, RationalPowerCandidate],
    base: str,
) -> list[dict]:
    """Check ``lhs = rhs`` where rhs is a polynomial in rational-power candidates.

    All candidates must share ``base``.  Terms are grouped by the fractional
    part of their power of ``base`` (distinct classes are independent), then
    each class is cleared to a polynomial identity.
    """
    from .poly import parse_terms

    vs = next(iter(polynomials.values())).vs
    for cand in candidates.values():
        if cand.base != base and cand.exponent != 0:
            raise MalformedCandidate(f"{cand.label}: base {cand.base} differs from {base}")
    results = []
    for rel in relations:
        lhs_terms = parse_terms(rel["lhs"])
        rhs_terms = parse_terms(rel["rhs"])
        known = {**{k: RationalPowerCandidate(v, base, 0, k) for k, v in polynomials.items()}, **candidates}
        left = _power_terms(lhs_terms, known, vs)
        right = _power_terms(rhs_terms, known, vs)
        diff: dict[Fraction, Polynomial] = dict(left)
        for q, p in right.items():
            diff[q] = diff[q] - p if q in diff else -p
        classes: dict[Fraction, dict[Fraction, Polynomial]] = {}
        for q, p in diff.items():
            classes.setdefault(q - (q.numerator // q.denominator), {})[q] = p
        xb = vs.var(base)
        failures = []
        for frac, members in sorted(classes.items()):
            lo = min(members)
            cleared = vs.zero()
            for q, p in members.items():
                cleared = cleared + p * xb ** int(q - lo)
            if cleared:
                failures.append(f"{base}^({lo}) * ({cleared})")
        results.append({"label": rel.get("label", ""), "ok": not failures, "residual": "; ".join(failures) or "0"})
    return results
