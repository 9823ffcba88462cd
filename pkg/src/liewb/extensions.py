"""Central extensions and virtual copies.

An extension ansatz adds a central element Z and deforms selected brackets,
``[X_p, X_q] += a_r Z``.  The Jacobi identity then becomes a linear system in
the unknowns a_r: for every triple (i, j, k) the Z-component of the Jacobi sum
is ``w(X_i, [X_j, X_k]) + cyclic``, with ``w`` the antisymmetric form carrying
the a_r.

Virtual copies live in U(extension) specialised at Z = 1: the primed sl(2)
elements are quadratic in the radical with coefficients in m1^-1, m2^-1, and
the sl(2) relations only close once the central element is a scalar.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .enveloping import Enveloping, NCPoly, pbw_product, specialize_central, verify_central
from .lie import LieAlgebra
from .linalg import rref
from .poly import Polynomial, VarSet
from .weyl import DiffOp

__all__ = [
    "ExtensionAnsatz",
    "ExtensionSolution",
    "solve_central_extension",
    "extend",
    "VirtualCopyMap",
    "verify_virtual_copy",
    "casimir_from_virtual_copy",
    "compare_ncpoly",
    "verify_extended_realization",
]


@dataclass
class ExtensionAnsatz:
    base: LieAlgebra
    pairs: list[tuple[str, str]]
    unknowns: list[str] = field(default_factory=list)
    central: str = "Z"

    def __post_init__(self):
        if not self.unknowns:
            self.unknowns = [f"a{r + 1}" for r in range(len(self.pairs))]
        if len(self.unknowns) != len(self.pairs):
            raise ValueError("one unknown per pair")
        seen = set()
        fixed = []
        for p, q in self.pairs:
            i, j = self.base.index[p], self.base.index[q]
            if i == j:
                raise ValueError(f"pair ({p}, {q}) is not a pair of distinct generators")
            if i > j:
                raise ValueError(f"pair ({p}, {q}) must follow the basis order")
            if (i, j) in seen:
                raise ValueError(f"pair ({p}, {q}) repeated")
            seen.add((i, j))
            fixed.append((p, q))
        self.pairs = fixed


@dataclass
class ExtensionSolution:
    unknowns: list[str]
    free: list[str]
    dependent: dict[str, dict[str, Fraction]]
    triples: int
    nonzero_equations: int
    rank: int

    def expression(self, name: str) -> str:
        if name in self.free:
            return name
        terms = self.dependent[name]
        if not terms:
            return "0"
        vs = VarSet(self.unknowns)
        p = vs.zero()
        for f, c in terms.items():
            p = p + vs.var(f).scale(c)
        return p.to_string()

    def as_dict(self) -> dict:
        return {
            "unknowns": self.unknowns,
            "free": self.free,
            "solution": {u: self.expression(u) for u in self.unknowns},
            "dimension": len(self.free),
            "triples": self.triples,
            "nonzero_equations": self.nonzero_equations,
            "rank": self.rank,
        }


def _form(ans: ExtensionAnsatz):
    """w(i, j) -> unknown index, antisymmetric."""
    w = {}
    for r, (p, q) in enumerate(ans.pairs):
        i, j = ans.base.index[p], ans.base.index[q]
        w[(i, j)] = (r, 1)
        w[(j, i)] = (r, -1)
    return w


def solve_central_extension(ans: ExtensionAnsatz) -> ExtensionSolution:
    L = ans.base
    w = _form(ans)
    rows = []
    triples = 0
    for i, j, k in combinations(range(L.dim), 3):
        triples += 1
        row: dict[int, Fraction] = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for m, coef in L.bracket_basis(b, c).items():
                hit = w.get((a, m))
                if hit:
                    r, s = hit
                    row[r] = row.get(r, 0) + s * coef
        row = {r: v for r, v in row.items() if v}
        if row:
            rows.append(row)
    piv = rref(rows)
    names = ans.unknowns
    free = [names[r] for r in range(len(names)) if r not in piv]
    dependent = {}
    for pc, row in piv.items():
        lead = row[pc]
        dependent[names[pc]] = {names[c]: Fraction(-v, lead) for c, v in row.items() if c != pc}
    return ExtensionSolution(
        unknowns=list(names),
        free=free,
        dependent=dependent,
        triples=triples,
        nonzero_equations=len(rows),
        rank=len(piv),
    )


def extend(
    ans: ExtensionAnsatz,
    values: Mapping[str, str],
    params: Sequence[str],
    label: str = "",
) -> LieAlgebra:
    """The extended algebra with ``a_r`` set to Laurent polynomials in ``params``.

    Unknowns absent from ``values`` are zero.
    """
    L = ans.base
    pvs = VarSet(list(params), params=list(params))
    n = L.dim
    sc: dict[tuple[int, int], dict[int, object]] = {}
    for key, res in L.sc.items():
        sc[key] = {k: Polynomial.constant(pvs, c) for k, c in res.items()}
    for r, (p, q) in enumerate(ans.pairs):
        text = values.get(ans.unknowns[r], "0")
        val = pvs.parse(text)
        if not val:
            continue
        i, j = L.index[p], L.index[q]
        sc.setdefault((i, j), {})[n] = val
    names = list(L.names) + [ans.central]
    return LieAlgebra(names, sc, params=pvs, label=label or f"{L.label}+{ans.central}")


# ---------------------------------------------------------------------------
# virtual copies


@dataclass
class VirtualCopyMap:
    U: Enveloping
    J0: NCPoly
    J2: NCPoly
    Jm2: NCPoly
    central: str = "Z"

    @classmethod
    def parse(cls, U: Enveloping, exprs: Mapping[str, str], central: str = "Z") -> "VirtualCopyMap":
        return cls(U, U.parse(exprs["J0"]), U.parse(exprs["J2"]), U.parse(exprs["Jm2"]), central)

    def quotient(self, p: NCPoly) -> NCPoly:
        if self.central not in self.U.L.index:
            return p
        return specialize_central(p, self.U.L.index[self.central], 1)

    def casimir_prime(self) -> NCPoly:
        """``J0'^2 + 2 (J2' Jm2' + Jm2' J2')`` in the quotient Z = 1."""
        q = self.quotient
        j0, j2, jm2 = q(self.J0), q(self.J2), q(self.Jm2)
        return q(pbw_product(j0, j0) + (pbw_product(j2, jm2) + pbw_product(jm2, j2)).scale(2))


def _comm(p: NCPoly, q: NCPoly) -> NCPoly:
    return pbw_product(p, q) - pbw_product(q, p)


def verify_virtual_copy(m: VirtualCopyMap, radical: Sequence[str]) -> dict:
    """(a) primed triple commutes with the radical, (b) sl(2) relations, (c) K' is central."""
    U = m.U
    q = m.quotient
    primed = {"J0": m.J0, "J2": m.J2, "Jm2": m.Jm2}
    a = []
    for pn, p in primed.items():
        for r in radical:
            c = q(_comm(p, U.gen(r)))
            if c:
                a.append({"primed": pn, "generator": r, "commutator": c.to_string()})
    b = []
    rels = [
        ("J0", "J2", m.J2.scale(2)),
        ("J0", "Jm2", m.Jm2.scale(-2)),
        ("J2", "Jm2", m.J0),
    ]
    for x, y, want in rels:
        got = q(_comm(primed[x], primed[y]))
        diff = got - q(want)
        if diff or not q(want):
            b.append({"pair": [x, y], "difference": diff.to_string(), "expected": q(want).to_string()})
    K = m.casimir_prime()
    c = [
        {"generator": g, "commutator": q(comm).to_string()}
        for g, comm in verify_central(K)
        if q(comm)
    ]
    return {
        "a_commutes_with_radical": {"ok": not a, "failures": a},
        "b_sl2_relations": {"ok": not b, "failures": b},
        "c_casimir_central": {"ok": not c, "failures": c},
        "ok": not (a or b or c),
    }


def casimir_from_virtual_copy(m: VirtualCopyMap, scale: str = "-1/6*m1*m2") -> NCPoly:
    U = m.U
    s = U.params.parse(scale)
    return m.quotient(m.casimir_prime().scale(s))


def compare_ncpoly(computed: NCPoly, expected: NCPoly) -> dict:
    """Term-by-term comparison (both in PBW normal form)."""
    only_c, only_e, differ = [], [], []
    names = computed.U.L.names

    def wname(w):
        return "*".join(names[i] for i in w) or "1"

    for w in sorted(set(computed.terms) | set(expected.terms), key=lambda w: (len(w), w)):
        a, b = computed.terms.get(w), expected.terms.get(w)
        if a is None:
            only_e.append({"monomial": wname(w), "expected": str(b)})
        elif b is None:
            only_c.append({"monomial": wname(w), "computed": str(a)})
        elif a != b:
            differ.append({"monomial": wname(w), "computed": str(a), "expected": str(b)})
    matched = len(set(computed.terms) & set(expected.terms)) - len(differ)
    return {
        "matched": matched,
        "only_computed": only_c,
        "only_expected": only_e,
        "coefficient_mismatch": differ,
        "equal": not (only_c or only_e or differ),
    }


def verify_extended_realization(
    ext: LieAlgebra,
    ops: Mapping[str, DiffOp],
    casimir: NCPoly | None = None,
    expected_casimir: DiffOp | None = None,
) -> dict:
    """Commutators of the realized extended algebra against its abstract table.

    The central element must be realized too (normally as the identity).
    """
    names = list(ext.names)
    missing = [n for n in names if n not in ops]
    if missing:
        raise ValueError(f"no operator for {missing}")
    realized = [ops[n] for n in names]
    vs = realized[0].vs

    def embed_coeff(c):
        if isinstance(c, Polynomial):
            return c.embed(vs)
        return Polynomial.constant(vs, c)

    def realize_element(coords):
        out = DiffOp.zero(vs)
        for k, c in coords.items():
            out = out + realized[k].scale(embed_coeff(c))
        return out

    mismatches = []
    for i, j in combinations(range(len(names)), 2):
        lhs = realized[i].commutator(realized[j])
        rhs = realize_element(ext.bracket_basis(i, j))
        if lhs != rhs:
            mismatches.append(
                {"pair": [names[i], names[j]], "realized": lhs.to_string(), "abstract": rhs.to_string()}
            )
    coincide = [
        [names[i], names[j]] for i, j in combinations(range(len(names)), 2) if realized[i] == realized[j]
    ]
    report = {"mismatches": mismatches, "identical_operators": coincide}
    if casimir is not None:
        from .catalog import realize

        K = realize(casimir, realized)
        report["casimir"] = K.to_string()
        if expected_casimir is not None:
            d = K - expected_casimir
            report["casimir_matches_expected"] = not d
            report["casimir_difference"] = d.to_string()
        report["casimir_commutators"] = {
            n: c.to_string() for n, op in zip(names, realized) if (c := op.commutator(K))
        }
        report["limits"] = _limits(K)
    return report


def _limits(K: DiffOp) -> dict:
    out = {}
    vs = K.vs
    cases = {"m1->0": {"m1": 0}, "m2->0": {"m2": 0}, "m1,m2->0": {"m1": 0, "m2": 0}}
    for label, values in cases.items():
        neg = [v for v in values if any(p.min_exponent(v) < 0 for p in K.terms.values())]
        if neg:
            out[label] = {"defined": False, "reason": f"negative powers of {', '.join(neg)}"}
            continue
        lim = K.substitute(values)
        out[label] = {"defined": True, "value": lim.to_string(), "vanishes": not lim}
    return out
