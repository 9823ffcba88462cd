"""Finite-dimensional Lie algebras given by structure constants.

Structure constants are stored sparsely for ``i < j`` only:
``sc[(i, j)] = {k: c}`` means ``[X_i, X_j] = sum_k c X_k``.  Coefficients
are Fractions, or Laurent polynomials in central parameters for extended
algebras; nothing here depends on which.

When an algebra is extracted from differential operators the operators are
kept as ``realization`` so that any abstract statement can be re-checked on
the operator side.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .linalg import LinearlyDependent, SpanSolver
from .poly import Polynomial, VarSet, format_coeff, parse_terms
from .weyl import DiffOp

__all__ = [
    "LieAlgebra",
    "Element",
    "Grading",
    "GradingReport",
    "Multiplet",
    "LabelVector",
    "NotClosed",
    "LinearlyDependentInput",
    "NotEigenvector",
    "NotProportional",
    "SingularBasisChange",
    "from_realization",
    "verify_jacobi",
    "subalgebra",
    "change_of_basis",
    "verify_grading",
    "lower_central_series",
    "derived_series",
    "ad_eigenvalue",
    "label_vector",
    "commuting_set_verify",
    "ladder_coefficients",
    "is_ideal",
    "span_dimension",
]


class NotClosed(ValueError):
    def __init__(self, i, j, residual):
        self.pair = (i, j)
        self.residual = residual
        super().__init__(f"[{i}, {j}] leaves the span; residual {residual}")


class LinearlyDependentInput(ValueError):
    pass


class NotEigenvector(ValueError):
    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"not an eigenvector; residual {residual}")


class NotProportional(ValueError):
    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class SingularBasisChange(ValueError):
    pass


def _is_zero(c) -> bool:
    return not c


def _fmt_coeff(c) -> str:
    if isinstance(c, Polynomial):
        return c.to_string()
    return format_coeff(Fraction(c))


class Element:
    """A vector in a Lie algebra, as sparse coordinates over the basis."""

    __slots__ = ("dim", "coords", "names")

    def __init__(self, dim: int, coords: Mapping[int, object] | None = None, names=None):
        self.dim = dim
        self.coords = {k: v for k, v in (coords or {}).items() if not _is_zero(v)}
        for k in self.coords:
            if not 0 <= k < dim:
                raise IndexError(f"coordinate {k} outside dimension {dim}")
        self.names = names

    def __bool__(self):
        return bool(self.coords)

    def __eq__(self, other):
        if isinstance(other, Element):
            return self.dim == other.dim and self.coords == other.coords
        if other == 0:
            return not self.coords
        return NotImplemented

    def __hash__(self):
        return hash((self.dim, frozenset(self.coords.items())))

    def _new(self, coords):
        return Element(self.dim, coords, self.names)

    def __add__(self, other: "Element"):
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        out = dict(self.coords)
        for k, v in other.coords.items():
            out[k] = out[k] + v if k in out else v
        return self._new(out)

    def __neg__(self):
        return self._new({k: -v for k, v in self.coords.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return self._new({k: v * c for k, v in self.coords.items()})

    __rmul__ = __mul__

    def support(self) -> list[int]:
        return sorted(self.coords)

    def to_string(self, names: Sequence[str] | None = None) -> str:
        names = names or self.names or [f"e{i}" for i in range(self.dim)]
        if not self.coords:
            return "0"
        parts = []
        for k in sorted(self.coords):
            c = self.coords[k]
            if isinstance(c, Polynomial):
                parts.append(f"({c.to_string()})*{names[k]}")
                continue
            c = Fraction(c)
            mag = abs(c)
            body = names[k] if mag == 1 else f"{format_coeff(mag)}*{names[k]}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"Element({self.to_string()!r})"


class LieAlgebra:
    def __init__(
        self,
        names: Sequence[str],
        sc: Mapping[tuple[int, int], Mapping[int, object]],
        params: VarSet | None = None,
        realization: Sequence[DiffOp] | None = None,
        label: str = "",
    ):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate basis names")
        self.dim = len(self.names)
        self.index = {n: i for i, n in enumerate(self.names)}
        self.params = params
        self.label = label
        table: dict[tuple[int, int], dict[int, object]] = {}
        for (i, j), res in sc.items():
            if i == j:
                if any(not _is_zero(v) for v in res.values()):
                    raise ValueError(f"[X{i}, X{i}] must vanish")
                continue
            sign = 1
            if i > j:
                i, j, sign = j, i, -1
            clean = {k: v * sign for k, v in res.items() if not _is_zero(v)}
            if clean:
                if (i, j) in table and table[(i, j)] != clean:
                    raise ValueError(f"conflicting brackets for ({i}, {j})")
                table[(i, j)] = clean
        self.sc = table
        if realization is not None and len(realization) != self.dim:
            raise ValueError("realization length does not match the basis")
        self.realization = list(realization) if realization is not None else None

    def __repr__(self):
        return f"LieAlgebra({self.label or 'unnamed'}, dim={self.dim}, brackets={len(self.sc)})"

    # -- elements -------------------------------------------------------------

    def zero(self) -> Element:
        return Element(self.dim, {}, self.names)

    def basis(self, i) -> Element:
        if isinstance(i, str):
            i = self.index[i]
        return Element(self.dim, {i: Fraction(1)}, self.names)

    def element(self, spec) -> Element:
        """Element from a name, an index, a coordinate dict or a linear text ``"L16 - L13"``."""
        if isinstance(spec, Element):
            return spec
        if isinstance(spec, int):
            return self.basis(spec)
        if isinstance(spec, Mapping):
            coords = {}
            for k, v in spec.items():
                k = self.index[k] if isinstance(k, str) else k
                coords[k] = v if isinstance(v, Polynomial) else Fraction(v)
            return Element(self.dim, coords, self.names)
        if spec in self.index:
            return self.basis(spec)
        coords: dict[int, Fraction] = {}
        for c, factors in parse_terms(spec):
            if len(factors) != 1 or factors[0][1] != 1:
                raise ValueError(f"not a linear combination of generators: {spec!r}")
            k = self.index[factors[0][0]]
            coords[k] = coords.get(k, 0) + c
        return Element(self.dim, coords, self.names)

    def scalar_zero(self):
        return self.params.zero() if self.params is not None else Fraction(0)

    # -- brackets -------------------------------------------------------------

    def bracket_basis(self, i: int, j: int) -> dict[int, object]:
        if i == j:
            return {}
        if i < j:
            return self.sc.get((i, j), {})
        return {k: -v for k, v in self.sc.get((j, i), {}).items()}

    def bracket(self, a: Element, b: Element) -> Element:
        out: dict[int, object] = {}
        for i, ca in a.coords.items():
            for j, cb in b.coords.items():
                if i == j:
                    continue
                for k, c in self.bracket_basis(i, j).items():
                    t = ca * cb * c
                    out[k] = out[k] + t if k in out else t
        return Element(self.dim, out, self.names)

    def ad_matrix(self, g: Element) -> dict[int, dict[int, object]]:
        """Columns of ad(g): ``{j: coords of [g, X_j]}``."""
        return {j: self.bracket(g, self.basis(j)).coords for j in range(self.dim)}

    def structure_constant(self, i: int, j: int, k: int):
        return self.bracket_basis(i, j).get(k, 0)

    def nonzero_brackets(self):
        """Sorted ``((i, j), {k: c})`` for every nonvanishing ``[X_i, X_j]``, i < j."""
        return sorted(self.sc.items())

    # -- realization side -----------------------------------------------------

    def realize(self, x: Element) -> DiffOp:
        if self.realization is None:
            raise ValueError(f"{self.label or 'algebra'} has no realization attached")
        vs = self.realization[0].vs
        total = DiffOp.zero(vs)
        for k, c in x.coords.items():
            total = total + self.realization[k].scale(c)
        return total

    def check_realization(self) -> list[tuple[int, int, DiffOp]]:
        """Pairs where the operator commutator differs from the realized bracket."""
        bad = []
        for i, j in combinations(range(self.dim), 2):
            lhs = self.realization[i].commutator(self.realization[j])
            rhs = self.realize(Element(self.dim, self.bracket_basis(i, j)))
            if lhs != rhs:
                bad.append((i, j, lhs - rhs))
        return bad

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> str:
        """Canonical abstract form; identical algebras give identical text."""
        brackets = {}
        for (i, j), res in sorted(self.sc.items()):
            brackets[f"{i},{j}"] = [[str(k), _fmt_coeff(res[k])] for k in sorted(res)]
        doc = {"dim": self.dim, "names": list(self.names), "brackets": brackets}
        if self.params is not None:
            doc["parameters"] = list(self.params.names)
        return json.dumps(doc, indent=1, ensure_ascii=True)

    @classmethod
    def from_json(cls, text_or_doc, label: str = "") -> "LieAlgebra":
        doc = json.loads(text_or_doc) if isinstance(text_or_doc, str) else text_or_doc
        names = doc["names"]
        if doc.get("dim", len(names)) != len(names):
            raise ValueError("'dim' does not match the number of names")
        params = None
        if doc.get("parameters"):
            params = VarSet(doc["parameters"], params=doc["parameters"])
        sc = {}
        for key, entries in doc["brackets"].items():
            i, j = (int(s) for s in key.split(","))
            res = {}
            for k, c in entries:
                val = params.parse(c) if params is not None else Fraction(c)
                res[int(k)] = val
            sc[(i, j)] = res
        return cls(names, sc, params=params, label=label or doc.get("label", ""))

    def realized_json(self) -> str:
        if self.realization is None:
            raise ValueError("no realization attached")
        vs = self.realization[0].vs
        doc = {
            "variables": [n for n in vs.names if n not in vs.params],
            "parameters": list(vs.params),
            "generators": [
                {"name": n, "op": op.to_string()} for n, op in zip(self.names, self.realization)
            ],
        }
        return json.dumps(doc, indent=1, ensure_ascii=True)


# ---------------------------------------------------------------------------
# construction


_WORKER: dict = {}


def _init_worker(fields, solver):
    _WORKER["fields"] = fields
    _WORKER["solver"] = solver


def _express_pair(pair):
    i, j = pair
    fields, solver = _WORKER["fields"], _WORKER["solver"]
    comm = fields[i].commutator(fields[j])
    coeffs, residual = solver.express(comm.coordinates())
    return i, j, coeffs, residual


def from_realization(
    fields: Sequence[DiffOp],
    names: Sequence[str] | None = None,
    label: str = "",
    require_vector_fields: bool = True,
    jobs: int = 1,
) -> LieAlgebra:
    """Structure constants of the span of ``fields`` under the commutator."""
    fields = list(fields)
    if not fields:
        raise ValueError("no generators")
    names = list(names) if names is not None else [f"X{i + 1}" for i in range(len(fields))]
    vs = fields[0].vs
    if require_vector_fields:
        for n, f in zip(names, fields):
            f.require_vector_field()
    solver = SpanSolver()
    for idx, f in enumerate(fields):
        try:
            solver.add(f.coordinates(), idx)
        except LinearlyDependent as err:
            raise LinearlyDependentInput(
                f"{names[idx]} is a combination of earlier generators: "
                + ", ".join(f"{format_coeff(c)}*{names[k]}" for k, c in sorted(err.combination.items()))
            ) from None
    pairs = list(combinations(range(len(fields)), 2))
    if jobs > 1 and len(pairs) > 64:
        # each worker receives the fields and the solver once
        with ProcessPoolExecutor(
            max_workers=jobs, initializer=_init_worker, initargs=(fields, solver)
        ) as ex:
            results = list(ex.map(_express_pair, pairs, chunksize=64))
    else:
        _init_worker(fields, solver)
        results = [_express_pair(p) for p in pairs]
    sc = {}
    for i, j, coeffs, residual in results:
        if residual:
            raise NotClosed(names[i], names[j], DiffOp.from_coordinates(vs, residual))
        if coeffs:
            sc[(i, j)] = coeffs
    return LieAlgebra(names, sc, realization=fields, label=label)


def _span_solver(L: LieAlgebra, span: Sequence[Element]):
    solver = SpanSolver()
    for idx, x in enumerate(span):
        try:
            solver.add(x.coords, idx)
        except LinearlyDependent:
            raise SingularBasisChange(f"element {idx} ({x}) is dependent on the earlier ones") from None
    return solver


def subalgebra(
    L: LieAlgebra,
    span: Sequence[Element],
    names: Sequence[str] | None = None,
    label: str = "",
) -> LieAlgebra:
    """Restrict ``L`` to ``span`` (which must be closed) in the given spanning basis."""
    span = [L.element(x) for x in span]
    names = list(names) if names is not None else [x.to_string(L.names) for x in span]
    solver = _span_solver(L, span)
    sc = {}
    for a, b in combinations(range(len(span)), 2):
        br = L.bracket(span[a], span[b])
        if not br:
            continue
        coeffs, residual = solver.express(br.coords)
        if residual:
            raise NotClosed(names[a], names[b], Element(L.dim, residual, L.names))
        if coeffs:
            sc[(a, b)] = coeffs
    realization = None
    if L.realization is not None:
        realization = [L.realize(x) for x in span]
    return LieAlgebra(names, sc, params=L.params, realization=realization, label=label)


def change_of_basis(
    L: LieAlgebra, new_basis: Sequence[Element], names: Sequence[str], label: str = ""
) -> LieAlgebra:
    new_basis = [L.element(x) for x in new_basis]
    if len(new_basis) != L.dim:
        raise SingularBasisChange(f"need {L.dim} elements, got {len(new_basis)}")
    return subalgebra(L, new_basis, names, label=label)


# ---------------------------------------------------------------------------
# structural checks


def verify_jacobi(L: LieAlgebra) -> list[tuple[int, int, int, Element]]:
    """Triples (i < j < k) where the Jacobi sum does not vanish."""
    bad = []
    basis = [L.basis(i) for i in range(L.dim)]
    for i, j, k in combinations(range(L.dim), 3):
        x, y, z = basis[i], basis[j], basis[k]
        s = (
            L.bracket(x, L.bracket(y, z))
            + L.bracket(y, L.bracket(z, x))
            + L.bracket(z, L.bracket(x, y))
        )
        s = Element(L.dim, s.coords, L.names)
        if s:
            bad.append((i, j, k, s))
    return bad


def span_dimension(L: LieAlgebra, elements: Iterable[Element]) -> tuple[int, list[Element]]:
    solver = SpanSolver()
    basis = []
    for x in elements:
        if not x:
            continue
        try:
            solver.add(x.coords, len(basis))
            basis.append(x)
        except LinearlyDependent:
            pass
    return len(basis), basis


def is_ideal(L: LieAlgebra, elements: Sequence[Element]) -> list[tuple[int, int, Element]]:
    """Pairs ``(basis index, element index)`` whose bracket leaves the span."""
    solver = SpanSolver()
    for idx, x in enumerate(elements):
        try:
            solver.add(x.coords, idx)
        except LinearlyDependent:
            pass
    bad = []
    for i in range(L.dim):
        for idx, x in enumerate(elements):
            br = L.bracket(L.basis(i), x)
            _, residual = solver.express(br.coords)
            if residual:
                bad.append((i, idx, Element(L.dim, residual, L.names)))
    return bad


def lower_central_series(L: LieAlgebra, max_terms: int = 10) -> list[tuple[int, list[Element]]]:
    """``[(dim, basis)]`` for L, [L, L], [L, [L, L]], ... until it stabilizes."""
    current = [L.basis(i) for i in range(L.dim)]
    series = [(L.dim, current)]
    for _ in range(max_terms):
        dim, basis = span_dimension(
            L, (L.bracket(L.basis(i), x) for i in range(L.dim) for x in current)
        )
        series.append((dim, basis))
        if dim == 0 or dim == len(current):
            break
        current = basis
    return series


def derived_series(L: LieAlgebra, elements: Sequence[Element], max_terms: int = 20) -> list[int]:
    """Dimensions of the derived series of the subalgebra spanned by ``elements``."""
    current = list(elements)
    dims = [span_dimension(L, current)[0]]
    for _ in range(max_terms):
        dim, basis = span_dimension(
            L, (L.bracket(a, b) for a, b in combinations(current, 2))
        )
        dims.append(dim)
        if dim == 0 or dim == dims[-2]:
            break
        current = basis
    return dims


@dataclass
class Grading:
    degrees: dict[int, int]
    allowed: tuple[int, ...]

    def degree_of(self, x: Element):
        ds = {self.degrees[k] for k in x.coords}
        if len(ds) != 1:
            raise ValueError(f"{x} is not homogeneous (degrees {sorted(ds)})")
        return ds.pop()

    @classmethod
    def from_prefixes(cls, L: LieAlgebra, prefixes: Mapping[str, int], allowed) -> "Grading":
        degrees = {}
        for i, n in enumerate(L.names):
            for p, d in prefixes.items():
                if n.startswith(p) and n[len(p):].isdigit():
                    degrees[i] = d
                    break
            else:
                raise ValueError(f"no degree for {n}")
        return cls(degrees, tuple(allowed))


@dataclass
class GradingReport:
    violations: list[tuple[str, str, str]] = field(default_factory=list)
    dims: dict[int, int] = field(default_factory=dict)
    bracket_dims: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_grading(L: LieAlgebra, g: Grading) -> GradingReport:
    report = GradingReport()
    missing = [L.names[i] for i in range(L.dim) if i not in g.degrees]
    if missing:
        raise ValueError(f"ungraded basis elements: {missing}")
    for d in g.allowed:
        report.dims[d] = sum(1 for i in range(L.dim) if g.degrees[i] == d)
    outside = [L.names[i] for i in range(L.dim) if g.degrees[i] not in g.allowed]
    for n in outside:
        report.violations.append((n, "", "degree not in the declared set"))
    spans: dict[tuple[int, int], list[Element]] = {}
    for (i, j), res in L.nonzero_brackets():
        want = g.degrees[i] + g.degrees[j]
        for k in sorted(res):
            if g.degrees[k] != want:
                report.violations.append(
                    (L.names[i], L.names[j], f"component {L.names[k]} has degree {g.degrees[k]}, expected {want}")
                )
        key = tuple(sorted((g.degrees[i], g.degrees[j])))
        spans.setdefault(key, []).append(Element(L.dim, res, L.names))
    for key in sorted(spans):
        report.bracket_dims[key] = span_dimension(L, spans[key])[0]
    return report


# ---------------------------------------------------------------------------
# eigenvalues, labels, multiplets


def ad_eigenvalue(L: LieAlgebra, g: Element, x: Element):
    if not x:
        raise ValueError("the zero vector has no eigenvalue")
    br = L.bracket(g, x)
    k = min(x.coords)
    lam = br.coords.get(k, 0) / x.coords[k] if br.coords.get(k) else Fraction(0)
    residual = br - x * lam
    if residual:
        raise NotEigenvector(residual)
    return lam


@dataclass(frozen=True)
class LabelVector:
    i: object
    m: object
    a: object
    b: object
    c: object

    def __add__(self, other):
        return LabelVector(*(s + o for s, o in zip(self.astuple(), other.astuple())))

    def astuple(self):
        return (self.i, self.m, self.a, self.b, self.c)

    def __str__(self):
        return "(" + ", ".join(format_coeff(Fraction(v)) for v in self.astuple()) + ")"


def label_vector(
    L: LieAlgebra, x: Element, grading: Grading, cartan: Sequence[Element]
) -> LabelVector:
    """``(degree, ad-eigenvalues w.r.t. cartan[0..3])``; cartan = (J0, S^-1, S^0_1, S^0_2)."""
    if len(cartan) != 4:
        raise ValueError("expected four commuting elements (J0 and three singlets)")
    deg = grading.degree_of(x)
    eig = [ad_eigenvalue(L, h, x) for h in cartan]
    return LabelVector(Fraction(deg), *eig)


def commuting_set_verify(L: LieAlgebra, xs: Sequence[Element]):
    """``(True, None)`` or ``(False, (a, b, [x_a, x_b]))`` for the first failing pair."""
    for a, b in combinations(range(len(xs)), 2):
        br = L.bracket(xs[a], xs[b])
        if br:
            return False, (a, b, br)
    return True, None


@dataclass
class Multiplet:
    kind: str
    subspace: int
    index: int
    members: list[tuple[Element, int]]
    names: list[str] = field(default_factory=list)

    EIGENVALUES = {"S": (0,), "D": (-1, 1), "T": (-2, 0, 2), "Q": (-3, -1, 1, 3)}

    def check(self) -> None:
        ms = tuple(sorted(m for _, m in self.members))
        if ms != self.EIGENVALUES[self.kind]:
            raise ValueError(f"{self.kind}-multiplet with eigenvalues {ms}")

    def member(self, m):
        for x, mm in self.members:
            if mm == m:
                return x
        return None


def _proportion(L: LieAlgebra, v: Element, target: Element | None):
    if target is None or not target:
        if v:
            raise NotProportional(f"expected zero, got {v}", v)
        return Fraction(0)
    if not v:
        return Fraction(0)
    k = min(target.coords)
    lam = v.coords.get(k, 0) / target.coords[k] if v.coords.get(k) else Fraction(0)
    residual = v - target * lam
    if residual:
        raise NotProportional(f"{v} is not a multiple of {target}", residual)
    return lam


def ladder_coefficients(L: LieAlgebra, mult: Multiplet, J2: Element, Jm2: Element):
    """``{"raise": {m: lam}, "lower": {m: lam}}`` with ``[J2, M(m)] = lam M(m+2)`` etc."""
    table = {"raise": {}, "lower": {}}
    for x, m in sorted(mult.members, key=lambda t: t[1]):
        table["raise"][m] = _proportion(L, L.bracket(J2, x), mult.member(m + 2))
        table["lower"][m] = _proportion(L, L.bracket(Jm2, x), mult.member(m - 2))
    return table
