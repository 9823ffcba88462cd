"""Universal enveloping algebra in PBW normal form.

A PBW monomial ``Y_1^a1 ... Y_n^an`` is stored as the nondecreasing tuple of
generator indices (``Y_2^2 Y_5`` is ``(1, 1, 4)``), which keeps monomials
short when n is large and makes the degree ``len(word)``.

Normal form is produced by left multiplication with a single generator,

    Y_i * Y_j w = Y_j (Y_i w) + [Y_i, Y_j] w      (i > j),

memoised per (i, w).  Everything else (products, adjoint action,
symmetrization) is built on top of that one rewrite.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, permutations
from typing import Iterable, Mapping, Sequence

from .lie import Element, LieAlgebra, NotEigenvector, ad_eigenvalue
from .linalg import SpanSolver, nullspace, rank
from .poly import ParseError, Polynomial, VarSet, format_coeff, parse_terms

__all__ = [
    "Enveloping",
    "NCPoly",
    "AlgebraMismatch",
    "TooManyMonomials",
    "CasimirResult",
    "casimir_search",
    "candidate_monomials",
    "pbw_product",
    "ad_action",
    "in_span",
    "symmetrize",
    "desymmetrize",
    "verify_central",
    "algebraic_independence",
    "minimal_generating_set",
    "specialize_central",
]


class AlgebraMismatch(ValueError):
    pass


class TooManyMonomials(RuntimeError):
    pass


def _zero(c) -> bool:
    return not c


def _add_into(out: dict, key, c) -> None:
    v = out.get(key)
    if v is None:
        if not _zero(c):
            out[key] = c
    else:
        v = v + c
        if _zero(v):
            del out[key]
        else:
            out[key] = v


class Enveloping:
    """U(L) for a fixed basis ordering; owns the rewrite cache."""

    def __init__(self, L: LieAlgebra):
        self.L = L
        self.n = L.dim
        self.params = L.params
        self._cache: dict[tuple[int, tuple[int, ...]], dict] = {}
        # [Y_i, Y_j] for i > j as {k: c}
        self._br = {}
        for (i, j), res in L.sc.items():
            self._br[(j, i)] = {k: -c for k, c in res.items()}

    def coeff(self, c):
        """Coerce a scalar into the coefficient ring."""
        if self.params is None:
            if isinstance(c, Polynomial):
                if not c.is_constant():
                    raise ValueError(f"parametric coefficient {c} in an algebra without parameters")
                return c.constant_term()
            return Fraction(c)
        if isinstance(c, Polynomial):
            return c.embed(self.params) if c.vs != self.params else c
        return Polynomial.constant(self.params, c)

    # -- constructors ---------------------------------------------------------

    def one(self) -> "NCPoly":
        return NCPoly(self, {(): self.coeff(1)})

    def zero(self) -> "NCPoly":
        return NCPoly(self, {})

    def gen(self, i) -> "NCPoly":
        if isinstance(i, str):
            i = self.L.index[i]
        return NCPoly(self, {(i,): self.coeff(1)})

    def from_element(self, x: Element) -> "NCPoly":
        return NCPoly(self, {(k,): self.coeff(c) for k, c in x.coords.items()})

    def word(self, letters: Sequence[int], c=1) -> "NCPoly":
        """Normal form of the (unordered) product ``Y_l1 Y_l2 ...``."""
        p = NCPoly(self, {(): self.coeff(c)})
        for i in reversed(letters):
            p = p.left_mul_gen(i)
        return p

    def parse(self, text: str) -> "NCPoly":
        """Sum of products; factors multiply in the order written.

        Factors that are parameters of the algebra go into the coefficient.
        """
        total = self.zero()
        pnames = set(self.params.names) if self.params is not None else set()
        for c, factors in parse_terms(text):
            coeff = self.coeff(c)
            letters: list[int] = []
            for name, k in factors:
                if name in pnames:
                    coeff = coeff * self.params.var(name) ** k
                elif name in self.L.index:
                    if k < 0:
                        raise ParseError(f"negative power of generator {name}", text, text.find(name))
                    letters.extend([self.L.index[name]] * k)
                else:
                    raise ParseError(f"unknown symbol {name!r}", text, text.find(name))
            total = total + self.word(letters, coeff)
        return total

    # -- the rewrite ------------------------------------------------------------

    def gen_times(self, i: int, w: tuple[int, ...]) -> dict:
        """Normal form of ``Y_i * w`` for a normal word ``w``."""
        if not w or i <= w[0]:
            return {(i,) + w: self.coeff(1)}
        key = (i, w)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        j, rest = w[0], w[1:]
        out: dict = {}
        # Y_j (Y_i rest)
        for u, c in self.gen_times(i, rest).items():
            for v, d in self.gen_times(j, u).items():
                _add_into(out, v, c * d)
        # [Y_i, Y_j] rest
        for k, c in self._br.get((i, j), {}).items():
            for v, d in self.gen_times(k, rest).items():
                _add_into(out, v, c * d)
        self._cache[key] = out
        return out

    def cache_size(self) -> int:
        return len(self._cache)


class NCPoly:
    __slots__ = ("U", "terms")

    def __init__(self, U: Enveloping, terms: Mapping[tuple[int, ...], object] | None = None):
        self.U = U
        self.terms = {w: c for w, c in (terms or {}).items() if not _zero(c)}

    def _check(self, other: "NCPoly"):
        if not isinstance(other, NCPoly):
            raise TypeError(f"expected NCPoly, got {type(other).__name__}")
        if other.U is not self.U and other.U.L is not self.U.L:
            raise AlgebraMismatch(f"{self.U.L.label!r} vs {other.U.L.label!r}")

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return self.U.L is other.U.L and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.terms
        return NotImplemented

    __hash__ = None

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            other = NCPoly(self.U, {(): self.U.coeff(other)})
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            _add_into(out, w, c)
        return NCPoly(self.U, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly(self.U, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "NCPoly":
        c = self.U.coeff(c)
        return NCPoly(self.U, {w: v * c for w, v in self.terms.items()})

    def left_mul_gen(self, i: int) -> "NCPoly":
        out: dict = {}
        for w, c in self.terms.items():
            for v, d in self.U.gen_times(i, w).items():
                _add_into(out, v, c * d)
        return NCPoly(self.U, out)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            return self.scale(other)
        self._check(other)
        return pbw_product(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        out = self.U.one()
        for _ in range(k):
            out = out * self
        return out

    def commutative_image(self, vs: VarSet | None = None) -> Polynomial:
        """Each word read as a commutative monomial; coefficients must be rational."""
        vs = vs or VarSet(self.U.L.names)
        out = {}
        for w, c in self.terms.items():
            if isinstance(c, Polynomial):
                if not c.is_constant():
                    raise ValueError("commutative image needs rational coefficients")
                c = c.constant_term()
            e = [0] * self.U.n
            for i in w:
                e[i] += 1
            out[tuple(e)] = c
        return Polynomial(vs, out)

    def top_image(self, vs: VarSet | None = None) -> Polynomial:
        """Commutative image of the highest-degree part only."""
        d = self.degree()
        top = NCPoly(self.U, {w: c for w, c in self.terms.items() if len(w) == d})
        return top.commutative_image(vs)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda wc: (-len(wc[0]), wc[0]))

    def to_string(self) -> str:
        if not self.terms:
            return "0"
        names = self.U.L.names
        pieces = []
        for w, c in self.sorted_terms():
            parts = []
            k = 0
            while k < len(w):
                e = 1
                while k + e < len(w) and w[k + e] == w[k]:
                    e += 1
                parts.append(names[w[k]] if e == 1 else f"{names[w[k]]}^{e}")
                k += e
            body = "*".join(parts)
            if isinstance(c, Polynomial):
                if len(c.terms) == 1:
                    cs = c.to_string()
                    neg = cs.startswith("-")
                    cs = cs.lstrip("-")
                    text = body if cs == "1" else (f"{cs}*{body}" if body else cs)
                else:
                    neg = False
                    text = f"({c.to_string()})*{body}" if body else f"({c.to_string()})"
            else:
                neg = c < 0
                mag = abs(c)
                text = body if (mag == 1 and body) else (f"{format_coeff(mag)}*{body}" if body else format_coeff(mag))
            if not pieces:
                pieces.append(f"-{text}" if neg else text)
            else:
                pieces.append(f"- {text}" if neg else f"+ {text}")
        return " ".join(pieces)

    __str__ = to_string

    def __repr__(self):
        return f"NCPoly({self.to_string()!r})"

    def coordinates(self) -> dict:
        return dict(self.terms)


def pbw_product(p: NCPoly, q: NCPoly) -> NCPoly:
    p._check(q)
    U = p.U
    out: dict = {}
    for w, c in p.terms.items():
        r = q
        for i in reversed(w):
            r = r.left_mul_gen(i)
        for v, d in r.terms.items():
            _add_into(out, v, c * d)
    return NCPoly(U, out)


def ad_action(i, p: NCPoly) -> NCPoly:
    """``[Y_i, p]``."""
    U = p.U
    if isinstance(i, str):
        i = U.L.index[i]
    return p.left_mul_gen(i) - pbw_product(p, U.gen(i))


def verify_central(p: NCPoly, generators: Iterable[int] | None = None) -> list[tuple[str, NCPoly]]:
    """``(generator name, [Y, p])`` for every generator that does not commute with ``p``."""
    U = p.U
    idx = range(U.n) if generators is None else generators
    bad = []
    for i in idx:
        c = ad_action(i, p)
        if c:
            bad.append((U.L.names[i], c))
    return bad


def specialize_central(p: NCPoly, index: int, value=1) -> NCPoly:
    """Replace the central generator ``index`` by a scalar (a quotient map of U(L))."""
    U = p.U
    out: dict = {}
    val = U.coeff(value)
    for w, c in p.terms.items():
        k = w.count(index)
        rest = tuple(x for x in w if x != index)
        _add_into(out, rest, c * val ** k if k else c)
    return NCPoly(U, out)


# ---------------------------------------------------------------------------
# Casimir search


@dataclass
class CasimirResult:
    algebra: str
    max_degree: int
    monomials: int
    equations: int
    basis: list[NCPoly]
    reduced: list[NCPoly] = field(default_factory=list)
    seconds: float = 0.0
    filters: dict = field(default_factory=dict)


def candidate_monomials(
    n: int,
    max_degree: int,
    allowed: Sequence[int] | None = None,
    weights: Mapping[int, Fraction] | None = None,
    include_constant: bool = True,
    cap: int | None = None,
) -> list[tuple[int, ...]]:
    """Normal words of degree <= N in graded-lex order (degree, then indices)."""
    letters = sorted(allowed) if allowed is not None else list(range(n))
    out: list[tuple[int, ...]] = []
    for d in range(0 if include_constant else 1, max_degree + 1):
        for w in combinations_with_replacement(letters, d):
            if weights is not None and sum(weights[i] for i in w) != 0:
                continue
            out.append(w)
            if cap is not None and len(out) > cap:
                raise TooManyMonomials(f"more than {cap} candidate monomials")
    return out


_SEARCH: dict = {}


def _search_init(L):
    _SEARCH["U"] = Enveloping(L)


def _ad_rows(chunk):
    U = _SEARCH["U"]
    out = []
    for col, w in chunk:
        p = NCPoly(U, {w: U.coeff(1)})
        for i in range(U.n):
            c = ad_action(i, p)
            for v, x in c.terms.items():
                out.append((i, v, col, x))
    return out


def casimir_search(
    L: LieAlgebra,
    max_degree: int,
    weight_element: Element | str | None = None,
    restrict: Sequence[str] | None = None,
    max_monomials: int = 2_000_000,
    jobs: int = 1,
    reduce: bool = True,
) -> CasimirResult:
    """Basis of all PBW polynomials of degree <= N commuting with every generator.

    The basis comes from the free columns of the RREF of the linear system
    ``[Y_i, sum s_w w] = 0``, so it is the same for every worker count.
    """
    t0 = time.perf_counter()
    U = Enveloping(L)
    weights = None
    filters: dict = {}
    if weight_element is not None:
        g = L.element(weight_element)
        weights = {}
        for i in range(L.dim):
            try:
                weights[i] = ad_eigenvalue(L, g, L.basis(i))
            except NotEigenvector:
                raise ValueError(f"{L.names[i]} is not an eigenvector of ad({g})") from None
        filters["weight_zero"] = str(g)
    allowed = None
    if restrict is not None:
        allowed = [L.index[n] for n in restrict]
        filters["restrict"] = list(restrict)
    words = candidate_monomials(L.dim, max_degree, allowed, weights, cap=max_monomials)
    cols = list(enumerate(words))
    if jobs > 1 and len(cols) > 50:
        size = max(1, len(cols) // (jobs * 4))
        chunks = [cols[k:k + size] for k in range(0, len(cols), size)]
        with ProcessPoolExecutor(max_workers=jobs, initializer=_search_init, initargs=(L,)) as ex:
            parts = list(ex.map(_ad_rows, chunks))
    else:
        _SEARCH["U"] = U
        parts = [_ad_rows(cols)]
    rows: dict[tuple[int, tuple[int, ...]], dict[int, object]] = {}
    for part in parts:
        for i, v, col, x in part:
            rows.setdefault((i, v), {})[col] = x
    ordered = [rows[k] for k in sorted(rows)]
    null = nullspace(ordered, len(words))
    basis = [NCPoly(U, {words[c]: U.coeff(v) for c, v in vec.items()}) for vec in null]
    res = CasimirResult(
        algebra=L.label,
        max_degree=max_degree,
        monomials=len(words),
        equations=len(ordered),
        basis=basis,
        filters=filters,
    )
    if reduce:
        res.reduced = minimal_generating_set(basis)
    res.seconds = time.perf_counter() - t0
    return res


def in_span(target: NCPoly, span: Sequence[NCPoly]) -> bool:
    solver = SpanSolver()
    for k, p in enumerate(span):
        try:
            solver.add(p.coordinates(), k)
        except Exception:
            pass
    return solver.contains(target.coordinates())


# ---------------------------------------------------------------------------
# symmetrization and independence


def symmetrize(p: Polynomial, U: Enveloping, coords: Mapping[str, str] | None = None) -> NCPoly:
    """Phi: average each monomial over the distinct orderings of its letters.

    ``coords`` maps the variables of ``p`` to generator names (identity by default).
    """
    coords = coords or {v: v for v in p.vs.names}
    out = U.zero()
    for exps, c in p.terms.items():
        letters: list[int] = []
        for v, e in zip(p.vs.names, exps):
            if e:
                letters.extend([U.L.index[coords[v]]] * e)
        perms = set(permutations(letters))
        weight = Fraction(1, len(perms))
        acc = U.zero()
        for w in sorted(perms):
            acc = acc + U.word(w)
        out = out + acc.scale(c * weight)
    return out


def desymmetrize(q: NCPoly, vs: VarSet | None = None) -> Polynomial:
    """Inverse of ``symmetrize``: peel off the top commutative image degree by degree."""
    vs = vs or VarSet(q.U.L.names)
    out = vs.zero()
    while q:
        t = q.top_image(vs)
        out = out + t
        q = q - symmetrize(t, q.U)
    return out


def _jacobian_rank(polys: Sequence[Polynomial], point: Mapping[str, Fraction]) -> int:
    vs = polys[0].vs
    rows = []
    for p in polys:
        rows.append({j: p.diff(v).evaluate(point) for j, v in enumerate(vs.names)})
    return rank(rows)


def algebraic_independence(ps: Sequence[NCPoly], seed: int = 12345, tries: int = 3) -> tuple[int, str]:
    """Jacobian rank of the commutative images at seeded rational points.

    Full rank at some point proves independence; lower rank at every tried
    point only means "dependent at tested points".
    """
    if not ps:
        return 0, "independent"
    vs = VarSet(ps[0].U.L.names)
    polys = [p.commutative_image(vs) for p in ps]
    rng = random.Random(seed)
    best = 0
    for _ in range(tries):
        point = {v: Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 5)) for v in vs.names}
        best = max(best, _jacobian_rank(polys, point))
        if best == len(ps):
            return best, "independent"
    return best, "dependent at tested points"


def minimal_generating_set(basis: Sequence[NCPoly]) -> list[NCPoly]:
    """Greedy, degree-ascending selection of algebraically independent elements."""
    chosen: list[NCPoly] = []
    for p in sorted(basis, key=lambda q: (q.degree(), q.to_string())):
        if p.degree() <= 0:
            continue
        r, _ = algebraic_independence(chosen + [p])
        if r == len(chosen) + 1:
            chosen.append(p)
    return chosen
