"""Differential operators with polynomial coefficients (Weyl algebra).

A :class:`DiffOp` is stored in normal order: ``sum_alpha c_alpha(x) d^alpha``
with every derivative to the right of its coefficient.  Composition uses the
multivariate Leibniz rule, which is the closed form of repeatedly rewriting
``d_i x_j = x_j d_i + delta_ij``.

Text form: ``x1^2*dx6 - 3*dx1 + 1/3*m1*x1``; a factor ``d<name>`` is the
partial derivative with respect to variable ``<name>``.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

from .poly import ParseError, Polynomial, VarSet, VarSetMismatch, parse_terms

__all__ = ["DiffOp", "NotAVectorField", "vector_field"]


class NotAVectorField(ValueError):
    pass


def _sub_indices(alpha: tuple[int, ...]):
    """All gamma <= alpha componentwise, with prod binom(alpha_i, gamma_i)."""
    out = [((), 1)]
    for a in alpha:
        out = [(g + (k,), w * comb(a, k)) for g, w in out for k in range(a + 1)]
    return out


class DiffOp:
    __slots__ = ("vs", "terms", "_hash")

    def __init__(self, vs: VarSet, terms: Mapping[tuple[int, ...], Polynomial] | None = None):
        self.vs = vs
        clean = {}
        for alpha, c in (terms or {}).items():
            if c.vs != vs:
                raise VarSetMismatch(f"{c.vs} vs {vs}")
            if c:
                clean[tuple(alpha)] = c
        self.terms = clean
        self._hash = None

    # -- constructors ---------------------------------------------------------

    @classmethod
    def _raw(cls, vs, terms):
        d = cls.__new__(cls)
        d.vs = vs
        d.terms = terms
        d._hash = None
        return d

    @classmethod
    def zero(cls, vs: VarSet) -> "DiffOp":
        return cls._raw(vs, {})

    @classmethod
    def multiplication(cls, p: Polynomial | int | Fraction, vs: VarSet | None = None) -> "DiffOp":
        if not isinstance(p, Polynomial):
            p = Polynomial.constant(vs, p)
        return cls._raw(p.vs, {(0,) * len(p.vs): p} if p else {})

    @classmethod
    def identity(cls, vs: VarSet) -> "DiffOp":
        return cls.multiplication(1, vs)

    @classmethod
    def partial(cls, vs: VarSet, name: str) -> "DiffOp":
        alpha = [0] * len(vs)
        alpha[vs.index[name]] = 1
        return cls._raw(vs, {tuple(alpha): vs.one()})

    @classmethod
    def from_vector(cls, vs: VarSet, components: Mapping[str, Polynomial | str]) -> "DiffOp":
        """``sum_j Q_j d_j`` from ``{variable: Q_j}``."""
        terms = {}
        for name, q in components.items():
            if isinstance(q, str):
                q = vs.parse(q)
            if not q:
                continue
            alpha = [0] * len(vs)
            alpha[vs.index[name]] = 1
            terms[tuple(alpha)] = q
        return cls._raw(vs, terms)

    @classmethod
    def parse(cls, vs: VarSet, text: str) -> "DiffOp":
        terms: dict[tuple[int, ...], Polynomial] = {}
        n = len(vs)
        for coeff, factors in parse_terms(text):
            e = [0] * n
            alpha = [0] * n
            for name, k in factors:
                if name in vs.index:
                    e[vs.index[name]] += k
                elif name.startswith("d") and name[1:] in vs.index:
                    if k < 0:
                        raise ParseError(f"negative power of {name}", text, text.find(name))
                    alpha[vs.index[name[1:]]] += k
                else:
                    raise ParseError(f"unknown symbol {name!r}", text, text.find(name))
            try:
                mono = Polynomial.monomial(vs, e, coeff)
            except ValueError as err:
                raise ParseError(str(err), text, 0) from None
            key = tuple(alpha)
            terms[key] = terms[key] + mono if key in terms else mono
        return cls(vs, terms)

    # -- protocol -------------------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, DiffOp):
            return self.vs == other.vs and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vs, frozenset(self.terms.items())))
        return self._hash

    def _check(self, other: "DiffOp"):
        if not isinstance(other, DiffOp):
            raise TypeError(f"expected DiffOp, got {type(other).__name__}")
        if other.vs != self.vs:
            raise VarSetMismatch(f"{self.vs} vs {other.vs}")

    def order(self) -> float:
        """Highest total derivative order; ``-inf`` for the zero operator."""
        if not self.terms:
            return float("-inf")
        return max(sum(a) for a in self.terms)

    def is_vector_field(self) -> bool:
        return all(sum(a) == 1 for a in self.terms)

    def require_vector_field(self) -> "DiffOp":
        if not self.is_vector_field():
            raise NotAVectorField(str(self))
        return self

    # -- linear structure -----------------------------------------------------

    def __neg__(self):
        return DiffOp._raw(self.vs, {a: -c for a, c in self.terms.items()})

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            other = DiffOp.multiplication(other, self.vs)
        self._check(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            if a in out:
                s = out[a] + c
                if s:
                    out[a] = s
                else:
                    del out[a]
            else:
                out[a] = c
        return DiffOp._raw(self.vs, out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Polynomial)):
            other = DiffOp.multiplication(other, self.vs)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "DiffOp":
        """Multiply by a scalar or (from the left) by a polynomial."""
        if isinstance(c, Polynomial):
            c = c.embed(self.vs)
        out = {}
        for a, p in self.terms.items():
            q = p * c
            if q:
                out[a] = q
        return DiffOp._raw(self.vs, out)

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return self.compose(other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Polynomial):
            return self.compose(DiffOp.multiplication(other.embed(self.vs)))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, Polynomial):
            return self.scale(other)
        return NotImplemented

    # -- operator algebra -----------------------------------------------------

    def apply(self, f: Polynomial) -> Polynomial:
        if f.vs != self.vs:
            raise VarSetMismatch(f"{self.vs} vs {f.vs}")
        total = self.vs.zero()
        for alpha, c in self.terms.items():
            d = f.diff_multi(alpha)
            if d:
                total = total + c * d
        return total

    def compose(self, other: "DiffOp") -> "DiffOp":
        """Normal-ordered product ``self o other``."""
        self._check(other)
        out: dict[tuple[int, ...], Polynomial] = {}
        for alpha, a in self.terms.items():
            subs = _sub_indices(alpha)
            for beta, b in other.terms.items():
                # d^alpha b = sum_gamma binom(alpha, gamma) (d^gamma b) d^(alpha-gamma)
                for gamma, w in subs:
                    db = b.diff_multi(gamma)
                    if not db:
                        continue
                    key = tuple(x - g + y for x, g, y in zip(alpha, gamma, beta))
                    term = (a * db).scale(w)
                    if key in out:
                        s = out[key] + term
                        if s:
                            out[key] = s
                        else:
                            del out[key]
                    elif term:
                        out[key] = term
        return DiffOp._raw(self.vs, out)

    def commutator(self, other: "DiffOp") -> "DiffOp":
        return self.compose(other) - other.compose(self)

    def substitute(self, values: Mapping[str, object]) -> "DiffOp":
        out = {}
        for a, c in self.terms.items():
            d = c.substitute(values)
            if d:
                out[a] = d
        return DiffOp._raw(self.vs, out)

    # -- flattening / text ------------------------------------------------------

    def coordinates(self) -> dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction]:
        """Flat ``{(alpha, monomial exponents): coefficient}`` view for linear solves."""
        return {(a, e): c for a, p in self.terms.items() for e, c in p.terms.items()}

    @classmethod
    def from_coordinates(cls, vs: VarSet, coords: Mapping) -> "DiffOp":
        terms: dict = {}
        for (a, e), c in coords.items():
            terms.setdefault(a, {})[e] = Fraction(c)
        return cls._raw(vs, {a: Polynomial(vs, t) for a, t in terms.items() if any(t.values())})

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    def to_string(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for alpha, coeff in self.sorted_terms():
            dpart = "*".join(
                f"d{name}" if k == 1 else f"d{name}^{k}"
                for name, k in zip(self.vs.names, alpha)
                if k
            )
            for exps, c in coeff.sorted_terms():
                mono = coeff.monomial_string(exps)
                body = "*".join(p for p in (mono, dpart) if p)
                mag = abs(c)
                if not body:
                    text = _fmt(mag)
                elif mag == 1:
                    text = body
                else:
                    text = f"{_fmt(mag)}*{body}"
                if not pieces:
                    pieces.append(text if c > 0 else f"-{text}")
                else:
                    pieces.append(f"+ {text}" if c > 0 else f"- {text}")
        return " ".join(pieces)

    __str__ = to_string

    def __repr__(self):
        return f"DiffOp({self.to_string()!r})"


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def vector_field(vs: VarSet, components: Mapping[str, Polynomial | str]) -> DiffOp:
    return DiffOp.from_vector(vs, components)


def commutator_table(ops: Iterable[DiffOp]):
    """All pairwise commutators ``{(i, j): [D_i, D_j]}`` for i < j."""
    ops = list(ops)
    return {
        (i, j): ops[i].commutator(ops[j])
        for i in range(len(ops))
        for j in range(i + 1, len(ops))
    }
