"""Exact multivariate polynomials over the rationals.

Coefficients are :class:`fractions.Fraction`.  Variables listed as parameters
of a :class:`VarSet` may carry negative exponents (Laurent monomials); all
other variables are ordinary polynomial variables.

The text form used by fixture files is::

    1/2*x1*x2 - m1^-1*m2 + 3

Terms are joined by ``+``/``-``, every factor is separated by an explicit
``*``, and powers are written ``name^k``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

__all__ = [
    "ParseError",
    "VarSetMismatch",
    "VarSet",
    "Polynomial",
    "parse_terms",
    "format_coeff",
    "as_fraction",
]


class ParseError(ValueError):
    """Malformed text input; ``pos`` is the character offset of the problem."""

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        where = f" at offset {pos}" if text else ""
        super().__init__(f"{message}{where}: {text!r}" if text else message)


class VarSetMismatch(ValueError):
    pass


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


def format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# shared term syntax (polynomials, differential operators, PBW polynomials)

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?:\^(?P<exp>-?\d+))?"
    r"|(?P<op>[-+*]))"
)


def parse_terms(text: str) -> list[tuple[Fraction, list[tuple[str, int]]]]:
    """Split ``text`` into ``(coefficient, [(factor_name, exponent), ...])``.

    Factor order is preserved, so noncommutative callers can rely on it.
    A bare ``0`` parses to an empty list.
    """
    terms: list[tuple[Fraction, list[tuple[str, int]]]] = []
    pos, n = 0, len(text)
    sign, coeff, factors = 1, Fraction(1), []
    in_term = False        # at least one factor of the current term seen
    expect_factor = True   # the next token must be a factor
    dangling = False       # an operator is waiting for its operand
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character", text, pos)
        start = m.start() + len(m.group(0)) - len(m.group(0).lstrip())
        pos = m.end()
        op = m.group("op")
        if op == "*":
            if expect_factor:
                raise ParseError("'*' without left operand", text, start)
            expect_factor = dangling = True
        elif op:
            if expect_factor and in_term:
                raise ParseError(f"operator '{op}' after '*'", text, start)
            if in_term:
                terms.append((sign * coeff, factors))
                sign, coeff, factors, in_term = 1, Fraction(1), [], False
            if op == "-":
                sign = -sign
            expect_factor = dangling = True
        else:
            if not expect_factor:
                raise ParseError("implicit multiplication is not allowed; use '*'", text, start)
            if m.group("num"):
                coeff *= Fraction(m.group("num"))
            else:
                exp = int(m.group("exp")) if m.group("exp") is not None else 1
                factors.append((m.group("name"), exp))
            in_term, expect_factor, dangling = True, False, False
    if dangling:
        raise ParseError("expression ends with an operator", text, n)
    if not in_term and not terms:
        raise ParseError("empty expression", text, 0)
    if in_term:
        terms.append((sign * coeff, factors))
    return [(c, f) for c, f in terms if c != 0]


# ---------------------------------------------------------------------------


class VarSet:
    """Ordered variable names; ``params`` may take negative exponents."""

    __slots__ = ("names", "params", "index", "_param_mask", "_hash")

    def __init__(self, names: Iterable[str], params: Iterable[str] = ()):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        self.params = tuple(params)
        unknown = [p for p in self.params if p not in self.names]
        if unknown:
            raise ValueError(f"parameters {unknown} are not variables")
        self.index = {name: i for i, name in enumerate(self.names)}
        self._param_mask = tuple(name in self.params for name in self.names)
        self._hash = hash((self.names, self.params))

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return (
            isinstance(other, VarSet)
            and self.names == other.names
            and self.params == other.params
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.params:
            return f"VarSet({list(self.names)}, params={list(self.params)})"
        return f"VarSet({list(self.names)})"

    def is_param(self, name_or_index) -> bool:
        if isinstance(name_or_index, str):
            return name_or_index in self.params
        return self._param_mask[name_or_index]

    def check_exponents(self, exps: tuple[int, ...]) -> None:
        for e, is_param, name in zip(exps, self._param_mask, self.names):
            if e < 0 and not is_param:
                raise ValueError(f"negative exponent on non-parameter variable {name}")

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial.constant(self, 1)

    def var(self, name: str) -> "Polynomial":
        return Polynomial.variable(self, name)

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.var(n) for n in self.names)

    def parse(self, text: str) -> "Polynomial":
        return Polynomial.parse(self, text)


def _grlex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


class Polynomial:
    """Sparse polynomial: a map from exponent tuples to nonzero Fractions.

    Instances are immutable by convention; every operation returns a new
    polynomial.  Plain ``int``/``Fraction`` operands are promoted to
    constants, so polynomials can serve as coefficients in other structures.
    """

    __slots__ = ("vs", "terms", "_hash")

    def __init__(self, vs: VarSet, terms: Mapping[tuple[int, ...], Fraction] | None = None):
        self.vs = vs
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}
        self._hash = None

    # -- constructors -------------------------------------------------------

    @classmethod
    def _raw(cls, vs: VarSet, terms: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p.vs = vs
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, vs: VarSet, value) -> "Polynomial":
        c = as_fraction(value)
        return cls._raw(vs, {(0,) * len(vs): c} if c else {})

    @classmethod
    def variable(cls, vs: VarSet, name: str) -> "Polynomial":
        if name not in vs.index:
            raise KeyError(f"unknown variable {name!r}")
        e = [0] * len(vs)
        e[vs.index[name]] = 1
        return cls._raw(vs, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, vs: VarSet, exps, coeff=1) -> "Polynomial":
        exps = tuple(exps)
        if len(exps) != len(vs):
            raise ValueError("exponent vector length does not match the variable set")
        vs.check_exponents(exps)
        c = as_fraction(coeff)
        return cls._raw(vs, {exps: c} if c else {})

    @classmethod
    def parse(cls, vs: VarSet, text: str) -> "Polynomial":
        out: dict[tuple[int, ...], Fraction] = {}
        for coeff, factors in parse_terms(text):
            e = [0] * len(vs)
            for name, k in factors:
                if name not in vs.index:
                    raise ParseError(f"unknown variable {name!r}", text, text.find(name))
                e[vs.index[name]] += k
            exps = tuple(e)
            try:
                vs.check_exponents(exps)
            except ValueError as err:
                raise ParseError(str(err), text, 0) from None
            c = out.get(exps, Fraction(0)) + coeff
            if c:
                out[exps] = c
            else:
                out.pop(exps, None)
        return cls._raw(vs, out)

    # -- basic protocol -----------------------------------------------------

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def _coerce(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            if other.vs != self.vs:
                raise VarSetMismatch(f"{self.vs} vs {other.vs}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.vs, other)
        return None

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.vs == other.vs and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return not self.terms
            return self.terms == {(0,) * len(self.vs): c}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vs, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Polynomial({str(self)!r})"

    def __str__(self):
        return self.to_string()

    def sorted_terms(self):
        """Terms in descending graded-lex order (the canonical order)."""
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def monomial_string(self, exps) -> str:
        parts = []
        for name, e in zip(self.vs.names, exps):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    def to_string(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for exps, c in self.sorted_terms():
            mono = self.monomial_string(exps)
            mag = abs(c)
            if not mono:
                body = format_coeff(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_coeff(mag)}*{mono}"
            if not out:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(out)

    # -- ring operations ----------------------------------------------------

    def __neg__(self):
        return Polynomial._raw(self.vs, {k: -v for k, v in self.terms.items()})

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.terms:
            return self
        out = dict(self.terms)
        for k, v in o.terms.items():
            c = out.get(k)
            if c is None:
                out[k] = v
            else:
                c += v
                if c:
                    out[k] = c
                else:
                    del out[k]
        return Polynomial._raw(self.vs, out)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> "Polynomial":
        c = as_fraction(c)
        if not c:
            return Polynomial._raw(self.vs, {})
        return Polynomial._raw(self.vs, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = out.get(e)
                out[e] = c1 * c2 if c is None else c + c1 * c2
        return Polynomial._raw(self.vs, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / as_fraction(other))
        if isinstance(other, Polynomial):
            inv = other.inverse()
            return self * inv
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse().scale(other)
        return NotImplemented

    def inverse(self) -> "Polynomial":
        """Inverse of a single Laurent monomial in parameter variables."""
        if len(self.terms) != 1:
            raise ZeroDivisionError(f"{self} is not an invertible monomial")
        (exps, c), = self.terms.items()
        inv = tuple(-e for e in exps)
        try:
            self.vs.check_exponents(inv)
        except ValueError:
            raise ZeroDivisionError(f"{self} is not invertible") from None
        return Polynomial._raw(self.vs, {inv: 1 / c})

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = self.vs.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- calculus and evaluation --------------------------------------------

    def diff(self, var) -> "Polynomial":
        i = var if isinstance(var, int) else self.vs.index.get(var)
        if i is None:
            raise KeyError(f"unknown variable {var!r}")
        out = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if e == 0:
                continue
            if e < 0:
                raise ValueError(
                    f"derivative with respect to {self.vs.names[i]} of a negative-power term"
                )
            new = exps[:i] + (e - 1,) + exps[i + 1:]
            out[new] = c * e
        return Polynomial._raw(self.vs, out)

    def diff_multi(self, alpha: tuple[int, ...]) -> "Polynomial":
        """Apply the partial derivative ``d^alpha``; falling factorials, no recursion."""
        out = {}
        for exps, c in self.terms.items():
            coeff = c
            new = list(exps)
            for i, a in enumerate(alpha):
                if not a:
                    continue
                e = exps[i]
                if e < 0:
                    raise ValueError(
                        f"derivative with respect to {self.vs.names[i]} of a negative-power term"
                    )
                if e < a:
                    coeff = 0
                    break
                f = 1
                for t in range(a):
                    f *= e - t
                coeff *= f
                new[i] = e - a
            if coeff:
                out[tuple(new)] = coeff
        return Polynomial._raw(self.vs, out)

    def variables_used(self) -> set[str]:
        used = set()
        for exps in self.terms:
            for name, e in zip(self.vs.names, exps):
                if e:
                    used.add(name)
        return used

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        vals = {}
        for name in self.variables_used():
            if name not in point:
                raise KeyError(f"no value assigned to {name}")
            vals[name] = as_fraction(point[name])
        total = Fraction(0)
        for exps, c in self.terms.items():
            term = c
            for name, e in zip(self.vs.names, exps):
                if e:
                    v = vals[name]
                    if e < 0 and v == 0:
                        raise ZeroDivisionError(f"{name}=0 raised to a negative power")
                    term *= v ** e
            total += term
        return total

    def substitute(self, values: Mapping[str, object]) -> "Polynomial":
        """Replace some variables by rationals (guarded against 0^-k)."""
        idx = {self.vs.index[n]: as_fraction(v) for n, v in values.items()}
        out: dict = {}
        for exps, c in self.terms.items():
            new = list(exps)
            coeff = c
            for i, v in idx.items():
                e = exps[i]
                if e:
                    if e < 0 and v == 0:
                        raise ZeroDivisionError(
                            f"{self.vs.names[i]}=0 raised to a negative power"
                        )
                    coeff *= v ** e
                    new[i] = 0
            if coeff:
                k = tuple(new)
                out[k] = out.get(k, 0) + coeff
        return Polynomial._raw(self.vs, {k: v for k, v in out.items() if v})

    def embed(self, vs: VarSet) -> "Polynomial":
        """Re-express in a larger variable set (matched by name)."""
        if vs == self.vs:
            return self
        where = []
        for name in self.vs.names:
            if name not in vs.index:
                if any(e[self.vs.index[name]] for e in self.terms):
                    raise VarSetMismatch(f"variable {name} missing from {vs}")
                where.append(None)
            else:
                where.append(vs.index[name])
        out = {}
        for exps, c in self.terms.items():
            e = [0] * len(vs)
            for j, k in zip(where, exps):
                if k:
                    e[j] = k
            e = tuple(e)
            vs.check_exponents(e)
            out[e] = c
        return Polynomial._raw(vs, out)

    # -- inspection -----------------------------------------------------------

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.vs), Fraction(0))

    def min_exponent(self, var: str) -> int:
        i = self.vs.index[var]
        return min((e[i] for e in self.terms), default=0)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1
