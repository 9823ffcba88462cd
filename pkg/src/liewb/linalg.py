"""Exact sparse linear algebra over the rationals.

Vectors are dicts ``{column: value}`` with no zero entries.  Columns are
integers for :func:`rref`/:func:`nullspace`; :class:`SpanSolver` accepts any
hashable, totally ordered keys.

Elimination in :func:`rref` is fraction-free: every row is scaled to a
primitive integer vector and rows are combined as ``p*r - a*s`` followed by
division by the content, so no rational arithmetic happens in the inner loop.
The reduced row echelon form is unique, so the result does not depend on the
order in which rows are fed in.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Hashable, Iterable, Mapping

__all__ = ["rref", "nullspace", "rank", "SpanSolver", "LinearlyDependent"]


class LinearlyDependent(ValueError):
    def __init__(self, label, combination):
        self.label = label
        self.combination = combination
        super().__init__(f"{label!r} is a linear combination of earlier vectors")


def _primitive(row: Mapping[int, Fraction | int]) -> dict[int, int]:
    """Scale to coprime integers with a positive leading (smallest-column) entry."""
    if not row:
        return {}
    den = reduce(lcm, (Fraction(v).denominator for v in row.values()), 1)
    ints = {k: int(Fraction(v) * den) for k, v in row.items() if v}
    g = reduce(gcd, ints.values(), 0)
    lead = ints[min(ints)]
    if lead < 0:
        g = -g
    return {k: v // g for k, v in ints.items()}


def _combine(r: dict[int, int], s: dict[int, int], col: int) -> dict[int, int]:
    """Eliminate ``col`` from ``r`` using ``s``: p*r - a*s, content removed."""
    p = s[col]
    a = r[col]
    g = gcd(p, a)
    p //= g
    a //= g
    out = {k: v * p for k, v in r.items()}
    for k, v in s.items():
        w = out.get(k, 0) - a * v
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    if not out:
        return out
    c = reduce(gcd, out.values(), 0)
    if c != 1:
        out = {k: v // c for k, v in out.items()}
    return out


def rref(rows: Iterable[Mapping[int, Fraction | int]]) -> dict[int, dict[int, int]]:
    """Reduced row echelon form as ``{pivot_column: integer row}``.

    Each returned row is primitive with a positive pivot entry and has zeros
    in every other pivot column (so ``row[c] / row[pivot]`` are the RREF
    entries).
    """
    pivots: dict[int, dict[int, int]] = {}
    for raw in rows:
        row = _primitive(raw)
        while row:
            lead = min(row)
            piv = pivots.get(lead)
            if piv is None:
                if row[lead] < 0:
                    row = {k: -v for k, v in row.items()}
                pivots[lead] = row
                break
            row = _combine(row, piv, lead)
    # back substitution, highest pivot first
    order = sorted(pivots)
    for idx in range(len(order) - 1, -1, -1):
        pc = order[idx]
        prow = pivots[pc]
        for qc in order[:idx]:
            qrow = pivots[qc]
            if pc in qrow:
                new = _combine(qrow, prow, pc)
                if new[qc] < 0:
                    new = {k: -v for k, v in new.items()}
                pivots[qc] = new
    return pivots


def rank(rows: Iterable[Mapping[int, Fraction | int]]) -> int:
    return len(rref(rows))


def nullspace(rows: Iterable[Mapping[int, Fraction | int]], ncols: int) -> list[dict[int, Fraction]]:
    """Basis of ``{v : row . v = 0 for all rows}`` over columns ``0..ncols-1``.

    One vector per free column, in increasing column order; the free column's
    entry is 1 and the other free entries are 0.
    """
    piv = rref(rows)
    for c in piv:
        if c >= ncols:
            raise IndexError(f"column {c} out of range for {ncols} columns")
    # column -> [(pivot column, entry)] to avoid scanning every row per free column
    by_col: dict[int, list[tuple[int, int]]] = {}
    for pc, row in piv.items():
        for c, v in row.items():
            if c != pc:
                by_col.setdefault(c, []).append((pc, v))
    basis = []
    for f in range(ncols):
        if f in piv:
            continue
        vec = {f: Fraction(1)}
        for pc, v in by_col.get(f, ()):
            vec[pc] = Fraction(-v, piv[pc][pc])
        basis.append(vec)
    return basis


class SpanSolver:
    """Incremental echelon basis for expressing vectors in a fixed span.

    ``add`` registers a labelled vector (raising :class:`LinearlyDependent`
    when it is already in the span); ``express`` returns the coordinates of a
    vector in terms of the labels together with the residual that lies
    outside the span.
    """

    def __init__(self, key=None):
        self._key = key
        self._rows: dict[Hashable, tuple[dict, dict]] = {}  # pivot -> (vector, combination)
        self.labels: list = []

    def _pivot(self, vec):
        return min(vec, key=self._key) if self._key else min(vec)

    def _reduce(self, vec: Mapping) -> tuple[dict, dict]:
        vec = {k: Fraction(v) for k, v in vec.items() if v}
        comb: dict = {}
        # stored rows are fully reduced, so eliminating one pivot never
        # introduces another
        for p in [k for k in vec if k in self._rows]:
            f = vec[p]
            row, rc = self._rows[p]
            for k, v in row.items():
                w = vec.get(k, 0) - f * v
                if w:
                    vec[k] = w
                else:
                    vec.pop(k, None)
            for lab, v in rc.items():
                w = comb.get(lab, 0) + f * v
                if w:
                    comb[lab] = w
                else:
                    comb.pop(lab, None)
        return vec, comb

    def add(self, vec: Mapping, label) -> None:
        res, comb = self._reduce(vec)
        if not res:
            raise LinearlyDependent(label, comb)
        p = self._pivot(res)
        f = res[p]
        row = {k: v / f for k, v in res.items()}
        # combination expresses the reduced vector: vec - sum(comb) = res
        rc = {label: 1 / f}
        for lab, v in comb.items():
            rc[lab] = -v / f
        # keep existing rows reduced against the new pivot
        for q, (qrow, qc) in list(self._rows.items()):
            if p in qrow:
                g = qrow[p]
                nrow = dict(qrow)
                for k, v in row.items():
                    w = nrow.get(k, 0) - g * v
                    if w:
                        nrow[k] = w
                    else:
                        nrow.pop(k, None)
                ncomb = dict(qc)
                for lab, v in rc.items():
                    w = ncomb.get(lab, 0) - g * v
                    if w:
                        ncomb[lab] = w
                    else:
                        ncomb.pop(lab, None)
                self._rows[q] = (nrow, ncomb)
        self._rows[p] = (row, rc)
        self.labels.append(label)

    def express(self, vec: Mapping) -> tuple[dict, dict]:
        """``(coordinates, residual)``; the residual is empty iff ``vec`` is in the span."""
        res, comb = self._reduce(vec)
        return comb, res

    def contains(self, vec: Mapping) -> bool:
        return not self._reduce(vec)[0]

    def __len__(self):
        return len(self._rows)
