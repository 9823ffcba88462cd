from fractions import Fraction

import pytest

from liewb.linalg import LinearlyDependent, SpanSolver, nullspace, rank, rref


def dense_check(rows, vec, ncols):
    return all(sum(Fraction(r.get(c, 0)) * vec.get(c, 0) for c in range(ncols)) == 0 for r in rows)


def test_rank_and_nullspace_small():
    rows = [{0: 1, 1: 2, 2: 3}, {0: 2, 1: 4, 2: 6}, {1: 1, 2: 1}]
    assert rank(rows) == 2
    ns = nullspace(rows, 3)
    assert len(ns) == 1
    assert dense_check(rows, ns[0], 3)
    assert ns[0] == {0: Fraction(-1), 1: Fraction(-1), 2: Fraction(1)}


def test_rref_is_pivot_order_independent():
    rows = [{0: 3, 2: 1}, {1: 2, 2: 5}, {0: 1, 1: 1, 2: 1}]
    assert rref(rows) == rref(list(reversed(rows)))


def test_nullspace_free_columns_and_bounds():
    assert nullspace([], 3) == [{0: 1}, {1: 1}, {2: 1}]
    with pytest.raises(IndexError):
        nullspace([{5: 1}], 3)


def test_span_solver():
    s = SpanSolver()
    s.add({0: 1, 1: 1}, "a")
    s.add({1: 1, 2: 1}, "b")
    coeffs, residual = s.express({0: 2, 1: 3, 2: 1})
    assert residual == {}
    assert coeffs == {"a": 2, "b": 1}
    assert not s.contains({2: 1, 0: 0, 3: 1})
    with pytest.raises(LinearlyDependent) as err:
        s.add({0: 1, 2: -1}, "c")
    assert err.value.combination == {"a": 1, "b": -1}
