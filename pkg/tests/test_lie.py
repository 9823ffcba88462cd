from fractions import Fraction

import pytest

from liewb import catalog
from liewb.lie import (
    Grading,
    LieAlgebra,
    LinearlyDependentInput,
    NotClosed,
    NotEigenvector,
    NotProportional,
    SingularBasisChange,
    ad_eigenvalue,
    change_of_basis,
    commuting_set_verify,
    from_realization,
    is_ideal,
    ladder_coefficients,
    lower_central_series,
    subalgebra,
    verify_grading,
    verify_jacobi,
)
from liewb.poly import VarSet
from liewb.weyl import DiffOp

X1 = VarSet(["x"])


def test_from_realization_small():
    L = from_realization([DiffOp.parse(X1, "dx")], ["P"])
    assert L.dim == 1 and not L.sc
    with pytest.raises(NotClosed) as err:
        from_realization([DiffOp.parse(X1, "dx"), DiffOp.parse(X1, "x^2*dx")])
    assert err.value.residual == DiffOp.parse(X1, "2*x*dx")
    with pytest.raises(LinearlyDependentInput):
        from_realization([DiffOp.parse(X1, "dx"), DiffOp.parse(X1, "2*dx")])


def test_W_realization_consistent():
    W = catalog.algebra("W")
    assert W.dim == 39
    assert W.check_realization() == []
    assert len(W.sc) == 214


def test_W_as_printed_does_not_close():
    with pytest.raises(NotClosed):
        catalog.algebra("W_as_printed")


def test_bracket_examples_V2():
    V2 = catalog.algebra("V2")
    J0, J2, Jm2 = (V2.basis(n) for n in ("J0", "J2", "Jm2"))
    assert V2.bracket(J0, J2) == J2 * 2
    assert not V2.bracket(J2, J2)
    W = catalog.algebra("W")
    # oracle: the realized commutator [L14, L15] = L16 - L13
    lhs = W.realization[W.index["L14"]].commutator(W.realization[W.index["L15"]])
    assert lhs == W.realize(W.element("L16 - L13"))
    assert V2.bracket(J2, Jm2) == J0


def test_every_catalog_algebra_is_jacobi():
    for name in ["W", "multiplet_basis", "V2", "V0", "Vm1", "V12", "sub1", "sub2", "V2_extension"]:
        assert verify_jacobi(catalog.algebra(name)) == [], name


def test_subalgebra_examples():
    W = catalog.algebra("W")
    one = subalgebra(W, [W.element("L13")], ["X"])
    assert one.dim == 1 and not one.sc
    with pytest.raises(NotClosed):
        subalgebra(W, [W.element("A1"), W.element("B1")])
    sub2 = catalog.algebra("sub2")
    assert sub2.dim == 17
    rep = catalog.table_diff(sub2, catalog.load("table_sub2"))
    assert not rep.value_mismatch and not rep.missing_from_computation


def test_grading_examples():
    W, g = catalog.grading()
    rep = verify_grading(W, g)
    assert rep.ok and rep.dims == {-1: 6, 0: 17, 1: 9, 2: 7}
    bad = Grading(dict(g.degrees), g.allowed)
    bad.degrees[W.index["A1"]] = 0
    assert not verify_grading(W, bad).ok
    ab = LieAlgebra(["a", "b"], {})
    assert verify_grading(ab, Grading({0: 5, 1: 5}, (5,))).ok


def test_lower_central_series_examples():
    W = catalog.algebra("W")
    assert [d for d, _ in lower_central_series(W)][:3] == [39, 36, 36]
    ab = LieAlgebra(["a", "b"], {})
    assert [d for d, _ in lower_central_series(ab)] == [2, 0]
    sl2 = subalgebra(W, [W.element("L14"), W.element("L16 - L13"), W.element("L15")], ["E", "H", "F"])
    assert [d for d, _ in lower_central_series(sl2)] == [3, 3]


def test_ad_eigenvalue_examples():
    V2 = catalog.algebra("V2")
    J0 = V2.basis("J0")
    assert ad_eigenvalue(V2, J0, V2.basis("C4")) == 3
    assert ad_eigenvalue(V2, V2.basis("J2"), V2.basis("C7")) == 0
    with pytest.raises(NotEigenvector):
        ad_eigenvalue(V2, J0, V2.element("C1 + C4"))


def test_commuting_set_examples():
    M = catalog.algebra("multiplet_basis")
    ok, _ = commuting_set_verify(M, [M.basis(n) for n in ("Sm1", "S01", "S02")])
    assert ok
    assert commuting_set_verify(M, [M.basis("S2")]) == (True, None)
    ok, (a, b, w) = commuting_set_verify(M, [M.basis("J2"), M.basis("Jm2")])
    assert not ok and w == M.basis("J0")


def test_ladder_coefficients_obey_sl2_products():
    # oracle: in a highest-weight-n irrep, raise(m-2) * lower(m) = (n-m+2)(n+m)/4
    L, g, cartan, mults = catalog.multiplets()
    J2, Jm2 = L.basis("J2"), L.basis("Jm2")
    inverted = set()
    for mult in mults:
        try:
            tab = ladder_coefficients(L, mult, J2, Jm2)
        except NotProportional:
            inverted.add(mult.names[0])
            continue
        n = max(m for _, m in mult.members)
        for m in range(-n + 2, n + 1, 2):
            assert tab["raise"][m - 2] * tab["lower"][m] == Fraction((n - m + 2) * (n + m), 4), mult.names
    # nominal suffixes of these two run against the computed J0 eigenvalues
    assert inverted == {"Q0_p3", "D01_p1"}


def test_change_of_basis_singular():
    W = catalog.algebra("W")
    with pytest.raises(SingularBasisChange):
        change_of_basis(W, [W.basis(0)] * W.dim, [f"y{i}" for i in range(W.dim)])


def test_radical_ideal():
    M = catalog.algebra("multiplet_basis")
    radical = [M.basis(n) for n in M.names if n not in ("J0", "J2", "Jm2")]
    assert is_ideal(M, radical) == []


def test_json_round_trip():
    V2 = catalog.algebra("V2")
    again = LieAlgebra.from_json(V2.to_json())
    assert again.to_json() == V2.to_json()
    assert catalog.table_diff(again, {"entries": [
        {"lhs": [V2.names[i], V2.names[j]], "rhs": [[V2.names[k], str(c)] for k, c in r.items()]}
        for (i, j), r in V2.sc.items()]}).clean
    E = catalog.algebra("V2_extension")
    assert LieAlgebra.from_json(E.to_json()).to_json() == E.to_json()
