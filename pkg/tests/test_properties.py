"""Seeded random checks of the algebraic laws each layer must obey.

Every property runs on 1000 derandomized hypothesis examples, so failures
reproduce exactly.
"""

from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from liewb import catalog
from liewb.enveloping import Enveloping, ad_action, desymmetrize, pbw_product, symmetrize
from liewb.extensions import VirtualCopyMap
from liewb.poly import Polynomial, VarSet
from liewb.weyl import DiffOp

CASES = settings(
    max_examples=1000,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)

XYZ = VarSet(["x", "y", "z", "m"], params=["m"])
XY = VarSet(["x", "y"])

coeffs = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


def polys(vs, max_deg, max_terms=4, laurent=()):
    def exps():
        parts = []
        for v in vs.names:
            lo = -2 if v in laurent else 0
            parts.append(st.integers(lo, max_deg))
        return st.tuples(*parts).filter(lambda e: sum(max(x, 0) for x in e) <= max_deg)

    return st.dictionaries(exps(), coeffs, max_size=max_terms).map(lambda t: Polynomial(vs, t))


def diffops(vs, order, deg, max_terms=3):
    alphas = st.tuples(*[st.integers(0, order)] * len(vs)).filter(lambda a: sum(a) <= order)
    return st.dictionaries(alphas, polys(vs, deg, 2), max_size=max_terms).map(lambda t: DiffOp(vs, t))


def vector_fields(vs, deg):
    return st.fixed_dictionaries({v: polys(vs, deg, 2) for v in vs.names}).map(
        lambda comps: DiffOp.from_vector(vs, {k: p for k, p in comps.items() if p})
    )


# -- exact polynomials -----------------------------------------------------

lp = polys(XYZ, 3, laurent=("m",))


@CASES
@given(lp, lp, lp)
def test_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert (p + q) + r == p + (q + r)
    assert p - p == XYZ.zero()


@CASES
@given(lp, lp, st.sampled_from(["x", "y", "z"]), coeffs)
def test_derivative_is_linear_and_leibniz(p, q, v, c):
    # m is a Laurent parameter; differentiating its negative powers is an error by contract
    assert (p * q).diff(v) == p.diff(v) * q + p * q.diff(v)
    assert (p + q.scale(c)).diff(v) == p.diff(v) + q.diff(v).scale(c)


@CASES
@given(lp)
def test_parse_round_trip(p):
    assert XYZ.parse(p.to_string()) == p


# -- Weyl algebra ------------------------------------------------------------


@CASES
@given(diffops(XY, 2, 2), diffops(XY, 2, 2), polys(XY, 4))
def test_apply_compose_consistency(D, E, f):
    assert D.compose(E).apply(f) == D.apply(E.apply(f))


@CASES
@given(diffops(XY, 1, 2), diffops(XY, 1, 2), diffops(XY, 1, 2))
def test_commutator_antisymmetry_and_jacobi(A, B, C):
    assert A.commutator(B) == -B.commutator(A)
    jac = A.commutator(B.commutator(C)) + B.commutator(C.commutator(A)) + C.commutator(A.commutator(B))
    assert not jac


@CASES
@given(vector_fields(XY, 2), vector_fields(XY, 2))
def test_vector_fields_close(X, Y):
    assert X.commutator(Y).is_vector_field()


# -- Lie algebra -------------------------------------------------------------

W = catalog.algebra("W")
w_elements = st.dictionaries(st.integers(0, W.dim - 1), coeffs, min_size=1, max_size=3).map(
    lambda d: sum((W.basis(i) * c for i, c in d.items()), W.basis(0) * 0)
)


@CASES
@given(w_elements, w_elements)
def test_realization_is_a_homomorphism(x, y):
    assert W.realize(W.bracket(x, y)) == W.realize(x).commutator(W.realize(y))


# -- enveloping algebra ------------------------------------------------------

V2 = catalog.algebra("V2")
U = Enveloping(V2)
V2VS = VarSet(V2.names)
words = st.lists(st.integers(0, V2.dim - 1), max_size=2).map(lambda w: tuple(sorted(w)))
ncpolys = st.dictionaries(words, coeffs, max_size=3).map(
    lambda t: sum((U.word(w, c) for w, c in t.items()), U.zero())
)


@CASES
@given(ncpolys, ncpolys, ncpolys)
def test_pbw_associativity(p, q, r):
    assert pbw_product(pbw_product(p, q), r) == pbw_product(p, pbw_product(q, r))


@CASES
@given(ncpolys, ncpolys, st.integers(0, V2.dim - 1))
def test_ad_is_a_derivation(p, q, i):
    assert ad_action(i, pbw_product(p, q)) == pbw_product(ad_action(i, p), q) + pbw_product(p, ad_action(i, q))


homogeneous = st.integers(0, 4).flatmap(
    lambda d: st.dictionaries(
        st.lists(st.integers(0, V2.dim - 1), min_size=d, max_size=d).map(
            lambda w: tuple(sum(1 for k in w if k == i) for i in range(V2.dim))
        ),
        coeffs,
        max_size=3,
    ).map(lambda t: Polynomial(V2VS, t))
)


@CASES
@given(homogeneous, homogeneous)
def test_symmetrize_round_trip(p, q):
    if p:
        assert symmetrize(p, U).top_image(V2VS) == p
    assert desymmetrize(symmetrize(p + q, U), V2VS) == p + q


# -- Lie-Poisson -------------------------------------------------------------

S = catalog.poisson_structure("V2_dual")
FIELDS = S.characteristic_fields()
pp2 = polys(S.vs, 2, 3)
pp3 = polys(S.vs, 3, 3)


@CASES
@given(pp2, pp2, pp2)
def test_poisson_leibniz_and_jacobi(f, g, h):
    assert S.bracket(f, g * h) == S.bracket(f, g) * h + g * S.bracket(f, h)
    jac = S.bracket(f, S.bracket(g, h)) + S.bracket(g, S.bracket(h, f)) + S.bracket(h, S.bracket(f, g))
    assert not jac


@CASES
@given(pp3, st.integers(0, V2.dim - 1))
def test_fields_agree_with_bracket(g, i):
    assert FIELDS[i].apply(g) == S.bracket(S.vs.var(S.vs.names[i]), g)


# -- virtual copy ------------------------------------------------------------

FX = catalog.load("V2_extension")
UE = Enveloping(catalog.algebra("V2_extension"))
VMAP = VirtualCopyMap.parse(UE, FX["map"], FX["central"])
PVS = UE.params
laurent = st.dictionaries(
    st.tuples(st.integers(-2, 2), st.integers(-2, 2)), coeffs, min_size=1, max_size=2
).map(lambda t: Polynomial(PVS, t))
RADICAL = [UE.gen(f"C{k}") for k in range(1, 8)]


@CASES
@given(laurent, laurent, laurent, st.integers(0, 6))
def test_primed_span_commutes_with_radical(a, b, c, k):
    x = VMAP.J0.scale(a) + VMAP.J2.scale(b) + VMAP.Jm2.scale(c)
    r = RADICAL[k]
    assert not VMAP.quotient(pbw_product(x, r) - pbw_product(r, x))
