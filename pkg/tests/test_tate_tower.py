from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from opeglue.exact_core import LocalizedPoly, MultiPoly
from opeglue.tate_tower import (Mode, NoCanonicalMap, TowerSeries, TruncationError, delta_identity_check,
                                descriptor, expand_in_chart, is_member, nott_product, to_polynomial)

V = ("x1", "x2", "x3")
L, P = Mode.LAURENT, Mode.POWER_SERIES
# z = x1 - x3, w = x2 - x3 with w the outer (small) variable; every
# difference is invertible here
ZW = descriptor(V, [2], [(0, 2, L), (1, 2, L)])

small = st.integers(-2, 2)
terms = st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 1), st.integers(0, 1)), small, max_size=3)
dens = st.dictionaries(st.sampled_from([(0, 1), (0, 2), (1, 2)]), st.integers(0, 2), max_size=2)
locs = st.builds(lambda t, d: LocalizedPoly(MultiPoly(V, t), d), terms, dens)


def test_geometric_expansion_against_binomial_formula():
    # 1/(x1 - x2)^2 = 1/(z - w)^2 = z^-2 sum_k (k+1) (w/z)^k for |w| < |z|
    f = expand_in_chart(LocalizedPoly.inverse_difference(V, 0, 1, 2), ZW, order=8)
    for k in range(0, 6):
        assert f.coefficient((-2 - k, k)) == LocalizedPoly.const(V, comb(k + 1, 1))
    assert f.coefficient((-1, 0)) == LocalizedPoly.const(V, 0)


def test_opposite_region_differs():
    WZ = descriptor(V, [2], [(1, 2, L), (0, 2, L)])
    f = expand_in_chart(LocalizedPoly.inverse_difference(V, 0, 1), WZ, order=6)
    # z small now: 1/(z - w) = -w^-1 sum (z/w)^k, exponents (w, z) = (-1-k, k)
    assert f.coefficient((-3, 2)) == LocalizedPoly.const(V, -1)
    assert f.coefficient((2, -3)) == LocalizedPoly.const(V, 0)


def test_no_canonical_map_without_inverse():
    poly_ring = descriptor(V, [0, 1, 2])
    with pytest.raises(NoCanonicalMap):
        expand_in_chart(LocalizedPoly.inverse_difference(V, 0, 1), poly_ring)


def test_inverted_base_difference_stays_in_coefficients():
    loc = descriptor(V, [0, 1, 2], inverted=[(0, 1)])
    p = LocalizedPoly.inverse_difference(V, 0, 1)
    f = expand_in_chart(p, loc)
    assert f.terms == {(): p}


def test_truncated_coefficients_raise():
    f = expand_in_chart(LocalizedPoly.inverse_difference(V, 0, 1), ZW, order=3)
    with pytest.raises(TruncationError):
        f.coefficient((0, 40))


@settings(max_examples=100)
@given(locs, locs)
def test_expand_is_a_ring_homomorphism(a, b):
    ea, eb = expand_in_chart(a, ZW, order=6), expand_in_chart(b, ZW, order=6)
    assert expand_in_chart(a * b, ZW, order=6).agrees_with(ea * eb)
    assert expand_in_chart(a + b, ZW, order=6).agrees_with(ea + eb)


@given(terms)
def test_polynomials_round_trip_through_a_chart(t):
    p = MultiPoly(V, t)
    assert to_polynomial(expand_in_chart(LocalizedPoly.from_poly(p), ZW)) == p


def test_to_polynomial_rejects_poles():
    f = expand_in_chart(LocalizedPoly.inverse_difference(V, 0, 2), ZW)
    with pytest.raises(ValueError):
        to_polynomial(f)


def test_delta_identity_at_order_six():
    assert delta_identity_check(6)["verdict"] == "pass"


def test_delta_identity_detects_corruption():
    res = delta_identity_check(6, corrupt=True)
    assert res["verdict"] == "fail" and res["mismatches"]


def test_nott_product_concatenates_towers():
    A = descriptor(("a", "b"), [1], [(0, 1, L)])
    B = descriptor(("c", "d"), [1], [(0, 1, P)])
    f = TowerSeries.monomial(A, (-1,), 2)
    g = TowerSeries.monomial(B, (3,), 5)
    h = nott_product(f, g)
    assert h.descriptor.variables == ("a", "b", "c", "d")
    assert h.terms[(-1, 3)] == LocalizedPoly.const(h.descriptor.variables, 10)


def test_membership_of_truncation_families():
    desc = descriptor(("x", "y"), [1], [(0, 1, P)])
    geometric = lambda n: {(k,): 1 for k in range(n)}
    assert is_member(geometric, desc, [3, 5, 8])
    sinking = lambda n: {(-n,): 1}
    assert not is_member(sinking, desc, [3, 5, 8])
