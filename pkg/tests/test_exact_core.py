from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from opeglue.exact_core import (LocalizedPoly, MultiPoly, PolyParseError, StructureError, clear_denominators,
                                falling_binomial, from_cleared, loc_mul, parse_poly)

V = ("x1", "x2", "x3")
SYMS = sympy.symbols(V)


def to_sympy(p: MultiPoly):
    return sum((sympy.Rational(c.numerator, c.denominator) * sympy.Mul(*[s ** k for s, k in zip(SYMS, e)])
                for e, c in p.terms.items()), sympy.Integer(0))


def loc_to_sympy(p: LocalizedPoly):
    den = sympy.Mul(*[(SYMS[i] - SYMS[j]) ** k for (i, j), k in p.denominator.items()])
    return to_sympy(p.numerator) / den


small = st.integers(-3, 3)
terms = st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)), small, max_size=4)
polys = terms.map(lambda t: MultiPoly(V, t))
dens = st.dictionaries(st.sampled_from([(0, 1), (0, 2), (1, 2), (1, 0)]), st.integers(0, 2), max_size=2)
locs = st.builds(LocalizedPoly, polys, dens)


def test_falling_binomial_values():
    assert [falling_binomial(5, j) for j in range(7)] == [1, 5, 10, 10, 5, 1, 0]
    # negative top: (-1 choose j) = (-1)^j
    assert [falling_binomial(-1, j) for j in range(4)] == [1, -1, 1, -1]


def test_multipoly_rejects_negative_exponent():
    with pytest.raises(StructureError):
        MultiPoly(V, {(0, -1, 0): 1})


def test_zero_coefficients_are_dropped():
    p = MultiPoly(V, {(1, 0, 0): 2}) - MultiPoly(V, {(1, 0, 0): 2})
    assert p.is_zero() and p.terms == {}


@given(polys, polys)
def test_ring_operations_match_sympy(p, r):
    assert sympy.expand(to_sympy(p + r) - (to_sympy(p) + to_sympy(r))) == 0
    assert sympy.expand(to_sympy(p * r) - to_sympy(p) * to_sympy(r)) == 0
    assert sympy.expand(to_sympy(p - r) - (to_sympy(p) - to_sympy(r))) == 0


@given(polys)
def test_power_matches_repeated_product(p):
    assert p ** 3 == p * p * p
    assert p ** 0 == MultiPoly.const(V, 1)


@given(polys)
def test_divide_by_difference_is_exact_division(p):
    d = MultiPoly.difference(V, 0, 2)
    assert (p * d).divide_by_difference(0, 2) == p


def test_divide_by_difference_refuses_non_multiple():
    assert MultiPoly.var(V, "x1").divide_by_difference(0, 1) is None


@settings(max_examples=40)
@given(locs, locs)
def test_localized_arithmetic_matches_sympy(a, b):
    for got, want in ((a + b, loc_to_sympy(a) + loc_to_sympy(b)),
                      (a * b, loc_to_sympy(a) * loc_to_sympy(b)),
                      (loc_mul(a, b), loc_to_sympy(a) * loc_to_sympy(b)),
                      (a - b, loc_to_sympy(a) - loc_to_sympy(b))):
        assert sympy.cancel(loc_to_sympy(got) - want) == 0


@given(locs)
def test_localized_is_reduced(a):
    # no denominator factor divides the numerator
    for (i, j) in a.denominator:
        assert a.numerator.divide_by_difference(i, j) is None or a.numerator.is_zero()


def test_reversed_pair_flips_sign():
    a = LocalizedPoly(MultiPoly.const(V, 1), {(1, 0): 1})
    b = LocalizedPoly(MultiPoly.const(V, -1), {(0, 1): 1})
    assert a == b


@given(locs)
def test_clear_then_rebuild_round_trips(a):
    num, exps = clear_denominators(a)
    assert from_cleared(num, exps) == a


def test_parse_grammar():
    p = parse_poly("2*lam^2 - (T + 1)*lam + 3", ("lam", "T"))
    lam, T = sympy.symbols("lam T")
    got = sum(c * lam ** e[0] * T ** e[1] for e, c in p.terms.items())
    assert sympy.expand(got - (2 * lam ** 2 - (T + 1) * lam + 3)) == 0


def test_parse_alias_for_lambda():
    assert parse_poly("λ*T", ("lam", "T"), {"λ": "lam"}) == parse_poly("lam*T", ("lam", "T"))


@pytest.mark.parametrize("text", ["2*", "lam^^2", "(T", "x + 1", ""])
def test_parse_errors_report_column(text):
    with pytest.raises(PolyParseError) as info:
        parse_poly(text, ("lam", "T"))
    assert info.value.column >= 0


def test_rational_constants_parse_exactly():
    assert parse_poly("1/2*T", ("lam", "T")).terms == {(0, 1): Fraction(1, 2)}


def test_exact_rationals_not_floats():
    p = MultiPoly(V, {(0, 0, 0): Fraction(1, 3)}) * 3
    assert p == MultiPoly.const(V, 1)
