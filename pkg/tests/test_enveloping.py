from itertools import product
from math import factorial
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from opeglue.annihilation import LieRElement
from opeglue.enveloping import (VAElement, check_creation, check_translation, check_vacuum, default_clearing,
                                locality_order, pole_order, verify_associativity, verify_axioms)
from tests.conftest import sl2_va, vir_va


def partitions_count(n, parts):
    # number of multisets from ``parts`` (with colours) summing to n
    ways = [1] + [0] * n
    for p in parts:
        for k in range(p, n + 1):
            ways[k] += ways[k - p]
    return ways


def test_virasoro_graded_dimensions():
    # partitions into parts >= 2
    assert vir_va(8).dimensions() == partitions_count(8, range(2, 9))


def test_current_graded_dimensions():
    # three colours of parts >= 1
    assert sl2_va(6).dimensions() == partitions_count(6, [p for p in range(1, 7) for _ in range(3)])


def test_state_round_trip_formatting():
    va = sl2_va(4)
    for mono in va.basis_upto(3):
        assert va.parse_monomial(va.format_monomial(mono)) == mono


def normal_ordered(va, a, b, n, c):
    """(:a b:)_(n) c for generators a, b through mode actions only."""
    P = va.presentation
    out = VAElement(va)
    top = va.weight(((P.index[a], -1),)) + va.weight(((P.index[b], -1),)) + c.max_weight()
    for j in range(0, top + va.cutoff + 2):
        inner = va.act(LieRElement.mode(P, b, n + j), c)
        out = out + va.act(LieRElement.mode(P, a, -1 - j), inner)
        inner = va.act(LieRElement.mode(P, a, j), c)
        out = out + va.act(LieRElement.mode(P, b, n - 1 - j), inner)
    return out


def test_normal_ordered_product_worked_value():
    va = vir_va(6)
    u = va.monomial_state([("L", -1), ("L", -1)])
    v = va.generator_state("L")
    want = va.monomial_state([("L", -4)]).scale(2) + va.monomial_state([("L", -2), ("L", -1)]).scale(6)
    assert va.full_field(u, v).coefficient(0) == want


@pytest.mark.parametrize("va,a,b", [(vir_va(6), "L", "L"), (sl2_va(5), "e", "f"), (sl2_va(5), "h", "h")],
                         ids=["LL", "ef", "hh"])
def test_field_of_normal_ordered_state_matches_mode_formula(va, a, b):
    u = va.monomial_state([(a, -1), (b, -1)])
    for g in va.gens:
        c = va.generator_state(g)
        wt = u.max_weight() + c.max_weight()
        for n in range(wt - va.cutoff, wt):
            assert va.nprod(u, n, c) == normal_ordered(va, a, b, n, c), (g, n)


def test_vacuum_field_is_identity():
    va = vir_va(4)
    assert check_vacuum(va, va.basis_upto())["verdict"] == "pass"


def test_creation_and_translation():
    va = sl2_va(3)
    assert check_creation(va, va.basis_upto())["verdict"] == "pass"
    probes = [()] + [((i, -1),) for i in range(3)]
    assert check_translation(va, va.basis_upto(), probes)["verdict"] == "pass"


def test_locality_orders_match_lambda_degree():
    va = vir_va(6)
    probes = [(), ((0, -1),)]
    L = va.generator_state("L")
    assert locality_order(va, L, L, probes)["order"] == 2
    va2 = sl2_va(4)
    e, f = va2.generator_state("e"), va2.generator_state("f")
    assert locality_order(va2, e, f, [(), ((1, -1),)])["order"] == 1
    assert locality_order(va2, va2.vacuum(), e, [()])["order"] == 0


@settings(max_examples=40)
@given(st.data())
def test_skew_symmetry(data):
    # u_(n) v = sum_j (-1)^(n+j+1) T^j/j! v_(n+j) u
    va = sl2_va(4)
    basis = va.basis_upto(2)
    u = va.state(data.draw(st.sampled_from(basis)))
    v = va.state(data.draw(st.sampled_from(basis)))
    top = u.max_weight() + v.max_weight()
    n = data.draw(st.integers(top - 2, top))
    rhs = VAElement(va)
    for j in range(0, 5):
        w = va.nprod(v, n + j, u)
        for _ in range(j):
            w = va.translation_operator(w)
        rhs = rhs + w.scale(Fraction((-1) ** (n + j + 1), factorial(j)))
    assert va.nprod(u, n, v) == rhs


def test_pole_orders():
    va = vir_va(6)
    L = va.generator_state("L")
    LL = va.monomial_state([("L", -1), ("L", -1)])
    # L_(1) L = 2L is the last nonzero product; (LL)_(3) L = 2 L_(-1)|0> + ...
    assert pole_order(va, L, L) == 2
    assert pole_order(va, LL, L) == 4
    assert pole_order(va, va.vacuum(), L) == 0
    # z^A w^B (z-w)^C with A from (a, c), B from (b, c), C from (a, b)
    assert default_clearing(va, LL, L, L) == (4, 2, 4)


@pytest.mark.parametrize("va", [vir_va(5), sl2_va(3)], ids=["vir", "sl2"])
def test_associativity_on_all_triples(va):
    basis = va.basis_upto(va.cutoff)
    for a, b, c in product(basis, repeat=3):
        if va.weight(a) + va.weight(b) + va.weight(c) > va.cutoff:
            continue
        res = verify_associativity(va, va.state(a), va.state(b), va.state(c))
        assert res["verdict"] == "pass", (a, b, c, res["mismatches"][:1])


def test_undersized_clearing_is_inconclusive_not_fail():
    va = vir_va(6)
    L = va.generator_state("L")
    res = verify_associativity(va, L, L, L, orders={"A": 1, "B": 1, "C": 1})
    assert res["verdict"] == "inconclusive"


def test_verify_axioms_subset():
    res = verify_axioms(vir_va(4), axioms=("vacuum",))
    assert [c["name"] for c in res["checks"]] == ["vacuum"] and res["verdict"] == "pass"
