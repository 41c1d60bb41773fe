from pathlib import Path

import pytest
import sympy

from opeglue.descent import ope_from_vertex
from opeglue.gluing import (Generator, GluingProblem, NotInvertible, NotRegular, bl_glue, factorization_check,
                            format_table, free_dims, glued_v2_table, identity_problem, kernel, parse_table, rank,
                            rank_two_problem, reconstruct_and_compare, y2_kernel, yn_kernel)
from tests.conftest import sl2_va, vir_va

GOLDEN = Path(__file__).parent / "golden"
t, y = sympy.symbols("t y")


def brute_force_dims(Phi, degrees, n, b, shift=10):
    """dim of {f in F : Phi f has no polar part in t} in total degree n and
    y-degree b, straight from a sympy matrix over C[t, 1/t, y] (deg t = 1)."""
    r = Phi.shape[1]
    coeffs = sympy.symbols(f"c0:{r}")
    vec = sympy.Matrix([coeffs[i] * t ** (n - b - degrees[i]) * y ** b for i in range(r)])
    eqs = []
    for entry in Phi * vec:
        p = sympy.Poly(sympy.expand(entry * t ** shift / y ** b), t)
        eqs += [p.coeff_monomial(t ** k) for k in range(shift)]
    eqs = [e for e in eqs if e != 0]
    if not eqs:
        return r
    M, _ = sympy.linear_eq_to_matrix(eqs, coeffs)
    return r - M.rank()


def test_identity_datum_glues_to_free_rank_one():
    M = bl_glue(identity_problem(), range(0, 6))
    assert M.verdict == "pass"
    table = M.bidegree_table(4)
    for (n, b), dim in table.items():
        assert dim == brute_force_dims(sympy.Matrix([[1]]), [0], n, b) == (1 if n - b >= 0 else 0)


def test_rank_two_datum_glues_to_free_rank_two():
    M = bl_glue(rank_two_problem(), range(0, 6))
    assert M.verdict == "pass"
    assert M.dims == {0: 1, 1: 2, 2: 2, 3: 2, 4: 2, 5: 2}
    Phi = sympy.Matrix([[1, 1 / t], [0, 1]])
    for (n, b), dim in M.bidegree_table(4).items():
        assert dim == brute_force_dims(Phi, [1, 0], n, b)
    # per total degree this is a free C[t, y]-module on generators of degree 0 and 1
    for n in range(0, 6):
        assert sum(M.bidegree_table(n).get((n, b), 0) for b in range(n + 1)) == free_dims([0, 1], n)


def test_rank_two_kernel_basis():
    M = bl_glue(rank_two_problem(), [0])
    (vec,) = M.bases[0]
    # e2 - t^-1 e1 up to scale
    assert set(vec) == {(0, -1), (1, 0)} and vec[(0, -1)] == -vec[(1, 0)]


def test_torsion_is_not_regular():
    prob = identity_problem()
    prob.G = [Generator("e", 0, torsion=1)]
    with pytest.raises(NotRegular):
        bl_glue(prob, [0])


def test_singular_phi_is_not_invertible():
    prob = GluingProblem(F=[Generator("a", 0), Generator("b", 0)], G=[Generator("a", 0), Generator("b", 0)],
                         phi=lambda i, k: {0: 1} if k == 0 else {}, phi_low=lambda i: 0)
    with pytest.raises(NotInvertible):
        bl_glue(prob, [0])


def test_linear_algebra_helpers():
    rows = [[1, 2, 3], [2, 4, 6]]
    assert rank(rows, 3) == 1
    ker = kernel(rows, 3)
    assert len(ker) == 2
    for v in ker:
        assert sum(a * b for a, b in zip(rows[0], v)) == 0


def test_table_text_round_trip():
    table = {(-1, 0): 1, (0, 0): 1, (3, 2): 7}
    assert parse_table(format_table(table, "x")) == table


def golden(name):
    return parse_table((GOLDEN / name).read_text(encoding="utf-8"))


@pytest.mark.parametrize("va,name", [(vir_va(4), "v2_vir_K4.txt"), (sl2_va(4), "v2_sl2_K4.txt")],
                         ids=["vir", "sl2"])
def test_ker_y2_matches_golden(va, name):
    assert y2_kernel(va, 4) == golden(name)


@pytest.mark.parametrize("va,name", [(vir_va(4), "v2_vir_K4.txt"), (sl2_va(4), "v2_sl2_K4.txt")],
                         ids=["vir", "sl2"])
def test_glued_v2_matches_golden(va, name):
    assert glued_v2_table(ope_from_vertex(va), 4) == golden(name)


def test_generic_kernel_route_agrees_for_n2():
    va = vir_va(4)
    assert yn_kernel(va, 2, 4) == y2_kernel(va, 4)


def test_ker_y3_matches_golden():
    from opeglue.conformal import builtin_virasoro
    from opeglue.enveloping import EnvelopingVA
    va = EnvelopingVA(builtin_virasoro(), 9)
    assert yn_kernel(va, 3, 3, pole_bound=3, out_weight=9) == golden("y3_vir_W3.txt")


def test_ker_y3_is_stable_under_larger_truncations():
    from opeglue.conformal import builtin_virasoro
    from opeglue.enveloping import EnvelopingVA
    va = EnvelopingVA(builtin_virasoro(), 13)
    assert yn_kernel(va, 3, 3, pole_bound=4, out_weight=13) == golden("y3_vir_W3.txt")


def test_ker_y3_vacuum_row_by_hand():
    # three vacua: polynomials in x1 - x3, x2 - x3 of degree -N
    T = golden("y3_vir_W3.txt")
    assert [T[(N, 0)] for N in (-1, 0, 1)] == [2, 1, 0]


def test_yn_kernel_rejects_other_n():
    with pytest.raises(ValueError):
        yn_kernel(vir_va(2), 4, 1)


def test_reconstruction_vir():
    res = reconstruct_and_compare(ope_from_vertex(vir_va(4)), 4)
    assert res["verdict"] == "pass" and not res["differences"]


def test_factorization_vir():
    res = factorization_check(ope_from_vertex(vir_va(4)), 4)
    assert res["verdict"] == "pass"
    assert all(p["localization"] and p["diagonal_rank"] and p["diagonal_kernel"] for p in res["pieces"])


def test_uncertified_degrees_are_inconclusive():
    res = factorization_check(ope_from_vertex(vir_va(2)), 2, N_range=[3])
    assert {p["verdict"] for p in res["pieces"]} <= {"inconclusive", "pass"}
