"""The nine acceptance criteria, each at its stated cutoff or window.

Every test prints one ``criterion N: PASS|FAIL`` line as it finishes, and
the lines are repeated in an "acceptance criteria" section at the end of
the pytest run.  Criterion 9 re-runs pieces of 4 to 7 at enlarged windows
and reuses their results when they ran earlier in the session.
"""

import random
import time
from functools import lru_cache

import pytest

from opeglue.algebra_file import builtin_path, load_algebra
from opeglue.annihilation import jacobi_window_check, witt_isomorphism_check
from opeglue.conformal import builtin_sl2, builtin_virasoro, check_axioms
from opeglue.descent import (MUTATIONS, Mutation, build_transitions, check_cocycle, check_cocycle_triple,
                             check_commutativity, cocycle_triples, ope_from_vertex, required_window)
from opeglue.enveloping import EnvelopingVA, default_clearing, locality_order, verify_associativity, verify_axioms
from opeglue.exact_core import LocalizedPoly, MultiPoly
from opeglue.gluing import (bl_glue, factorization_check, glued_v2_table, identity_problem, rank_two_problem,
                            y2_kernel, yn_kernel)
from opeglue.tate_tower import delta_identity_check, descriptor, expand_in_chart, Mode
from tests.conftest import ACCEPTANCE_LINES, sl2_va, vir_va
from tests.test_gluing import brute_force_dims, golden

ALGEBRAS = {"Vir": builtin_virasoro, "Cur(sl2)": builtin_sl2}
ASSOC_CUTOFF = 6
ASSOC_BUDGET = 300.0  # seconds per algebra


def report(capsys, n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


# shared runs -----------------------------------------------------------------

@lru_cache(maxsize=None)
def associativity_run(name):
    va = EnvelopingVA(ALGEBRAS[name](), ASSOC_CUTOFF)
    triples = cocycle_triples(va)
    t0 = time.perf_counter()
    verdicts = {t: verify_associativity(va, *(va.state(m) for m in t))["verdict"] for t in triples}
    return verdicts, time.perf_counter() - t0


@lru_cache(maxsize=None)
def cocycle_run(name):
    D = build_transitions(ope_from_vertex(EnvelopingVA(ALGEBRAS[name](), ASSOC_CUTOFF)))
    triples = cocycle_triples(D.phi.va)
    res = check_cocycle(D, triples, emit=False)
    failing = {tuple(D.phi.va.parse_monomial(s) for s in d["triple"]): d["verdict"] for d in res["details"]}
    return {t: failing.get(t, "pass") for t in triples}


@lru_cache(maxsize=None)
def mutation_run(name, kind):
    """Commutativity in full; the cocycle scan stops at the first exact failure."""
    phi = ope_from_vertex(EnvelopingVA(ALGEBRAS[name](), ASSOC_CUTOFF), Mutation(kind))
    com = check_commutativity(phi)
    res = check_cocycle(build_transitions(phi), stop_on_fail=True)
    fails = [d for d in res["details"] if d["verdict"] == "fail"]
    return com["verdict"], res["verdict"], fails


# criteria --------------------------------------------------------------------

def test_criterion_1_lca_axioms(capsys):
    vir, sl2 = check_axioms(builtin_virasoro()), check_axioms(builtin_sl2())
    mutated = check_axioms(load_algebra(builtin_path("mutated_vir.json")))
    ok = (vir["passed"] and sl2["passed"] and not vir["failures"] and not sl2["failures"]
          and not mutated["passed"] and all(f["residual"] not in ("", "0") for f in mutated["failures"]))
    report(capsys, 1, ok, f"Vir/Cur residual-free; mutated table residual {mutated['failures'][0]['residual']}")


def test_criterion_2_annihilation_algebra(capsys):
    res = {name: jacobi_window_check(make(), 4) for name, make in ALGEBRAS.items()}
    witt = witt_isomorphism_check(6)
    ok = all(r["passed"] for r in res.values()) and witt["passed"]
    report(capsys, 2, ok, "Jacobi on |m| <= 4 for Vir and Cur(sl2); Witt re-indexing on window 6")


def test_criterion_3_vertex_algebra_axioms(capsys):
    cases = [(vir_va(8), "L", "L", 2), (sl2_va(6), "e", "f", 1)]
    ok, parts = True, []
    for va, a, b, want in cases:
        res = verify_axioms(va, axioms=("vacuum", "creation", "translation"))
        probes = [()] + [((i, -1),) for i in range(len(va.gens))]
        order = locality_order(va, va.generator_state(a), va.generator_state(b), probes)["order"]
        lam_degree = va.presentation.lambda_degree()
        ok &= res["verdict"] == "pass" and order == want == lam_degree + 1
        parts.append(f"{a}{b} order {order} at K={va.cutoff}")
    report(capsys, 3, ok, "vacuum/creation/translation exact; " + ", ".join(parts))


def test_criterion_4_associativity(capsys):
    ok, parts = True, []
    for name in ALGEBRAS:
        verdicts, seconds = associativity_run(name)
        passed = sum(v == "pass" for v in verdicts.values())
        ok &= passed == len(verdicts) and seconds <= ASSOC_BUDGET
        parts.append(f"{name} {passed}/{len(verdicts)} in {seconds:.0f}s")
    report(capsys, 4, ok, "three cleared expansions agree: " + ", ".join(parts))


def test_criterion_5_cocycle_and_mutations(capsys):
    ok, parts = True, []
    for name in ALGEBRAS:
        assoc, _ = associativity_run(name)
        coc = cocycle_run(name)
        same = set(coc) == set(assoc) and {t for t, v in coc.items() if v == "pass"} == \
            {t for t, v in assoc.items() if v == "pass"}
        ok &= same
        parts.append(f"{name} cocycle set == associativity set: {same}")
        for kind in MUTATIONS:
            com, verdict, fails = mutation_run(name, kind)
            good = com == "pass" and verdict == "fail" and bool(fails)
            ok &= good
            if not good:
                parts.append(f"{name}/{kind}: commutativity {com}, cocycle {verdict}")
    report(capsys, 5, ok, "; ".join(parts) + f"; {len(MUTATIONS)} mutations fail the cocycle, commutativity passes")


def test_criterion_6_beauville_laszlo(capsys):
    import sympy
    t = sympy.symbols("t")
    rank2 = bl_glue(rank_two_problem(), range(0, 6))
    ident = bl_glue(identity_problem(), range(0, 6))
    ok = rank2.verdict == ident.verdict == "pass"
    ok &= all(d == brute_force_dims(sympy.Matrix([[1, 1 / t], [0, 1]]), [1, 0], n, b)
              for (n, b), d in rank2.bidegree_table(4).items())
    ok &= all(d == brute_force_dims(sympy.Matrix([[1]]), [0], n, b) for (n, b), d in ident.bidegree_table(4).items())
    report(capsys, 6, ok, f"rank-2 dims {rank2.dims}, identity dims {ident.dims}; brute-force oracle agrees")


def test_criterion_7_reconstruction(capsys):
    ok, parts = True, []
    for name, va, gold in (("Vir", vir_va(4), "v2_vir_K4.txt"), ("Cur(sl2)", sl2_va(4), "v2_sl2_K4.txt")):
        phi = ope_from_vertex(va)
        glued = glued_v2_table(phi, 4)
        kernel = y2_kernel(va, 4)
        fact = factorization_check(phi, 4)
        good = glued == kernel == golden(gold) and fact["verdict"] == "pass"
        ok &= good
        parts.append(f"{name} {len(glued)} bidegrees, factorization {fact['verdict']}")
    y3 = yn_kernel(EnvelopingVA(builtin_virasoro(), 9), 3, 3, pole_bound=3, out_weight=9)
    ok &= y3 == golden("y3_vir_W3.txt")
    report(capsys, 7, ok, "; ".join(parts) + "; goldens match (Ker Y^2 both, Ker Y^3 Vir)")


def test_criterion_8_region_expansions(capsys):
    delta = delta_identity_check(6)
    V = ("x1", "x2", "x3")
    chart = descriptor(V, [2], [(0, 2, Mode.LAURENT), (1, 2, Mode.LAURENT)])
    rng = random.Random(20261016)

    def sample():
        terms = {tuple(rng.randint(0, 2) for _ in V): rng.randint(-3, 3) for _ in range(rng.randint(0, 3))}
        den = {p: rng.randint(0, 2) for p in rng.sample([(0, 1), (0, 2), (1, 2)], rng.randint(0, 2))}
        return LocalizedPoly(MultiPoly(V, terms), den)

    bad = 0
    for _ in range(100):
        a, b = sample(), sample()
        ea, eb = expand_in_chart(a, chart, order=6), expand_in_chart(b, chart, order=6)
        bad += not expand_in_chart(a * b, chart, order=6).agrees_with(ea * eb)
        bad += not expand_in_chart(a + b, chart, order=6).agrees_with(ea + eb)
    ok = delta["verdict"] == "pass" and bad == 0
    report(capsys, 8, ok, f"delta identity at order 6; ring homomorphism on 100 random pairs ({bad} failures)")


def test_criterion_9_enlarged_windows(capsys):
    flips = []
    checked = 0
    # 4: associativity with doubled clearing exponents and margin, on a spread of triples
    for name in ALGEBRAS:
        verdicts, _ = associativity_run(name)
        va = EnvelopingVA(ALGEBRAS[name](), ASSOC_CUTOFF)
        triples = sorted(verdicts)
        step = max(1, len(triples) // 150)
        for t in triples[::step]:
            states = [va.state(m) for m in t]
            A, B, C = default_clearing(va, *states)
            wide = verify_associativity(va, *states, orders={"A": 2 * A, "B": 2 * B, "C": 2 * C, "margin": 4})
            checked += 1
            if verdicts[t] == "fail" and wide["verdict"] == "pass":
                flips.append(("associativity", name, t))
    # 5: every failing mutated triple, and a spread of passing ones, at a doubled window
    for name in ALGEBRAS:
        for kind in MUTATIONS:
            _, _, fails = mutation_run(name, kind)
            phi = ope_from_vertex(EnvelopingVA(ALGEBRAS[name](), ASSOC_CUTOFF), Mutation(kind))
            D = build_transitions(phi)
            for d in fails:
                t = tuple(phi.va.parse_monomial(s) for s in d["triple"])
                wide = check_cocycle_triple(D, t, order=2 * required_window(phi, t), margin=4)
                checked += 1
                if wide["verdict"] == "pass":
                    flips.append(("cocycle", name, kind, d["triple"]))
        coc = cocycle_run(name)
        phi = ope_from_vertex(EnvelopingVA(ALGEBRAS[name](), ASSOC_CUTOFF))
        D = build_transitions(phi)
        triples = sorted(coc)
        for t in triples[::max(1, len(triples) // 150)]:
            wide = check_cocycle_triple(D, t, order=2 * required_window(phi, t), margin=4)
            checked += 1
            if coc[t] == "fail" and wide["verdict"] == "pass":
                flips.append(("cocycle", name, t))
    # 6: more degrees
    if bl_glue(rank_two_problem(), range(0, 12)).verdict != "pass":
        flips.append(("bl", "rank two"))
    # 7: larger vertex algebra truncation behind V2, larger pole bound and output weight for Y^3
    for name, gold in (("Vir", "v2_vir_K4.txt"), ("Cur(sl2)", "v2_sl2_K4.txt")):
        va = EnvelopingVA(ALGEBRAS[name](), 6)
        if glued_v2_table(ope_from_vertex(va), 4) != golden(gold):
            flips.append(("glue", name))
    if yn_kernel(EnvelopingVA(builtin_virasoro(), 13), 3, 3, pole_bound=4, out_weight=13) != golden("y3_vir_W3.txt"):
        flips.append(("Ker Y^3",))
    report(capsys, 9, not flips, f"{checked} verdicts re-run at doubled windows, {len(flips)} fail->pass flips")
