"""The OPE of an enveloping vertex algebra as gluing data over 3-space.

Charts of A^2 and A^3 are :class:`RingDescriptor` s.  An :class:`OPEDatum`
holds the map (a, b) -> Y(a, x - y) b coefficient by coefficient, possibly
perturbed by a named mutation.  :func:`build_transitions` turns it into the
two merge maps per pair (i, j) and the factor permutations, and
:func:`check_cocycle` composes them on the triple overlaps, clears the
denominators and compares the three results as polynomials in x1, x2, x3.

Everything is translation equivariant: chart modules are free on tensor
products of PBW monomials and the OPE coefficients are constants, so a
module element over an overlap is a map from tower exponents to vectors.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from math import factorial
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .enveloping import VACUUM, EnvelopingVA, Monomial, Raw, _axpy
from .exact_core import LocalizedPoly, MultiPoly, from_cleared
from .tate_tower import (Mode, RingDescriptor, TowerSeries, TruncationError, descriptor,
                         expand_in_chart, to_polynomial)

X3 = ("x1", "x2", "x3")
XY = ("x", "y")
L, P = Mode.LAURENT, Mode.POWER_SERIES
PAIRS = ((0, 1), (0, 2), (1, 2))


# ---------------------------------------------------------------------------
# charts

@dataclass(frozen=True)
class Chart:
    name: str
    descriptor: RingDescriptor


def _third(i: int, j: int) -> int:
    return 3 - i - j


def _charts() -> Dict[str, Chart]:
    out = {
        "U": descriptor(XY, (0, 1), inverted=[(0, 1)]),
        "HatDelta": descriptor(XY, (1,), [(0, 1, P)]),
        "TildeDelta": descriptor(XY, (1,), [(0, 1, L)]),
        "Z1": descriptor(X3, (0, 1, 2), inverted=PAIRS),
        "Z3": descriptor(X3, (2,), [(0, 2, P), (1, 2, P)]),
    }
    for i, j in PAIRS:
        k = _third(i, j)
        tag = f"{i + 1}{j + 1}"
        base = tuple(sorted((j, k)))
        out[f"Z2_{tag}"] = descriptor(X3, base, [(i, j, P)], inverted=[base])
        out[f"Z12_{tag}"] = descriptor(X3, base, [(i, j, L)], inverted=[base])
        out[f"Z23_{tag}"] = descriptor(X3, (j,), [(k, j, L), (i, j, P)])
        out[f"Z123_{tag}"] = descriptor(X3, (j,), [(k, j, L), (i, j, L)])
    return {name: Chart(name, d) for name, d in out.items()}


CHARTS: Dict[str, Chart] = _charts()


def chart(name: str) -> Chart:
    try:
        return CHARTS[name]
    except KeyError:
        raise KeyError(f"unknown chart {name!r}; known: {', '.join(sorted(CHARTS))}") from None


# ---------------------------------------------------------------------------
# OPE datum and mutations

Perturbation = Callable[[int], Raw]


class OPEDatum:
    """phi(u, v)[e] = coefficient of (x - y)^e in Y(u, x - y) v.

    Coefficients are exact and computed on demand for basis monomials.  A
    perturbation eps is added on one ordered pair (u, v) and, so that
    commutativity survives, its skew-symmetric partner
    eps(v, u)[e] = sum_k T^k / k! (-1)^(e-k) eps(u, v)[e-k]
    on (v, u).
    """

    def __init__(self, va: EnvelopingVA, mutation: Optional["Mutation"] = None):
        self.va = va
        self.cutoff = va.cutoff
        self.mutation = mutation
        self._eps: Dict[Tuple[Monomial, Monomial], Perturbation] = {}
        self._cache: Dict[Tuple[Monomial, Monomial, int], Raw] = {}
        self._pole: Dict[Tuple[Monomial, Monomial], int] = {}
        self._Tpow: Dict[Tuple[Monomial, int], Raw] = {}
        if mutation is not None:
            mutation.install(self)

    # perturbations ---------------------------------------------------------
    def perturb(self, u: Monomial, v: Monomial, eps: Mapping[int, Raw]) -> None:
        if u == v:
            raise ValueError("a perturbation on a diagonal pair cannot be made skew-symmetric this way")
        eps = {e: dict(r) for e, r in eps.items() if r}
        if not eps:
            raise ValueError("empty perturbation")
        wt = self.va.weight(u) + self.va.weight(v)
        for e, r in eps.items():
            if any(self.va.weight(m) != wt + e for m in r):
                raise ValueError("perturbations must keep the weight grading")
        lo = min(eps)
        self._eps[(u, v)] = lambda e: eps.get(e, {})

        def partner(e: int) -> Raw:
            out: Raw = {}
            for k in range(0, e - lo + 1):
                src = eps.get(e - k)
                if src:
                    sign = -1 if (e - k) % 2 else 1
                    for m, c in src.items():
                        _axpy(out, self.T_power(m, k), sign * c * _inv_fact(k))
            return out

        self._eps[(v, u)] = partner
        self._cache.clear()
        self._pole.clear()

    def T_power(self, m: Monomial, k: int) -> Raw:
        key = (m, k)
        hit = self._Tpow.get(key)
        if hit is None:
            if k == 0:
                hit = {m: 1}
            else:
                hit = {}
                for m2, c2 in self.T_power(m, k - 1).items():
                    _axpy(hit, self.va._T_mono(m2), c2)
            self._Tpow[key] = hit
        return hit

    # coefficients ------------------------------------------------------------
    def coefficient(self, u: Monomial, v: Monomial, e: int) -> Raw:
        key = (u, v, e)
        hit = self._cache.get(key)
        if hit is None:
            hit = self.va._field_mode(u, -e - 1, v)
            eps = self._eps.get((u, v))
            if eps is not None:
                extra = eps(e)
                if extra:
                    hit = dict(hit)
                    _axpy(hit, extra, 1)
            self._cache[key] = hit
        return hit

    def coefficient_vec(self, x: Raw, y: Raw, e: int) -> Raw:
        out: Raw = {}
        for mx, cx in x.items():
            for my, cy in y.items():
                _axpy(out, self.coefficient(mx, my, e), cx * cy)
        return out

    def lowest_exponent(self, u: Monomial, v: Monomial) -> int:
        # an output of negative weight is zero
        return -(self.va.weight(u) + self.va.weight(v))

    def pole_order(self, u: Monomial, v: Monomial) -> int:
        key = (u, v)
        if key not in self._pole:
            order = 0
            for e in range(self.lowest_exponent(u, v), 0):
                if self.coefficient(u, v, e):
                    order = -e
                    break
            self._pole[key] = order
        return self._pole[key]

    def pole_order_vec(self, x: Raw, y: Raw) -> int:
        return max((self.pole_order(mx, my) for mx in x for my in y), default=0)

    def series(self, u: Monomial, v: Monomial, e_max: Optional[int] = None) -> Dict[int, Raw]:
        """All nonzero coefficients with exponent up to e_max (default: the
        largest one whose output weight fits in the cutoff)."""
        wt = self.va.weight(u) + self.va.weight(v)
        top = self.cutoff - wt if e_max is None else e_max
        out = {}
        for e in range(self.lowest_exponent(u, v), top + 1):
            c = self.coefficient(u, v, e)
            if c:
                out[e] = c
        return out


def _inv_fact(k: int):
    from fractions import Fraction
    f = factorial(k)
    return 1 if f == 1 else Fraction(1, f)


def ope_from_vertex(va: EnvelopingVA, mutation: Optional["Mutation"] = None) -> OPEDatum:
    return OPEDatum(va, mutation)


@dataclass(frozen=True)
class Mutation:
    """A scripted perturbation of phi on one ordered pair of basis states.

    kind:
      pole1        add (x-y)^-1 * s, s a state of weight wt(u) + wt(v) - 1
      pole2        add (x-y)^-2 * s, s of weight wt(u) + wt(v) - 2
      scale_polar  add the polar part of Y(u, x-y) v again (doubling it)
      regular      add (x-y)^0 * s, s of weight wt(u) + wt(v)
      shift        add (x-y)^0 * T(u_(0) v)
    ``state`` picks s; by default the first PBW monomial of that weight.
    """

    kind: str
    pair: Optional[Tuple[str, str]] = None
    state: Optional[str] = None

    def resolve_pair(self, va: EnvelopingVA) -> Tuple[Monomial, Monomial]:
        if self.pair is not None:
            return va.parse_monomial(self.pair[0]), va.parse_monomial(self.pair[1])
        return default_mutation_pair(va)

    def install(self, phi: OPEDatum) -> None:
        va = phi.va
        u, v = self.resolve_pair(va)
        wt = va.weight(u) + va.weight(v)

        def pick(w: int) -> Raw:
            if self.state is not None:
                return {va.parse_monomial(self.state): 1}
            basis = va.basis(w)
            if not basis:
                raise ValueError(f"no state of weight {w} for mutation {self.kind}")
            return {basis[0]: 1}

        if self.kind == "pole1":
            eps = {-1: pick(wt - 1)}
        elif self.kind == "pole2":
            eps = {-2: pick(wt - 2)}
        elif self.kind == "scale_polar":
            eps = {e: dict(phi.coefficient(u, v, e)) for e in range(phi.lowest_exponent(u, v), 0)}
        elif self.kind == "regular":
            eps = {0: pick(wt)}
        elif self.kind == "shift":
            eps = {0: {}}
            for m, c in phi.coefficient(u, v, -1).items():
                _axpy(eps[0], va._T_mono(m), c)
        else:
            raise ValueError(f"unknown mutation {self.kind!r}; known: {', '.join(MUTATIONS)}")
        phi.perturb(u, v, eps)

    def to_json(self) -> dict:
        return {"kind": self.kind, "pair": list(self.pair) if self.pair else None, "state": self.state}


MUTATIONS = ("pole1", "pole2", "scale_polar", "regular", "shift")


def default_mutation_pair(va: EnvelopingVA) -> Tuple[Monomial, Monomial]:
    """(g1_{-1}|0>, g2_{-1}|0>) when there are two generators, otherwise
    (g_{-1}|0>, g_{-2}|0>)."""
    u = ((0, -1),)
    v = ((1, -1),) if len(va.gens) > 1 else ((0, -2),)
    return u, v


def load_mutation(source: str) -> Mutation:
    """A mutation by name, or from a JSON script {"kind", "pair", "state"}."""
    if source in MUTATIONS:
        return Mutation(source)
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
        pair = doc.get("pair")
        return Mutation(doc["kind"], tuple(pair) if pair else None, doc.get("state"))
    raise ValueError(f"unknown mutation {source!r}; known: {', '.join(MUTATIONS)} or a JSON script path")


# ---------------------------------------------------------------------------
# commutativity

def check_commutativity(phi: OPEDatum, samples: Optional[Iterable[Monomial]] = None) -> dict:
    """phi(v, u)[e] = sum_k T^k/k! (-1)^(e-k) phi(u, v)[e-k] for all sample
    pairs and every exponent whose output weight fits in the cutoff."""
    va = phi.va
    samples = list(samples) if samples is not None else va.basis_upto()
    failures = []
    checked = 0
    for idx, u in enumerate(samples):
        for v in samples[idx:]:
            wt = va.weight(u) + va.weight(v)
            if wt > phi.cutoff:
                continue
            lo = phi.lowest_exponent(u, v)
            for e in range(lo, phi.cutoff - wt + 1):
                rhs: Raw = {}
                for k in range(0, e - lo + 1):
                    src = phi.coefficient(u, v, e - k)
                    if src:
                        sign = -1 if (e - k) % 2 else 1
                        for m, c in src.items():
                            _axpy(rhs, phi.T_power(m, k), sign * c * _inv_fact(k))
                lhs = phi.coefficient(v, u, e)
                checked += 1
                if lhs != rhs:
                    res = dict(lhs)
                    _axpy(res, rhs, -1)
                    failures.append({"u": va.format_monomial(u), "v": va.format_monomial(v), "exponent": e,
                                     "residual": _fmt(va, res)})
    return {"name": "commutativity", "verdict": "fail" if failures else "pass",
            "checked": checked, "failures": failures}


def _fmt(va: EnvelopingVA, r: Raw) -> str:
    if not r:
        return "0"
    return " + ".join(f"{c}*{va.format_monomial(m)}" for m, c in sorted(r.items()))


# ---------------------------------------------------------------------------
# transitions


@dataclass
class Transition:
    name: str
    source: str
    target: str
    apply: Callable


@dataclass
class DescentDatum:
    """Chart modules over the A^3 covering plus transition maps.

    The module on Z1 is free on V(x)V(x)V, on Z2^(ij) on V(x)V (the merged
    point x_j and the spectator x_k), on Z3 on V.
    """

    phi: OPEDatum
    charts: Dict[str, Chart]
    transitions: Dict[str, Transition]
    cocycle: Optional[dict] = None


@dataclass
class PairElement:
    """An element of the Z2^(ij) module over Z12^(ij): merged state at x_j,
    spectator at x_k, as a series in (x_i - x_j)."""

    pair: Tuple[int, int]
    series: Dict[int, Raw]
    spectator: Monomial


def _merge_first(phi: OPEDatum, i: int, j: int, triple: Sequence[Monomial], e1: int) -> Raw:
    # Case I: id (x) phi on the factors at x_i and x_j
    return phi.coefficient(triple[i], triple[j], e1)


def _second_pair(i: int, j: int) -> Tuple[int, int]:
    k = _third(i, j)
    return (min(j, k), max(j, k))


def phi12(phi: OPEDatum, ij: Tuple[int, int], triple: Sequence[Monomial], e_range: Iterable[int]) -> PairElement:
    i, j = ij
    series = {}
    for e in e_range:
        c = _merge_first(phi, i, j, triple, e)
        if c:
            series[e] = c
    return PairElement(ij, series, triple[_third(i, j)])


def phi23_coefficient(phi: OPEDatum, ij: Tuple[int, int], merged: Raw, spectator: Monomial, e2: int) -> Raw:
    """Case II: phi applied to the two remaining points p < q, in x_p - x_q."""
    i, j = ij
    k = _third(i, j)
    lone = {spectator: 1}
    if k < j:
        return phi.coefficient_vec(lone, merged, e2)
    return phi.coefficient_vec(merged, lone, e2)


def permute_factors(element: Mapping[Tuple[Tuple[int, Monomial], ...], object], sigma: Mapping[int, int]):
    """Case III: relabel the points of a tensor element {((point, state), ...): coeff}."""
    out = {}
    for key, c in element.items():
        new = tuple(sorted((sigma.get(p, p), m) for p, m in key))
        out[new] = c
    return out


def build_transitions(phi: OPEDatum) -> DescentDatum:
    transitions: Dict[str, Transition] = {}
    for i, j in PAIRS:
        tag = f"{i + 1}{j + 1}"
        transitions[f"phi12_{tag}"] = Transition(
            f"phi12_{tag}", "Z1", f"Z2_{tag}",
            (lambda ij: lambda triple, e_range: phi12(phi, ij, triple, e_range))((i, j)))
        transitions[f"phi23_{tag}"] = Transition(
            f"phi23_{tag}", f"Z2_{tag}", "Z3",
            (lambda ij: lambda merged, spectator, e2: phi23_coefficient(phi, ij, merged, spectator, e2))((i, j)))
    for a in PAIRS:
        for b in PAIRS:
            if a != b:
                ta, tb = f"{a[0] + 1}{a[1] + 1}", f"{b[0] + 1}{b[1] + 1}"
                sigma = _transposition_between(a, b)
                transitions[f"perm_{ta}_{tb}"] = Transition(
                    f"perm_{ta}_{tb}", f"Z2_{ta}", f"Z2_{tb}",
                    (lambda s: lambda element: permute_factors(element, s))(sigma))
    return DescentDatum(phi, dict(CHARTS), transitions)


def _transposition_between(a: Tuple[int, int], b: Tuple[int, int]) -> Dict[int, int]:
    """The transposition of points carrying the pair a to the pair b
    (a fixed point swap when the pairs share a point)."""
    moved = set(a) ^ set(b)
    if not moved:
        return {}
    p, r = sorted(moved)
    return {p: r, r: p}


# ---------------------------------------------------------------------------
# cocycle check

_MONO_CACHE: Dict[Tuple[str, int, int], Tuple[Tuple[Tuple[int, int], object], ...]] = {}
_POLY_CACHE: Dict[Tuple[str, Tuple[int, int]], Tuple[Tuple[Tuple[int, ...], object], ...]] = {}
_CLEAR_CACHE: Dict[Tuple[str, int, int, int], Tuple[Tuple[Tuple[int, int], object], ...]] = {}


def _chart_name(ij: Tuple[int, int]) -> str:
    return f"Z123_{ij[0] + 1}{ij[1] + 1}"


def _difference_power(ij_chart: str, p: int, q: int, e: int) -> Tuple[Tuple[Tuple[int, int], object], ...]:
    """(x_p - x_q)^e in a triple-overlap chart, as ((exps, coeff), ...)."""
    key = (ij_chart, p, q, e)
    hit = _MONO_CACHE.get(key)
    if hit is None:
        desc = CHARTS[ij_chart].descriptor
        lp = LocalizedPoly.inverse_difference(X3, p, q, -e) if e < 0 else \
            LocalizedPoly.from_poly(MultiPoly.difference(X3, p, q) ** e)
        s = expand_in_chart(lp, desc, order=abs(e) + 1)
        hit = tuple((ex, c.numerator.constant_term()) for ex, c in s.terms.items())
        _MONO_CACHE[key] = hit
    return hit


def _placement(ij: Tuple[int, int], e1: int, e2: int) -> Tuple[Tuple[int, int], object]:
    """Where (x_i - x_j)^e1 (x_p - x_q)^e2 sits in Z123^(ij): the product of
    the two chart expansions is a single signed monomial."""
    name = _chart_name(ij)
    i, j = ij
    p, q = _second_pair(i, j)
    a = _difference_power(name, i, j, e1)
    b = _difference_power(name, p, q, e2)
    if len(a) != 1 or len(b) != 1:
        raise ArithmeticError("merge variables must be tower monomials in the triple overlap")
    (ea, ca), (eb, cb) = a[0], b[0]
    return (ea[0] + eb[0], ea[1] + eb[1]), ca * cb


def _clearing(ij: Tuple[int, int], A: int, B: int, C: int):
    name = _chart_name(ij)
    key = (name, A, B, C)
    hit = _CLEAR_CACHE.get(key)
    if hit is None:
        poly = (MultiPoly.difference(X3, 0, 1) ** A) * (MultiPoly.difference(X3, 0, 2) ** B) * \
               (MultiPoly.difference(X3, 1, 2) ** C)
        s = expand_in_chart(LocalizedPoly.from_poly(poly), CHARTS[name].descriptor)
        hit = tuple(sorted((ex, c.numerator.constant_term()) for ex, c in s.terms.items()))
        _CLEAR_CACHE[key] = hit
    return hit


def _global(ij: Tuple[int, int], exps: Tuple[int, int]):
    name = _chart_name(ij)
    key = (name, exps)
    hit = _POLY_CACHE.get(key)
    if hit is None:
        poly = to_polynomial(TowerSeries.monomial(CHARTS[name].descriptor, exps))
        hit = tuple(poly.terms.items())
        _POLY_CACHE[key] = hit
    return hit


class _Composite:
    """phi23^(ij) o phi12^(ij) on one triple, restricted to Z123^(ij).

    Coefficient at tower exponents (inner, outer) for output weight d; the
    outer exponent is the first merge exponent e1 and must lie in the
    window [lo, hi], otherwise the coefficient is unknown (None)."""

    def __init__(self, D: DescentDatum, ij: Tuple[int, int], triple: Sequence[Monomial], hi: int):
        self.D, self.ij, self.triple, self.hi = D, ij, triple, hi
        self.phi = D.phi
        i, j = ij
        self.lo = -self.phi.pole_order(triple[i], triple[j])
        self.wt = sum(self.phi.va.weight(m) for m in triple)
        self._first: Dict[int, Raw] = {}
        self._cache: Dict[Tuple[int, int], Optional[Raw]] = {}
        self.t12 = D.transitions[f"phi12_{i + 1}{j + 1}"]
        self.t23 = D.transitions[f"phi23_{i + 1}{j + 1}"]
        self.spectator = triple[_third(i, j)]

    def first(self, e1: int) -> Raw:
        hit = self._first.get(e1)
        if hit is None:
            hit = self.t12.apply(self.triple, [e1]).series.get(e1, {})
            self._first[e1] = hit
        return hit

    def coefficient(self, d: int, r: int) -> Optional[Raw]:
        """Weight-d coefficient at outer exponent r (inner = d - wt - r)."""
        if r < self.lo:
            return {}
        if r > self.hi:
            return None
        key = (d, r)
        if key in self._cache:
            return self._cache[key]
        e2 = d - self.wt - r
        merged = self.first(r)
        out: Raw = {}
        if merged:
            (p, rr), sign = _placement(self.ij, r, e2)
            assert (p, rr) == (e2, r)
            out = self.t23.apply(merged, self.spectator, e2)
            if sign != 1 and out:
                out = {m: sign * c for m, c in out.items()}
        self._cache[key] = out
        return out


def _cleared(comp: _Composite, d: int, A: int, B: int, C: int, margin: int):
    """Cleared weight-d part, converted to global polynomials.

    Returns (poly: {mono: {x-exps: coeff}}, non_polynomial, unknown)."""
    clear = _clearing(comp.ij, A, B, C)
    Dg = d - comp.wt + A + B + C
    poly: Dict[Monomial, Dict[Tuple[int, ...], object]] = {}
    bad, unknown = [], []
    for r2 in range(-margin, Dg + margin + 1):
        p2 = Dg - r2
        acc: Raw = {}
        missing = False
        for (p0, r0), c0 in clear:
            src = comp.coefficient(d, r2 - r0)
            if src is None:
                missing = True
                continue
            if src:
                _axpy(acc, src, c0)
        if missing:
            unknown.append((p2, r2))
            continue
        if not acc:
            continue
        if p2 < 0 or r2 < 0:
            bad.append((p2, r2))
            continue
        for gex, gc in _global(comp.ij, (p2, r2)):
            for m, c in acc.items():
                slot = poly.setdefault(m, {})
                x = slot.get(gex, 0) + gc * c
                if x:
                    slot[gex] = x
                else:
                    del slot[gex]
    return {m: t for m, t in poly.items() if t}, bad, unknown


def clearing_exponents(phi: OPEDatum, triple: Sequence[Monomial]) -> Tuple[int, int, int]:
    """(A, B, C) for (x1-x2)^A (x1-x3)^B (x2-x3)^C: the pole orders of phi on
    the pairs (a, b), (a, c), (b, c)."""
    a, b, c = triple
    return phi.pole_order(a, b), phi.pole_order(a, c), phi.pole_order(b, c)


def required_window(phi: OPEDatum, triple: Sequence[Monomial], margin: int = 2) -> int:
    """Outer window needed so every cleared coefficient in the scan is exact."""
    A, B, C = clearing_exponents(phi, triple)
    wt = sum(phi.va.weight(m) for m in triple)
    return phi.cutoff - wt + A + B + C + margin


def check_cocycle_triple(D: DescentDatum, triple: Sequence[Monomial], order: Optional[int] = None,
                         margin: int = 2, emit: bool = False) -> dict:
    phi = D.phi
    va = phi.va
    A, B, C = clearing_exponents(phi, triple)
    wt = sum(va.weight(m) for m in triple)
    hi = required_window(phi, triple, margin) if order is None else order
    comps = {ij: _Composite(D, ij, triple, hi) for ij in PAIRS}
    mismatches, nonpoly, unknown = [], [], []
    candidate = {}
    for d in range(0, phi.cutoff + 1):
        if d - wt + A + B + C < 0:
            continue
        results = {}
        for ij, comp in comps.items():
            poly, bad, unk = _cleared(comp, d, A, B, C, margin)
            results[ij] = poly
            tag = _chart_name(ij)
            nonpoly.extend({"weight": d, "chart": tag, "exponents": list(x)} for x in bad)
            unknown.extend({"weight": d, "chart": tag, "exponents": list(x)} for x in unk)
        ref = results[(1, 2)]
        for ij in ((0, 2), (0, 1)):
            if results[ij] != ref:
                for m in sorted(set(results[ij]) | set(ref)):
                    r = _poly_diff(results[ij].get(m, {}), ref.get(m, {}))
                    if r:
                        mismatches.append({"weight": d, "compare": f"{_chart_name((1, 2))} vs {_chart_name(ij)}",
                                           "state": va.format_monomial(m), "residual": _fmt_poly(r)})
        if emit:
            for m, t in ref.items():
                candidate[va.format_monomial(m)] = from_cleared(MultiPoly(X3, t), {(1, 2): A, (1, 3): B, (2, 3): C})
    # Exact evidence decides a fail; missing coefficients make a clean run
    # inconclusive rather than pass.
    if mismatches or nonpoly:
        verdict = "fail"
    elif unknown:
        verdict = "inconclusive"
    else:
        verdict = "pass"
    out = {"triple": [va.format_monomial(m) for m in triple], "verdict": verdict, "clearing": [A, B, C],
           "window": [min(c.lo for c in comps.values()), hi], "mismatches": mismatches,
           "non_polynomial": nonpoly, "unknown": len(unknown)}
    if emit and verdict == "pass":
        out["candidate"] = candidate
    return out


def _poly_diff(a: Mapping, b: Mapping) -> Dict:
    out = dict(a)
    for k, v in b.items():
        x = out.get(k, 0) - v
        if x:
            out[k] = x
        else:
            out.pop(k, None)
    return out


def _fmt_poly(t: Mapping) -> str:
    return repr(MultiPoly(X3, t))


def reexpansion_check(D: DescentDatum, triple: Sequence[Monomial], candidate: Mapping[str, LocalizedPoly],
                      order: int = 6) -> dict:
    """Expand the emitted candidate in each triple overlap and compare with
    the composite there, on every coefficient both sides know exactly."""
    va = D.phi.va
    wt = sum(va.weight(m) for m in triple)
    failures, compared = [], 0
    by_state = {va.parse_monomial(s): lp for s, lp in candidate.items()}
    for ij in PAIRS:
        comp = _Composite(D, ij, triple, hi=10 ** 6)
        desc = CHARTS[_chart_name(ij)].descriptor
        series = {m: expand_in_chart(lp, desc, order=order) for m, lp in by_state.items()}
        lo_out = comp.lo
        for d in range(0, D.phi.cutoff + 1):
            for r in range(lo_out, lo_out + order + 1):
                p = d - wt - r
                known = comp.coefficient(d, r)
                for m in set(series) | set(known):
                    if va.weight(m) != d:
                        continue
                    try:
                        got = series[m].coefficient((p, r)) if m in series else None
                    except TruncationError:
                        continue
                    g = got.numerator.constant_term() if got is not None and not got.is_zero() else 0
                    compared += 1
                    if g != known.get(m, 0):
                        failures.append({"chart": _chart_name(ij), "state": va.format_monomial(m),
                                         "exponents": [p, r], "expected": str(known.get(m, 0)), "got": str(g)})
    return {"verdict": "fail" if failures else "pass", "compared": compared, "failures": failures}


def cocycle_triples(va: EnvelopingVA, max_weight: Optional[int] = None) -> List[Tuple[Monomial, Monomial, Monomial]]:
    """All ordered basis triples of total weight <= max_weight (default cutoff)."""
    top = va.cutoff if max_weight is None else max_weight
    basis = va.basis_upto(top)
    out = []
    for a in basis:
        wa = va.weight(a)
        for b in basis:
            wb = va.weight(b)
            if wa + wb > top:
                continue
            for c in basis:
                if wa + wb + va.weight(c) <= top:
                    out.append((a, b, c))
    return out


def thread_count() -> int:
    """Worker processes for the cocycle scan, from WORKBENCH_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("WORKBENCH_THREADS", "1")))
    except ValueError:
        return 1


_WORKER: Dict[str, DescentDatum] = {}


def _worker_init(presentation, cutoff: int, mutation: Optional[Mutation]) -> None:
    _WORKER["D"] = build_transitions(ope_from_vertex(EnvelopingVA(presentation, cutoff), mutation))


def _worker_run(args) -> dict:
    triple, window, margin, emit = args
    return check_cocycle_triple(_WORKER["D"], triple, window, margin, emit)


def _scan(D: DescentDatum, samples, window, margin, emit, threads):
    phi = D.phi
    # hand-installed perturbations cannot be rebuilt in a worker
    rebuildable = (phi.mutation is not None or not phi._eps) and phi.va._override is None
    if threads <= 1 or not rebuildable or len(samples) < 64:
        for triple in samples:
            yield check_cocycle_triple(D, tuple(triple), window, margin, emit)
        return
    from concurrent.futures import ProcessPoolExecutor
    args = [(tuple(t), window, margin, emit) for t in samples]
    with ProcessPoolExecutor(threads, initializer=_worker_init,
                             initargs=(phi.va.presentation, phi.cutoff, phi.mutation)) as pool:
        yield from pool.map(_worker_run, args, chunksize=max(1, len(args) // (8 * threads)))


def check_cocycle(D: DescentDatum, samples: Optional[Iterable[Sequence[Monomial]]] = None,
                  orders: Optional[Mapping[str, int]] = None, emit: bool = False,
                  stop_on_fail: bool = False, threads: Optional[int] = None) -> dict:
    """Run the cocycle comparison on sample triples (default: all triples of
    total weight <= cutoff).  ``orders`` may set ``window`` (outer exponent
    bound of the overlap expansions) and ``margin``.  ``threads`` worker
    processes (default WORKBENCH_THREADS) split the triples; results keep
    the input order."""
    orders = dict(orders or {})
    samples = list(samples) if samples is not None else cocycle_triples(D.phi.va)
    threads = thread_count() if threads is None else threads
    results = []
    counts = {"pass": 0, "fail": 0, "inconclusive": 0}
    for res in _scan(D, samples, orders.get("window"), orders.get("margin", 2), emit, threads):
        counts[res["verdict"]] += 1
        if res["verdict"] != "pass" or emit:
            results.append(res)
        if stop_on_fail and res["verdict"] == "fail":
            break
    verdict = "fail" if counts["fail"] else ("inconclusive" if counts["inconclusive"] else "pass")
    report = {"name": "cocycle", "verdict": verdict, "counts": counts, "triples": len(samples), "details": results}
    D.cocycle = report
    return report
