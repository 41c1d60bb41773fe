"""The Lie algebra of modes Lie R of a Lie conformal algebra.

Lie R is spanned by symbols a_m (a in R, m in Z) modulo (Ta)_m = -m a_(m-1).
Elements are kept in normal form: rational combinations of pure generator
modes.  The bracket is

    [a_m, b_n] = sum_j C(m, j) (a_(j) b)_(m+n-j)

with C(m, j) the falling-factorial binomial, valid for negative m too.
Lie R_- is the span of modes m >= 0 and Lie R_+ the span of m < 0; the map
a -> a_(-1) identifies R with Lie R_+.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, Iterable, List, Mapping, Tuple

from .conformal import LCAElement, LCAPresentation, T_ONLY, builtin_virasoro, nth_product
from .exact_core import MultiPoly, StructureError, falling_binomial, q

Mode = Tuple[str, int]


class LieRElement:
    __slots__ = ("presentation", "terms")

    def __init__(self, presentation: LCAPresentation, terms: Mapping[Mode, object] | None = None):
        self.presentation = presentation
        clean: Dict[Mode, Fraction] = {}
        for (g, m), c in (terms or {}).items():
            if g not in presentation.index:
                raise StructureError(f"unknown generator {g!r}")
            c = q(c)
            if c:
                clean[(g, int(m))] = clean.get((g, int(m)), 0) + c
                if not clean[(g, int(m))]:
                    del clean[(g, int(m))]
        self.terms = clean

    @classmethod
    def mode(cls, presentation, g: str, m: int, coeff=1) -> "LieRElement":
        return cls(presentation, {(g, m): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LieRElement") -> "LieRElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return LieRElement(self.presentation, out)

    def __neg__(self) -> "LieRElement":
        return LieRElement(self.presentation, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "LieRElement") -> "LieRElement":
        return self + (-other)

    def scale(self, c) -> "LieRElement":
        c = q(c)
        return LieRElement(self.presentation, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieRElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        order = self.presentation.index
        keys = sorted(self.terms, key=lambda k: (k[1], order[k[0]]))
        return " + ".join(f"{self.terms[k]}*{k[0]}_{{{k[1]}}}" for k in keys)


def normalize(a: LCAElement, m: int) -> LieRElement:
    """The class of a (x) t^m: (T^k g)_m = (-1)^k m(m-1)...(m-k+1) g_(m-k)."""
    out: Dict[Mode, Fraction] = {}
    for g, p in a.coefficients.items():
        for (k,), c in p.terms.items():
            ff = 1
            for i in range(k):
                ff *= m - i
            coeff = c * (-1) ** k * ff
            if coeff:
                key = (g, m - k)
                out[key] = out.get(key, 0) + coeff
    return LieRElement(a.presentation, out)


@lru_cache(maxsize=None)
def _products(P: LCAPresentation) -> Dict[Tuple[str, str], Tuple[LCAElement, ...]]:
    deg = P.lambda_degree()
    table = {}
    for a in P.generators:
        for b in P.generators:
            table[(a, b)] = tuple(nth_product(P.element(a), P.element(b), j) for j in range(deg + 1))
    return table


@lru_cache(maxsize=None)
def _mode_bracket(P: LCAPresentation, a: str, m: int, b: str, n: int) -> Tuple[Tuple[Mode, Fraction], ...]:
    out = LieRElement(P)
    for j, prod in enumerate(_products(P)[(a, b)]):
        if prod.is_zero():
            continue
        c = falling_binomial(m, j)
        if c:
            out = out + normalize(prod, m + n - j).scale(c)
    return tuple(out.terms.items())


def lie_r_bracket(u: LieRElement, v: LieRElement) -> LieRElement:
    P = u.presentation
    out: Dict[Mode, Fraction] = {}
    for (a, m), c1 in u.terms.items():
        for (b, n), c2 in v.terms.items():
            for k, c in _mode_bracket(P, a, m, b, n):
                out[k] = out.get(k, 0) + c1 * c2 * c
    return LieRElement(P, out)


def t_action(u: LieRElement) -> LieRElement:
    """T(a_m) = -m a_(m-1)."""
    out: Dict[Mode, Fraction] = {}
    for (g, m), c in u.terms.items():
        if m:
            out[(g, m - 1)] = out.get((g, m - 1), 0) - m * c
    return LieRElement(u.presentation, out)


def split(u: LieRElement) -> Tuple[LieRElement, LieRElement]:
    """(part in Lie R_+, part in Lie R_-): modes m < 0 and m >= 0."""
    plus = {k: c for k, c in u.terms.items() if k[1] < 0}
    minus = {k: c for k, c in u.terms.items() if k[1] >= 0}
    return LieRElement(u.presentation, plus), LieRElement(u.presentation, minus)


class PullbackError(RuntimeError):
    """A value expected in Lie R_+ had a mode >= 0."""


def pullback(u: LieRElement) -> LCAElement:
    """Inverse of a -> a_(-1) on Lie R_+: c_(-1-k) -> T^k c / k!."""
    P = u.presentation
    coeffs: Dict[str, MultiPoly] = {}
    for (g, m), c in u.terms.items():
        if m >= 0:
            raise PullbackError(f"{g}_{{{m}}} is not in Lie R_+")
        k = -1 - m
        term = MultiPoly.var(T_ONLY, "T", k) * (Fraction(c) / factorial(k))
        coeffs[g] = coeffs[g] + term if g in coeffs else term
    return LCAElement(P, coeffs)


def transported_bracket(a: LCAElement, b: LCAElement) -> LCAElement:
    """The Lie bracket on R obtained from [a_(-1), b_(-1)] in Lie R_+."""
    return pullback(lie_r_bracket(normalize(a, -1), normalize(b, -1)))


def tangent_quotient(u: LieRElement) -> LCAElement:
    """Representative in R of the class of u modulo Lie R_-."""
    plus, _ = split(u)
    return pullback(plus)


# Window checks ------------------------------------------------------------

def witt_isomorphism_check(window: int, presentation: LCAPresentation | None = None) -> dict:
    """Under L(n) = L_(n+1): [L(m), L(n)] = (m-n) L(m+n) and T = ad L(-1)."""
    if window < 1:
        raise ValueError("window must be at least 1")
    P = presentation or builtin_virasoro()
    if P.generators != ("L",):
        raise StructureError("the Witt check needs a single generator L")
    failures: List[dict] = []
    rng = range(-window, window + 1)
    for m in rng:
        for n in rng:
            got = lie_r_bracket(LieRElement.mode(P, "L", m + 1), LieRElement.mode(P, "L", n + 1))
            want = LieRElement.mode(P, "L", m + n + 1, m - n)
            if got != want:
                failures.append({"m": m, "n": n, "got": repr(got), "expected": repr(want)})
        u = LieRElement.mode(P, "L", m + 1)
        if t_action(u) != lie_r_bracket(LieRElement.mode(P, "L", 0), u):
            failures.append({"m": m, "identity": "T = ad L(-1)"})
    return {"window": window, "passed": not failures, "failures": failures}


def jacobi_window_check(P: LCAPresentation, window: int) -> dict:
    """Antisymmetry and Jacobi on all generator-mode triples with |m| <= window.

    Window 0 is the empty check and passes vacuously."""
    if window < 0:
        raise ValueError("window must be non-negative")
    rng = range(-window, window + 1) if window else range(0)
    basis = [LieRElement.mode(P, g, m) for g in P.generators for m in rng]
    failures: List[dict] = []
    br = lie_r_bracket
    for x in basis:
        for y in basis:
            s = br(x, y) + br(y, x)
            if not s.is_zero():
                failures.append({"identity": "antisymmetry", "elements": [repr(x), repr(y)], "residual": repr(s)})
    for x in basis:
        for y in basis:
            xy = br(x, y)
            for z in basis:
                s = br(x, br(y, z)) + br(y, br(z, x)) + br(z, xy)
                if not s.is_zero():
                    failures.append({"identity": "jacobi", "elements": [repr(x), repr(y), repr(z)],
                                     "residual": repr(s)})
    return {"window": window, "passed": not failures, "failures": failures,
            "basis_size": len(basis)}
