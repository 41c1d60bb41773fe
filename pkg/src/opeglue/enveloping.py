"""The enveloping vertex algebra U(R) of a Lie conformal algebra.

States are PBW monomials g1_(m1) ... gk_(mk)|0> with all m < 0, ordered by
(m, generator index) ascending, i.e. most negative mode first.  A mode a_m
has conformal weight wt(a) - 1 - m, so every graded piece is finite.

The mode action is computed by straightening and is exact: it is
homogeneous, so a result either fits in the weight cutoff or is dropped in
full (and flagged).  Fields of composite states come from the Borcherds
recursion

    (a_(m) w)_(n) = sum_j (-1)^j C(m, j) [a_(m-j) w_(n+j) - (-1)^m w_(m+n-j) a_(j)]

with a a generator peeled from the left of the PBW word.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .annihilation import LieRElement, lie_r_bracket, t_action
from .conformal import LCAPresentation, conformal_weights
from .exact_core import falling_binomial, q

ModeKey = Tuple[int, int]            # (generator index, mode)
Monomial = Tuple[ModeKey, ...]
VACUUM: Monomial = ()


def _exact(v):
    # ints stay ints (much faster); anything else must be an exact rational
    return v if type(v) is int else q(v)


def _mode_order(x: ModeKey):
    return (x[1], x[0])


class VAElement:
    __slots__ = ("va", "terms")

    def __init__(self, va: "EnvelopingVA", terms: Mapping[Monomial, object] | None = None):
        self.va = va
        self.terms = {k: _exact(v) for k, v in (terms or {}).items() if v}

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "VAElement") -> "VAElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return VAElement(self.va, out)

    def __neg__(self) -> "VAElement":
        return VAElement(self.va, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "VAElement") -> "VAElement":
        return self + (-other)

    def scale(self, c) -> "VAElement":
        c = _exact(c)
        if not c:
            return VAElement(self.va)
        return VAElement(self.va, {k: v * c for k, v in self.terms.items()})

    def weights(self) -> List[int]:
        return sorted({self.va.weight(m) for m in self.terms})

    def max_weight(self) -> int:
        return max((self.va.weight(m) for m in self.terms), default=0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VAElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{self.va.format_monomial(m)}" for m, c in sorted(self.terms.items()))


@dataclass
class FieldExpansion:
    """Y(u, z) v = sum_n coefficients[n] z^(-n-1).

    Coefficients are exact for every n >= n_min; below n_min the results
    exceed the weight cutoff and are not computed.  All n > n_max vanish.
    """

    variable: str
    coefficients: Dict[int, VAElement]
    n_min: int
    n_max: int
    partial: bool = False

    zero: Optional[VAElement] = None

    def coefficient(self, n: int) -> VAElement:
        if n < self.n_min:
            raise IndexError(f"mode {n} is outside the computed window [{self.n_min}, {self.n_max}]")
        return self.coefficients.get(n, self.zero)

    def polar_part(self) -> Dict[int, VAElement]:
        """Coefficients of z^(-k), k >= 1, keyed by k."""
        return {n + 1: c for n, c in self.coefficients.items() if n >= 0 and not c.is_zero()}


class EnvelopingVA:
    """U(R) at a weight cutoff, with memoized exact mode action."""

    def __init__(self, presentation: LCAPresentation, cutoff: int,
                 commutator_override: Optional[Callable[[ModeKey, ModeKey], Optional[LieRElement]]] = None):
        self.presentation = presentation
        self.cutoff = int(cutoff)
        self.gens = presentation.generators
        w = conformal_weights(presentation)
        if any(w[g].denominator != 1 or w[g] < 1 for g in self.gens):
            raise ValueError("generators need integral conformal weight >= 1 for finite graded pieces")
        self.delta = [int(w[g]) for g in self.gens]
        self._wt_cache: Dict[Monomial, int] = {}
        self._override = commutator_override
        self._act_cache: Dict[Tuple[ModeKey, Monomial], Dict[Monomial, Fraction]] = {}
        self._br_cache: Dict[Tuple[ModeKey, ModeKey], Tuple[Tuple[ModeKey, Fraction], ...]] = {}
        self._field_cache: Dict[Tuple[Monomial, int, Monomial], Dict[Monomial, Fraction]] = {}
        self._T_cache: Dict[Monomial, Dict[Monomial, Fraction]] = {}
        self._basis_cache: Dict[int, List[Monomial]] = {}
        self.overflow = False

    # weights and basis ------------------------------------------------------
    def mode_weight(self, x: ModeKey) -> int:
        return self.delta[x[0]] - 1 - x[1]

    def weight(self, mono: Monomial) -> int:
        w = self._wt_cache.get(mono)
        if w is None:
            w = self._wt_cache[mono] = sum(self.delta[g] - 1 - m for g, m in mono)
        return w

    def basis(self, d: int) -> List[Monomial]:
        """PBW monomials of weight exactly d, in a fixed order."""
        if d not in self._basis_cache:
            modes = []
            for gi, delta in enumerate(self.delta):
                m = -1
                while delta - 1 - m <= d:
                    modes.append((gi, m))
                    m -= 1
            modes.sort(key=_mode_order)
            out: List[Monomial] = []

            def rec(start, remaining, acc):
                if remaining == 0:
                    out.append(tuple(acc))
                    return
                for i in range(start, len(modes)):
                    wx = self.mode_weight(modes[i])
                    if wx <= remaining:
                        acc.append(modes[i])
                        rec(i, remaining - wx, acc)
                        acc.pop()

            rec(0, d, [])
            self._basis_cache[d] = sorted(out)
        return self._basis_cache[d]

    def basis_upto(self, cutoff: Optional[int] = None) -> List[Monomial]:
        k = self.cutoff if cutoff is None else cutoff
        return [m for d in range(k + 1) for m in self.basis(d)]

    def dimensions(self, cutoff: Optional[int] = None) -> List[int]:
        k = self.cutoff if cutoff is None else cutoff
        return [len(self.basis(d)) for d in range(k + 1)]

    def format_monomial(self, mono: Monomial) -> str:
        return "".join(f"{self.gens[g]}_{{{m}}}" for g, m in mono) + "|0>"

    def parse_monomial(self, text: str) -> Monomial:
        """Inverse of format_monomial; also accepts '|0>' for the vacuum."""
        import re
        body = text.strip()
        if not body.endswith("|0>"):
            raise ValueError(f"state must end with |0>: {text!r}")
        body = body[:-3]
        factors = []
        for g, m in re.findall(r"([A-Za-z][A-Za-z0-9]*)_\{(-?\d+)\}", body):
            factors.append((self.gens.index(g), int(m)))
        return tuple(factors)

    # states -------------------------------------------------------------------
    def vacuum(self) -> VAElement:
        return VAElement(self, {VACUUM: 1})

    def state(self, mono: Monomial, coeff=1) -> VAElement:
        return VAElement(self, {tuple(mono): coeff})

    def generator_state(self, g: str, m: int = -1) -> VAElement:
        return self.state(((self.gens.index(g), m),))

    def monomial_state(self, factors: Sequence[Tuple[str, int]]) -> VAElement:
        """Normal-ordered product of the given modes applied to |0>."""
        v = self.vacuum()
        for g, m in reversed(list(factors)):
            v = self.act(LieRElement.mode(self.presentation, g, m), v)
        return v

    # commutators and action -------------------------------------------------
    def _bracket(self, x: ModeKey, y: ModeKey) -> Tuple[Tuple[ModeKey, Fraction], ...]:
        key = (x, y)
        if key not in self._br_cache:
            res = None
            if self._override is not None:
                res = self._override(x, y)
            if res is None:
                P = self.presentation
                res = lie_r_bracket(LieRElement.mode(P, self.gens[x[0]], x[1]),
                                    LieRElement.mode(P, self.gens[y[0]], y[1]))
            idx = self.presentation.index
            self._br_cache[key] = tuple(((idx[g], m), int(c) if c.denominator == 1 else c) for (g, m), c in res.terms.items())
        return self._br_cache[key]

    def _act_mode(self, x: ModeKey, mono: Monomial) -> Dict[Monomial, Fraction]:
        """Exact x . mono, no cutoff."""
        key = (x, mono)
        hit = self._act_cache.get(key)
        if hit is not None:
            return hit
        if self.mode_weight(x) + self.weight(mono) < 0:
            res: Dict[Monomial, Fraction] = {}
        elif not mono:
            res = {} if x[1] >= 0 else {(x,): 1}
        elif x[1] < 0 and _mode_order(x) <= _mode_order(mono[0]):
            res = {(x,) + mono: 1}
        else:
            y, rest = mono[0], mono[1:]
            res = {}
            for m2, c2 in self._act_mode(x, rest).items():
                for m3, c3 in self._act_mode(y, m2).items():
                    res[m3] = res.get(m3, 0) + c2 * c3
            for z, cz in self._bracket(x, y):
                for m2, c2 in self._act_mode(z, rest).items():
                    res[m2] = res.get(m2, 0) + cz * c2
            res = {k: v for k, v in res.items() if v}
        self._act_cache[key] = res
        return res

    def _apply_modes(self, x: ModeKey, terms: Mapping[Monomial, Fraction]) -> Dict[Monomial, Fraction]:
        out: Dict[Monomial, Fraction] = {}
        for mono, c in terms.items():
            for m2, c2 in self._act_mode(x, mono).items():
                out[m2] = out.get(m2, 0) + c * c2
        return {k: v for k, v in out.items() if v}

    def act(self, u: LieRElement, v: VAElement, flag: Optional[list] = None) -> VAElement:
        """Left action of Lie R; results above the cutoff are dropped and flagged."""
        idx = self.presentation.index
        out: Dict[Monomial, Fraction] = {}
        for (g, m), c in u.terms.items():
            for mono, c2 in self._apply_modes((idx[g], m), v.terms).items():
                out[mono] = out.get(mono, 0) + c * c2
        kept = {}
        for mono, c in out.items():
            if not c:
                continue
            if self.weight(mono) > self.cutoff:
                self.overflow = True
                if flag is not None:
                    flag.append(mono)
                continue
            kept[mono] = c
        return VAElement(self, kept)

    # fields -------------------------------------------------------------------
    def _field_mode(self, u: Monomial, n: int, v: Monomial) -> Dict[Monomial, Fraction]:
        """Exact u_(n) v for basis monomials."""
        key = (u, n, v)
        hit = self._field_cache.get(key)
        if hit is not None:
            return hit
        if self.weight(u) + self.weight(v) - n - 1 < 0:
            res: Dict[Monomial, Fraction] = {}
        elif not u:
            res = {v: 1} if n == -1 else {}
        else:
            a, m = u[0]
            w = u[1:]
            wt_w, wt_v = self.weight(w), self.weight(v)
            res = {}
            j_max = int(max(wt_w + wt_v - 1 - n, self.delta[a] - 1 + wt_v))
            sign_m = -1 if m % 2 else 1
            for j in range(0, j_max + 1):
                c = (-1) ** j * falling_binomial(m, j)
                if not c:
                    continue
                for m2, c2 in self._field_mode(w, n + j, v).items():
                    for m3, c3 in self._act_mode((a, m - j), m2).items():
                        res[m3] = res.get(m3, 0) + c * c2 * c3
                for m2, c2 in self._act_mode((a, j), v).items():
                    for m3, c3 in self._field_mode(w, m + n - j, m2).items():
                        res[m3] = res.get(m3, 0) - c * sign_m * c2 * c3
            res = {k: x for k, x in res.items() if x}
        self._field_cache[key] = res
        return res

    def nprod(self, u: VAElement, n: int, v: VAElement) -> VAElement:
        """u_(n) v, exact (no cutoff applied)."""
        out: Dict[Monomial, Fraction] = {}
        for mu, cu in u.terms.items():
            for mv, cv in v.terms.items():
                for m3, c3 in self._field_mode(mu, n, mv).items():
                    out[m3] = out.get(m3, 0) + cu * cv * c3
        return VAElement(self, out)

    def full_field(self, u: VAElement, v: VAElement, variable: str = "z") -> FieldExpansion:
        """Y(u, z) v for all modes whose output fits in the cutoff."""
        wu, wv = u.max_weight(), v.max_weight()
        n_max = int(wu + wv) - 1
        n_min = n_max - self.cutoff
        coeffs = {}
        for n in range(n_min, n_max + 1):
            c = self.nprod(u, n, v)
            if not c.is_zero():
                coeffs[n] = c
        return FieldExpansion(variable, coeffs, n_min, n_max, zero=VAElement(self))

    def generator_field(self, g: str, v: VAElement, variable: str = "z") -> FieldExpansion:
        """Y(g, z) v through the mode action g_(n) = g_n."""
        gi = self.gens.index(g)
        wv = v.max_weight()
        n_max = int(self.delta[gi] + wv) - 1
        n_min = n_max - self.cutoff
        coeffs = {}
        for n in range(n_min, n_max + 1):
            c = self.act(LieRElement.mode(self.presentation, g, n), v)
            if not c.is_zero():
                coeffs[n] = c
        return FieldExpansion(variable, coeffs, n_min, n_max, zero=VAElement(self))

    # translation --------------------------------------------------------------
    def _T_mono(self, mono: Monomial) -> Dict[Monomial, Fraction]:
        hit = self._T_cache.get(mono)
        if hit is not None:
            return hit
        if not mono:
            res: Dict[Monomial, Fraction] = {}
        else:
            (a, m), rest = mono[0], mono[1:]
            res = {}
            # T(a_m w) = -m a_(m-1) w + a_m T(w)
            for m2, c2 in self._act_mode((a, m - 1), rest).items():
                res[m2] = res.get(m2, 0) - m * c2
            for m2, c2 in self._T_mono(rest).items():
                for m3, c3 in self._act_mode((a, m), m2).items():
                    res[m3] = res.get(m3, 0) + c2 * c3
            res = {k: v for k, v in res.items() if v}
        self._T_cache[mono] = res
        return res

    def translation_operator(self, v: VAElement) -> VAElement:
        out: Dict[Monomial, Fraction] = {}
        for mono, c in v.terms.items():
            for m2, c2 in self._T_mono(mono).items():
                out[m2] = out.get(m2, 0) + c * c2
        return VAElement(self, out)


# ---------------------------------------------------------------------------
# axiom verification

def _verdict(failures, inconclusive=False):
    return "fail" if failures else ("inconclusive" if inconclusive else "pass")


def check_vacuum(va: EnvelopingVA, samples: Iterable[Monomial]) -> dict:
    """Y(|0>, z) = id."""
    failures = []
    vac = va.vacuum()
    for mono in samples:
        v = va.state(mono)
        f = va.full_field(vac, v)
        for n in range(f.n_min, f.n_max + 1):
            got = f.coefficients.get(n, VAElement(va))
            want = v if n == -1 else VAElement(va)
            if got != want:
                failures.append({"state": va.format_monomial(mono), "n": n, "residual": repr(got - want)})
    return {"name": "vacuum", "verdict": _verdict(failures), "failures": failures}


def check_creation(va: EnvelopingVA, samples: Iterable[Monomial]) -> dict:
    """Y(u, z)|0> has no poles and its z^0 coefficient is u."""
    failures = []
    vac = va.vacuum()
    for mono in samples:
        u = va.state(mono)
        f = va.full_field(u, vac)
        for n, c in f.coefficients.items():
            if n >= 0 and not c.is_zero():
                failures.append({"state": va.format_monomial(mono), "n": n, "residual": repr(c)})
        if f.coefficients.get(-1, VAElement(va)) != u:
            failures.append({"state": va.format_monomial(mono), "n": -1,
                             "residual": repr(f.coefficients.get(-1, VAElement(va)) - u)})
    return {"name": "creation", "verdict": _verdict(failures), "failures": failures}


def check_translation(va: EnvelopingVA, samples: Iterable[Monomial], probes: Iterable[Monomial]) -> dict:
    """T|0> = 0, (Tu)_(n) v = -n u_(n-1) v and [T, u_(n)] = -n u_(n-1)."""
    failures = []
    if not va.translation_operator(va.vacuum()).is_zero():
        failures.append({"identity": "T|0> = 0"})
    probes = list(probes)
    for mono in samples:
        u = va.state(mono)
        Tu = va.translation_operator(u)
        for pv in probes:
            v = va.state(pv)
            Tv = va.translation_operator(v)
            top = int(va.weight(mono) + va.weight(pv))
            for n in range(top - va.cutoff, top + 1):
                lhs = va.nprod(Tu, n, v)
                rhs = va.nprod(u, n - 1, v).scale(-n)
                if lhs != rhs:
                    failures.append({"identity": "(Tu)_(n) v = -n u_(n-1) v", "u": va.format_monomial(mono),
                                     "v": va.format_monomial(pv), "n": n, "residual": repr(lhs - rhs)})
                comm = va.translation_operator(va.nprod(u, n, v)) - va.nprod(u, n, Tv)
                if comm != rhs:
                    failures.append({"identity": "[T, u_(n)] = -n u_(n-1)", "u": va.format_monomial(mono),
                                     "v": va.format_monomial(pv), "n": n, "residual": repr(comm - rhs)})
    return {"name": "translation", "verdict": _verdict(failures), "failures": failures}


def locality_order(va: EnvelopingVA, a: VAElement, b: VAElement, probes: Iterable[Monomial],
                   n_max: Optional[int] = None) -> dict:
    """Smallest N with (z-w)^N [Y(a,z), Y(b,w)] v = 0 on every coefficient
    whose output weight is within the cutoff, for all probe states v."""
    n_max = va.cutoff if n_max is None else n_max
    wa, wb = a.max_weight(), b.max_weight()
    cache: Dict[Tuple[int, int, Monomial], VAElement] = {}

    def comm(m: int, n: int, pv: Monomial) -> VAElement:
        key = (m, n, pv)
        if key not in cache:
            v = va.state(pv)
            cache[key] = va.nprod(a, m, va.nprod(b, n, v)) - va.nprod(b, n, va.nprod(a, m, v))
        return cache[key]

    probes = list(probes)
    for N in range(0, n_max + 1):
        ok = True
        for pv in probes:
            total = int(wa + wb + va.weight(pv))
            hi = total
            for p in range(-va.cutoff - N - 2, hi + 1):
                for r in range(-va.cutoff - N - 2, hi + 1):
                    out_w = total - p - r - N - 2
                    if out_w < 0 or out_w > va.cutoff:
                        continue
                    acc = VAElement(va)
                    for i in range(N + 1):
                        c = comb(N, i) * (-1) ** i
                        acc = acc + comm(p + N - i, r + i, pv).scale(c)
                    if not acc.is_zero():
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            return {"order": N, "verdict": "pass"}
    return {"order": None, "verdict": "fail"}


# ---------------------------------------------------------------------------
# associativity

Raw = Dict[Monomial, object]


def _axpy(acc: Raw, terms: Raw, c) -> None:
    for k, v in terms.items():
        x = acc.get(k, 0) + c * v
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)


class _Expansions:
    """Coefficients of E1 = Y(a,z)Y(b,w)c (z^(-m-1) w^(-n-1)), E2 = Y(b,w)Y(a,z)c
    and E3 = Y(Y(a,z-w)b, w)c ((z-w)^(-m-1) w^(-n-1)), memoized per (m, n)."""

    def __init__(self, va: EnvelopingVA, a: VAElement, b: VAElement, c: VAElement):
        self.va, self.a, self.b, self.c = va, a.terms, b.terms, c.terms
        self._cache: Dict[Tuple[str, int, int], Raw] = {}
        self._inner: Dict[Tuple[str, int], Raw] = {}

    def _np(self, u: Raw, n: int, v: Raw) -> Raw:
        out: Raw = {}
        fm = self.va._field_mode
        for mu, cu in u.items():
            for mv, cv in v.items():
                _axpy(out, fm(mu, n, mv), cu * cv)
        return out

    def inner(self, which: str, k: int) -> Raw:
        key = (which, k)
        hit = self._inner.get(key)
        if hit is None:
            if which == "bc":
                hit = self._np(self.b, k, self.c)
            elif which == "ac":
                hit = self._np(self.a, k, self.c)
            else:
                hit = self._np(self.a, k, self.b)
            self._inner[key] = hit
        return hit

    def coefficient(self, kind: str, m: int, n: int) -> Raw:
        key = (kind, m, n)
        hit = self._cache.get(key)
        if hit is None:
            if kind == "E1":
                hit = self._np(self.a, m, self.inner("bc", n))
            elif kind == "E2":
                hit = self._np(self.b, n, self.inner("ac", m))
            else:
                hit = self._np(self.inner("ab", m), n, self.c)
            self._cache[key] = hit
        return hit


def pole_order(va: EnvelopingVA, u: VAElement, v: VAElement) -> int:
    """1 + the largest n with u_(n) v != 0 (0 if Y(u,z)v has no pole)."""
    for n in range(int(u.max_weight() + v.max_weight()) - 1, -1, -1):
        if not va.nprod(u, n, v).is_zero():
            return n + 1
    return 0


def default_clearing(va: EnvelopingVA, a: VAElement, b: VAElement, c: VAElement) -> Tuple[int, int, int]:
    """z^A w^B (z-w)^C with A, B, C the pole orders of Y(a,z)c, Y(b,w)c and
    Y(a,z-w)b; these bound the poles of the common rational function."""
    return pole_order(va, a, c), pole_order(va, b, c), pole_order(va, a, b)


def cleared_coefficients(ex: _Expansions, kind: str, d: int, wt: int, A: int, B: int, C: int,
                         margin: int) -> Tuple[Dict[Tuple[int, int], Raw], List[Tuple[int, int]]]:
    """Weight-d part of z^A w^B (z-w)^C times one expansion.

    Returns the coefficients of z^i w^j (i + j = D, both >= 0) and the list
    of exponent pairs, scanned ``margin`` steps past the polynomial range,
    where a nonzero non-polynomial term was found.
    """
    D = d - wt + A + B + C
    poly: Dict[Tuple[int, int], Raw] = {}
    bad: List[Tuple[int, int]] = []
    if kind in ("E1", "E2"):
        for i in range(-margin, D + margin + 1):
            j = D - i
            acc: Raw = {}
            for s in range(C + 1):
                # z^i w^j <- z^A w^B z^(C-s) (-w)^s  z^(-m-1) w^(-n-1)
                m = A + C - s - i - 1
                n = B + s - j - 1
                _axpy(acc, ex.coefficient(kind, m, n), comb(C, s) * (-1) ** s)
            if not acc:
                continue
            if i < 0 or j < 0:
                bad.append((i, j))
            else:
                poly[(i, j)] = acc
        return poly, bad
    # E3 lives in ((w))((t)), t = z - w; clear with t^C w^B (w + t)^A,
    # read off t^k w^l, then re-expand t^k = (z - w)^k.
    for k in range(-margin, D + margin + 1):
        l = D - k
        acc = {}
        for r in range(A + 1):
            _axpy(acc, ex.coefficient("E3", C + r - k - 1, B + A - r - l - 1), comb(A, r))
        if not acc:
            continue
        if k < 0 or l < 0:
            bad.append((k, l))
            continue
        for s_ in range(k + 1):
            key = (s_, D - s_)
            _axpy(poly.setdefault(key, {}), acc, comb(k, s_) * (-1) ** (k - s_))
    return {key: v for key, v in poly.items() if v}, bad


def verify_associativity(va: EnvelopingVA, a: VAElement, b: VAElement, c: VAElement,
                         orders: Optional[Mapping[str, int]] = None) -> dict:
    """Compare the cleared expansions of Y(a,z)Y(b,w)c, Y(b,w)Y(a,z)c and
    Y(Y(a,z-w)b,w)c for every output weight up to the cutoff.

    ``orders`` may set the clearing exponents A, B, C and ``margin``.  When
    the exponents are smaller than the weight bounds and an expansion does
    not become polynomial, the verdict is inconclusive rather than fail.
    """
    orders = dict(orders or {})
    A0, B0, C0 = default_clearing(va, a, b, c)
    A, B, C = orders.get("A", A0), orders.get("B", B0), orders.get("C", C0)
    margin = orders.get("margin", 2)
    provable = A >= A0 and B >= B0 and C >= C0
    wt = int(a.max_weight() + b.max_weight() + c.max_weight())
    ex = _Expansions(va, a, b, c)
    mismatches, nonpoly = [], []
    for d in range(0, va.cutoff + 1):
        D = d - wt + A + B + C
        if D < 0:
            continue
        polys = {}
        for kind in ("E1", "E2", "E3"):
            poly, bad = cleared_coefficients(ex, kind, d, wt, A, B, C, margin)
            nonpoly.extend({"weight": d, "expansion": kind, "monomial": list(key)} for key in bad)
            polys[kind] = poly
        for kind in ("E2", "E3"):
            if polys[kind] != polys["E1"]:
                keys = set(polys[kind]) | set(polys["E1"])
                for key in sorted(keys):
                    r = VAElement(va, polys[kind].get(key, {})) - VAElement(va, polys["E1"].get(key, {}))
                    if not r.is_zero():
                        mismatches.append({"weight": d, "compare": f"E1 vs {kind}", "monomial": list(key),
                                           "residual": repr(r)})
    if nonpoly and not provable:
        verdict = "inconclusive"
    else:
        verdict = "fail" if (mismatches or nonpoly) else "pass"
    return {"verdict": verdict, "clearing": [A, B, C], "mismatches": mismatches, "non_polynomial": nonpoly}


def verify_axioms(va: EnvelopingVA, samples: Optional[Sequence[Monomial]] = None,
                  axioms: Sequence[str] = ("vacuum", "creation", "translation", "locality"),
                  probes: Optional[Sequence[Monomial]] = None) -> dict:
    """Run the requested axiom checks; ``samples`` defaults to the whole basis."""
    samples = list(samples) if samples is not None else va.basis_upto()
    if probes is None:
        probes = [VACUUM] + [((gi, -1),) for gi in range(len(va.gens))]
    results = []
    if "vacuum" in axioms:
        results.append(check_vacuum(va, samples))
    if "creation" in axioms:
        results.append(check_creation(va, samples))
    if "translation" in axioms:
        results.append(check_translation(va, samples, probes))
    if "locality" in axioms:
        pairs = []
        for g1 in va.gens:
            for g2 in va.gens:
                a, b = va.generator_state(g1), va.generator_state(g2)
                res = locality_order(va, a, b, probes)
                pairs.append({"a": g1, "b": g2, **res})
        vac = locality_order(va, va.vacuum(), va.generator_state(va.gens[0]), probes)
        pairs.append({"a": "|0>", "b": va.gens[0], **vac})
        bad = [p for p in pairs if p["verdict"] != "pass"]
        results.append({"name": "locality", "verdict": _verdict(bad), "orders": pairs})
    return {"verdict": "fail" if any(r["verdict"] == "fail" for r in results) else "pass", "checks": results}
