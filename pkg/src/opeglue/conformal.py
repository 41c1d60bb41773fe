"""Lie conformal algebras given by generator tables.

R is a free C[T]-module on finitely many generators.  The table stores, for
each ordered generator pair, the bracket [g_lam h] as a list of
``(target, p(lam, T))`` entries.  Everything else follows from
sesquilinearity:

    [p(T) a _X q(T) b] = p(-X) q(X + T) [a_X b]

which holds for any scalar expression X (lam, mu, lam + mu, ...).  The
axiom checker works with elements whose coefficients are polynomials in
lam, mu and T simultaneously, so both identities become exact polynomial
identities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exact_core import MultiPoly, StructureError, parse_poly, q

SYM = ("lam", "mu", "T")   # working ring for symbolic checks
T_ONLY = ("T",)
LAM_T = ("lam", "T")
ALIASES = {"λ": "lam", "lambda": "lam", "μ": "mu"}

_lam = MultiPoly.var(SYM, "lam")
_mu = MultiPoly.var(SYM, "mu")
_T = MultiPoly.var(SYM, "T")


class InvalidPresentation(StructureError):
    pass


# Elements -----------------------------------------------------------------

class LCAElement:
    """Sum of p_g(T) g over generators."""

    __slots__ = ("presentation", "coefficients")

    def __init__(self, presentation: "LCAPresentation", coefficients: Mapping[str, MultiPoly] | None = None):
        self.presentation = presentation
        clean = {}
        for g, p in (coefficients or {}).items():
            if g not in presentation.index:
                raise StructureError(f"unknown generator {g!r}")
            if not isinstance(p, MultiPoly):
                p = MultiPoly.const(T_ONLY, p)
            if p.variables != T_ONLY:
                p = p.restrict(T_ONLY) if set(T_ONLY) <= set(p.variables) else p.extend(T_ONLY)
            if not p.is_zero():
                clean[g] = p
        self.coefficients = clean

    @classmethod
    def generator(cls, presentation, g: str, t_power: int = 0, coeff=1) -> "LCAElement":
        return cls(presentation, {g: MultiPoly.var(T_ONLY, "T", t_power) * q(coeff)})

    def is_zero(self) -> bool:
        return not self.coefficients

    def __add__(self, other: "LCAElement") -> "LCAElement":
        out = dict(self.coefficients)
        for g, p in other.coefficients.items():
            out[g] = out[g] + p if g in out else p
        return LCAElement(self.presentation, out)

    def __neg__(self) -> "LCAElement":
        return LCAElement(self.presentation, {g: -p for g, p in self.coefficients.items()})

    def __sub__(self, other: "LCAElement") -> "LCAElement":
        return self + (-other)

    def scale(self, c) -> "LCAElement":
        return LCAElement(self.presentation, {g: p * q(c) for g, p in self.coefficients.items()})

    def apply_T(self, k: int = 1) -> "LCAElement":
        tk = MultiPoly.var(T_ONLY, "T", k)
        return LCAElement(self.presentation, {g: p * tk for g, p in self.coefficients.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, LCAElement):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(frozenset(self.coefficients.items()))

    def __repr__(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for g in self.presentation.generators:
            if g in self.coefficients:
                p = self.coefficients[g]
                parts.append(g if p == MultiPoly.const(T_ONLY, 1) else f"({p})*{g}")
        return " + ".join(parts)

    def to_symbolic(self) -> Dict[str, MultiPoly]:
        return {g: p.extend(SYM) for g, p in self.coefficients.items()}


@dataclass(frozen=True)
class LambdaPolynomial:
    """sum_n lam^n c_n with LCAElement coefficients."""

    coefficients: Tuple[Tuple[int, LCAElement], ...]

    def coefficient(self, n: int) -> Optional[LCAElement]:
        for k, c in self.coefficients:
            if k == n:
                return c
        return None

    @property
    def degree(self) -> int:
        return max((k for k, _ in self.coefficients), default=-1)

    def is_zero(self) -> bool:
        return not self.coefficients

    def __repr__(self) -> str:
        if not self.coefficients:
            return "0"
        return " + ".join(f"lam^{k}*({c})" if k else f"({c})" for k, c in self.coefficients)


# Presentations ------------------------------------------------------------

@dataclass(frozen=True)
class LCAPresentation:
    generators: Tuple[str, ...]
    bracket_table: Mapping[Tuple[str, str], Tuple[Tuple[str, MultiPoly], ...]]
    weights: Optional[Mapping[str, Fraction]] = None
    name: str = ""
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.generators)) != len(self.generators):
            raise InvalidPresentation("duplicate generator names")
        object.__setattr__(self, "index", {g: i for i, g in enumerate(self.generators)})
        table = {}
        for (a, b), entries in self.bracket_table.items():
            if a not in self.index or b not in self.index:
                raise InvalidPresentation(f"bracket entry for unknown generators ({a}, {b})")
            merged: Dict[str, MultiPoly] = {}
            for target, p in entries:
                if target not in self.index:
                    raise InvalidPresentation(f"bracket [{a}_lam {b}] targets unknown generator {target!r}")
                if p.variables != LAM_T:
                    p = p.extend(LAM_T) if set(p.variables) <= set(LAM_T) else p
                    if p.variables != LAM_T:
                        raise InvalidPresentation(f"structure polynomial for [{a}_lam {b}] must be in lam and T")
                merged[target] = merged[target] + p if target in merged else p
            clean = tuple((t, p) for t, p in merged.items() if not p.is_zero())
            if clean:
                table[(a, b)] = clean
        object.__setattr__(self, "bracket_table", table)
        if self.weights is not None:
            missing = set(self.generators) - set(self.weights)
            if missing:
                raise InvalidPresentation(f"weights missing for {sorted(missing)}")
            object.__setattr__(self, "weights", {g: Fraction(w) for g, w in self.weights.items()})

    def __hash__(self):
        return hash((self.generators, tuple(sorted((k, v) for k, v in self.bracket_table.items()))))

    def element(self, g: str, t_power: int = 0, coeff=1) -> LCAElement:
        return LCAElement.generator(self, g, t_power, coeff)

    def entry(self, a: str, b: str) -> Tuple[Tuple[str, MultiPoly], ...]:
        return self.bracket_table.get((a, b), ())

    def lambda_degree(self) -> int:
        return max((p.degree_in(0) for es in self.bracket_table.values() for _, p in es), default=-1)

    def with_entry(self, a: str, b: str, entries: Iterable[Tuple[str, MultiPoly]]) -> "LCAPresentation":
        """Copy with one table entry replaced (used to build mutation controls)."""
        table = dict(self.bracket_table)
        table[(a, b)] = tuple(entries)
        return LCAPresentation(self.generators, table, self.weights, self.name + "*")


def presentation_from_strings(generators: Sequence[str], table: Mapping[Tuple[str, str], Mapping[str, str]],
                              weights: Mapping[str, object] | None = None, name: str = "") -> LCAPresentation:
    parsed = {}
    for (a, b), entries in table.items():
        parsed[(a, b)] = tuple((t, parse_poly(s, LAM_T, ALIASES)) for t, s in entries.items())
    return LCAPresentation(tuple(generators), parsed, weights, name)


# Symbolic bracket ---------------------------------------------------------

Sym = Dict[str, MultiPoly]   # generator -> polynomial in (lam, mu, T)


def _sym_add(out: Sym, g: str, p: MultiPoly):
    if g in out:
        p = out[g] + p
    if p.is_zero():
        out.pop(g, None)
    else:
        out[g] = p


def sym_bracket(P: LCAPresentation, a: Sym, b: Sym, X: MultiPoly) -> Sym:
    """[a_X b] for symbolic elements; X is a polynomial in lam, mu (no T)."""
    out: Sym = {}
    neg_x = {"T": -X}
    shift = {"T": X + _T}
    for ga, pa in a.items():
        left = pa.subs(neg_x)
        for gb, pb in b.items():
            entries = P.entry(ga, gb)
            if not entries:
                continue
            factor = left * pb.subs(shift)
            for target, p in entries:
                img = p.extend(SYM).subs({"lam": X})
                _sym_add(out, target, factor * img)
    return out


def _sym_sub(a: Sym, b: Sym) -> Sym:
    out = dict(a)
    for g, p in b.items():
        _sym_add(out, g, -p)
    return out


def lambda_bracket(a: LCAElement, b: LCAElement) -> LambdaPolynomial:
    if a.presentation is not b.presentation and a.presentation != b.presentation:
        raise StructureError("elements over different presentations")
    P = a.presentation
    res = sym_bracket(P, a.to_symbolic(), b.to_symbolic(), _lam)
    by_power: Dict[int, Dict[str, MultiPoly]] = {}
    for g, p in res.items():
        for k, c in p.coefficients_in(0).items():
            by_power.setdefault(k, {})[g] = c.restrict(("mu", "T")).restrict(T_ONLY)
    coeffs = tuple(sorted((k, LCAElement(P, d)) for k, d in by_power.items()))
    return LambdaPolynomial(tuple((k, c) for k, c in coeffs if not c.is_zero()))


def nth_product(a: LCAElement, b: LCAElement, n: int) -> LCAElement:
    """a_(n) b = n! times the lam^n coefficient of [a_lam b]."""
    if n < 0:
        raise ValueError("negative n-th products are not defined in a Lie conformal algebra")
    c = lambda_bracket(a, b).coefficient(n)
    return LCAElement(a.presentation) if c is None else c.scale(factorial(n))


# Axioms -------------------------------------------------------------------

def _fmt(res: Sym) -> str:
    return " + ".join(f"({p})*{g}" for g, p in sorted(res.items()))


def check_axioms(P: LCAPresentation) -> dict:
    failures: List[dict] = []
    gens = P.generators
    for a in gens:
        for b in gens:
            ea, eb = {a: MultiPoly.const(SYM, 1)}, {b: MultiPoly.const(SYM, 1)}
            lhs = sym_bracket(P, ea, eb, _lam)
            rhs = sym_bracket(P, eb, ea, _lam)
            # lam -> -lam - T, with T then acting on the output coefficients
            rhs = {g: p.subs({"lam": -_lam - _T}) for g, p in rhs.items()}
            residual = dict(lhs)
            for g, p in rhs.items():
                _sym_add(residual, g, p)
            if residual:
                failures.append({"identity": "antisymmetry", "generators": [a, b], "residual": _fmt(residual)})
    for a in gens:
        for b in gens:
            for c in gens:
                ea = {a: MultiPoly.const(SYM, 1)}
                eb = {b: MultiPoly.const(SYM, 1)}
                ec = {c: MultiPoly.const(SYM, 1)}
                lhs = sym_bracket(P, ea, sym_bracket(P, eb, ec, _mu), _lam)
                t1 = sym_bracket(P, sym_bracket(P, ea, eb, _lam), ec, _lam + _mu)
                t2 = sym_bracket(P, eb, sym_bracket(P, ea, ec, _lam), _mu)
                residual = _sym_sub(_sym_sub(lhs, t1), t2)
                if residual:
                    failures.append({"identity": "jacobi", "generators": [a, b, c], "residual": _fmt(residual)})
    return {"passed": not failures, "failures": failures,
            "checked": {"antisymmetry": len(gens) ** 2, "jacobi": len(gens) ** 3}}


# Conformal weights --------------------------------------------------------

def homogeneity_failures(P: LCAPresentation, weights: Mapping[str, Fraction]) -> List[str]:
    """Entries violating wt(T^k c) = wt a + wt b - j - 1 for lam^j/j! terms."""
    bad = []
    for (a, b), entries in P.bracket_table.items():
        for target, p in entries:
            for (j, k), _c in p.terms.items():
                if weights[target] + k != weights[a] + weights[b] - j - 1:
                    bad.append(f"[{a}_lam {b}] -> lam^{j} T^{k} {target}")
    return bad


def conformal_weights(P: LCAPresentation) -> Dict[str, Fraction]:
    """Declared weights if any, else the unique homogeneous assignment
    (generators untouched by the table default to weight 1)."""
    if P.weights is not None:
        bad = homogeneity_failures(P, P.weights)
        if bad:
            raise InvalidPresentation("declared weights are not homogeneous: " + "; ".join(bad))
        return dict(P.weights)
    from sympy import Matrix, Rational as R, linsolve, symbols

    syms = symbols(f"w0:{len(P.generators)}")
    eqs = []
    for (a, b), entries in P.bracket_table.items():
        ia, ib = P.index[a], P.index[b]
        for target, p in entries:
            it = P.index[target]
            for (j, k), _ in p.terms.items():
                eqs.append(syms[ia] + syms[ib] - syms[it] - j - 1 - k)
    sol = linsolve(eqs, *syms) if eqs else {tuple(syms)}
    if not sol:
        raise InvalidPresentation("no homogeneous conformal weight assignment exists")
    (vals,) = tuple(sol)
    out = {}
    for g, s, v in zip(P.generators, syms, vals):
        v = v.subs({x: 1 for x in syms})
        out[g] = Fraction(int(v.p), int(v.q))
    if homogeneity_failures(P, out):
        raise InvalidPresentation("no homogeneous conformal weight assignment exists")
    return out


# Built-in examples --------------------------------------------------------

def lie_algebra_failures(basis: Sequence[str], constants: Mapping[Tuple[str, str], Mapping[str, object]]) -> List[str]:
    """Antisymmetry and Jacobi of a finite-dimensional Lie bracket."""
    def br(x: Dict[str, Fraction], y: Dict[str, Fraction]) -> Dict[str, Fraction]:
        out: Dict[str, Fraction] = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for c, v in constants.get((a, b), {}).items():
                    out[c] = out.get(c, 0) + ca * cb * q(v)
        return {k: v for k, v in out.items() if v}

    def add(*xs):
        out: Dict[str, Fraction] = {}
        for x in xs:
            for k, v in x.items():
                out[k] = out.get(k, 0) + v
        return {k: v for k, v in out.items() if v}

    bad = []
    for (a, b), row in constants.items():
        if a not in basis or b not in basis or any(c not in basis for c in row):
            bad.append(f"unknown basis element in [{a},{b}]")
    if bad:
        return bad
    e = {x: {x: Fraction(1)} for x in basis}
    for a in basis:
        for b in basis:
            s = add(br(e[a], e[b]), br(e[b], e[a]))
            if s:
                bad.append(f"antisymmetry fails for ({a},{b}): {s}")
    for a in basis:
        for b in basis:
            for c in basis:
                s = add(br(e[a], br(e[b], e[c])), br(e[b], br(e[c], e[a])), br(e[c], br(e[a], e[b])))
                if s:
                    bad.append(f"Jacobi fails for ({a},{b},{c}): {s}")
    return bad


def builtin_current(basis: Sequence[str], constants: Mapping[Tuple[str, str], Mapping[str, object]],
                    name: str = "Cur") -> LCAPresentation:
    """Cur g = C[T] (x) g with [a_lam b] = [a, b].  ``constants`` may list each
    unordered pair once; the opposite order is filled in by antisymmetry."""
    full: Dict[Tuple[str, str], Dict[str, object]] = {}
    for (a, b), row in constants.items():
        full[(a, b)] = dict(row)
        if (b, a) not in constants:
            full[(b, a)] = {c: -q(v) for c, v in row.items()}
    bad = lie_algebra_failures(basis, full)
    if bad:
        raise InvalidPresentation("invalid Lie structure constants: " + "; ".join(bad))
    table = {k: tuple((c, MultiPoly.const(LAM_T, v)) for c, v in row.items()) for k, row in full.items()}
    return LCAPresentation(tuple(basis), table, {g: 1 for g in basis}, name)


SL2_BASIS = ("e", "h", "f")
SL2_CONSTANTS = {("h", "e"): {"e": 2}, ("h", "f"): {"f": -2}, ("e", "f"): {"h": 1}}


def builtin_sl2() -> LCAPresentation:
    return builtin_current(SL2_BASIS, SL2_CONSTANTS, name="Cur(sl2)")


def builtin_virasoro() -> LCAPresentation:
    """Vir = C[T]L with [L_lam L] = TL + 2 lam L."""
    p = MultiPoly.var(LAM_T, "T") + MultiPoly.var(LAM_T, "lam") * 2
    return LCAPresentation(("L",), {("L", "L"): (("L", p),)}, {"L": 2}, "Vir")
