"""Iterated truncated Laurent / power series over a localized polynomial base.

A ring such as C[x3]((x1-x3))((x2-x3)) is described by a :class:`RingDescriptor`:
the base variables (here x3), the pairwise differences inverted in the base,
and an ordered tower of series variables, innermost first.  Each tower
variable is a difference ``x_a - x_b`` with ``x_b`` a base variable (or a bare
``x_a`` when ``b`` is None); entering the chart substitutes ``x_a = x_b + t``.

Series are stored flat: exponent tuples (innermost level first) mapping to
:class:`LocalizedPoly` coefficients in the base variables.  The nesting order
still matters and is respected by :func:`tower_invert` and
:func:`expand_in_chart`, which always treat the outermost variable as the
"smallest" one.

Every series carries a per-level window ``(lo, hi)``: no term has an
exponent below ``lo`` and every coefficient with all exponents below the
respective ``hi`` is exact.  ``hi is None`` means exact in that direction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .exact_core import LocalizedPoly, MultiPoly, StructureError, q

Window = Tuple[int, Optional[int]]


class Mode(enum.Enum):
    POWER_SERIES = "power"
    LAURENT = "laurent"


class NotInvertible(ArithmeticError):
    """An element is not a unit in the chart ring."""


class NoCanonicalMap(ArithmeticError):
    """A localized polynomial has no image in the requested chart ring."""


class TruncationError(ArithmeticError):
    """The available windows are too small to produce an exact answer."""


@dataclass(frozen=True)
class TowerVar:
    a: int
    b: Optional[int]
    mode: Mode

    def label(self, names: Sequence[str]) -> str:
        return names[self.a] if self.b is None else f"({names[self.a]}-{names[self.b]})"


@dataclass(frozen=True)
class RingDescriptor:
    variables: Tuple[str, ...]
    base: Tuple[int, ...]
    inverted: frozenset
    tower: Tuple[TowerVar, ...]

    def __post_init__(self):
        n = len(self.variables)
        eliminated = [v.a for v in self.tower]
        if len(set(eliminated)) != len(eliminated):
            raise StructureError("tower variables must be distinct differences")
        for v in self.tower:
            if not 0 <= v.a < n or v.a in self.base:
                raise StructureError(f"tower variable eliminates undeclared or base variable {v.a}")
            if v.b is not None and v.b not in self.base:
                raise StructureError("tower differences must be taken against a base variable")
        for i, j in self.inverted:
            if i not in self.base or j not in self.base or i >= j:
                raise StructureError(f"inverted pair {(i, j)} must be an ordered pair of base variables")
        covered = set(self.base) | set(eliminated)
        if covered != set(range(n)):
            raise StructureError("every variable must be a base or tower variable")

    @property
    def depth(self) -> int:
        return len(self.tower)

    def describe(self) -> str:
        names = self.variables
        base = ",".join(names[i] for i in self.base) or ""
        s = f"Q[{base}]"
        if self.inverted:
            s += "_{" + ",".join(f"{names[i]}-{names[j]}" for i, j in sorted(self.inverted)) + "}"
        for v in self.tower:
            lab = v.label(names)
            s += f"(({lab}))" if v.mode is Mode.LAURENT else f"[[{lab}]]"
        return s


def descriptor(variables: Sequence[str], base: Iterable[int], tower: Iterable[Tuple[int, Optional[int], Mode]] = (),
               inverted: Iterable[Tuple[int, int]] = ()) -> RingDescriptor:
    return RingDescriptor(
        tuple(variables),
        tuple(base),
        frozenset(tuple(sorted(p)) for p in inverted),
        tuple(TowerVar(a, b, m) for a, b, m in tower),
    )


def _min_hi(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _add_hi(h: Optional[int], lo: int) -> Optional[int]:
    return None if h is None else h + lo


class TowerSeries:
    __slots__ = ("descriptor", "terms", "windows")

    def __init__(self, desc: RingDescriptor, terms: Dict[Tuple[int, ...], LocalizedPoly],
                 windows: Sequence[Window] | None = None):
        self.descriptor = desc
        if windows is None:
            windows = [(min((e[k] for e in terms), default=0), None) for k in range(desc.depth)]
            windows = [(min(lo, 0) if v.mode is Mode.LAURENT else 0, hi) for (lo, hi), v in zip(windows, desc.tower)]
        self.windows = tuple((int(lo), hi) for lo, hi in windows)
        clean = {}
        for e, c in terms.items():
            if c.is_zero():
                continue
            if any(not (lo <= k and (hi is None or k < hi)) for k, (lo, hi) in zip(e, self.windows)):
                if any(k < lo for k, (lo, hi) in zip(e, self.windows)):
                    raise StructureError(f"term exponent {e} below window {self.windows}")
                continue  # beyond hi: drop, it is not certified
            clean[e] = c
        for (lo, _), v in zip(self.windows, desc.tower):
            if v.mode is Mode.POWER_SERIES and lo < 0:
                raise StructureError("power-series level with negative low order")
        self.terms = clean

    # constructors
    @classmethod
    def _raw(cls, desc, terms, windows):
        s = cls.__new__(cls)
        s.descriptor = desc
        s.terms = terms
        s.windows = tuple(windows)
        return s

    @classmethod
    def constant(cls, desc: RingDescriptor, c) -> "TowerSeries":
        coeff = c if isinstance(c, LocalizedPoly) else LocalizedPoly.const(desc.variables, c)
        z = (0,) * desc.depth
        return cls._raw(desc, {z: coeff} if not coeff.is_zero() else {}, [(0, None)] * desc.depth)

    @classmethod
    def monomial(cls, desc: RingDescriptor, exps: Sequence[int], c=1) -> "TowerSeries":
        coeff = c if isinstance(c, LocalizedPoly) else LocalizedPoly.const(desc.variables, c)
        exps = tuple(exps)
        return cls(desc, {exps: coeff}, [(min(e, 0) if v.mode is Mode.LAURENT else 0, None)
                                         for e, v in zip(exps, desc.tower)])

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exps: Sequence[int]) -> LocalizedPoly:
        exps = tuple(exps)
        for k, (lo, hi) in zip(exps, self.windows):
            if hi is not None and k >= hi:
                raise TruncationError(f"coefficient {exps} is outside the exact window {self.windows}")
        return self.terms.get(exps, LocalizedPoly.const(self.descriptor.variables, 0))

    def _check(self, other: "TowerSeries"):
        if self.descriptor != other.descriptor:
            raise StructureError("series over different chart rings")

    # arithmetic
    def __add__(self, other: "TowerSeries") -> "TowerSeries":
        self._check(other)
        windows = [(min(a[0], b[0]), _min_hi(a[1], b[1])) for a, b in zip(self.windows, other.windows)]
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out[e] + c if e in out else c
            if v.is_zero():
                out.pop(e, None)
            else:
                out[e] = v
        return TowerSeries(self.descriptor, out, windows)

    def __neg__(self) -> "TowerSeries":
        return TowerSeries._raw(self.descriptor, {e: -c for e, c in self.terms.items()}, self.windows)

    def __sub__(self, other: "TowerSeries") -> "TowerSeries":
        return self + (-other)

    def scale(self, c) -> "TowerSeries":
        c = c if isinstance(c, LocalizedPoly) else LocalizedPoly.const(self.descriptor.variables, c)
        if c.is_zero():
            return TowerSeries._raw(self.descriptor, {}, self.windows)
        return TowerSeries._raw(self.descriptor, {e: v * c for e, v in self.terms.items()}, self.windows)

    def __mul__(self, other) -> "TowerSeries":
        if not isinstance(other, TowerSeries):
            return self.scale(other)
        return tower_mul(self, other)

    def shift(self, level: int, k: int) -> "TowerSeries":
        """Multiply by t_level^k."""
        windows = list(self.windows)
        lo, hi = windows[level]
        windows[level] = (lo + k, _add_hi(hi, k))
        terms = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[level] += k
            terms[tuple(e2)] = c
        return TowerSeries(self.descriptor, terms, windows)

    def truncated(self, windows: Sequence[Window]) -> "TowerSeries":
        """Forget everything at or beyond the given high orders."""
        new = [(lo, _min_hi(hi, h2)) for (lo, hi), (_, h2) in zip(self.windows, windows)]
        return TowerSeries(self.descriptor, dict(self.terms), new)

    def agrees_with(self, other: "TowerSeries") -> bool:
        """Equality on the common exact window."""
        self._check(other)
        common = [(min(a[0], b[0]), _min_hi(a[1], b[1])) for a, b in zip(self.windows, other.windows)]
        return self.truncated(common).terms == other.truncated(common).terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, TowerSeries):
            return NotImplemented
        return self.descriptor == other.descriptor and self.windows == other.windows and self.terms == other.terms

    def __repr__(self) -> str:
        names = self.descriptor.variables
        labels = [v.label(names) for v in self.descriptor.tower]
        if not self.terms:
            body = "0"
        else:
            parts = []
            for e in sorted(self.terms, key=lambda e: tuple(reversed(e))):
                mono = "*".join(f"{lab}^{k}" for lab, k in zip(labels, e) if k)
                parts.append(f"({self.terms[e]})" + (f"*{mono}" if mono else ""))
            body = " + ".join(parts)
        return f"<{body} in {self.descriptor.describe()} windows={list(self.windows)}>"


def tower_mul(f: TowerSeries, g: TowerSeries) -> TowerSeries:
    f._check(g)
    windows = []
    for (lf, hf), (lg, hg) in zip(f.windows, g.windows):
        windows.append((lf + lg, _min_hi(_add_hi(hf, lg), _add_hi(hg, lf))))
    his = [w[1] for w in windows]
    out: Dict[Tuple[int, ...], LocalizedPoly] = {}
    for e1, c1 in f.terms.items():
        for e2, c2 in g.terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            if any(h is not None and k >= h for k, h in zip(e, his)):
                continue
            prod = c1 * c2
            if e in out:
                prod = out[e] + prod
            out[e] = prod
    return TowerSeries(f.descriptor, {e: c for e, c in out.items() if not c.is_zero()}, windows)


# ---------------------------------------------------------------------------
# units

def _base_unit_inverse(c: LocalizedPoly, desc: RingDescriptor) -> LocalizedPoly:
    """Inverse of a unit of Q[base]_{inverted differences}."""
    if c.is_zero():
        raise NotInvertible("zero is not invertible in this chart")
    num = c.numerator
    extra: Dict[Tuple[int, int], int] = {}
    for pair in desc.inverted:
        i, j = pair
        while True:
            quot = num.divide_by_difference(i, j)
            if quot is None:
                break
            num = quot
            extra[pair] = extra.get(pair, 0) + 1
    if not num.is_constant():
        raise NotInvertible(f"{c} is not invertible in this chart")
    inv = LocalizedPoly(MultiPoly.const(desc.variables, 1 / _frac(num.constant_term())), extra)
    for pair, k in c.denominator.items():
        inv = inv * LocalizedPoly.from_poly(MultiPoly.difference(desc.variables, *pair) ** k)
    return inv


def _frac(x):
    from fractions import Fraction
    return Fraction(x)


def _level_slice(f: TowerSeries, level: int, k: int) -> TowerSeries:
    """The coefficient of t_level^k, as a series with that exponent set to 0
    (levels above ``level`` are assumed trivial)."""
    terms = {}
    for e, c in f.terms.items():
        if e[level] == k:
            e2 = list(e)
            e2[level] = 0
            terms[tuple(e2)] = c
    windows = list(f.windows)
    windows[level] = (0, None)
    return TowerSeries._raw(f.descriptor, terms, windows)


def tower_invert(f: TowerSeries, precision: int = 8) -> TowerSeries:
    """Two-sided inverse within truncation.

    ``precision`` bounds the high order of levels where the inverse is an
    infinite series and ``f`` itself is exact there.
    """
    return _invert(f, f.descriptor.depth - 1, precision)


def _invert(f: TowerSeries, level: int, precision: int) -> TowerSeries:
    desc = f.descriptor
    if f.is_zero():
        raise NotInvertible("zero is not invertible in this chart")
    if level < 0:
        (e, c), = f.terms.items()
        return TowerSeries._raw(desc, {e: _base_unit_inverse(c, desc)}, [(0, None)] * desc.depth)
    lo, hi = f.windows[level]
    v = min(e[level] for e in f.terms)
    if hi is not None and v >= hi:
        raise TruncationError("leading coefficient lies beyond the exact window")
    var = desc.tower[level]
    if var.mode is Mode.POWER_SERIES and v > 0:
        raise NotInvertible(f"{var.label(desc.variables)} divides this element; not invertible in this chart")
    inner_exact = all(w[1] is None for w in f.windows[:level])
    lead = _level_slice(f, level, v)
    if len({e[level] for e in f.terms}) > 1 and not inner_exact:
        raise TruncationError("inner windows too small to invert exactly")
    lead_inv = _invert(lead, level - 1, precision)
    rest = f.shift(level, -v)
    h = tower_mul(lead_inv, rest) - TowerSeries.constant(desc, 1)
    # the level-0 coefficient of h cancels exactly because the lead is exact
    h = TowerSeries._raw(desc, {e: c for e, c in h.terms.items() if e[level] != 0},
                         [w if k != level else (max(w[0], 1), w[1]) for k, w in enumerate(h.windows)])
    if h.is_zero() and h.windows[level][1] is None:
        total = TowerSeries.constant(desc, 1)
    else:
        cap = h.windows[level][1]
        if cap is None:
            cap = precision + v
        if cap < 1:
            raise TruncationError("window too small to invert")
        total = TowerSeries.constant(desc, 1)
        power = TowerSeries.constant(desc, 1)
        neg_h = -h
        for _ in range(cap):
            power = tower_mul(power, neg_h)
            if power.is_zero():
                break
            total = total + power
        windows = list(total.windows)
        windows[level] = (windows[level][0], _min_hi(windows[level][1], cap))
        total = total.truncated(windows)
    return tower_mul(lead_inv, total).shift(level, -v)


# ---------------------------------------------------------------------------
# region expansions

def _tower_symbols(desc: RingDescriptor) -> Tuple[str, ...]:
    return tuple(f"_t{k}" for k in range(desc.depth))


def _from_poly(p: MultiPoly, desc: RingDescriptor) -> TowerSeries:
    """Image of a polynomial: substitute x_a = x_b + t and split by tower powers."""
    names = desc.variables
    syms = _tower_symbols(desc)
    ext = names + syms
    mapping = {}
    for k, v in enumerate(desc.tower):
        t = MultiPoly.var(ext, syms[k])
        mapping[names[v.a]] = t if v.b is None else t + MultiPoly.var(ext, names[v.b])
    sub = p.extend(ext).subs(mapping, ext)
    n = len(names)
    buckets: Dict[Tuple[int, ...], Dict] = {}
    for e, c in sub.terms.items():
        buckets.setdefault(e[n:], {})[e[:n]] = c
    terms = {k: LocalizedPoly.from_poly(MultiPoly(names, t)) for k, t in buckets.items()}
    return TowerSeries(desc, terms, [(0, None)] * desc.depth)


def expand_in_chart(p: LocalizedPoly, target: RingDescriptor, order: int = 8) -> TowerSeries:
    """Canonical image of a localized polynomial in a chart ring.

    Each inverted difference is inverted inside the target ring, expanding
    as a geometric series in the outermost tower variable that occurs.
    ``order`` caps the high order of levels where that expansion is infinite.
    """
    if p.variables != target.variables:
        raise StructureError("localized polynomial and chart use different variables")
    out = _from_poly(p.numerator, target)
    for (i, j), k in p.denominator.items():
        form = _from_poly(MultiPoly.difference(target.variables, i, j), target)
        try:
            inv = tower_invert(form, precision=order)
        except NotInvertible as exc:
            raise NoCanonicalMap(
                f"({target.variables[i]}-{target.variables[j]}) has no inverse in {target.describe()}") from exc
        for _ in range(k):
            out = tower_mul(out, inv)
    return out


def to_polynomial(f: TowerSeries) -> MultiPoly:
    """Undo the chart substitution for a series with only non-negative
    exponents, giving a polynomial in the global variables (the base
    coefficients must be polynomial too)."""
    desc = f.descriptor
    names = desc.variables
    out = MultiPoly.zero(names)
    for e, c in f.terms.items():
        if any(k < 0 for k in e) or not c.is_polynomial():
            raise ValueError("series is not a polynomial")
        term = c.numerator
        for k, v in zip(e, desc.tower):
            if k:
                t = MultiPoly.var(names, names[v.a])
                if v.b is not None:
                    t = t - MultiPoly.var(names, names[v.b])
                term = term * t ** k
        out = out + term
    return out


# ---------------------------------------------------------------------------
# normally ordered tensor product

def nott_product(f: TowerSeries, g: TowerSeries) -> TowerSeries:
    """f (x) g in the concatenated tower: f's levels inner, g's outer."""
    A, B = f.descriptor, g.descriptor
    if set(A.variables) & set(B.variables):
        raise StructureError("normally ordered product needs disjoint variables")
    names = A.variables + B.variables
    off = len(A.variables)
    desc = RingDescriptor(
        names,
        A.base + tuple(i + off for i in B.base),
        A.inverted | frozenset((i + off, j + off) for i, j in B.inverted),
        A.tower + tuple(TowerVar(v.a + off, None if v.b is None else v.b + off, v.mode) for v in B.tower),
    )
    terms: Dict[Tuple[int, ...], LocalizedPoly] = {}
    for e1, c1 in f.terms.items():
        n1 = c1.numerator.extend(names)
        d1 = dict(c1.denominator)
        for e2, c2 in g.terms.items():
            n2 = c2.numerator.extend(names)
            d2 = {(i + off, j + off): k for (i, j), k in c2.denominator.items()}
            terms[e1 + e2] = LocalizedPoly(n1 * n2, {**d1, **d2})
    return TowerSeries(desc, terms, f.windows + g.windows)


def is_member(family: Callable[[int], Dict[Tuple[int, ...], object]], desc: RingDescriptor,
              sizes: Sequence[int]) -> bool:
    """Decide, from a growing family of finite truncations, whether the limit
    is an element of the iterated ring: at every level the lowest exponent
    (for fixed outer exponents) must stay put as the truncation grows, and
    power-series levels must never go negative."""
    snapshots = [family(n) for n in sizes]

    def valuations(terms, level, prefix):
        # lowest exponent at ``level`` among terms whose outer exponents equal prefix
        vals = [e[level] for e in terms if tuple(e[level + 1:]) == prefix]
        return min(vals) if vals else None

    depth = desc.depth
    for level in range(depth - 1, -1, -1):
        prefixes = set()
        for terms in snapshots:
            prefixes |= {tuple(e[level + 1:]) for e in terms}
        for prefix in prefixes:
            seq = [valuations(t, level, prefix) for t in snapshots]
            seq = [v for v in seq if v is not None]
            if not seq:
                continue
            if desc.tower[level].mode is Mode.POWER_SERIES and min(seq) < 0:
                return False
            if level == depth - 1 and len(set(seq)) > 1:
                return False
        if level == depth - 1:
            continue
    # inner levels: for each fixed outer exponent the inner lowest exponent must be stable
    for level in range(depth - 2, -1, -1):
        for prefix in {tuple(e[level + 1:]) for t in snapshots for e in t}:
            seq = [valuations(t, level, prefix) for t in snapshots]
            seq = [v for v in seq if v is not None]
            if len(set(seq)) > 1:
                return False
    return True


# ---------------------------------------------------------------------------
# the two region expansions of 1/(z - w)

def delta_identity_check(order: int, corrupt: bool = False) -> dict:
    """Compare the expansions of 1/(x1 - x2) in Q[x3]((z))((w)) and
    Q[x3]((w))((z)), z = x1 - x3, w = x2 - x3, against the formal delta
    sum_n z^(-n-1) w^n, coefficientwise for exponents within ``order``."""
    names = ("x1", "x2", "x3")
    L = Mode.LAURENT
    zw = descriptor(names, [2], [(0, 2, L), (1, 2, L)])   # w outer
    wz = descriptor(names, [2], [(1, 2, L), (0, 2, L)])   # z outer
    p = LocalizedPoly.inverse_difference(names, 0, 1)
    e1 = expand_in_chart(p, zw, order=order + 1)
    e2 = expand_in_chart(p, wz, order=order + 1)
    if corrupt and e1.terms:
        key = min(e1.terms, key=lambda e: tuple(reversed(e)))
        e1 = TowerSeries._raw(zw, {**e1.terms, key: -e1.terms[key]}, e1.windows)
    mismatches = []
    for a in range(-order - 1, order + 1):        # z exponent
        for b in range(-order - 1, order + 1):    # w exponent
            c1 = _coef_or_none(e1, (a, b))
            c2 = _coef_or_none(e2, (b, a))
            if c1 is None or c2 is None:
                continue
            expected = 1 if a + b == -1 else 0
            if c1 - c2 != LocalizedPoly.const(names, expected):
                mismatches.append({"z": a, "w": b, "difference": repr(c1 - c2), "expected": expected})
    return {"order": order, "verdict": "fail" if mismatches else "pass", "mismatches": mismatches}


def _coef_or_none(f: TowerSeries, exps):
    try:
        return f.coefficient(exps)
    except TruncationError:
        return None
