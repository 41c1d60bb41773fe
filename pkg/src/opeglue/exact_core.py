"""Exact rational coefficients, sparse multivariate polynomials, and
polynomials localized at pairwise differences of variables.

Coefficients are Python ints or :class:`fractions.Fraction`; anything that
comes out with denominator 1 is stored as an int so that the common integral
case stays on the fast path.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Rational = Union[int, Fraction]
Exps = Tuple[int, ...]


class StructureError(ValueError):
    """Operands live in different ambient rings."""


def q(x) -> Rational:
    """Coerce to an exact rational, demoting integral fractions to int."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return q(Fraction(x))
    raise TypeError(f"not an exact rational: {x!r}")


def falling_binomial(m: int, j: int) -> int:
    """Binomial coefficient C(m, j) for arbitrary integer m, j >= 0,
    via the falling factorial m(m-1)...(m-j+1)/j!."""
    if j < 0:
        return 0
    if m >= 0:
        return comb(m, j)
    # C(m, j) = (-1)^j C(j - m - 1, j)
    return (-1) ** j * comb(j - m - 1, j)


class MultiPoly:
    """Sparse polynomial over Q in a fixed, ordered list of variables."""

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exps, Rational] | None = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: Dict[Exps, Rational] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n or any(k < 0 for k in e):
                    raise StructureError(f"bad exponent vector {e} for variables {self.variables}")
                c = q(c)
                if c:
                    clean[e] = clean.get(e, 0) + c
                    if not clean[e]:
                        del clean[e]
        self.terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def _raw(cls, variables, terms):
        p = cls.__new__(cls)
        p.variables = variables
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls._raw(tuple(variables), {})

    @classmethod
    def const(cls, variables: Sequence[str], c) -> "MultiPoly":
        variables = tuple(variables)
        c = q(c)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def var(cls, variables: Sequence[str], name: str, power: int = 1) -> "MultiPoly":
        variables = tuple(variables)
        e = [0] * len(variables)
        e[variables.index(name)] = power
        return cls._raw(variables, {tuple(e): 1})

    @classmethod
    def difference(cls, variables: Sequence[str], i: int, j: int) -> "MultiPoly":
        """x_i - x_j, by variable index."""
        variables = tuple(variables)
        n = len(variables)
        ei = [0] * n
        ej = [0] * n
        ei[i] = 1
        ej[j] = 1
        return cls._raw(variables, {tuple(ei): 1, tuple(ej): -1})

    # basic predicates
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Rational:
        return self.terms.get((0,) * len(self.variables), 0)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def _check(self, other: "MultiPoly"):
        if self.variables != other.variables:
            raise StructureError(f"variable lists differ: {self.variables} vs {other.variables}")

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return MultiPoly.const(self.variables, other)

    # ring operations
    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = q(v)
            else:
                out.pop(e, None)
        return MultiPoly._raw(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            c = q(other)
            if not c:
                return MultiPoly.zero(self.variables)
            return MultiPoly._raw(self.variables, {e: q(v * c) for e, v in self.terms.items()})
        self._check(other)
        out: Dict[Exps, Rational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly._raw(self.variables, {e: q(c) for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.const(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.variables == other.variables and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0,) * len(self.variables): other} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    # substitution and change of ring
    def subs(self, mapping: Mapping[str, "MultiPoly"], target_vars: Sequence[str] | None = None) -> "MultiPoly":
        """Substitute polynomials (all over ``target_vars``) for variables.

        Variables not in ``mapping`` must also exist in ``target_vars`` and
        are carried over unchanged.
        """
        target_vars = tuple(target_vars) if target_vars is not None else self.variables
        images = []
        for name in self.variables:
            if name in mapping:
                img = mapping[name]
                if img.variables != target_vars:
                    raise StructureError(f"substitution for {name} lives over {img.variables}")
                images.append(img)
            else:
                images.append(MultiPoly.var(target_vars, name))
        powers: Dict[Tuple[int, int], MultiPoly] = {}

        def pw(i, k):
            key = (i, k)
            if key not in powers:
                powers[key] = images[i] ** k
            return powers[key]

        out = MultiPoly.zero(target_vars)
        for e, c in self.terms.items():
            term = MultiPoly.const(target_vars, c)
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
            out = out + term
        return out

    def extend(self, target_vars: Sequence[str]) -> "MultiPoly":
        """Re-express over a variable list containing all our variables."""
        target_vars = tuple(target_vars)
        idx = [target_vars.index(v) for v in self.variables]
        n = len(target_vars)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for i, k in zip(idx, e):
                ne[i] = k
            out[tuple(ne)] = c
        return MultiPoly._raw(target_vars, out)

    def restrict(self, target_vars: Sequence[str]) -> "MultiPoly":
        """Drop variables that do not occur; raises if a dropped one occurs."""
        target_vars = tuple(target_vars)
        keep = [self.variables.index(v) for v in target_vars]
        dropped = [i for i in range(len(self.variables)) if i not in keep]
        out = {}
        for e, c in self.terms.items():
            if any(e[i] for i in dropped):
                raise StructureError("polynomial involves a dropped variable")
            out[tuple(e[i] for i in keep)] = c
        return MultiPoly._raw(target_vars, out)

    def coefficients_in(self, i: int) -> Dict[int, "MultiPoly"]:
        """Split as a polynomial in variable i: {power: coefficient}."""
        out: Dict[int, Dict[Exps, Rational]] = {}
        for e, c in self.terms.items():
            k = e[i]
            rest = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[rest] = c
        return {k: MultiPoly._raw(self.variables, t) for k, t in out.items()}

    def divide_by_difference(self, i: int, j: int) -> "MultiPoly | None":
        """Exact quotient by (x_i - x_j), or None if it does not divide."""
        coeffs = self.coefficients_in(i)
        if not coeffs:
            return MultiPoly.zero(self.variables)
        d = max(coeffs)
        xj = MultiPoly.var(self.variables, self.variables[j])
        xi_pow = lambda k: MultiPoly.var(self.variables, self.variables[i], k)
        quotient = MultiPoly.zero(self.variables)
        carry = MultiPoly.zero(self.variables)
        # synthetic division in x_i: q_{k-1} = c_k + x_j q_k
        for k in range(d, 0, -1):
            carry = coeffs.get(k, MultiPoly.zero(self.variables)) + xj * carry
            quotient = quotient + carry * xi_pow(k - 1)
        remainder = coeffs.get(0, MultiPoly.zero(self.variables)) + xj * carry
        return quotient if remainder.is_zero() else None

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (-sum(t[0]), [-k for k in t[0]])):
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_add(p: MultiPoly, q_: MultiPoly) -> MultiPoly:
    if p.variables != q_.variables:
        raise StructureError(f"variable lists differ: {p.variables} vs {q_.variables}")
    return p + q_


Pair = Tuple[int, int]


def _pair(i: int, j: int) -> Tuple[Pair, int]:
    """Ordered pair with i < j and the sign relating x_i - x_j to it."""
    if i == j:
        raise ValueError("difference of a variable with itself")
    return ((i, j), 1) if i < j else ((j, i), -1)


class LocalizedPoly:
    """numerator / prod (x_i - x_j)^k_ij with i < j, kept fully reduced."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: MultiPoly, denominator: Mapping[Pair, int] | None = None):
        den: Dict[Pair, int] = {}
        num = numerator
        for (i, j), k in (denominator or {}).items():
            if k < 0:
                raise ValueError("negative denominator exponent")
            if not k:
                continue
            pair, sign = _pair(i, j)
            if sign < 0 and k % 2:
                num = -num
            den[pair] = den.get(pair, 0) + k
        self.numerator, self.denominator = _reduce(num, den)

    @classmethod
    def _raw(cls, num, den):
        p = cls.__new__(cls)
        p.numerator = num
        p.denominator = den
        return p

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "LocalizedPoly":
        return cls._raw(p, {})

    @classmethod
    def const(cls, variables, c) -> "LocalizedPoly":
        return cls._raw(MultiPoly.const(variables, c), {})

    @classmethod
    def inverse_difference(cls, variables, i: int, j: int, k: int = 1) -> "LocalizedPoly":
        """(x_i - x_j)^(-k)."""
        return cls(MultiPoly.const(variables, 1), {(i, j): k})

    @property
    def variables(self):
        return self.numerator.variables

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def is_polynomial(self) -> bool:
        return not self.denominator

    def is_constant(self) -> bool:
        return not self.denominator and self.numerator.is_constant()

    def _common(self, other: "LocalizedPoly"):
        if self.variables != other.variables:
            raise StructureError("localized polynomials over different variables")
        den = dict(self.denominator)
        for p, k in other.denominator.items():
            den[p] = max(den.get(p, 0), k)
        a = self.numerator * _diff_monomial(self.variables, {p: den[p] - self.denominator.get(p, 0) for p in den})
        b = other.numerator * _diff_monomial(self.variables, {p: den[p] - other.denominator.get(p, 0) for p in den})
        return a, b, den

    def _coerce(self, other) -> "LocalizedPoly":
        if isinstance(other, LocalizedPoly):
            return other
        if isinstance(other, MultiPoly):
            return LocalizedPoly._raw(other, {})
        return LocalizedPoly.const(self.variables, other)

    def __add__(self, other) -> "LocalizedPoly":
        other = self._coerce(other)
        if not self.denominator and not other.denominator:
            return LocalizedPoly._raw(self.numerator + other.numerator, {})
        a, b, den = self._common(other)
        return LocalizedPoly._raw(*_reduce(a + b, den))

    __radd__ = __add__

    def __neg__(self) -> "LocalizedPoly":
        return LocalizedPoly._raw(-self.numerator, dict(self.denominator))

    def __sub__(self, other) -> "LocalizedPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LocalizedPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LocalizedPoly":
        if not isinstance(other, (LocalizedPoly, MultiPoly)):
            c = q(other)
            if not c:
                return LocalizedPoly._raw(MultiPoly.zero(self.variables), {})
            return LocalizedPoly._raw(self.numerator * c, dict(self.denominator))
        other = self._coerce(other)
        if self.variables != other.variables:
            raise StructureError("localized polynomials over different variables")
        num = self.numerator * other.numerator
        if not self.denominator and not other.denominator:
            return LocalizedPoly._raw(num, {})
        den = dict(self.denominator)
        for p, k in other.denominator.items():
            den[p] = den.get(p, 0) + k
        return LocalizedPoly._raw(*_reduce(num, den))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LocalizedPoly":
        if k < 0:
            raise ValueError("negative power; use inverse_difference for units")
        out = LocalizedPoly.const(self.variables, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, LocalizedPoly):
            return self.numerator == other.numerator and self.denominator == other.denominator
        if isinstance(other, (MultiPoly, int, Fraction)):
            return not self.denominator and self.numerator == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.numerator, frozenset(self.denominator.items())))

    def normalized(self) -> "LocalizedPoly":
        return LocalizedPoly._raw(*_reduce(self.numerator, dict(self.denominator)))

    def __repr__(self) -> str:
        if not self.denominator:
            return repr(self.numerator)
        v = self.variables
        den = "*".join(
            f"({v[i]}-{v[j]})" + (f"^{k}" if k > 1 else "") for (i, j), k in sorted(self.denominator.items())
        )
        return f"({self.numerator})/{den}"


def _diff_monomial(variables, exps: Mapping[Pair, int]) -> MultiPoly:
    out = MultiPoly.const(variables, 1)
    for (i, j), k in exps.items():
        if k:
            out = out * MultiPoly.difference(variables, i, j) ** k
    return out


def _reduce(num: MultiPoly, den: Dict[Pair, int]):
    if num.is_zero():
        return num, {}
    den = {p: k for p, k in den.items() if k}
    for pair in list(den):
        i, j = pair
        while den.get(pair):
            quot = num.divide_by_difference(i, j)
            if quot is None:
                break
            num = quot
            den[pair] -= 1
            if not den[pair]:
                del den[pair]
    return num, den


def loc_mul(p: LocalizedPoly, q_: LocalizedPoly) -> LocalizedPoly:
    return p * q_


def clear_denominators(p: LocalizedPoly) -> Tuple[MultiPoly, Dict[Pair, int]]:
    """Numerator after multiplying by the minimal difference monomial making
    ``p`` polynomial, plus the exponents of that monomial (1-based pairs)."""
    exps = {(i + 1, j + 1): k for (i, j), k in p.denominator.items()}
    return p.numerator, exps


def from_cleared(numerator: MultiPoly, exps: Mapping[Pair, int]) -> LocalizedPoly:
    """Inverse of :func:`clear_denominators`."""
    return LocalizedPoly(numerator, {(i - 1, j - 1): k for (i, j), k in exps.items()})


# --------------------------------------------------------------------------
# polynomial strings: integers, + - * ^, parentheses, declared symbols

class PolyParseError(ValueError):
    def __init__(self, message: str, text: str, column: int):
        super().__init__(f"{message} at column {column}: {text!r}")
        self.text = text
        self.column = column


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-zλμ_][A-Za-z0-9_]*|λ|μ)|(\*\*|[-+*^()/]))")


def parse_poly(text: str, variables: Sequence[str], aliases: Mapping[str, str] | None = None) -> MultiPoly:
    """Parse a polynomial string over ``variables``.

    Division is only allowed by integer literals, so rational coefficients
    can be written as ``3/2*T``.
    """
    aliases = dict(aliases or {})
    variables = tuple(variables)
    tokens = []
    pos = 0
    text_s = text.rstrip()
    while pos < len(text_s):
        m = _TOKEN.match(text_s, pos)
        if not m or m.end() == pos:
            raise PolyParseError("unexpected character", text, pos + 1)
        col = m.start(m.lastindex) + 1
        if m.group(1):
            tokens.append(("int", int(m.group(1)), col))
        elif m.group(2):
            name = aliases.get(m.group(2), m.group(2))
            if name not in variables:
                raise PolyParseError(f"unknown symbol {m.group(2)!r}", text, col)
            tokens.append(("var", name, col))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, col))
        pos = m.end()
    tokens.append(("end", None, len(text_s) + 1))
    i = 0

    def peek():
        return tokens[i]

    def take():
        nonlocal i
        tok = tokens[i]
        i += 1
        return tok

    def expr():
        sign = 1
        if peek()[:2] in (("op", "-"), ("op", "+")):
            sign = -1 if take()[1] == "-" else 1
        out = term() * sign
        while peek()[:2] in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term():
        out = factor()
        while True:
            tok = peek()
            if tok[:2] == ("op", "*"):
                take()
                out = out * factor()
            elif tok[:2] == ("op", "/"):
                take()
                t = take()
                if t[0] != "int" or t[1] == 0:
                    raise PolyParseError("division only by a nonzero integer", text, t[2])
                out = out * Fraction(1, t[1])
            elif tok[0] in ("int", "var") or tok[:2] == ("op", "("):
                out = out * factor()  # implicit product, e.g. "2T"
            else:
                return out

    def factor():
        base = atom()
        if peek()[:2] == ("op", "^"):
            take()
            t = take()
            if t[0] != "int":
                raise PolyParseError("exponent must be a non-negative integer", text, t[2])
            base = base ** t[1]
        return base

    def atom():
        t = take()
        if t[0] == "int":
            return MultiPoly.const(variables, t[1])
        if t[0] == "var":
            return MultiPoly.var(variables, t[1])
        if t[:2] == ("op", "("):
            inner = expr()
            close = take()
            if close[:2] != ("op", ")"):
                raise PolyParseError("expected ')'", text, close[2])
            return inner
        if t[:2] == ("op", "-"):
            return -atom()
        raise PolyParseError("unexpected token", text, t[2])

    if tokens[0][0] == "end":
        raise PolyParseError("empty polynomial", text, 1)
    result = expr()
    if peek()[0] != "end":
        raise PolyParseError("trailing input", text, peek()[2])
    return result
