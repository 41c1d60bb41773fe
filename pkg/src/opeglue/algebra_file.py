"""Reading and writing algebra definition files.

A file is UTF-8 JSON::

    {"name": "Vir", "kind": "virasoro" | "current" | "custom",
     "generators": ["L"],
     "weights": {"L": 2},                         (optional)
     "brackets": [{"a": "L", "b": "L", "c": "L", "poly": "T + 2*λ"}],
     "lie": [{"a": "e", "b": "f", "c": "h", "coeff": 1}]}   (kind current)

``poly`` is the coefficient of c in [a_λ b], a polynomial in λ and T built
from integers, + - * ^ and parentheses (``lambda``/``lam`` also name λ).
For kind ``current`` the bracket may be given through ``lie`` instead:
[a_λ b] = [a, b], listing each unordered pair once.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Dict, Tuple

from .conformal import (ALIASES, LAM_T, InvalidPresentation, LCAPresentation, builtin_current,
                        presentation_from_strings)
from .exact_core import PolyParseError, parse_poly


class AlgebraFileError(ValueError):
    """A malformed algebra file; ``where`` locates the problem."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


BUILTIN_FILES = ("vir.json", "sl2.json", "mutated_vir.json")


def builtin_path(name: str) -> str:
    return str(resources.files("opeglue") / "data" / name)


def mutation_script_path(name: str) -> str:
    return str(resources.files("opeglue") / "data" / "mutations" / f"{name}.json")


def parse_algebra(text: str, source: str = "<string>") -> LCAPresentation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFileError(exc.msg, f"{source}:{exc.lineno}:{exc.colno}") from exc
    if not isinstance(doc, dict):
        raise AlgebraFileError("top level must be an object", source)
    gens = doc.get("generators")
    if not isinstance(gens, list) or not gens or not all(isinstance(g, str) for g in gens):
        raise AlgebraFileError("'generators' must be a non-empty list of names", source)
    kind = doc.get("kind", "custom")
    if kind not in ("current", "virasoro", "custom"):
        raise AlgebraFileError(f"unknown kind {kind!r}", source)
    name = doc.get("name", "")
    try:
        if kind == "current" and "brackets" not in doc:
            constants: Dict[Tuple[str, str], Dict[str, object]] = {}
            for row in doc.get("lie", []):
                constants.setdefault((row["a"], row["b"]), {})[row["c"]] = row["coeff"]
            return builtin_current(gens, constants, name or "Cur")
        table: Dict[Tuple[str, str], Dict[str, str]] = {}
        lines = text.splitlines()
        for k, row in enumerate(doc.get("brackets", [])):
            where = f"{source}: brackets[{k}]"
            try:
                key = (row["a"], row["b"])
                entry = table.setdefault(key, {})
                entry[row["c"]] = row["poly"]
            except KeyError as exc:
                raise AlgebraFileError(f"missing field {exc}", where) from None
        # validate polynomials one at a time for precise locations
        for k, row in enumerate(doc.get("brackets", [])):
            try:
                parse_poly(row["poly"], LAM_T, ALIASES)
            except PolyParseError as exc:
                line = _line_of(lines, row["poly"])
                raise AlgebraFileError(str(exc),
                                       f"{source}:{line}: brackets[{k}].poly") from None
        return presentation_from_strings(gens, table, doc.get("weights"), name)
    except InvalidPresentation as exc:
        raise AlgebraFileError(str(exc), source) from None
    except (KeyError, TypeError) as exc:
        raise AlgebraFileError(f"malformed entry: {exc}", source) from None


def _line_of(lines, needle: str) -> int:
    for i, line in enumerate(lines, 1):
        if json.dumps(needle, ensure_ascii=False) in line or needle in line:
            return i
    return 0


def load_algebra(path: str) -> LCAPresentation:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read(), path)


def dump_algebra(P: LCAPresentation) -> str:
    """Serialize a presentation in the custom form (explicit brackets)."""
    rows = []
    for (a, b) in sorted(P.bracket_table):
        for c, poly in P.bracket_table[(a, b)]:
            rows.append({"a": a, "b": b, "c": c, "poly": _poly_text(poly)})
    doc = {"name": P.name, "kind": "custom", "generators": list(P.generators), "brackets": rows}
    if P.weights:
        doc["weights"] = {g: str(w) if getattr(w, "denominator", 1) != 1 else int(w) for g, w in P.weights.items()}
    return json.dumps(doc, ensure_ascii=False, indent=2)


def _poly_text(p) -> str:
    terms = []
    for (j, k), c in sorted(p.terms.items()):
        factors = [str(c)]
        if j:
            factors.append("lam" if j == 1 else f"lam^{j}")
        if k:
            factors.append("T" if k == 1 else f"T^{k}")
        terms.append("*".join(factors))
    return " + ".join(terms) if terms else "0"
