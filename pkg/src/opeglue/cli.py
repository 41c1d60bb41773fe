"""Command-line workbench.

    workbench [--json PATH] [--cutoff K] [--window W] [--mutate NAME] COMMAND ...

    lca check FILE                 axioms of the lambda-bracket
    lca lie-r FILE --window W      Jacobi of the mode algebra on |m| <= W
    uea verify FILE -K K           vertex algebra axioms and associativity
    descent cocycle FILE -K K      cocycle condition on the A^3 covering
    descent glue FILE -K K         glue V2 and compare with Ker Y^2
    descent factorize FILE -K K    localization and diagonal checks on V2

FILE defaults to the shipped Virasoro file.  Exit status: 0 when every
verdict passes, 2 when any fails, 3 when the rest pass but some are
inconclusive, 1 for unreadable input or bad options.
"""

from __future__ import annotations

import json
import sys
import time
from typing import Dict, List, Optional

import click

from . import annihilation, conformal, descent, enveloping, gluing
from .exact_core import StructureError
from .algebra_file import AlgebraFileError, builtin_path, load_algebra, mutation_script_path

DEFAULT_CUTOFF = 6
DEFAULT_WINDOW = (-4, 6)
WITT_WINDOW = 6
EXIT = {"pass": 0, "fail": 2, "inconclusive": 3}


class Report:
    def __init__(self, command: str, inputs: dict):
        self.command = command
        self.inputs = inputs
        self.verdicts: List[dict] = []
        self.timings: Dict[str, float] = {}

    def add(self, name: str, verdict: str, window=None, residual=None, **extra) -> None:
        row = {"name": name, "verdict": verdict, "window": window}
        if residual is not None:
            row["residual"] = residual
        row.update(extra)
        self.verdicts.append(row)

    def overall(self) -> str:
        kinds = {v["verdict"] for v in self.verdicts}
        if "fail" in kinds:
            return "fail"
        if "inconclusive" in kinds:
            return "inconclusive"
        return "pass"

    def to_dict(self) -> dict:
        return {"command": self.command, "inputs": self.inputs, "verdicts": self.verdicts,
                "timings": self.timings}

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)


def _finish(ctx: click.Context, report: Report) -> None:
    for v in report.verdicts:
        line = f"{v['verdict'].upper():13s} {v['name']}"
        if v.get("window") is not None:
            line += f"  window={v['window']}"
        if v.get("residual"):
            line += f"  residual: {v['residual']}"
        click.echo(line)
    path = ctx.obj.get("json")
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(report.dumps() + "\n")
    ctx.exit(EXIT[report.overall()])


def _load(path: Optional[str]):
    try:
        return load_algebra(path or builtin_path("vir.json"))
    except (AlgebraFileError, OSError) as exc:
        raise click.ClickException(str(exc)) from None


def _option(ctx: click.Context, local, key: str, default):
    if local is not None:
        return local
    value = ctx.obj.get(key)
    return default if value is None else value


def _va(ctx: click.Context, P, K: int, report: Report) -> enveloping.EnvelopingVA:
    """The enveloping vertex algebra, or a failed report when P is not a
    Lie conformal algebra."""
    if K < 0:
        raise click.BadParameter("cutoff must be non-negative")
    res = conformal.check_axioms(P)
    if res["failures"]:
        f = res["failures"][0]
        report.add("lca axioms", "fail", residual=f"{f['identity']} {'/'.join(f['generators'])}: {f['residual']}")
        _finish(ctx, report)
    try:
        return enveloping.EnvelopingVA(P, K)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None


class _Timer:
    def __init__(self, report: Report, name: str):
        self.report, self.name = report, name

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.report.timings[self.name] = round(time.perf_counter() - self.t0, 3)


class _Group(click.Group):
    """Root group: usage and input errors exit with 1, so 2 always means a
    failed verdict."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        if not standalone_mode:
            return super().main(args, prog_name, complete_var, False, **extra)
        try:
            rv = super().main(args, prog_name, complete_var, False, **extra)
        except click.ClickException as exc:
            exc.show()
            sys.exit(1)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(1)
        sys.exit(rv if isinstance(rv, int) else 0)


@click.group(cls=_Group)
@click.option("--json", "json_path", type=click.Path(dir_okay=False), help="Write the report as JSON.")
@click.option("--cutoff", "-K", type=int, help="Weight cutoff.")
@click.option("--window", type=int, help="Mode window for lca lie-r.")
@click.option("--mutate", help="Mutation name or JSON script for descent commands.")
@click.pass_context
def main(ctx: click.Context, json_path, cutoff, window, mutate):
    """Exact checks for Lie conformal algebras, enveloping vertex algebras
    and OPE gluing data."""
    ctx.ensure_object(dict)
    ctx.obj.update(json=json_path, cutoff=cutoff, window=window, mutate=mutate)


# lca ----------------------------------------------------------------------

@main.group()
def lca():
    """Lie conformal algebra checks."""


@lca.command("check")
@click.argument("file", required=False)
@click.pass_context
def lca_check(ctx, file):
    """Antisymmetry and Jacobi, symbolically in lambda, mu and T."""
    P = _load(file)
    report = Report("lca check", {"file": file or "vir.json", "algebra": P.name})
    with _Timer(report, "axioms"):
        res = conformal.check_axioms(P)
    if res["failures"]:
        for f in res["failures"]:
            report.add(f"{f['identity']} {'/'.join(f['generators'])}", "fail", residual=f["residual"])
    else:
        report.add("antisymmetry", "pass", checked=res["checked"]["antisymmetry"])
        report.add("jacobi", "pass", checked=res["checked"]["jacobi"])
    _finish(ctx, report)


@lca.command("lie-r")
@click.argument("file", required=False)
@click.option("--window", "-W", type=int, help="Check modes with |m| <= W (default 4).")
@click.pass_context
def lca_lie_r(ctx, file, window):
    """Jacobi and antisymmetry of the mode Lie algebra on a window."""
    P = _load(file)
    W = _option(ctx, window, "window", 4)
    if W < 0:
        raise click.BadParameter("window must be non-negative")
    report = Report("lca lie-r", {"file": file or "vir.json", "algebra": P.name, "window": W})
    with _Timer(report, "jacobi"):
        res = annihilation.jacobi_window_check(P, W)
    residual = res["failures"][0].get("residual") if res["failures"] else None
    report.add("jacobi", "pass" if res["passed"] else "fail", window=[-W, W], residual=residual,
               basis_size=res["basis_size"], failures=len(res["failures"]))
    if P.generators == ("L",):
        Ww = max(W, WITT_WINDOW)
        try:
            with _Timer(report, "witt"):
                w = annihilation.witt_isomorphism_check(Ww, P)
            bad = w["failures"][0] if w["failures"] else None
            report.add("witt", "pass" if w["passed"] else "fail", window=[-Ww, Ww],
                       residual=json.dumps(bad, sort_keys=True) if bad else None)
        except StructureError as exc:
            report.add("witt", "fail", window=[-Ww, Ww], residual=str(exc))
    _finish(ctx, report)


# uea ----------------------------------------------------------------------

@main.group()
def uea():
    """Enveloping vertex algebra checks."""


@uea.command("verify")
@click.argument("file", required=False)
@click.option("--cutoff", "-K", type=int, help="Weight cutoff (default 6).")
@click.option("--axioms", default="vacuum,creation,translation,locality,associativity", show_default=True,
              help="Comma separated subset of the checks.")
@click.option("--triples", type=int, help="Only the first N associativity triples.")
@click.pass_context
def uea_verify(ctx, file, cutoff, axioms, triples):
    """Vacuum, creation, translation, locality and associativity."""
    P = _load(file)
    K = _option(ctx, cutoff, "cutoff", DEFAULT_CUTOFF)
    wanted = [a.strip() for a in axioms.split(",") if a.strip()]
    known = {"vacuum", "creation", "translation", "locality", "associativity"}
    if set(wanted) - known:
        raise click.BadParameter(f"unknown axioms: {sorted(set(wanted) - known)}")
    report = Report("uea verify", {"file": file or "vir.json", "algebra": P.name, "cutoff": K,
                                   "axioms": wanted, "triples": triples})
    va = _va(ctx, P, K, report)
    basic = [a for a in wanted if a != "associativity"]
    if basic:
        with _Timer(report, "axioms"):
            res = enveloping.verify_axioms(va, axioms=basic)
        for chk in res["checks"]:
            extra = {}
            if chk["name"] == "locality":
                extra["orders"] = [{"a": o["a"], "b": o["b"], "order": o["order"]} for o in chk["orders"]]
            fails = chk.get("failures") or []
            report.add(chk["name"], chk["verdict"], window=[0, K],
                       residual=fails[0].get("residual") if fails else None, **extra)
    if "associativity" in wanted:
        from .descent import cocycle_triples
        sample = cocycle_triples(va)
        if triples is not None:
            sample = sample[:triples]
        with _Timer(report, "associativity"):
            counts, first = _associativity(va, sample)
        verdict = "fail" if counts["fail"] else ("inconclusive" if counts["inconclusive"] else "pass")
        report.add("associativity", verdict, window=[0, K], residual=first, counts=counts, checked=len(sample))
    _finish(ctx, report)


def _associativity(va, sample):
    counts = {"pass": 0, "fail": 0, "inconclusive": 0}
    first = None
    for a, b, c in sample:
        r = enveloping.verify_associativity(va, va.state(a), va.state(b), va.state(c))
        counts[r["verdict"]] += 1
        if r["verdict"] == "fail" and first is None:
            m = r["mismatches"][0] if r["mismatches"] else r["non_polynomial"][0]
            first = f"{[va.format_monomial(x) for x in (a, b, c)]}: {m}"
    return counts, first


# descent --------------------------------------------------------------------

@main.group("descent")
def descent_group():
    """OPE gluing data over A^2 and A^3."""


def _mutation(ctx, mutate):
    choice = _option(ctx, mutate, "mutate", None)
    if choice is None:
        return None
    try:
        if choice in descent.MUTATIONS:
            return descent.load_mutation(mutation_script_path(choice))
        return descent.load_mutation(choice)
    except (ValueError, OSError, KeyError) as exc:
        raise click.BadParameter(str(exc)) from None


@descent_group.command("cocycle")
@click.argument("file", required=False)
@click.option("--cutoff", "-K", type=int, help="Weight cutoff (default 6).")
@click.option("--order", "-N", type=int, help="Outer series window of the overlap expansions (default: automatic).")
@click.option("--mutate", help="Mutation name or JSON script.")
@click.pass_context
def descent_cocycle(ctx, file, cutoff, order, mutate):
    """Commutativity and the cocycle condition on all triples of weight <= K."""
    P = _load(file)
    K = _option(ctx, cutoff, "cutoff", DEFAULT_CUTOFF)
    mut = _mutation(ctx, mutate)
    report = Report("descent cocycle", {"file": file or "vir.json", "algebra": P.name, "cutoff": K,
                                        "order": order, "mutate": mut.to_json() if mut else None})
    phi = descent.ope_from_vertex(_va(ctx, P, K, report), mut)
    with _Timer(report, "commutativity"):
        com = descent.check_commutativity(phi)
    report.add("commutativity", com["verdict"], window=[0, K],
               residual=com["failures"][0]["residual"] if com["failures"] else None, checked=com["checked"])
    D = descent.build_transitions(phi)
    orders = {"window": order} if order is not None else None
    with _Timer(report, "cocycle"):
        res = descent.check_cocycle(D, orders=orders)
    residual = None
    for d in res["details"]:
        if d["verdict"] == "fail":
            m = d["mismatches"][0] if d["mismatches"] else d["non_polynomial"][0]
            residual = f"{d['triple']}: {m}"
            break
    window = [DEFAULT_WINDOW[0], order] if order is not None else [DEFAULT_WINDOW[0], "auto"]
    report.add("cocycle", res["verdict"], window=window, residual=residual, counts=res["counts"],
               checked=res["triples"])
    _finish(ctx, report)


@descent_group.command("glue")
@click.argument("file", required=False)
@click.option("--cutoff", "-K", type=int, help="Tensor weight bound (default 4).")
@click.option("--mutate", help="Mutation name or JSON script.")
@click.pass_context
def descent_glue(ctx, file, cutoff, mutate):
    """Glue V2 from the OPE and compare with Ker Y^2 per (N, W)."""
    P = _load(file)
    K = _option(ctx, cutoff, "cutoff", 4)
    mut = _mutation(ctx, mutate)
    report = Report("descent glue", {"file": file or "vir.json", "algebra": P.name, "cutoff": K,
                                     "mutate": mut.to_json() if mut else None})
    phi = descent.ope_from_vertex(_va(ctx, P, K, report), mut)
    with _Timer(report, "glue"):
        # the reference kernel always comes from the unmutated vertex algebra
        res = gluing.reconstruct_and_compare(phi, K, reference=gluing.y2_kernel(enveloping.EnvelopingVA(P, K), K))
    residual = None
    if res["differences"]:
        d = res["differences"][0]
        residual = f"(N, W) = {tuple(d['bidegree'])}: glued {d['glued']} vs kernel {d['kernel']}"
    report.add("reconstruct", res["verdict"], window=[0, K], residual=residual,
               dimensions=[[N, W, res["glued"][(N, W)]] for (N, W) in sorted(res["glued"])])
    _finish(ctx, report)


@descent_group.command("factorize")
@click.argument("file", required=False)
@click.option("--cutoff", "-K", type=int, help="Tensor weight bound (default 4).")
@click.option("--degrees", help="Comma separated degrees N to check (default 0..W).")
@click.pass_context
def descent_factorize(ctx, file, cutoff, degrees):
    """Localization (V2 -> V (x) V) and diagonal (V2 -> V) checks."""
    P = _load(file)
    K = _option(ctx, cutoff, "cutoff", 4)
    try:
        Ns = [int(x) for x in degrees.split(",")] if degrees else None
    except ValueError:
        raise click.BadParameter("degrees must be comma separated integers") from None
    report = Report("descent factorize", {"file": file or "vir.json", "algebra": P.name, "cutoff": K,
                                          "degrees": Ns})
    phi = descent.ope_from_vertex(_va(ctx, P, K, report))
    with _Timer(report, "factorize"):
        res = gluing.factorization_check(phi, K, Ns)
    for piece in res["pieces"]:
        report.add(f"factorization N={piece['N']} W={piece['W']}", piece["verdict"], window=[0, piece["W"]],
                   localization=piece["localization"], diagonal=piece["diagonal_rank"] and piece["diagonal_kernel"])
    _finish(ctx, report)


if __name__ == "__main__":  # pragma: no cover
    main()
