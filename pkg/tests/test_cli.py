import json

import pytest
from click.testing import CliRunner

from opeglue.algebra_file import builtin_path
from opeglue.cli import main


def run(*args):
    return CliRunner().invoke(main, list(args), catch_exceptions=False)


def report(tmp_path, *args):
    out = tmp_path / "r.json"
    res = run("--json", str(out), *args)
    return res, json.loads(out.read_text(encoding="utf-8"))


def test_help_lists_commands():
    res = run("--help")
    assert res.exit_code == 0
    for word in ("lca", "uea", "descent"):
        assert word in res.output


@pytest.mark.parametrize("name", ["vir.json", "sl2.json"])
def test_lca_check_builtins(name):
    res = run("lca", "check", builtin_path(name))
    assert res.exit_code == 0 and "PASS" in res.output


def test_lca_check_mutated_fails():
    res = run("lca", "check", builtin_path("mutated_vir.json"))
    assert res.exit_code == 2 and "FAIL" in res.output


def test_malformed_polynomial_exits_one(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"generators": ["L"], "brackets": [{"a": "L", "b": "L", "c": "L", "poly": "T +"}]},
                              indent=1), encoding="utf-8")
    res = CliRunner().invoke(main, ["lca", "check", str(bad)])
    assert res.exit_code == 1
    assert "brackets[0].poly" in res.output


def test_missing_file_exits_one():
    res = CliRunner().invoke(main, ["lca", "check", "/no/such/file.json"])
    assert res.exit_code == 1


def test_unknown_option_exits_one():
    assert CliRunner().invoke(main, ["--nope"]).exit_code == 1


@pytest.mark.parametrize("name", ["vir.json", "sl2.json"])
def test_lie_r_window_four(tmp_path, name):
    res, rep = report(tmp_path, "lca", "lie-r", builtin_path(name), "--window", "4")
    assert res.exit_code == 0
    assert rep["verdicts"][0]["window"] == [-4, 4]


def test_lie_r_window_zero_is_vacuous(tmp_path):
    res, rep = report(tmp_path, "--window", "0", "lca", "lie-r", builtin_path("sl2.json"))
    assert res.exit_code == 0 and rep["verdicts"][0]["basis_size"] == 0


def test_uea_vacuum_subsuite(tmp_path):
    res, rep = report(tmp_path, "uea", "verify", "-K", "4", "--axioms", "vacuum")
    assert res.exit_code == 0
    assert [v["name"] for v in rep["verdicts"]] == ["vacuum"]


def test_uea_verify_on_non_lca_fails(tmp_path):
    res, rep = report(tmp_path, "uea", "verify", builtin_path("mutated_vir.json"), "-K", "3")
    assert res.exit_code == 2 and rep["verdicts"][0]["name"] == "lca axioms"


def test_uea_verify_sl2_with_triples(tmp_path):
    res, rep = report(tmp_path, "uea", "verify", builtin_path("sl2.json"), "-K", "3", "--triples", "40")
    assert res.exit_code == 0
    assoc = rep["verdicts"][-1]
    assert assoc["name"] == "associativity" and assoc["checked"] == 40


def test_descent_cocycle_pass(tmp_path):
    res, rep = report(tmp_path, "descent", "cocycle", builtin_path("vir.json"), "-K", "6")
    assert res.exit_code == 0
    assert {v["name"]: v["verdict"] for v in rep["verdicts"]} == {"commutativity": "pass", "cocycle": "pass"}


@pytest.mark.parametrize("mutation", ["pole1", "shift"])
def test_descent_cocycle_mutation_fails_with_residual(tmp_path, mutation):
    res, rep = report(tmp_path, "--mutate", mutation, "descent", "cocycle")
    assert res.exit_code == 2
    by_name = {v["name"]: v for v in rep["verdicts"]}
    assert by_name["commutativity"]["verdict"] == "pass"
    assert by_name["cocycle"]["verdict"] == "fail" and by_name["cocycle"]["residual"]


def test_descent_mutation_script_path(tmp_path):
    script = tmp_path / "m.json"
    script.write_text(json.dumps({"kind": "pole2", "pair": None, "state": None}), encoding="utf-8")
    res = run("descent", "cocycle", "--mutate", str(script))
    assert res.exit_code == 2


def test_descent_small_order_is_inconclusive():
    res = run("descent", "cocycle", "-K", "4", "--order", "-3")
    assert res.exit_code == 3 and "INCONCLUSIVE" in res.output


def test_descent_glue_and_factorize(tmp_path):
    res, rep = report(tmp_path, "descent", "glue", "-K", "3")
    assert res.exit_code == 0
    dims = {(N, W): d for N, W, d in rep["verdicts"][0]["dimensions"]}
    assert dims[(0, 2)] == 3
    res = run("descent", "factorize", "-K", "3")
    assert res.exit_code == 0


def test_factorize_uncertified_degree_is_inconclusive():
    res = run("descent", "factorize", "-K", "1", "--degrees", "3")
    assert res.exit_code in (0, 3)


def test_reports_are_deterministic_and_round_trip(tmp_path):
    _, a = report(tmp_path, "--mutate", "pole1", "descent", "cocycle", "-K", "5")
    _, b = report(tmp_path, "--mutate", "pole1", "descent", "cocycle", "-K", "5")
    a.pop("timings"), b.pop("timings")
    assert a == b
    text = json.dumps(a, indent=2, sort_keys=True, ensure_ascii=False)
    assert json.dumps(json.loads(text), indent=2, sort_keys=True, ensure_ascii=False) == text


def test_threads_env_gives_same_report(tmp_path, monkeypatch):
    args = ("descent", "cocycle", builtin_path("sl2.json"), "-K", "3")  # enough triples to use the pool
    _, serial = report(tmp_path, *args)
    monkeypatch.setenv("WORKBENCH_THREADS", "2")
    _, parallel = report(tmp_path, *args)
    serial.pop("timings"), parallel.pop("timings")
    assert serial == parallel
