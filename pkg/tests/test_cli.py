# -*- coding: utf-8 -*-
"""
Tests for the command-line entry point: outputs, exit codes, --out files.
"""

import json

import pytest

from scripts.run_diffiety import parse_args, run
from src.corpus import CORPUS_DIR
from src.determining_solver import span_contains
from tests.utils import make_system_text, section


def test_check_command(capsys):
    assert run(["check", str(CORPUS_DIR / "kdv.eq")]) == 0
    out = capsys.readouterr().out
    assert "kdv: evolution form" in out
    assert "u_t = 6*u*u_x + u_xxx" in out


def test_check_fails_outside_evolution_form(tmp_path, capsys):
    path = tmp_path / "bad.eq"
    path.write_text(make_system_text("bad", ["u_x = u_t"]), encoding="utf-8")
    assert run(["check", str(path), "--format", "json"]) == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["normal_form"] is False
    assert payload["diagnostics"]


def test_adjoint_by_corpus_name(capsys):
    assert run(["adjoint", "kdv"]) == 0
    assert capsys.readouterr().out == "-Dt + 6*u*Dx + Dx^3\n"


def test_e1_json_report(capsys):
    assert run(["e1", "kdv", "--k", "1", "--p", "1", "--order", "2", "--degree", "2", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert (payload["system"], payload["k"], payload["p"]) == ("kdv", 1, 1)
    kernel = [c for c in payload["cells"] if c["kind"] == "kernel"][0]
    assert kernel["q"] == 1 and kernel["certified"]
    found = [section(text) for text in kernel["basis"]]
    assert len(found) == 3
    for expected in ("1", "u", "3*u^2 + u_xx"):
        assert span_contains(found, section(expected))
    assert payload["config"]["order"] == 2


def test_e1_single_row(capsys):
    assert run(["e1", "heat", "--order", "1", "--degree", "1", "--q", "2", "--format", "json"]) == 0
    cells = json.loads(capsys.readouterr().out)["cells"]
    assert [(c["q"], c["kind"], c["certified"]) for c in cells] == [(2, "cokernel", False)]


def test_out_file_is_deterministic(tmp_path):
    out = tmp_path / "report.json"
    argv = ["e1", "transport", "--order", "1", "--degree", "1", "--format", "json", "--out", str(out)]
    assert run(argv) == 0
    first = out.read_text(encoding="utf-8")
    assert run(argv) == 0
    assert out.read_text(encoding="utf-8") == first


@pytest.mark.parametrize(
    "argv",
    [
        ["check"],
        ["e1", "kdv", "--k", "9"],
        ["e1", "kdv", "--p", "0"],
        ["symmetries", "kdv", "--order", "-1"],
        ["frobnicate", "kdv"],
        ["selftest", "--trials", "0"],
    ],
)
def test_usage_errors(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert run(["check", str(tmp_path / "nowhere.eq")]) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_green_check(capsys):
    assert run(["green-check", "wave2"]) == 0
    assert "holds" in capsys.readouterr().out


def test_kernel_commands(capsys):
    assert run(["cosymmetries", "heat", "--order", "1", "--degree", "1", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["basis"] == ["1"] and payload["dim"] == 1
    assert payload["kernel"] == ["1"]
    ansatz = payload["ansatz"]
    assert (ansatz["N"], ansatz["D"], ansatz["c"]) == (1, 1, [])
    assert payload["operator"]["side"] == "right" and payload["operator"]["rows"] == 1
    assert isinstance(payload["timing"], float) and payload["timing"] >= 0


def test_selftest_with_few_trials(capsys):
    assert run(["selftest", "--trials", "2", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "idf_axioms: 2 trials, 0 failures" in out


def test_cartan_degree_only_shapes_e1():
    assert parse_args(["e1", "kdv", "--k", "3", "--cartan", "1"]).ansatz().slot_degrees == (1, 1)
    assert parse_args(["symmetries", "kdv", "--k", "3", "--cartan", "1"]).ansatz().slot_degrees == ()


def test_lift_command_lists_each_component(capsys):
    assert run(["lift", "kdv", "--k", "2", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert list(payload["lift"]) == ["F1", "dv[1]F1"]
    assert payload["operator"]["rows"] == 2
