import json

import pytest

from susypva import cli
from susypva.cli import PipelineConfig, main, run
from susypva.loopalg import TruncationError


def test_full_pipeline_osp22(capsys):
    assert main(["run", "--builtin", "osp22", "--stage", "hierarchy", "--depth", "2"]) == 0
    out = capsys.readouterr().out
    assert "rho_2" in out and "dw4/dt1" in out


def test_reports_are_deterministic():
    cfg = lambda: PipelineConfig(builtin="osp22", stage="brackets", format="json")
    a, b = run(cfg()), run(cfg())
    assert a == b and a[0] == 0


def test_json_is_parseable():
    status, text = run(PipelineConfig(builtin="osp22", stage="walgebra", format="json"))
    assert status == 0
    doc = json.loads(text)
    assert doc


def test_latex_output():
    status, text = run(PipelineConfig(builtin="osp22", stage="brackets", format="latex"))
    assert status == 0 and "\\begin{align*}" in text


def test_ns_builtin():
    status, text = run(PipelineConfig(builtin="ns", stage="hierarchy"))
    assert status == 0 and "psi" in text


def test_pva_input(tmp_path):
    f = tmp_path / "ns.json"
    f.write_text(json.dumps({"pva": "vars: psi:1\n{psi, psi} = psi'' - 3/2*X^2*psi + 1/2*X*psi'"}))
    assert run(PipelineConfig(input=str(f), stage="axioms"))[0] == 0


def test_invariant_failure_exit_1():
    assert run(PipelineConfig(builtin="psl(2|2)", stage="validate"))[0] == 1


@pytest.mark.parametrize("args", [
    ["--builtin", "e8"],
    ["--builtin", "osp22", "--depth", "3", "--window", "4"],
    ["--builtin", "osp22", "--depth", "-1"],
    ["--builtin", "osp22", "--stage", "nope"],
    [],
])
def test_input_errors_exit_2(args):
    assert main(args) == 2


def test_bad_json_reports_position(tmp_path, capsys):
    f = tmp_path / "bad.json"
    f.write_text('{"basis": [\n  oops]}')
    assert main(["--input", str(f)]) == 2
    assert "line 2, column" in capsys.readouterr().out


def test_missing_file():
    assert run(PipelineConfig(input="/nonexistent/x.json"))[0] == 2


def test_truncation_exit_3(monkeypatch):
    def boom(*a, **k):
        raise TruncationError("cutoff reached", slot=9)

    monkeypatch.setitem(cli._RUNNERS, "hierarchy", boom)
    status, text = run(PipelineConfig(builtin="osp22", stage="hierarchy"))
    assert status == 3 and "slot 9" in text


def test_out_file(tmp_path):
    out = tmp_path / "r.txt"
    assert main(["--builtin", "osp22", "--stage", "validate", "--out", str(out)]) == 0
    assert out.read_text()


@pytest.mark.parametrize("k,status", [(2, 0), (3, 1)])
def test_criterion_flag(k, status):
    assert run(PipelineConfig(criterion=k))[0] == status


def test_unknown_criterion():
    assert run(PipelineConfig(criterion=42))[0] == 2
