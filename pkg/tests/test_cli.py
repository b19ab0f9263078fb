import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from msx.cli.dsl import parse
from msx.cli.interp import dumps, run
from msx.cli.main import main
from msx.cli.suites import SUITES, run_suite, scaled_theta, traceability_markdown

ROOT = Path(__file__).resolve().parent.parent
SCRIPTS = sorted((ROOT / "scripts").glob("*.msx"))
GOLDEN = ROOT / "tests" / "golden"


def call(argv, stdin=""):
    out = io.StringIO()
    code = main(argv, stdin=io.StringIO(stdin), stdout=out)
    return code, out.getvalue()


def run_source(tmp_path, source, *flags):
    path = tmp_path / "script.msx"
    path.write_text(source)
    return call(["run", str(path), *flags])


@pytest.mark.parametrize("path", SCRIPTS, ids=lambda p: p.name)
def test_golden_output_is_byte_identical(path):
    code, first = call(["run", str(path), "--seed", "0"])
    _, second = call(["run", str(path), "--seed", "0"])
    assert code == 0
    assert first == second
    assert first == (GOLDEN / f"{path.stem}.json").read_text()


def test_solving_vertical_momentum_gives_vertical_field(tmp_path):
    source = "chart Z(n=1,k=1)\nlet v = vf{y1: 1}\nobs f = momentum(v)\nham X = solve(f)\nemit X\n"
    code, out = run_source(tmp_path, source)
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "ok"
    [item] = doc["emitted"]
    assert item["value"]["components"] == [{"coord": "y1", "coeff": {"num": "1", "den": "1"}}]


def test_verify_statements(tmp_path):
    code, out = run_source(tmp_path, "verify pbexact(n=2,k=1,trials=10,seed=1)\nverify constraint(n=2,k=2)\n")
    doc = json.loads(out)
    assert code == 0
    assert [r["pass"] for r in doc["verify"]] == [True, True]
    assert doc["verify"][0]["params"]["seed"] == 1


def test_text_output(tmp_path):
    code, out = run_source(tmp_path, "chart Z(n=1,k=1)\nlet v = vf{x1: 1}\nobs f = momentum(v)\nemit f\n"
                                     "verify euler(n=1,k=1,trials=2)\n", "--text")
    assert code == 0
    assert out.splitlines() == ["f = (p)", "euler: PASS (n=1, k=1, m=None, trials=2, seed=0)"]


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("MSX_SEED", "17")
    _, out = run_source(tmp_path, "verify euler(n=1,k=1,trials=1)\n")
    doc = json.loads(out)
    assert doc["seed"] == 17 and doc["verify"][0]["params"]["seed"] == 17
    _, out = run_source(tmp_path, "verify euler(n=1,k=1,trials=1)\n", "--seed", "3")
    assert json.loads(out)["seed"] == 3


def test_runtime_error_exit_code_and_provenance(tmp_path):
    code, out = run_source(tmp_path, "chart LVY(n=1,k=1)\nlet v = vf{x1: 1}\nobs f = momentum(v)\nemit f\n")
    doc = json.loads(out)
    assert code == 2 and doc["status"] == "error"
    assert doc["error"]["line"] == 3 and doc["error"]["statement"] == "obs f"
    assert doc["error"]["type"] == "ScriptTypeError"


def test_module_errors_propagate(tmp_path):
    code, out = run_source(tmp_path, "chart Z(n=2,k=1)\nlet v = vf{x1: y1}\nobs f = momentum(v)\n")
    doc = json.loads(out)
    assert code == 2 and doc["error"]["type"] == "NotProjectable"


def test_syntax_error_exit_code(tmp_path):
    code, out = run_source(tmp_path, "chart Z(n=1,k=1)\nlet = 2\n")
    doc = json.loads(out)
    assert code == 2
    assert doc["error"]["type"] == "ScriptSyntaxError" and doc["error"]["line"] == 2


def test_missing_file():
    code, _ = call(["run", str(ROOT / "no-such-file.msx")])
    assert code == 2


def test_verify_verb():
    code, out = call(["verify", "--suite", "pbexact", "--n", "2", "--k", "1", "--trials", "3", "--seed", "1"])
    assert code == 0 and json.loads(out)["verify"][0]["pass"]
    code, _ = call(["verify", "--suite", "pbexact", "--n", "9", "--k", "1"])
    assert code == 2
    code, out = call(["verify", "--suite", "multistruc", "--mutate-theta", "2", "--text"])
    assert code == 1 and out.startswith("multistruc: FAIL")


def test_every_suite_passes_at_defaults():
    for sid in SUITES:
        assert run_suite(sid, seed=0).passed, sid


def test_mutated_theta_breaks_at_least_three_suites():
    broken = [sid for sid in SUITES if not run_suite(sid, theta=scaled_theta(2), seed=0).passed]
    assert len(broken) >= 3
    assert all(SUITES[sid].uses_theta for sid in broken)


def test_repl():
    code, out = call(["repl"], "chart Z(n=1,k=1)\nlet v = vf{y1: 1}\nbogus\nham X = closed(v)\n"
                               "verify euler(n=1,k=1,trials=1)\n")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "chart Z(n=1,k=1)"
    assert lines[2].startswith("syntax error at 1:1")
    assert lines[3] == "X = (1)*d/dy1"
    assert lines[4].startswith("euler: PASS")


def test_traceability_doc_is_generated():
    assert (ROOT / "docs" / "traceability.md").read_text() == traceability_markdown()
    code, out = call(["traceability"])
    assert code == 0 and out == traceability_markdown()
    assert len({s.id for s in SUITES.values()}) == len(SUITES) == 16


def test_run_api_is_deterministic():
    script = parse((ROOT / "scripts" / "verify.msx").read_text())
    assert dumps(run(script, seed=4).doc) == dumps(run(script, seed=4).doc)


def test_console_entry_point(tmp_path):
    path = tmp_path / "a.msx"
    path.write_text("chart Z(n=1,k=1)\nlet a = x1^2\nemit a\n")
    proc = subprocess.run([sys.executable, "-m", "msx.cli.main", "run", str(path), "--text"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "a = x1^2\n"
