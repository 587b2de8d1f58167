import json
import subprocess
import sys
from pathlib import Path

import pytest

from expq.cli import EXIT_CONTRACT, EXIT_INVALID, EXIT_PARSE, EXIT_RESOURCE, EXIT_VALID, main

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
GOLDEN = Path(__file__).resolve().parent / "golden"

GOLDEN_RUNS = [
    ("decide_pow8", ["decide", "--dialect", "presexp", "pow8.fml"], EXIT_VALID),
    ("decide_unbounded", ["decide", "--dialect", "prespower", "unbounded_powers.fml"], EXIT_VALID),
    ("metrics_eq", ["metrics", "eq_example.fml"], EXIT_VALID),
    ("qe_halve", ["qe", "halve_open.fml"], EXIT_VALID),
    ("oracle_pow8", ["check-oracle", "--seed", "5", "pow8.fml"], EXIT_VALID),
    ("oracle_universal", ["check-oracle", "all_even.fml"], EXIT_INVALID),
    ("oracle_universal_valid", ["check-oracle", "--bound", "6", "verdicts/pa_parity.fml"], EXIT_VALID),
]


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def with_paths(argv):
    return [str(CORPUS / a) if a.endswith(".fml") else a for a in argv]


@pytest.mark.parametrize("name,argv,code", GOLDEN_RUNS, ids=[g[0] for g in GOLDEN_RUNS])
def test_golden_output(capsys, name, argv, code):
    got_code, out, _ = run(capsys, with_paths(argv))
    assert got_code == code
    assert out == (GOLDEN / f"{name}.out").read_text()


def test_golden_stable_across_runs(capsys):
    argv = with_paths(["decide", "--seed", "3", "verdicts/ex_sum_twelve.fml"])
    first = run(capsys, argv)
    assert run(capsys, argv) == first


def test_metrics_maxvars(capsys):
    _, out, _ = run(capsys, ["metrics", str(CORPUS / "eq_example.fml")])
    assert json.loads(out)["maxvars"] == 3


def test_decide_counters_on_stderr(capsys):
    _, _, err = run(capsys, ["decide", str(CORPUS / "verdicts/pa_parity.fml")])
    rep = json.loads(err)
    assert rep["violations"] == [] and rep["counters"].get("semcover", 0) == 0


def test_open_formula_prints_elimination(capsys):
    code, out, err = run(capsys, ["decide", str(CORPUS / "halve_open.fml")])
    assert code == EXIT_VALID and out.strip() == "2 | x"
    assert "open formula" in err


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.fml"
    bad.write_text("exists x. pow(x) = = 8\n")
    code, _, err = run(capsys, ["decide", str(bad)])
    assert code == EXIT_PARSE
    assert f"{bad}:1:" in err


def test_missing_file_exit(capsys, tmp_path):
    code, _, _ = run(capsys, ["decide", str(tmp_path / "nope.fml")])
    assert code == EXIT_PARSE


def test_resource_exit(capsys):
    code, _, err = run(capsys, ["decide", "--dialect", "prespower", "--max-seconds", "0.01", str(CORPUS / "unbounded_powers.fml")])
    assert code == EXIT_RESOURCE
    assert "max_seconds" in err


def test_contract_exit(capsys, tmp_path):
    f = tmp_path / "open.fml"
    f.write_text("x < 3\n")
    code, _, err = run(capsys, ["check-oracle", str(f)])
    assert code == EXIT_CONTRACT and "sentence" in err


def test_fragment_flag_only_on_decide_and_qe():
    with pytest.raises(SystemExit):
        main(["metrics", "--fragment", "qf", str(CORPUS / "pow8.fml")])


def test_trace_file_is_json_lines(capsys, tmp_path):
    trace = tmp_path / "t.jsonl"
    code, _, _ = run(capsys, ["decide", "--trace", str(trace), str(CORPUS / "verdicts/pa_halving.fml")])
    assert code == EXIT_VALID
    kinds = [json.loads(line)["kind"] for line in trace.read_text().splitlines()]
    assert "BlockStart" in kinds and "BlockEnd" in kinds


def test_trace_rejects_many_inputs(capsys, tmp_path):
    code, _, _ = run(capsys, ["decide", "--trace", str(tmp_path / "t"), str(CORPUS / "pow8.fml"), str(CORPUS / "all_even.fml")])
    assert code == EXIT_CONTRACT


def test_many_inputs_with_jobs(capsys):
    files = [str(CORPUS / "pow8.fml"), str(CORPUS / "all_even.fml"), str(CORPUS / "verdicts/pa_parity.fml")]
    code, out, _ = run(capsys, ["decide", "--jobs", "2", *files])
    # the worst verdict decides the exit code
    assert code == EXIT_INVALID
    assert out.splitlines() == [f"{files[0]}: VALID", f"{files[1]}: INVALID", f"{files[2]}: VALID"]
    assert run(capsys, ["decide", *files])[1] == out


def test_backtracking_strategy(capsys):
    code, out, _ = run(capsys, ["decide", "--strategy", "backtracking", str(CORPUS / "verdicts/ex_sum_seven.fml")])
    assert code == EXIT_INVALID and out.strip() == "INVALID"


def test_console_script_entry():
    r = subprocess.run(
        [sys.executable, "-m", "expq.cli", "decide", str(CORPUS / "pow8.fml")],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert r.returncode == 0 and r.stdout.strip() == "VALID"
