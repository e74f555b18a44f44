import io
import json

import pytest

from relfix.cli import _exit_for, golden_text, main, reproduce_text
from relfix.verdict import Kind

from .test_document import MINIMAL


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_check_reports_failing_row():
    code, text = run("check", "example4.1", "--theorems", "T2.1,T1.17")
    assert code == 1
    assert "T2.1   pass (sampled)" in text and "T1.17  fail(i)" in text


def test_check_passing_example():
    code, text = run("check", "example4.3", "--theorems", "T2.1")
    assert code == 0 and "T2.1  pass" in text


def test_check_machine_format_mirrors_report():
    code, text = run("check", "example4.3", "--theorems", "T2.1,T1.18", "--format", "machine")
    data = json.loads(text)
    assert code == data["exit_code"] == 1
    t21, t118 = data["rows"]
    assert t21["status"] == "pass" and t21["overall"]["kind"] == "Holds"
    assert t118["failing_slot"] == "(v)"
    v = next(s for s in t118["slots"] if s["label"] == "(v)")
    assert v["verdict"]["witness"]["pair"] == ["1", "2"]


def test_check_bad_file(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text(MINIMAL.replace("kind: geq", "kind: sideways"))
    code, _ = run("check", str(bad))
    assert code == 64
    err = capsys.readouterr().err
    assert "line 3" in err and "sideways" in err


def test_usage_errors_exit_64(capsys):
    assert run("check", "example4.1", "--theorems", "T9.9")[0] == 64
    assert run("frobnicate")[0] == 64
    assert run("solve", "example4.1", "--x0", "4")[0] == 64
    assert run("properties", "--cases", "0")[0] == 64


def test_unknown_only_exit_code():
    assert _exit_for(Kind.UNKNOWN) == 2
    assert _exit_for(Kind.HOLDS_SAMPLED) == 0
    assert _exit_for(Kind.FAILS) == 1


def test_solve_examples():
    code, text = run("solve", "example4.1", "--x0", "1")
    assert code == 0 and "limit: 0" in text and "exact geometric tail" in text
    code, text = run("solve", "example4.2", "--x0", "1")
    assert code == 0 and "orbit: 1, 0, 0 " in text and "limit: 0" in text
    code, text = run("solve", "example4.3", "--all-starts")
    assert code == 0 and "limits: {0, 4} from starts {0, 3, 4}" in text


def test_solve_all_starts_needs_finite_set():
    assert run("solve", "example4.1", "--all-starts")[0] == 64


def test_solve_machine_format():
    code, text = run("solve", "example4.3", "--x0", "3", "--format", "machine")
    data = json.loads(text)
    assert data["results"][0]["orbit"]["points"] == ["3", "4", "4"]
    assert data["results"][0]["fixed_point"] == "4"


@pytest.mark.parametrize("example", ["4.1", "4.2", "4.3"])
def test_reproduce_matches_golden(example):
    code, text = run("reproduce", example)
    assert code == 0 and text.endswith("match\n")
    assert reproduce_text(example) == golden_text(example)


def test_reproduce_lists_both_fixed_points():
    assert "F(f) = {0, 4}" in run("reproduce", "4.3")[1]


def test_reproduce_unknown_example():
    assert run("reproduce", "9.9")[0] == 64


def test_properties_deterministic():
    a = run("properties", "--seed", "42", "--cases", "1")
    b = run("properties", "--seed", "42", "--cases", "1")
    assert a == b and a[0] == 0


def test_properties_catch_mutant():
    code, text = run("properties", "--cases", "20", "--mutant", "nf-missing-term")
    assert code == 1
    assert "witness: {pair: (" in text and "replay: relfix properties --seed 0" in text


def test_reports_are_deterministic():
    assert run("check", "example4.1") == run("check", "example4.1")
