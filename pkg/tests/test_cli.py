import json
import subprocess
import sys

import pytest

from kmunproj.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def usage_code(capsys, *argv):
    with pytest.raises(SystemExit) as exc:
        main(list(argv))
    capsys.readouterr()
    return exc.value.code


def test_gb_json(capsys):
    code, out, _ = run(capsys, "gb", "x^2+y^2", "x*y", "--vars", "x,y", "--format", "json")
    assert code == EXIT_PASS
    data = json.loads(out)
    assert sorted(data["groebner_basis"]) == ["x*y", "x^2 + y^2", "y^3"]
    assert data["config"]["prime"] == 101


def test_prime_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("KMUNPROJ_PRIME", "31")
    code, out, _ = run(capsys, "gb", "x^2", "--vars", "x,y", "--format", "json")
    assert code == EXIT_PASS and json.loads(out)["config"]["prime"] == 31


def test_invariants_ci(capsys):
    code, out, _ = run(capsys, "invariants", "ci", "X_5 ⊂ P^4")
    assert code == EXIT_PASS and "H3=5 c2H=50 h0=5 chi=-200" in out


def test_usage_errors_exit_3(capsys):
    assert usage_code(capsys, "reproduce-paper", "--bogus") == EXIT_USAGE
    assert usage_code(capsys, "frobnicate") == EXIT_USAGE
    assert run(capsys, "gb", "x^2+y^2", "xy", "--vars", "x,y")[0] == EXIT_USAGE
    assert run(capsys, "unproject", "codim2", "--weights", "1^5,2")[0] == EXIT_USAGE


def test_failed_expectation_exits_1(capsys):
    code, out, _ = run(capsys, "verify", "smoothness", "X_{2,2} ⊂ P^3", "--expect", "singular")
    assert code == EXIT_FAIL and "smooth" in out
    code, _, _ = run(capsys, "verify", "smoothness", "X_{2,2} ⊂ P^3", "--expect", "smooth")
    assert code == EXIT_PASS


def test_betti_show(capsys):
    code, out, _ = run(capsys, "betti", "show", "--delpezzo6", "P1xP1xP1")
    assert code == EXIT_PASS and "9 16  9" in out


def test_web_export_dot(capsys):
    code, out, _ = run(capsys, "web", "export", "--format", "dot")
    assert code == EXIT_PASS and out.startswith("digraph transitions")


def test_web_candidates(capsys):
    code, out, _ = run(capsys, "web", "candidates", "X_5 ⊂ P^4", "--format", "json")
    assert code == EXIT_PASS
    assert "X_{2,4} ⊂ P^5" in out


def test_reproduce_report_is_byte_stable(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "reproduce-paper", "--only", "invariants", "--report", str(a))[0] == EXIT_PASS
    assert run(capsys, "reproduce-paper", "--only", "invariants", "--report", str(b))[0] == EXIT_PASS
    assert a.read_bytes() == b.read_bytes()
    assert "seconds" not in a.read_text()


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kmunproj.cli", "invariants", "ci", "X_{3,3} ⊂ P^5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "H3=9" in proc.stdout


def test_gb_output_feeds_dimdeg(tmp_path, capsys):
    path = tmp_path / "ideal.json"
    assert run(capsys, "gb", "x*y", "x*z", "--vars", "x,y,z", "--format", "json", "-o", str(path))[0] == EXIT_PASS
    code, out, _ = run(capsys, "dimdeg", "--input", str(path), "--format", "json")
    assert code == EXIT_PASS
    data = json.loads(out)
    assert (data["dimension"], data["degree"]) == (1, 1)


def test_malformed_ideal_json_is_a_usage_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"vars": ["x"]}')
    assert run(capsys, "dimdeg", "--input", str(path))[0] == EXIT_USAGE


def test_lemma_text_omits_unknown_chi(capsys):
    code, out, _ = run(capsys, "invariants", "lemma", "--H3", "6", "--c2H", "48", "--h0", "5", "--d", "4")
    assert code == EXIT_PASS and out.strip() == "H3=10 c2H=52 h0=6"
