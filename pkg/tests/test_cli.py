from pathlib import Path

import pytest

from clbench import cli
from clbench.cli import main

GOLDEN = "?~P | !P"
DATA = Path(__file__).parent / "data"
PROVE = ["prove", GOLDEN, "--height", "1", "--adversary", "copycat", "--iterations", "2"]


def test_parse(capsys):
    assert main(["parse", "?~P|!P"]) == 0
    assert capsys.readouterr().out.strip() == GOLDEN


def test_parse_syntax_error():
    assert main(["parse", "P &"]) == 2


def test_usage_errors(tmp_path):
    assert main([]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["simulate", "P", "--iterations", "-1"]) == 2
    assert main(["simulate", "P", "--adversary", "scripted"]) == 2
    assert main(["taut", "P", "--resolution", str(tmp_path / "missing")]) == 2


def test_prove_golden_and_check(tmp_path, capsys):
    out, report = tmp_path / "proof.txt", tmp_path / "report.txt"
    assert main(PROVE + ["--out", str(out), "--report", str(report)]) == 0
    assert out.read_text() == (DATA / "golden_proof.txt").read_text()
    items = dict(line.split(":", 1) for line in report.read_text().splitlines())
    assert items["outcome"] == "proof" and items["steps"] == "7"
    assert "budget.moves" in items
    capsys.readouterr()
    assert main(["check", str(out)]) == 0
    assert capsys.readouterr().out.strip() == "ok: 7 steps"
    assert main(["check", str(out), "--formula", "P | ~P"]) == 1


def test_prove_trace(capsys):
    assert main(PROVE + ["--trace"]) == 0
    err = capsys.readouterr().err
    assert "stage 2: RecurrenceIntroduction slot=1 label=1@" in err


@pytest.mark.parametrize("text", ["P", "P & ~P", "!P & ?~Q"])
def test_prove_negative(text, tmp_path, capsys):
    report = tmp_path / "r.txt"
    assert main(["prove", text, "--report", str(report)]) == 1
    assert "NotTautological" in capsys.readouterr().err
    assert "outcome:not-tautological" in report.read_text()


def test_check_tampered(tmp_path, capsys):
    lines = (DATA / "golden_proof.txt").read_text().splitlines()
    # drop P from the undergroup of the 3-slot cirquent
    i = next(k for k, l in enumerate(lines) if l.startswith("CIRQUENT [~P; ~P; P]"))
    lines[i] = lines[i].replace("| {0,1,2} |", "| {0,1} {2} |")
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(lines) + "\n")
    assert main(["check", str(bad)]) == 1
    assert "rejected at step" in capsys.readouterr().err


def test_check_malformed(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("CIRQUENT [P] | {0} |\n")
    assert main(["check", str(bad)]) == 1


def test_simulate_round_trip(tmp_path, capsys):
    t1 = tmp_path / "t1.txt"
    assert main(["simulate", GOLDEN, "--iterations", "2", "--adversary", "copycat",
                 "--out", str(t1)]) == 0
    t2 = tmp_path / "t2.txt"
    assert main(["simulate", GOLDEN, "--iterations", "2", "--adversary", "scripted",
                 "--script", str(t1), "--out", str(t2)]) == 0
    assert t1.read_text() == t2.read_text()


def test_simulate_silent(capsys):
    assert main(["simulate", GOLDEN, "--iterations", "2"]) == 0
    moves = [l.split()[1] for l in capsys.readouterr().out.splitlines()]
    assert moves == ["0..0", "1..1", "0.0.2", "0.1.3", "1.0.4", "1.1.5"]


def test_interactive(monkeypatch, capsys):
    typed = iter(["zz", "pass", "1..0", "quit"])
    monkeypatch.setattr("builtins.input", lambda prompt="": next(typed))
    assert main(["simulate", GOLDEN, "--iterations", "3", "--adversary",
                 "interactive"]) == 0
    out = capsys.readouterr()
    assert "parse error" in out.err
    assert "T 1..0" in out.out


def test_interactive_pass_equals_silent(monkeypatch, capsys):
    monkeypatch.setattr("builtins.input", lambda prompt="": "pass")
    main(["simulate", GOLDEN, "--iterations", "2", "--adversary", "interactive"])
    a = capsys.readouterr().out
    main(["simulate", GOLDEN, "--iterations", "2"])
    assert capsys.readouterr().out == a


def test_analyze(tmp_path, capsys):
    q = tmp_path / "q.txt"
    q.write_text("# golden tree\ndrives 0@ 00@0\nstrictly_drives 00@0 10@1\n"
                 "visible 00@0 10@0\ndominates 1@ 00@0\ndominates 1@ 10@0\n"
                 "dominates 1@ 00@1\n")
    assert main(["analyze", GOLDEN, "--height", "1", "--adversary", "copycat",
                 "--iterations", "2", "--queries", str(q)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "drives 0@ 00@0 -> yes via 0@"
    assert out[3].startswith("dominates 1@ 00@0 -> yes")
    assert out[4] == "dominates 1@ 10@0 -> yes subunit"
    assert len(out) == 6


def test_analyze_non_rec_dominator(tmp_path):
    q = tmp_path / "q.txt"
    q.write_text("dominates 0@ 00@0\n")
    assert main(["analyze", GOLDEN, "--height", "1", "--queries", str(q)]) == 2


def test_analyze_bad_query(tmp_path):
    q = tmp_path / "q.txt"
    q.write_text("sees 0@ 1@\n")
    assert main(["analyze", GOLDEN, "--queries", str(q)]) == 2


def test_taut(tmp_path, capsys):
    assert main(["taut", GOLDEN, "--height", "1", "--adversary", "copycat",
                 "--iterations", "2"]) == 0
    out = capsys.readouterr().out
    assert "binary: true" in out and "tautology: true" in out
    assert main(["taut", "P"]) == 1
    pairing = tmp_path / "p.txt"
    pairing.write_text("PAIR 00@0 10@0\nPAIR 00@1 10@1\n")
    assert main(["taut", GOLDEN, "--height", "1", "--pairing", str(pairing)]) == 0


def test_formula_from_file(tmp_path, capsys):
    src = tmp_path / "f.txt"
    src.write_text(GOLDEN + "\n")
    assert main(["parse", "@" + str(src)]) == 0
    assert capsys.readouterr().out.strip() == GOLDEN


def test_budget_env(monkeypatch):
    monkeypatch.setenv("CLBENCH_BUDGETS", "nodes=2")
    assert main(PROVE) == 2
