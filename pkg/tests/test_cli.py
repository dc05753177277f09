import shutil
import subprocess

import pytest

from superint import kripke
from superint.cli import main
from superint.formula import parse


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_prove_exit_codes(capsys, tmp_path):
    assert run(capsys, "prove", "p -> p")[0] == 0
    code, out, _ = run(capsys, "prove", "--trace", "p & q -> q")
    assert code == 0 and len(out.splitlines()) > 1
    cm = tmp_path / "cm.txt"
    code, out, _ = run(capsys, "prove", "((p -> q) -> p) -> p", "--emit-countermodel", str(cm))
    assert code == 1 and out.startswith("refuted")
    model = kripke.load_model(cm.read_text())
    assert not model.valid(parse("((p -> q) -> p) -> p"))
    assert run(capsys, "prove", "--budget", "1", "((p -> q) -> p) -> p")[0] in (1, 3)
    code, _, err = run(capsys, "prove", "p ->")
    assert code == 2 and err.startswith("error:")


def test_prove_reads_formula_file(capsys, tmp_path):
    f = tmp_path / "goal.txt"
    f.write_text("p | ~p\n")
    assert run(capsys, "prove", "--engine", "g4ip", str(f))[0] == 1


def test_minsky_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "minsky", "run", "chain", "0", "0", "0")
    assert code == 0 and len(out.splitlines()) == 3
    code, out, _ = run(capsys, "minsky", "classes", "cycle", "0", "0", "0")
    assert code == 0 and "(1,1,0)" in out.replace(" ", "")
    bad = tmp_path / "bad.mm"
    bad.write_text("0 FOO 1\n")
    assert run(capsys, "minsky", "run", str(bad), "0", "0", "0")[0] == 2
    assert run(capsys, "minsky", "run", "nosuch", "0", "0", "0")[0] == 2


def test_encode_commands(capsys):
    code, out, err = run(capsys, "encode", "family", "A", "-4", "1", "--stats")
    assert code == 0 and out.strip() == "~~p -> p" and "dag_size=" in err
    code, out, _ = run(capsys, "encode", "family", "Ehat", "0", "0", "*")
    assert code == 0 and out.strip()
    assert run(capsys, "encode", "axiom", "cycle")[0] == 0
    assert run(capsys, "encode", "config", "0", "0", "0")[0] == 0


def test_model_round_trip(capsys, tmp_path):
    path = tmp_path / "m.txt"
    assert run(capsys, "model", "build", "cycle", "0", "0", "0", "--imax", "8", "-o", str(path))[0] == 0
    code, out, _ = run(capsys, "model", "eval", str(path), "--point", "a(-5,1)", "--formula", "~~p -> p")
    assert code == 0 and out.strip() == "forced"
    code, out, _ = run(capsys, "model", "eval", str(path), "--point", "a(3,1)", "--formula", "~~p -> p")
    assert code == 1 and out.strip() == "refuted"
    code, out, _ = run(capsys, "model", "refuters", str(path), "--formula", "~~p -> p")
    assert code == 0 and "a(-4,1)" in out.split()
    assert run(capsys, "model", "eval", str(path), "--point", "a(99,1)", "--formula", "p")[0] == 2
    dot = tmp_path / "m.dot"
    assert run(capsys, "export", "dot", str(path), "--formula", "~~p -> p", "-o", str(dot))[0] == 0
    assert dot.read_text().startswith("digraph")


def test_verify_commands(capsys, tmp_path):
    rep = tmp_path / "r.tsv"
    code, out, _ = run(capsys, "verify", "semantic3", "transfer", "0", "2", "0", "--imax", "12", "--report", str(rep))
    assert code == 0 and out.strip().startswith("semantic3:")
    assert all(len(line.split("\t")) >= 5 for line in rep.read_text().splitlines())
    code, out, _ = run(capsys, "verify", "keyformulas", "--kmax", "1", "--range", "0", "--scramble")
    assert code == 1 and "reproduce: superint verify keyformulas" in out
    code, out, _ = run(capsys, "verify", "axiom", "chain", "0", "0", "0", "-v")
    assert code == 0 and len(out.splitlines()) == 5
    code, _, _ = run(capsys, "verify", "reduction", "chain", "0", "0", "0", "--target", "2", "0", "1")
    assert code == 0


@pytest.mark.skipif(shutil.which("superint") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["superint", "prove", "p -> p"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.strip() == "proved"
