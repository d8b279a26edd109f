import json

import pytest

from cylred.cli import REPORT_VERSION, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out or err)


def test_closure_file(tmp_path, capsys):
    f = tmp_path / "gens.txt"
    f.write_text("# dense line\n(1, 0)\n(sqrt(2), 0)\n(0, 1)\n")
    code, rep = run_json(capsys, "closure", "--generators", str(f), "--field", "2")
    assert code == 0 and rep["report_version"] == REPORT_VERSION
    assert len(rep["closure"]["V"]) == 1 and len(rep["closure"]["Lambda"]) == 1


def test_closure_bad_file(tmp_path, capsys):
    f = tmp_path / "gens.txt"
    f.write_text("(1, foo)\n")
    code, _, err = run(capsys, "closure", "--generators", str(f))
    assert code == 2 and err


def test_holonomy_t4(capsys):
    code, rep = run_json(capsys, "holonomy", "--model", "t4_example")
    assert code == 0
    assert len(rep["loops"]) >= 4


def test_momentum_eval_deterministic(capsys):
    args = ("momentum", "--model", "t4_example", "eval", "--seed", "3")
    a = run_json(capsys, *args)
    b = run_json(capsys, *args)
    assert a == b and a[0] == 0
    c = run_json(capsys, "--seed", "3", *args[:-2])
    assert c == a


def test_noether_t4(capsys):
    code, rep = run_json(capsys, "momentum", "--model", "t4_example", "noether",
                         "--hamiltonian", "0.5*nu2**2 + cos(2*pi*u1)", "--invariance", "N", "--T", "2")
    assert code == 0 and rep["report_version"] == 1


def test_noether_rejects_non_invariant(capsys):
    code, rep = run_json(capsys, "momentum", "--model", "t4_example", "noether",
                         "--hamiltonian", "cos(2*pi*u2)", "--invariance", "N")
    assert code == 2 and "invariant" in rep["error"]


def test_poisson_bracket_exact(capsys):
    code, rep = run_json(capsys, "poisson", "--model", "t4_example", "bracket",
                         "--f", "mu1*mu3", "--g", "mu4 + sqrt(2)/2*mu1**2", "--at", "0;0;0;0")
    assert code == 0
    assert "sqrt(2)" in rep["bracket"]


def test_poisson_leaves(capsys):
    code, rep = run_json(capsys, "poisson", "--model", "t4_example", "leaves", "--at", "1;0;0;0")
    assert code == 0 and rep["leaf_dim"] == 0


def test_reduce_all_spaces(capsys):
    code, rep = run_json(capsys, "reduce", "--model", "t4_example", "--at", "1;2;3;4", "--all-spaces")
    assert code == 0 and rep["comparison"]["dims"] == [2, 2, 2]


def test_reduce_non_free_refused(capsys):
    code, _, err = run(capsys, "reduce", "--model", "t2_area")
    assert code == 2 and "free" in err


def test_verify_t4_text(capsys):
    code, out, _ = run(capsys, "verify", "t4_example")
    assert code == 0 and "PASS" in out and "FAIL" not in out


def test_verify_corrupted_fails(capsys):
    code, _, err = run(capsys, "verify", "corrupted_h3")
    assert code != 0 and "cocycle" in err.lower()


def test_missing_model(capsys):
    code, _, err = run(capsys, "holonomy", "--model", "nope")
    assert code == 2 and err
