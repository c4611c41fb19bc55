import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from qlll.cli import main
from qlll.ensembles import Hypergraph, dumps_hypergraph, make_rng
from qlll.qsat import (Projector, QsatInstance, check_state, dumps_instance,
                       haar_random_state, loads_instance)


@pytest.fixture(autouse=True)
def no_output_dir(monkeypatch):
    monkeypatch.delenv("QLLL_OUTPUT_DIR", raising=False)


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write_instance(path, inst):
    path.write_text(dumps_instance(inst))
    return path


def test_gen(tmp_path, capsys):
    out = tmp_path / "a.json"
    code, _, _ = run(["gen", "--n", 8, "--k", 3, "--alpha", 0.5, "--seed", 7, "--out", out], capsys)
    assert code == 0
    inst = loads_instance(out.read_text())
    assert inst.n_qubits == 8 and inst.m == 4
    meta = json.loads(out.read_text())["meta"]
    assert meta["config"] == {"n": 8, "k": 3, "alpha": 0.5, "seed": 7}
    assert "version" in meta
    code, text, _ = run(["gen", "--n", 8, "--k", 3, "--alpha", 0, "--seed", 7], capsys)
    assert loads_instance(text).m == 0


def test_gen_deterministic(capsys):
    args = ["gen", "--n", 12, "--k", 3, "--alpha", 0.7, "--seed", 3]
    _, a, _ = run(args, capsys)
    _, b, _ = run(args, capsys)
    assert a == b
    _, c, _ = run(args[:-1] + [4], capsys)
    assert a != c


def test_gen_invalid(capsys):
    code, _, err = run(["gen", "--n", 2, "--k", 3, "--alpha", 1], capsys)
    assert code == 1 and "error" in err


def test_output_dir_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("QLLL_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(["gen", "--n", 6, "--k", 3, "--alpha", 0.5, "--seed", 1], capsys)
    assert code == 0 and out == ""
    assert len(list(tmp_path.glob("instance_*.json"))) == 1


def test_check_qlll_disjoint(tmp_path, capsys):
    rng = make_rng(0)
    inst = QsatInstance(9, tuple(Projector.rank_one(q, haar_random_state(3, rng))
                                 for q in [(0, 1, 2), (3, 4, 5), (6, 7, 8)]))
    path = write_instance(tmp_path / "d.json", inst)
    code, out, _ = run(["check", path, "--mode", "qlll"], capsys)
    cert = json.loads(out)
    assert code == 0 and cert["verdict"] == "pass"
    assert Fraction(cert["bound"]) == Fraction(7, 8) ** 3
    assert cert["source"] == "d.json"


def test_check_qlll_fail_still_exit_zero(tmp_path, capsys):
    rng = make_rng(0)
    inst = QsatInstance(5, (Projector.rank_one((0, 1, 2), haar_random_state(3, rng)),
                            Projector.rank_one((2, 3, 4), haar_random_state(3, rng))))
    code, out, _ = run(["check", write_instance(tmp_path / "f.json", inst)], capsys)
    cert = json.loads(out)
    assert code == 0 and cert["verdict"] == "fail" and cert["witness"]["qubit"] == 2


def test_check_matching_duplicates(tmp_path, capsys):
    path = tmp_path / "g.txt"
    path.write_text(dumps_hypergraph(Hypergraph(3, 2, [(1, 2)] * 3)))
    code, out, _ = run(["check", path, "--mode", "matching"], capsys)
    cert = json.loads(out)
    assert code == 0 and cert["verdict"] == "fail"
    assert cert["witness"]["violator"] == [0, 1, 2]
    assert cert["witness"]["violator_vertices"] == [1, 2]


def test_check_certificate_self_validating(tmp_path, capsys):
    path = tmp_path / "g.txt"
    path.write_text(dumps_hypergraph(Hypergraph(6, 3, [(0, 1, 2), (1, 2, 3), (3, 4, 5)])))
    _, out, _ = run(["check", path, "--mode", "matching"], capsys)
    cert = json.loads(out)
    from qlll.matching import Matching, check_matching
    m = Matching({e: v for e, v in cert["witness"]["pairs"]}, 3)
    assert cert["verdict"] == "pass" and check_matching([(0, 1, 2), (1, 2, 3), (3, 4, 5)], m)


def test_check_hybrid_sample(tmp_path, capsys):
    from qlll.ensembles import sample_gknm
    path = tmp_path / "big.txt"
    path.write_text(dumps_hypergraph(sample_gknm(2000, 2000, 6, make_rng(1))))
    code, out, _ = run(["check", path, "--mode", "hybrid"], capsys)
    cert = json.loads(out)
    assert code == 0 and cert["kind"] == "hybrid"
    assert set(cert["partition"]["sizes"]) == {"v_h", "h", "l"}


def test_check_bad_input(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"version": 1, "n_qubits": 2, "projectors": [{"qubits": [0]}]}')
    code, _, err = run(["check", path], capsys)
    assert code == 1 and "projectors[0]" in err
    code, _, err = run(["check", tmp_path / "missing.json"], capsys)
    assert code == 1


def test_brute(tmp_path, capsys):
    path = write_instance(tmp_path / "e.json", QsatInstance(3))
    code, out, _ = run(["brute", path], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["dim"] == 8 and rep["R"] == "1"
    rng = make_rng(2)
    inst = QsatInstance(3, (Projector.rank_one((0, 2), haar_random_state(2, rng)),))
    state = tmp_path / "psi.json"
    code, out, _ = run(["brute", write_instance(tmp_path / "s.json", inst),
                        "--state-out", state], capsys)
    rep = json.loads(out)
    assert rep["dim"] == 6 and rep["R"] == "3/4"
    amps = np.array(json.loads(state.read_text())["amplitudes"])
    assert check_state(inst, amps[:, 0] + 1j * amps[:, 1]).max() <= 1e-8


def test_brute_limit_names_flag(tmp_path, capsys):
    path = write_instance(tmp_path / "big.json", QsatInstance(16))
    code, _, err = run(["brute", path], capsys)
    assert code == 1 and "--max-qubits" in err


def test_montecarlo_deterministic(tmp_path, capsys):
    base = ["montecarlo", "--mode", "hybrid", "--n", 300, "--k", 4, "--alpha", 0.5, 1.0,
            "--trials", 3, "--seed", 11]
    outs = []
    for workers in (1, 1, 2):
        csv_path = tmp_path / f"r{len(outs)}.csv"
        js_path = tmp_path / f"r{len(outs)}.json"
        code, _, _ = run(base + ["--workers", workers, "--out", csv_path, "--summary", js_path],
                         capsys)
        assert code == 0
        outs.append((csv_path.read_bytes(), js_path.read_bytes()))
    assert outs[0] == outs[1] == outs[2]
    rows = list(csv.DictReader(io.StringIO(outs[0][0].decode())))
    assert len(rows) == 6 and rows[0]["ms_elapsed"] == ""
    assert [int(r["trial"]) for r in rows] == list(range(6))
    summary = json.loads(outs[0][1])
    assert summary["config"]["seed"] == 11 and len(summary["groups"]) == 2


def test_montecarlo_matching_small(capsys):
    code, out, err = run(["montecarlo", "--mode", "matching", "--n", 200, "--k", 3,
                          "--alpha", 0.5, "--trials", 1, "--seed", 5], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["matching_pass"] in ("0", "1") and rows[0]["hybrid_pass"] == ""
    assert json.loads(err)["pass_field"] == "matching_pass"


def test_montecarlo_timings_opt_in(capsys):
    _, out, _ = run(["montecarlo", "--n", 100, "--k", 3, "--alpha", 0.5, "--trials", 1,
                     "--timings"], capsys)
    assert float(next(csv.DictReader(io.StringIO(out)))["ms_elapsed"]) >= 0


def test_montecarlo_invalid(capsys):
    code, _, _ = run(["montecarlo", "--n", 100, "--k", 3, "--alpha", 0.5, 0.5], capsys)
    assert code == 1


def test_cnf(tmp_path, capsys):
    path = tmp_path / "f.cnf"
    path.write_text("c disjoint\np cnf 6 2\n1 -2 3 0\n4 5 -6 0\n")
    code, out, _ = run(["cnf", path], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "pass"
    path.write_text("p cnf 7 6\n" + "1 2 3 4 5 6 7 0\n" * 6)
    _, out, _ = run(["cnf", path], capsys)
    cert = json.loads(out)
    assert cert["verdict"] == "pass" and cert["witness"]["max_occurrence"] == 6
    path.write_text("p cnf 2 2\n1 2 0\n0\n")
    code, out, _ = run(["cnf", path], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "error"


def test_cnf_malformed(tmp_path, capsys):
    path = tmp_path / "f.cnf"
    path.write_text("p cnf 2 1\n1 two 0\n")
    code, _, err = run(["cnf", path], capsys)
    assert code == 1 and "line 2" in err
    path.write_text("p cnf 3 2\n1 2 0\n1 2 3 0\n")
    code, _, err = run(["cnf", path], capsys)
    assert code == 1 and "mixed" in err


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "qlll.cli", "--version"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "0.1.0" in r.stdout
