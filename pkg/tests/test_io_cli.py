from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aqgap.cli import (EXIT_INSTANCE, EXIT_OK, EXIT_REGIME, EXIT_USAGE, run)
from aqgap.generators import gen_3sat, gen_marked, gen_spin_glass
from aqgap.io import (InstanceFormatError, RunManifest, dumps_instance, fmt, instance_hash,
                      loads_instance, read_csv, read_instance, render_csv, write_instance)
from aqgap.ising import ProblemInstance


def test_round_trip_ising():
    inst = gen_spin_glass(7, "grid", "uniform", 0.1, seed=3).with_scales(1.3, 0.7)
    back = loads_instance(dumps_instance(inst))
    assert back == inst
    np.testing.assert_array_equal(back.energies, inst.energies)


def test_round_trip_references():
    inst, _ = gen_3sat(8, 4.0, seed=1)
    text = dumps_instance(inst)
    assert '"generator": "3sat"' in text
    assert loads_instance(text) == inst
    m = gen_marked(5, seed=2)
    assert loads_instance(dumps_instance(m)) == m


def test_round_trip_explicit_diagonal():
    inst = ProblemInstance.diagonal(3, np.array([0.1, 1 / 3, 2.0, -1.0, 5.5, 0.0, 1e-17, 7.0]))
    assert loads_instance(dumps_instance(inst)) == inst


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=6),
       st.floats(1e-3, 1e3), st.integers(0, 2 ** 32 - 1))
def test_round_trip_property(h, scale, seed):
    r = np.random.default_rng(seed)
    n = len(h)
    J = {(i, j): float(r.normal()) for i in range(n) for j in range(i + 1, n) if r.random() < 0.5}
    inst = ProblemInstance.ising(h, J, energy_scale=scale)
    assert loads_instance(dumps_instance(inst)) == inst


@pytest.mark.parametrize("doc", [
    "not json",
    "[1, 2]",
    '{"n": 2, "kind": "ising", "h": [1.0]}',
    '{"n": 2, "kind": "ising", "h": [1.0, 0.0], "J": [[0, 1]]}',
    '{"n": 2, "kind": "ising", "h": [1.0, 0.0], "J": [[0, 1, 1.0], [1, 0, 2.0]]}',
    '{"n": 2, "kind": "ising", "h": [1.0, 0.0], "J": [[0, 0, 1.0]]}',
    '{"n": 2, "kind": "diagonal", "diag": [1.0, 0.0]}',
    '{"n": 3, "kind": "diagonal", "diag": {"generator": "3sat", "clauses": [[1, 2, 9]]}}',
    '{"n": 3, "kind": "diagonal", "diag": {"generator": "nope"}}',
    '{"n": 1, "kind": "quantum"}',
    '{"kind": "ising", "h": []}',
])
def test_malformed_documents(doc):
    with pytest.raises(InstanceFormatError):
        loads_instance(doc)


def test_instance_hash_stable():
    a = gen_spin_glass(6, seed=1)
    assert instance_hash(a) == instance_hash(loads_instance(dumps_instance(a)))
    assert instance_hash(a) != instance_hash(gen_spin_glass(6, seed=2))


def test_fmt():
    assert fmt(0.1) == "0.1"
    assert fmt(math.inf) == "inf"
    assert fmt(None) == ""
    assert fmt(True) == "1"
    assert fmt(np.int64(3)) == "3"
    assert float(fmt(1 / 3)) == 1 / 3


def test_render_csv_has_manifest_without_timestamp():
    m = RunManifest(["aqgap", "x"], seeds=[1, 2, 3], instance_hashes=["ab"])
    text = render_csv(["a", "b"], [[1, 2.5]], m, {"rho": 0.5})
    assert text.startswith("# tool: aqgap")
    assert "# seeds: 1..3" in text
    assert m.timestamp not in text
    assert text.endswith("# rho: 0.5\n")


def test_cli_generate_then_gap_scan(tmp_path):
    inst = tmp_path / "m4.json"
    out = tmp_path / "scan.csv"
    assert run(["generate", "--family", "marked", "--n", "4", "--seed", "7",
                "--out", str(inst)]) == EXIT_OK
    assert run(["gap-scan", "--instance", str(inst), "--out", str(out)]) == EXIT_OK
    head, rows, foot = read_csv(out)
    assert len(rows) >= 64
    assert list(rows[0]) == ["s", "lambda0", "lambda1", "lambda2", "gap", "E12"]
    assert "instances" in head and "s_star" in foot
    assert json.loads((tmp_path / "scan.csv.manifest.json").read_text())["timestamp"]


def test_cli_estimate_single_qubit(tmp_path):
    path = tmp_path / "q.json"
    write_instance(ProblemInstance.ising([1.0]), path)
    out = tmp_path / "est.csv"
    assert run(["estimate", "--instance", str(path), "--out", str(out)]) == EXIT_OK
    _, rows, _ = read_csv(out)
    assert len(rows) == 1
    assert float(rows[0]["g_exact"]) == pytest.approx(1 / math.sqrt(2), abs=1e-6)
    assert set(rows[0]) == {"s_star", "g_exact", "g_overlap_est", "ratio_bound",
                            "intersection_ratio", "|S+|", "|S-|", "m_c", "E_c"}


def test_cli_generate_3sat_writes_dimacs(tmp_path):
    path = tmp_path / "f.json"
    assert run(["generate", "--family", "3sat", "--n", "8", "--alpha", "4.0",
                "--seed", "2", "--out", str(path)]) == EXIT_OK
    cnf = (tmp_path / "f.cnf").read_text()
    assert cnf.startswith("p cnf 8 32")
    assert read_instance(path).n == 8


def test_cli_landscape_outputs(tmp_path, capsys):
    path = tmp_path / "sg.json"
    run(["generate", "--family", "spin-glass", "--n", "6", "--seed", "1", "--out", str(path)])
    assert run(["landscape", "--instance", str(path), "--out", "report"]) == EXIT_OK
    assert "local minima" in capsys.readouterr().out
    out = tmp_path / "minima.csv"
    assert run(["landscape", "--instance", str(path), "--eband", "0.5", "--dband", "1",
                "--out", str(out)]) == EXIT_OK
    _, rows, foot = read_csv(out)
    assert int(foot["n_local"]) == len(rows)


def test_cli_schedule(tmp_path):
    path = tmp_path / "q.json"
    write_instance(ProblemInstance.ising([1.0]), path)
    out = tmp_path / "sched.csv"
    assert run(["schedule", "--instance", str(path), "--kind", "local", "--tf", "50",
                "--points", "21", "--out", str(out)]) == EXIT_OK
    _, rows, foot = read_csv(out)
    assert len(rows) == 21
    assert float(rows[0]["fidelity"]) == pytest.approx(1.0, abs=1e-9)
    assert float(rows[-1]["fidelity"]) == pytest.approx(float(foot["final_fidelity"]))
    out2 = tmp_path / "sched2.csv"
    assert run(["schedule", "--instance", str(path), "--target-fidelity", "0.9",
                "--out", str(out2)]) == EXIT_OK
    assert float(read_csv(out2)[2]["final_fidelity"]) >= 0.9


def test_cli_exit_codes(tmp_path):
    assert run(["estimate", "--bogus"]) == EXIT_USAGE
    assert run(["nope"]) == EXIT_USAGE
    assert run(["schedule", "--instance", "x", "--out", "y"]) == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "kind": "ising", "h": [1]}')
    assert run(["gap-scan", "--instance", str(bad), "--out", str(tmp_path / "o.csv")]) \
        == EXIT_INSTANCE
    assert run(["gap-scan", "--instance", str(tmp_path / "missing.json"),
                "--out", str(tmp_path / "o.csv")]) == EXIT_INSTANCE
    marked = tmp_path / "m.json"
    write_instance(gen_marked(4, seed=7), marked)
    assert run(["estimate", "--instance", str(marked), "--out", str(tmp_path / "e.csv")]) \
        == EXIT_REGIME
    assert run(["estimate", "--instance", str(marked), "--eps0", "wide",
                "--out", str(tmp_path / "e.csv")]) in (EXIT_USAGE, EXIT_REGIME)
    assert run(["generate", "--family", "marked", "--out", str(tmp_path / "z.json")]) \
        == EXIT_USAGE


def test_cli_error_is_structured(tmp_path, capsys):
    run(["gap-scan", "--instance", str(tmp_path / "missing.json"), "--out", "o.csv"])
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "malformed-instance" and err["exit"] == EXIT_INSTANCE
