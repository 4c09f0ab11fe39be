import hashlib
import json
import os

from qdchain.cli import run


def digest_dir(path):
    out = {}
    for name in sorted(os.listdir(path)):
        with open(os.path.join(path, name), "rb") as fh:
            out[name] = hashlib.sha256(fh.read()).hexdigest()
    return out


def test_gate_verify_known_gate(tmp_path):
    out = tmp_path / "a"
    assert run(["gate", "verify", "--name", "CCNOT_92", "--out", str(out)]) == 0
    payload = json.loads((out / "verify_CCNOT_92.json").read_text())
    assert payload["pass"] is True
    assert max(float(x) for x in payload["block_infidelities"]) <= 1e-6
    assert (out / "manifest.json").exists()


def test_gate_verify_unknown_gate_usage_error(tmp_path):
    assert run(["gate", "verify", "--name", "nosuchgate",
                "--out", str(tmp_path)]) == 2


def test_usage_error_on_unknown_flag(tmp_path):
    assert run(["gate", "verify", "--name", "H", "--frobnicate", "1",
                "--out", str(tmp_path)]) == 2


def test_gate_verify_permutation_gate(tmp_path):
    assert run(["gate", "verify", "--name", "SWAP_BC", "--out", str(tmp_path)]) == 0


def test_basis_check(tmp_path):
    assert run(["basis", "check", "--out", str(tmp_path)]) == 0


def test_ehm_diagram_grid_row_count(tmp_path):
    assert run(["ehm", "diagram", "--L", "4", "--N", "4", "--alpha", "0.2",
                "--U", "1:5:3", "--eps", "-2:2:3",
                "--observables", "E1", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "ehm_diagram.csv").read_text().strip().splitlines()
    assert len(lines) == 1 + 3 * 3


def test_ehm_boundary(tmp_path):
    assert run(["ehm", "boundary", "--U", "1.0", "--alpha", "0.2",
                "--out", str(tmp_path)]) == 0
    text = (tmp_path / "ehm_boundary.csv").read_text()
    assert "I-II" in text


def test_sequence_eval_round_trip(tmp_path):
    from qdchain.gates import toffoli_92
    from qdchain.spincore import save_sequence

    path = tmp_path / "seq.csv"
    save_sequence(toffoli_92(), path)
    assert run(["sequence", "eval", "--file", str(path), "--target", "CCNOT",
                "--tol", "1e-5", "--out", str(tmp_path)]) == 0


def test_gate_list_and_noise_sweep_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run(["gate", "list", "--out", str(out)]) == 0
        assert run(["noise", "sweep", "--sequences", "CCNOT_92",
                    "--models", "charge", "--alpha", "1e-3:1e-2:2",
                    "--out", str(out)]) == 0
        assert run(["ehm", "boundary", "--out", str(out)]) == 0
    assert digest_dir(a) == digest_dir(b)


def test_merit_command(tmp_path):
    assert run(["merit", "--pairs", "0.04/1e7,0.1/2e7", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "merit.csv").read_text().strip().splitlines()
    assert len(lines) == 3


def test_krotov_run_converges_from_raw(tmp_path):
    assert run(["krotov", "run", "--init", "raw55", "--iterations", "5",
                "--threshold", "1e-6", "--out", str(tmp_path)]) == 0
    payload = json.loads((tmp_path / "krotov_run.json").read_text())
    assert payload["converged"] is True
