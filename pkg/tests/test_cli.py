import json
import math

import numpy as np
import pytest

from gframe.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, build_parser, cut_entropies, main
from gframe.serialize import decode_array


def run(tmp_path, command, config=None, *extra):
    args = [command]
    if config is not None:
        path = tmp_path / f"{command}.json"
        path.write_text(json.dumps(config))
        args += ["--config", str(path)]
    out = tmp_path / f"{command}-report.json"
    code = main(args + ["--out", str(out)] + list(extra))
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


def strip_timings(report):
    return {k: v for k, v in report.items() if k != "timings"}


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_verify_defaults_pass(tmp_path):
    code, rep = run(tmp_path, "verify")
    assert code == EXIT_OK
    assert rep["passed"] and rep["command"] == "verify"
    names = [s["name"] for s in rep["suites"]]
    assert {"group", "spaces", "symmetry", "oracle", "alignment", "relframes", "dynamics", "lemma9", "paradox"} <= set(names)
    assert "timings" in rep


def test_verify_selectors(tmp_path):
    code, rep = run(tmp_path, "verify", {"suites": ["lemma9"]})
    assert code == EXIT_OK
    assert [s["name"] for s in rep["suites"]] == ["lemma9"]
    code, rep = run(tmp_path, "verify", {"suites": ["oracle"], "spaces": [{"group": 2, "N": 2}]})
    assert code == EXIT_OK
    vals = [v["value"] for k, v in rep["checks"].items() if k.startswith("oracle")]
    assert vals and all(isinstance(v, (int, float)) and v < 1e-12 for v in vals if isinstance(v, (int, float)))


def test_verify_is_deterministic(tmp_path):
    cfg = {"suites": ["symmetry", "alignment", "relframes"], "spaces": [{"group": 3, "N": 2}]}
    _, a = run(tmp_path, "verify", cfg, "--seed", "7")
    _, b = run(tmp_path, "verify", cfg, "--seed", "7")
    assert strip_timings(a) == strip_timings(b)
    assert a["seed"] == 7


def test_verify_config_errors(tmp_path, capsys):
    assert run(tmp_path, "verify", {"suites": ["bogus"]})[0] == EXIT_CONFIG
    assert run(tmp_path, "verify", {"spaces": [{"group": 4, "N": 4}]})[0] == EXIT_CONFIG
    assert run(tmp_path, "verify", {"tolerance": -1})[0] == EXIT_CONFIG
    assert run(tmp_path, "verify", {"unknown": 1})[0] == EXIT_CONFIG
    assert main(["verify", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", "--config", str(bad)]) == EXIT_CONFIG
    assert "gframe verify" in capsys.readouterr().err


def test_paradox_default(tmp_path):
    code, rep = run(tmp_path, "paradox")
    assert code == EXIT_OK
    checks = rep["checks"]
    assert checks["partial trace independent of theta"]["value"] < 1e-12
    assert checks["relational trace depends on theta"]["value"] > 1e-3
    assert rep["scenario"]["n"] == 16


def test_paradox_same_theta_is_config_error(tmp_path):
    assert run(tmp_path, "paradox", {"theta": 1.0, "theta_alt": 1.0})[0] == EXIT_CONFIG


def test_paradox_matrices(tmp_path):
    code, rep = run(tmp_path, "paradox", {"n": 6, "b": 1, "include_matrices": True})
    assert code == EXIT_OK
    pt = decode_array(rep["matrices"]["partial_trace"])
    assert pt.shape == (36, 36) and abs(np.trace(pt) - 1) < 1e-12


def test_failing_check_exit_code(tmp_path, capsys):
    # a gap larger than the relational-trace difference makes the last check fail
    code, rep = run(tmp_path, "paradox", {"gap": 1.0})
    assert code == EXIT_FAIL
    assert not rep["passed"]
    assert "failed" in capsys.readouterr().err


def test_env_tolerance_override(tmp_path, monkeypatch):
    monkeypatch.setenv("GFRAME_TOL", "1e-30")
    code, rep = run(tmp_path, "paradox")
    assert rep["config"]["tolerance"] == 1e-30
    monkeypatch.setenv("GFRAME_TOL", "abc")
    assert run(tmp_path, "paradox")[0] == EXIT_CONFIG
    monkeypatch.setenv("GFRAME_TOL", "0")
    assert run(tmp_path, "paradox")[0] == EXIT_CONFIG


def test_dynamics_default(tmp_path):
    code, rep = run(tmp_path, "dynamics")
    assert code == EXIT_OK
    scan = rep["oe_violation_scan"]
    assert scan["found"] and scan["t"] == 0.1
    assert len(rep["traces"]["times"]) == 30
    assert max(rep["unitarity_residuals"]) < 1e-10


def test_dynamics_three_particles(tmp_path):
    cfg = {"group": 3, "N": 3, "masses": [1.0, 2.0, 3.0], "potentials": {"1,2": [0.5, 0.1, 0.1]}, "times": [0.3, 0.6], "include_matrices": True}
    code, rep = run(tmp_path, "dynamics", cfg)
    assert code == EXIT_OK
    coef = rep["checks"]["relative kinetic coefficient is 1/(2 m_1)"]["value"]
    assert abs(coef["coefficient"] - 0.5) < 1e-9
    assert rep["reduced_interaction_norm"] > 1e-3
    assert decode_array(rep["matrices"]["H_reduced"]).shape == (9, 9)


def test_dynamics_with_state(tmp_path):
    cfg = {"group": 4, "N": 2, "times": [0.5], "state": {"kind": "superposition", "configs": [[0, 1], [1, 3]]}, "observables": ["position", "momentum"]}
    code, rep = run(tmp_path, "dynamics", cfg)
    assert code == EXIT_OK
    assert set(rep["traces"]["expectations"]) == {"position_2", "momentum_2"}


def test_dynamics_config_errors(tmp_path):
    assert run(tmp_path, "dynamics", {"group": [2, 2]})[0] == EXIT_CONFIG
    assert run(tmp_path, "dynamics", {"group": 4, "potentials": {"1,2": [0, 1, 2, 3]}})[0] == EXIT_CONFIG
    assert run(tmp_path, "dynamics", {"N": 2, "masses": [1.0]})[0] == EXIT_CONFIG
    assert run(tmp_path, "dynamics", {"potentials": {"x": [0]}})[0] == EXIT_CONFIG


def test_frames_default(tmp_path):
    code, rep = run(tmp_path, "frames")
    assert code == EXIT_OK
    ent = {k: v["cut_entropies"] for k, v in rep["frames"].items()}
    assert ent["1"] == [0.0, 0.0] and ent["2"] == [0.0, 0.0]
    assert all(abs(e - math.log(2)) < 1e-12 for e in ent["3"])


def test_frames_center_of_mass_and_hops(tmp_path):
    cfg = {"group": 5, "frames": [1, 3], "hops": [[1, 3]], "masses": [1, 1, 1], "orientation": 2}
    code, rep = run(tmp_path, "frames", cfg)
    assert code == EXIT_OK
    assert len(rep["hops"]) == 1 and rep["hops"][0]["residual"] < 1e-12
    assert len(rep["center_of_mass"]["assignment"]) == 25


def test_frames_config_errors(tmp_path):
    assert run(tmp_path, "frames", {"frames": [4]})[0] == EXIT_CONFIG
    assert run(tmp_path, "frames", {"group": 3})[0] == EXIT_CONFIG
    assert run(tmp_path, "frames", {"state": {"kind": "superposition", "configs": [[0, 0, 0], [1, 1, 1]]}})[0] == EXIT_CONFIG
    assert run(tmp_path, "frames", {"frames": [1, 2], "hops": [[1, 3]]})[0] == EXIT_CONFIG


def test_command_mismatch(tmp_path):
    assert run(tmp_path, "frames", {"command": "verify"})[0] == EXIT_CONFIG


def test_stdout_output(capsys):
    assert main(["paradox"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["command"] == "paradox"


def test_cut_entropies():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(cut_entropies(bell, 2), [math.log(2)] * 2)
    assert cut_entropies(np.array([1.0, 0, 0, 0]), 2) == [0.0, 0.0]


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    out = tmp_path / "r.json"
    proc = subprocess.run([sys.executable, "-m", "gframe.cli", "frames", "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == EXIT_OK, proc.stderr
    assert json.loads(out.read_text())["passed"]


def test_product_group_commands(tmp_path):
    code, _ = run(tmp_path, "verify", {"spaces": [{"group": [2, 3], "N": 2}, {"group": [2, 2], "N": 3}]})
    assert code == EXIT_OK
    cfg = {"group": [2, 3], "N": 2, "state": {"kind": "basis", "config": [[1, 2], [0, 0]]}, "orientation": [1, 2]}
    code, rep = run(tmp_path, "frames", cfg)
    assert code == EXIT_OK and rep["passed"]
