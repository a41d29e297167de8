import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from secuav import ScenarioFormatError, reference_scenario
from secuav.cli import load_scenario, main

REPO = Path(__file__).resolve().parents[1]
SCHEMA = json.loads((REPO / "schemas" / "plan.schema.json").read_text())

FAST_SCN = """\
# one user under the start point, eavesdropper far off to the east
users = [[0.0, 0.0]]
eve = [10000.0, 0.0]
uav_start = [0.0, 0.0]
altitude_m = 100.0
ref_gain_db = -60.0
tx_power_dbw = 0.0
noise_dbm = -110.0
bandwidth_hz = 5.0e6
slot_s = 0.5
vmax_mps = 50.0
content_mb = 10.0
"""


@pytest.fixture()
def fast_file(tmp_path):
    p = tmp_path / "fast.scn"
    p.write_text(FAST_SCN)
    return p


def test_load_reference_scenario_file():
    scn = load_scenario(REPO / "scenarios" / "reference.scn")
    ref = reference_scenario()
    assert np.allclose(scn.user_positions, ref.user_positions)
    assert np.allclose(scn.eve_position, ref.eve_position)
    assert scn.rho0 == pytest.approx(ref.rho0)
    assert scn.bandwidth == ref.bandwidth
    assert scn.content_bits == ref.content_bits


def test_load_scenario_missing_field(tmp_path):
    p = tmp_path / "bad.scn"
    p.write_text(FAST_SCN.replace("vmax_mps = 50.0\n", ""))
    with pytest.raises(ScenarioFormatError, match="vmax_mps"):
        load_scenario(p)


def test_load_scenario_unknown_field(tmp_path):
    p = tmp_path / "bad.scn"
    p.write_text(FAST_SCN + "wind_mps = 3.0\n")
    with pytest.raises(ScenarioFormatError, match="wind_mps"):
        load_scenario(p)


def test_load_scenario_bad_literal(tmp_path):
    p = tmp_path / "bad.scn"
    p.write_text(FAST_SCN.replace("50.0", "fifty"))
    with pytest.raises(ScenarioFormatError, match="bad literal"):
        load_scenario(p)


def test_missing_field_exits_one(tmp_path, capsys):
    p = tmp_path / "bad.scn"
    p.write_text(FAST_SCN.replace("content_mb = 10.0\n", ""))
    code = main(["plan", str(p), "--out-dir", str(tmp_path / "out")])
    assert code == 1
    assert "content_mb" in capsys.readouterr().err


def test_plan_writes_contract_files(fast_file, tmp_path):
    out = tmp_path / "out"
    code = main(["plan", str(fast_file), "--out-dir", str(out)])
    assert code == 0
    for name in ("plan.json", "trace.csv", "trajectory.csv",
                 "association.csv"):
        assert (out / name).exists()

    payload = json.loads((out / "plan.json").read_text())
    jsonschema.validate(payload, SCHEMA)
    assert payload["n_star"] == 3
    assert payload["complete"] is True

    trace_lines = (out / "trace.csv").read_text().splitlines()
    assert trace_lines[0] == "iteration,penalized_objective,lambda,binarity_residual"

    traj_lines = (out / "trajectory.csv").read_text().splitlines()
    assert traj_lines[0] == "n,x,y"
    assert traj_lines[1].startswith("1,")  # slot indices are 1-based

    assoc_lines = (out / "association.csv").read_text().splitlines()
    assert assoc_lines[0] == "n,k,e"
    first = assoc_lines[1].split(",")
    assert first[0] == "1" and first[1] == "1"


def test_plan_validate_roundtrip(fast_file, tmp_path):
    out = tmp_path / "out"
    assert main(["plan", str(fast_file), "--out-dir", str(out)]) == 0
    assert main(["validate", str(fast_file), str(out / "plan.json")]) == 0


def test_validate_rejects_tampered_plan(fast_file, tmp_path):
    out = tmp_path / "out"
    main(["plan", str(fast_file), "--out-dir", str(out)])
    payload = json.loads((out / "plan.json").read_text())
    payload["trajectory"][1] = [900.0, 900.0]  # breaks the speed limit
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(payload))
    assert main(["validate", str(fast_file), str(tampered)]) == 1


def test_hover_baseline_flag(fast_file, tmp_path):
    out = tmp_path / "hover"
    assert main(["plan", str(fast_file), "--baseline", "hover",
                 "--out-dir", str(out)]) == 0
    payload = json.loads((out / "plan.json").read_text())
    jsonschema.validate(payload, SCHEMA)
    assert payload["method"] == "hover-baseline"


def test_circular_baseline_flag(fast_file, tmp_path):
    out = tmp_path / "circ"
    assert main(["plan", str(fast_file), "--baseline", "circular",
                 "--slots", "6", "--out-dir", str(out)]) == 0
    payload = json.loads((out / "plan.json").read_text())
    assert payload["method"] == "circular-baseline"
    assert payload["n_star"] == 6


def test_fixed_slot_count_flag(fast_file, tmp_path):
    out = tmp_path / "fixed"
    assert main(["plan", str(fast_file), "--slots", "5",
                 "--out-dir", str(out)]) == 0
    payload = json.loads((out / "plan.json").read_text())
    assert payload["n_star"] == 5
    assert payload["complete"] is True


def test_infeasible_bracket_exits_two(fast_file, tmp_path, capsys):
    code = main(["plan", str(fast_file), "--n-max", "2",
                 "--out-dir", str(tmp_path / "out")])
    assert code == 2
    assert "bracket" in capsys.readouterr().err


def test_solver_failure_exits_three(tmp_path, capsys):
    p = tmp_path / "degenerate.scn"
    p.write_text(FAST_SCN.replace("eve = [10000.0, 0.0]", "eve = [0.0, 0.0]"))
    code = main(["plan", str(p), "--baseline", "hover",
                 "--out-dir", str(tmp_path / "out")])
    assert code == 3


def test_sweep_content_monotone(fast_file, tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", str(fast_file), "content_mb", "1,5,10",
                 "--out", str(out)])
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "content_mb,n_star,prop1_bound"
    stars = [int(r.split(",")[1]) for r in rows[1:]]
    assert stars == sorted(stars)


def test_sweep_bandwidth_bound_non_increasing(fast_file, tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", str(fast_file), "bandwidth_hz",
                 "2.5e6,5e6,1e7,2e7", "--out", str(out)])
    assert code == 0
    bounds = [int(r.split(",")[2])
              for r in out.read_text().splitlines()[1:]]
    assert bounds == sorted(bounds, reverse=True)


def test_sweep_rejects_unknown_parameter(fast_file, tmp_path):
    assert main(["sweep", str(fast_file), "wind", "1,2",
                 "--out", str(tmp_path / "s.csv")]) == 1


def test_sweep_rejects_empty_range(fast_file, tmp_path):
    assert main(["sweep", str(fast_file), "content_mb", ",",
                 "--out", str(tmp_path / "s.csv")]) == 1


def test_console_script_smoke(fast_file, tmp_path):
    out = tmp_path / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "secuav.cli", "plan", str(fast_file),
         "--out-dir", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (out / "plan.json").exists()
