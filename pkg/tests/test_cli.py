import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from cml4.cli import EXIT_FALSE, EXIT_OK, EXIT_USAGE, main
from cml4.export import region_from_json
from cml4.regions import build_region


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, "--json", *argv)
    return code, json.loads(out)


def test_verify_prop1_pass_and_fail(capsys):
    code, rep = run_json(capsys, "verify", "prop1", "--eps", "41/100")
    assert code == EXIT_OK and rep["verdict"] is True
    code, rep = run_json(capsys, "verify", "prop1", "--eps", "39/100")
    assert code == EXIT_FALSE and rep["checks"]["invariance"] is False
    assert rep["invariance"]["violations"]


def test_verify_prop2_pass_and_fail(capsys):
    assert run(capsys, "--quiet", "verify", "prop2", "--eps", "32/100")[0] == EXIT_OK
    assert run(capsys, "--quiet", "verify", "prop2", "--eps", "28/100")[0] == EXIT_FALSE


def test_flags_accepted_after_subcommand(capsys):
    code, out, _ = run(capsys, "verify", "prop2", "--eps", "0.32", "--json", "--threads", "2")
    assert code == EXIT_OK
    assert "\n" not in out.strip()


def test_quiet_prints_nothing(capsys):
    code, out, _ = run(capsys, "--quiet", "domain-table")
    assert code == EXIT_OK and out == ""


@pytest.mark.parametrize("argv", [
    ["verify", "prop1", "--eps", "abc"],
    ["verify", "prop1", "--eps", "1/2"],
    ["verify", "prop3", "--eps", "2/5"],
    ["simulate", "--eps", "0.7", "--steps", "10"],
    ["simulate", "--eps", "0.3", "--steps", "0"],
    ["export", "--region", "A", "--eps", "0"],
    ["lorenz", "--eps", "2/5", "--eval", "1/2"],
    ["nonsense"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_USAGE


def test_critical_values(capsys):
    code, cv = run_json(capsys, "critical-values", "--n-max", "2")
    assert code == EXIT_OK
    assert cv["radical_agrees"] and cv["ordering_holds"]
    lo, hi = (F(s) for s in cv["eps_star_bracket"])
    assert F(397, 1000) <= lo < hi <= F(398, 1000)


def test_domain_table(capsys):
    code, tab = run_json(capsys, "domain-table")
    assert code == EXIT_OK
    assert len(tab["branches"]) == 26
    assert len({b["label"] for b in tab["branches"]}) == 26


def test_symmetry_table(capsys):
    code, tab = run_json(capsys, "symmetry-table", "--orbit-eps", "41/100")
    assert code == EXIT_OK
    assert len(tab["generators"]) == 7
    assert tab["group"]["order"] == 48
    assert tab["orbit_of_A"]["stabilizer_order"] == 8


def test_lorenz(capsys):
    code, out = run_json(capsys, "lorenz", "--eps", "2/5", "--eval", "1/5", "--iterate", "2", "--components")
    assert code == EXIT_OK
    assert out["p_star"] == str(F(2 - F(2, 5), 6 - 4 * F(2, 5)))
    assert out["orbit"][0] == "1/5" and len(out["orbit"]) == 3
    assert out["components"]["C2"] == [["11/25", "14/25"]]
    assert all(out["cycle"].values())


def test_export_json_round_trip(capsys):
    code, text, _ = run(capsys, "export", "--region", "A", "--eps", "41/100", "--format", "json")
    assert code == EXIT_OK
    back = region_from_json(text)
    assert back.to_json() == build_region("A", F(41, 100)).to_json()


def test_export_obj_with_image(capsys, tmp_path):
    path = tmp_path / "s0a.obj"
    code, info = run_json(capsys, "export", "--region", "A", "--eps", "41/100", "--format", "obj",
                          "--image", "S0", "--out", str(path))
    assert code == EXIT_OK
    objs = [l.split()[1] for l in path.read_text().splitlines() if l.startswith("o ")]
    assert objs == info["members"] and len(objs) == 6
    assert all(o.startswith("S0") for o in objs)


def test_simulate_csv_and_summary(capsys, tmp_path):
    argv = ["simulate", "--eps", "0.41", "--steps", "200", "--burn-in", "20", "--orbits", "4",
            "--seed", "42", "--start-region", "A"]
    code, csv_text, _ = run(capsys, *argv)
    assert code == EXIT_OK
    lines = csv_text.strip().splitlines()
    assert len(lines) == 5 and lines[0].startswith("eps,")
    code, again, _ = run(capsys, *argv)
    assert again == csv_text
    out = tmp_path / "sim.csv"
    code, summary = run_json(capsys, *argv, "--out", str(out))
    assert out.read_text() == csv_text
    assert summary["tail_in_A_family"] == 1.0


def test_scan(capsys):
    code, rows = run_json(capsys, "scan", "--eps-from", "0.30", "--eps-to", "0.42", "--eps-points", "3",
                          "--steps", "100", "--burn-in", "10", "--orbits", "3")
    assert code == EXIT_OK
    assert [round(r["eps"], 2) for r in rows] == [0.30, 0.36, 0.42]


def test_faces(capsys):
    code, rep = run_json(capsys, "faces", "--face", "q0", "--eps", "0.3", "--steps", "2000",
                         "--burn-in", "200", "--orbits", "20", "--grid", "16")
    assert code == EXIT_OK
    assert rep["fixed_coordinate_max"] == 0.0


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cml4", "--json", "lorenz", "--eps", "3/10"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["eps"] == "3/10"
