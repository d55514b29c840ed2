import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from bergman_lab import checks, cli, domains, maps


def write_scenario(tmp_path, **fields):
    path = tmp_path / f"{fields['name']}.json"
    path.write_text(json.dumps(fields))
    return path


def run_main(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_b2_scenario_passes_with_trivial_deck(tmp_path, capsys):
    path = write_scenario(tmp_path, name="b2", map="b2",
                          checks=["isometry", "restriction-shift", "deck"], degree_cap=6)
    out_dir = tmp_path / "out"
    code, out, _ = run_main(["run", path, "--out", out_dir], capsys)
    assert code == cli.EXIT_OK
    report = json.loads((out_dir / "report.json").read_text())
    assert report["pass"]
    for name in ("isometry", "restriction-shift", "deck"):
        entry = report["checks"][name]
        assert entry["pass"] and entry["max_residual"] < entry["tolerance"]
        assert (out_dir / entry["details"]).exists()
    for artifact in report["artifacts"]:
        assert (out_dir / artifact).exists()
    with open(out_dir / "deck.csv") as handle:
        rows = list(csv.DictReader(handle))
    order = [r for r in rows if r["item"] == "order"]
    assert order and float(order[0]["value"]) == 1
    assert "PASS deck" in out


def test_sym2_scenario_passes(tmp_path, capsys):
    path = write_scenario(tmp_path, name="sym2", map="sym:2",
                          checks=["reducing", "equiv", "kernel-symdisc"], degree_cap=4)
    code, _, _ = run_main(["run", path, "--out", tmp_path / "out"], capsys)
    assert code == cli.EXIT_OK


def test_identity_isometry_is_exact(tmp_path):
    scenario = cli.Scenario(name="id", map="power:1", checks=["isometry"])
    report = cli.run(scenario, tmp_path)
    assert report["pass"]
    assert report["checks"]["isometry"]["max_residual"] < 1e-14


def test_report_schema_and_determinism(tmp_path):
    scenario = cli.Scenario(name="det", map="power:3", checks=["isometry", "deck", "onb-gram"],
                            seed=7)
    first = cli.run(scenario, tmp_path / "a")
    second = cli.run(scenario, tmp_path / "b")
    parallel = cli.run(scenario, tmp_path / "c", parallel=True)
    assert cli.strip_timing(first) == cli.strip_timing(second) == cli.strip_timing(parallel)
    for name in scenario.checks:
        a = (tmp_path / "a" / f"{name}.csv").read_bytes()
        assert a == (tmp_path / "b" / f"{name}.csv").read_bytes()
        assert a == (tmp_path / "c" / f"{name}.csv").read_bytes()
    entry = first["checks"]["deck"]
    assert set(entry) == {"check", "pass", "max_residual", "tolerance", "seed", "details",
                          "artifacts", "wall_time_s"}
    assert first["scenario"]["seed"] == 7
    assert first["pass"] == all(c["pass"] for c in first["checks"].values())


def test_seed_override_changes_samples(tmp_path, capsys):
    path = write_scenario(tmp_path, name="seeded", map="b2", checks=["isometry"])
    run_main(["run", path, "--out", tmp_path / "x", "--seed", "1"], capsys)
    run_main(["run", path, "--out", tmp_path / "y", "--seed", "2"], capsys)
    rx = json.loads((tmp_path / "x" / "report.json").read_text())
    ry = json.loads((tmp_path / "y" / "report.json").read_text())
    assert rx["scenario"]["seed"] == 1 and ry["scenario"]["seed"] == 2
    assert rx["checks"]["isometry"]["max_residual"] != ry["checks"]["isometry"]["max_residual"]


def test_failing_check_gives_exit_one(tmp_path, capsys):
    path = write_scenario(tmp_path, name="strict", map="b2", checks=["isometry"],
                          tolerances={"isometry": 1e-300})
    code, out, _ = run_main(["run", path, "--out", tmp_path / "out"], capsys)
    assert code == cli.EXIT_FAILED
    assert "FAIL isometry" in out


@pytest.mark.parametrize("fields", [
    {"name": "x", "map": "nosuchmap", "checks": ["isometry"]},
    {"name": "x", "map": "b2", "checks": ["nosuchcheck"]},
    {"name": "x", "map": "b2", "checks": ["isometry"], "degree_cap": 0},
    {"name": "x", "map": "b2", "checks": ["isometry"], "tolerances": {"isometry": -1}},
    {"name": "x", "map": "b2", "checks": ["isometry"], "colour": "blue"},
    {"name": "x", "map": "b2"},
    {"name": "x", "map": "b2", "checks": ["kernel-symdisc"]},
])
def test_configuration_errors_exit_two(tmp_path, capsys, fields):
    path = write_scenario(tmp_path, **fields)
    code, _, err = run_main(["run", path, "--out", tmp_path / "out"], capsys)
    assert code == cli.EXIT_ERROR
    assert err.startswith("error:")


def test_missing_and_malformed_files_exit_two(tmp_path, capsys):
    code, _, _ = run_main(["run", tmp_path / "absent.json"], capsys)
    assert code == cli.EXIT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run_main(["run", bad], capsys)
    assert code == cli.EXIT_ERROR


def test_unwritable_output_exit_two(tmp_path, capsys):
    path = write_scenario(tmp_path, name="io", map="power:1", checks=["isometry"])
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, _ = run_main(["run", path, "--out", blocker / "sub"], capsys)
    assert code == cli.EXIT_ERROR


def test_list_command(capsys):
    code, out, _ = run_main(["list"], capsys)
    assert code == cli.EXIT_OK
    for line in ("b1 multiplicity 6", "sym:3 multiplicity 6", "power:1 multiplicity 1"):
        assert line in out


def test_deck_command(capsys):
    code, out, _ = run_main(["deck", "power:3"], capsys)
    assert code == cli.EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0].startswith("Deck(power:3): order 3")
    payload = json.loads(lines[-1])
    assert payload["is_galois"] and payload["fiber_size"] == 3
    assert len(payload["elements"]) == 3
    code, _, _ = run_main(["deck", "nosuchmap"], capsys)
    assert code == cli.EXIT_ERROR


def test_kernel_command(capsys):
    code, out, _ = run_main(["kernel", "kernel:disc", "--at", "0.5,0.5"], capsys)
    assert code == cli.EXIT_OK
    value = json.loads(out)["value"]
    # disc kernel 1/(1 - z conj(w))^2 at z = w = 1/2
    assert abs(value[0] - 16 / 9) < 1e-14 and abs(value[1]) < 1e-14
    code, out, _ = run_main(["kernel", "kernel:polydisc:2", "--at", "0;0,0;0"], capsys)
    assert json.loads(out)["value"] == [1.0, 0.0]
    code, _, _ = run_main(["kernel", "kernel:disc", "--at", "0.5"], capsys)
    assert code == cli.EXIT_ERROR


def test_rule_command_dumps_csv(tmp_path, capsys):
    target = tmp_path / "rule.csv"
    code, out, _ = run_main(["rule", "G_2", "--level", "6", "--dump-rule", target], capsys)
    assert code == cli.EXIT_OK
    assert "total weight 0.5" in out
    rule = domains.quadrature(domains.symmetrized_polydisc(2), 6)
    with open(target) as handle:
        rows = list(csv.reader(handle))
    assert len(rows) == len(rule) + 1


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "bergman_lab.cli", "list"],
                          capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 0 and "b2 multiplicity 3" in proc.stdout


def test_check_rng_streams_are_independent():
    a = cli.check_rng(1, "isometry").random(3)
    b = cli.check_rng(1, "deck").random(3)
    assert not np.allclose(a, b)
    assert np.array_equal(a, cli.check_rng(1, "isometry").random(3))


@pytest.mark.parametrize("name", sorted(checks.CHECKS))
def test_every_check_runs_on_a_suitable_map(name):
    target = {"kernel-symdisc": "sym:2", "equiv": "power:3"}.get(name, "power:2")
    ctx = checks.CheckContext(3, 24, np.random.default_rng(0))
    outcome = checks.get_check(name)(maps.from_name(target), ctx)
    assert outcome.max_residual < checks.DEFAULT_TOLERANCES[name]
    assert outcome.rows


def test_unknown_check_name():
    with pytest.raises(checks.UnknownCheck):
        checks.get_check("nosuchcheck")
