"""Smoke tests for the python bindings and the installed CLI."""

import json
import math
import os
import subprocess

import pytest

import invarlab as il

BSC01 = 0.5310044064107188  # 1 - h2(0.1)
BSC04 = 0.02904940554533142  # 1 - h2(0.4)
BSC025 = 0.18872187554086717  # 1 - h2(0.25)


def test_entropy_basics():
    y = il.Alphabet.indexed("y", 4)
    uniform = il.JointDistribution([y], [0.25] * 4)
    assert il.entropy(uniform) == pytest.approx(2.0, abs=1e-12)
    assert il.binary_entropy(0.25) == pytest.approx(0.8112781244591328, abs=1e-12)


def test_probe_instance():
    scenario = il.two_site_bsc_scenario(0.1, 0.4)
    joint = il.build_joint(scenario)
    profile = il.per_site_information(joint)
    assert profile.per_site[0][1] == pytest.approx(BSC01, abs=1e-9)
    assert profile.per_site[1][1] == pytest.approx(BSC04, abs=1e-9)
    assert profile.minimum_site == 1
    assert profile.unconditional == pytest.approx(BSC025, abs=1e-9)

    encoder = il.identity_encoder(joint.axes[2])
    report = il.check_prop1(joint, encoder)
    assert report.hypothesis_satisfied
    assert report.verdict == il.Prop1Verdict.Violated
    assert report.slack == pytest.approx(BSC04 - BSC025, abs=1e-9)


def test_scenario_text_round_trip():
    scenario = il.random_scenario(7, il.ScenarioSizes(3, 2, 3), True)
    text = il.serialize_scenario(scenario)
    assert il.parse_scenario(text) == scenario


def test_enumeration_on_site_exclusive_world():
    joint = il.build_joint(il.site_exclusive_scenario())
    result = il.enumerate_deterministic_optimum(joint, 3, 1e-9)
    assert result.feasible_count == 3
    assert result.report.i_y_z <= 1e-9


def test_optimizer_smoke():
    joint = il.build_joint(il.two_site_bsc_scenario(0.1, 0.1))
    options = il.OptimizeOptions()
    options.z_size = 2
    point = il.lagrangian_optimize(joint, 0.0, il.TradeoffMode.Info, options)
    assert point.objective_value == pytest.approx(BSC01, abs=1e-6)
    assert point.converged


def test_errors_surface_as_python_exceptions():
    y = il.Alphabet.indexed("y", 2)
    with pytest.raises(ValueError):
        il.JointDistribution([y], [0.4, 0.4])
    with pytest.raises(il.ScenarioParseError):
        il.parse_scenario("[labels]\nsize == 2\n")


@pytest.fixture()
def cli_path():
    path = os.environ.get("INVARLAB_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("INVARLAB_CLI not set")
    return path


def test_cli_info_and_determinism(cli_path, tmp_path):
    scenario = tmp_path / "two_site.scn"
    scenario.write_text(il.serialize_scenario(il.two_site_bsc_scenario(0.1, 0.4)))

    out = tmp_path / "info"
    run = subprocess.run(
        [cli_path, "info", "--scenario", str(scenario), "--encoder", "identity",
         "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert run.returncode == 0, run.stderr
    report = json.loads((out / "report.json").read_text())
    assert math.isclose(report["information"]["i_y_z_bits"], BSC025, abs_tol=1e-9)
    assert report["information"]["i_z_s_bits"] == 0.0

    frontier_dir = tmp_path / "frontier"
    args = [cli_path, "frontier", "--scenario", str(scenario), "--lambda-points", "3",
            "--restarts", "3", "--max-iters", "300", "--seed", "9",
            "--out", str(frontier_dir)]
    assert subprocess.run(args, capture_output=True).returncode == 0
    first = (frontier_dir / "frontier.csv").read_bytes()
    assert subprocess.run(args, capture_output=True).returncode == 0
    assert (frontier_dir / "frontier.csv").read_bytes() == first

    missing = subprocess.run(
        [cli_path, "info", "--scenario", str(tmp_path / "absent.scn")],
        capture_output=True,
    )
    assert missing.returncode == 1
