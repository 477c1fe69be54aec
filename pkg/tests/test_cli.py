import json

import pytest

from padic_towers import UnknownCommand
from padic_towers.cli import (
    build_scenario,
    canonical_json,
    default_config,
    load_config,
    main,
    run_demo,
    run_verify,
)


def write_config(tmp_path, text, name="scenario.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


BASIC = """
[scenario]
prime = 2
dim = 1
depth = 2
seed = 11

[[scenario.balls]]
center = [0]
radius_exp = 0
"""

OVERLAPPING = """
[scenario]
prime = 2
depth = 2

[[scenario.balls]]
center = [0]
radius_exp = 0

[[scenario.balls]]
center = [1]
radius_exp = 1
"""

FAULTY = """
[scenario]
prime = 2
depth = 3
seed = 5

[[scenario.balls]]
center = [0]
radius_exp = 0

[scenario.faults]
permutation_tower = true
"""


def test_default_scenario_verifies(tmp_path):
    out = tmp_path / "report.json"
    assert main(["verify", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["summary"]["status"] == "pass"
    assert report["summary"]["failed"] == 0
    assert {c["status"] for c in report["checks"]} == {"pass"}


def test_reports_are_byte_identical(tmp_path):
    config = write_config(tmp_path, BASIC)
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--config", config, "--out", str(out1)]) == 0
    assert main(["verify", "--config", config, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_seed_override_changes_echo(tmp_path):
    config = write_config(tmp_path, BASIC)
    s1 = build_scenario(load_config(config))
    s2 = build_scenario(load_config(config), seed_override=99)
    assert s1.echo["seed"] == 11 and s2.echo["seed"] == 99
    assert canonical_json(s1.echo) != canonical_json(s2.echo)


def test_overlapping_balls_exit_code_2(tmp_path, capsys):
    config = write_config(tmp_path, OVERLAPPING)
    assert main(["verify", "--config", config]) == 2
    assert "overlap" in capsys.readouterr().err


def test_malformed_toml_exit_code_2(tmp_path, capsys):
    config = write_config(tmp_path, "[scenario\nprime = 2")
    assert main(["verify", "--config", config]) == 2
    assert "config error" in capsys.readouterr().err


def test_fault_injection_exit_code_1_names_law(tmp_path):
    config = write_config(tmp_path, FAULTY)
    out = tmp_path / "report.json"
    assert main(["verify", "--config", config, "--out", str(out)]) == 1
    report = json.loads(out.read_text())
    failing = [c for c in report["checks"] if c["status"] == "fail"]
    assert [c["name"] for c in failing] == ["faults.permutation_tower"]
    assert "connecting law violated" in failing[0]["witness"]["violated_law"]


def test_diff_tower_demo_orders(tmp_path):
    config = write_config(tmp_path, BASIC)
    out = tmp_path / "demo.json"
    assert main(["diff-tower", "--config", config, "--out", str(out)]) == 0
    demo = json.loads(out.read_text())
    assert demo["orders"] == [2, 24]
    assert demo["comparisons"]["divisibility"]["literal_exponent"] == 2
    assert demo["comparisons"]["free_rank"]["computed_rank"] == (
        demo["comparisons"]["free_rank"]["codomain_size"] - 1
    )
    for entry in demo["sample_distances"]:
        assert entry["numerator"] in (0, 1)


def test_loop_table_demo(tmp_path):
    config = write_config(
        tmp_path,
        BASIC + "\n[scenario.bounds]\nloop_support = 2\n",
    )
    out = tmp_path / "loop.json"
    assert main(["loop-table", "--config", config, "--out", str(out)]) == 0
    demo = json.loads(out.read_text())
    # |N_1| = 2 and support <= 2: classes {}, {1}, {1,1}
    assert demo["class_count"] == 3
    assert demo["classes"] == [[], [[1]], [[1], [1]]]
    assert demo["cayley"][0] == [0, 1, 2]
    assert demo["cayley"][1][1] == 2
    assert demo["class_count"] == demo["class_count_formula"]


def test_loop_table_csv(tmp_path):
    config = write_config(tmp_path, BASIC)
    out = tmp_path / "loop.csv"
    assert main(["loop-table", "--config", config, "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "class_index,label,level"
    assert any(line.startswith("wedge,") for line in lines)


def test_csv_rejected_elsewhere(tmp_path, capsys):
    config = write_config(tmp_path, BASIC)
    assert main(["verify", "--config", config, "--format", "csv"]) == 2
    assert "loop-table" in capsys.readouterr().err


def test_complete_demo_fixture(tmp_path):
    config = write_config(tmp_path, BASIC + "\n[scenario.complete]\nprecision = 3\n")
    out = tmp_path / "complete.json"
    assert main(["complete", "--config", config, "--out", str(out)]) == 0
    demo = json.loads(out.read_text())
    assert demo["limit"] == [[1, 7]]  # -1 mod 8
    assert demo["characters"]["s=1"] == [[1, 1]]
    assert demo["characters"]["s=3"] == [[1, 7]]


def test_complete_demo_custom_sequence(tmp_path):
    config = write_config(
        tmp_path,
        """
[scenario]
prime = 3
depth = 2

[[scenario.balls]]
center = [0]
radius_exp = 0

[scenario.complete]
precision = 2
sequence = [{ 1 = 4 }, { 1 = 13 }, { 1 = 13 }]
""",
    )
    out = tmp_path / "complete.json"
    assert main(["complete", "--config", config, "--out", str(out)]) == 0
    demo = json.loads(out.read_text())
    assert demo["limit"] == [[1, 4]]  # 13 = 4 mod 9


def test_not_cauchy_sequence_fails_check(tmp_path):
    config = write_config(
        tmp_path,
        """
[scenario]
prime = 2
depth = 2

[[scenario.balls]]
center = [0]
radius_exp = 0

[scenario.complete]
precision = 3
sequence = [{ 1 = 1 }, { 1 = 2 }]
""",
    )
    out = tmp_path / "report.json"
    assert main(["verify", "--config", config, "--out", str(out)]) == 1
    report = json.loads(out.read_text())
    failing = {c["name"] for c in report["checks"] if c["status"] == "fail"}
    assert failing == {"completion.complete_fixture"}


def test_report_demo_carries_comparisons(tmp_path):
    config = write_config(tmp_path, BASIC)
    out = tmp_path / "report.json"
    assert main(["report", "--config", config, "--out", str(out)]) == 0
    demo = json.loads(out.read_text())
    assert set(demo["comparisons"]) == {"free_rank", "divisibility"}
    assert demo["scenario_hash"]


def test_unknown_bound_rejected(tmp_path, capsys):
    config = write_config(tmp_path, BASIC + "\n[scenario.bounds]\nbogus = 3\n")
    assert main(["verify", "--config", config]) == 2


def test_run_demo_unknown_command():
    scenario = build_scenario(default_config())
    with pytest.raises(UnknownCommand):
        run_demo(scenario, "nonsense")


def test_non_prime_rejected(tmp_path, capsys):
    config = write_config(tmp_path, BASIC.replace("prime = 2", "prime = 6"))
    assert main(["verify", "--config", config]) == 2
    assert "not prime" in capsys.readouterr().err


def test_digit_list_centers(tmp_path):
    config = write_config(
        tmp_path,
        """
[scenario]
prime = 3
dim = 1
depth = 2

[[scenario.balls]]
center = [[1, 2]]
radius_exp = 1
""",
    )
    scenario = build_scenario(load_config(config))
    assert scenario.manifold.balls[0].center[0].digits == (1, 2)
    assert len(scenario.manifold.discretize(2)) == 3


def test_scenario_hash_in_report(tmp_path):
    scenario = build_scenario(default_config())
    report = run_verify(scenario)
    assert report["scenario_hash"] == json.loads(canonical_json(report))["scenario_hash"]
    assert len(report["scenario_hash"]) == 64
