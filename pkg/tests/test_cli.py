import json

import pytest
from click.testing import CliRunner

from bseries_toolkit.cli import main
from bseries_toolkit.config import ENV_ORDER_CAP
from bseries_toolkit.harness import TrajectoryReader


@pytest.fixture
def runner():
    return CliRunner()


def run_json(runner, *args):
    result = runner.invoke(main, [*args, "--json"])
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


def as_mapping(records):
    return {r["tree"]: r["coefficient"] for r in records}


class TestTrees:
    def test_count_json(self, runner):
        data = run_json(runner, "trees", "count", "--max", "10")
        assert data["n"] == list(range(1, 11))
        assert data["rooted_trees"] == [1, 1, 2, 4, 9, 20, 48, 115, 286, 719]

    def test_count_table(self, runner):
        result = runner.invoke(main, ["trees", "count", "--max", "5"])
        assert result.exit_code == 0
        assert "# rooted trees" in result.output

    def test_enumerate(self, runner):
        data = run_json(runner, "trees", "enumerate", "--order", "3")
        assert [d["tree"] for d in data] == ["[[[]]]", "[[][]]"]
        assert data[1]["symmetry"] == 2

    @pytest.mark.parametrize("group", ["trees", "aromatic"])
    def test_count_below_one_is_a_domain_error(self, runner, group):
        result = runner.invoke(main, [group, "count", "--max", "0"])
        assert result.exit_code == 1
        assert "must be in 1.." in result.output

    def test_missing_option_is_usage_error(self, runner):
        assert runner.invoke(main, ["trees", "count"]).exit_code == 2


class TestCaps:
    def test_root_cap_is_a_domain_error(self, runner):
        result = runner.invoke(main, ["--order-cap", "3", "trees", "count", "--max", "4"])
        assert result.exit_code == 1

    def test_cap_from_environment(self, runner):
        result = runner.invoke(main, ["trees", "count", "--max", "4", "--json"], env={ENV_ORDER_CAP: "3"})
        assert result.exit_code == 1
        ok = runner.invoke(main, ["trees", "count", "--max", "3", "--json"], env={ENV_ORDER_CAP: "3"})
        assert ok.exit_code == 0

    def test_cap_outside_range_is_usage_error(self, runner):
        assert runner.invoke(main, ["--order-cap", "30", "trees", "count", "--max", "2"]).exit_code == 2

    def test_default_cap(self, runner):
        assert runner.invoke(main, ["bseries", "exact", "--order", "13", "--json"]).exit_code == 1


class TestBSeries:
    def test_invert_euler(self, runner):
        data = as_mapping(run_json(runner, "bseries", "invert", "euler", "--order", "4"))
        assert data[""] == "1"
        assert data["[]"] == "-1"
        assert data["[[]]"] == "1"
        assert data["[[[]]]"] == "-1"
        assert data["[[][]]"] == "-1/2"
        assert data["[[][[]]]"] == "1"

    def test_tableau_names_resolve_to_series(self, runner):
        data = as_mapping(run_json(runner, "bseries", "rk4", "--order", "4"))
        exact = as_mapping(run_json(runner, "bseries", "exact", "--order", "4"))
        assert data == exact

    def test_compose_from_files(self, runner, tmp_path):
        path = tmp_path / "euler.yaml"
        result = runner.invoke(main, ["bseries", "euler", "--order", "3", "--output", str(path)])
        assert result.exit_code == 0, result.output
        assert path.exists()
        data = as_mapping(run_json(runner, "bseries", "compose", str(path), "euler", "--order", "3"))
        assert data["[]"] == "2"
        assert data["[[]]"] == "1"
        assert data["[[[]]]"] == "0"
        assert data["[[][]]"] == "1/2"

    def test_unknown_series(self, runner):
        result = runner.invoke(main, ["bseries", "invert", "leapfrog", "--order", "3"])
        assert result.exit_code == 2

    def test_inverse_outside_the_group(self, runner, tmp_path):
        path = tmp_path / "zero.json"
        path.write_text(json.dumps([{"tree": "[]", "coefficient": "1"}]))
        assert runner.invoke(main, ["bseries", "invert", str(path), "--order", "2"]).exit_code == 1


class TestRungeKutta:
    def test_check_gauss3_file(self, runner, tableau_dir):
        result = runner.invoke(main, ["rk", "check", str(tableau_dir / "gauss3.json"), "--order-cap", "6"])
        assert result.exit_code == 0, result.output
        assert "order 6; 37/37 conditions satisfied" in result.output

    def test_check_heun_lists_violations(self, runner):
        result = runner.invoke(main, ["rk", "check", "heun", "--order-cap", "4"])
        assert result.exit_code == 0
        assert "first violated:" in result.output
        assert "[[][]]" in result.output
        data = run_json(runner, "rk", "check", "heun", "--order-cap", "4")
        assert data["order"] == 2

    def test_conditions(self, runner):
        assert len(run_json(runner, "rk", "conditions", "--order", "4")) == 8

    def test_gauss_written_then_checked(self, runner, tmp_path):
        path = tmp_path / "gauss2.json"
        assert runner.invoke(main, ["rk", "gauss", "--stages", "2", "--output", str(path)]).exit_code == 0
        data = run_json(runner, "rk", "check", str(path), "--order-cap", "5")
        assert data["order"] == 4

    def test_integrate_writes_records(self, runner, tmp_path):
        path = tmp_path / "run.jsonl"
        data = run_json(
            runner, "rk", "integrate", "rk4", "--field", "pendulum", "--x0", "1,0",
            "--h", "0.1", "--steps", "5", "--output", str(path),
        )
        assert len(data) == 6
        assert data[-1]["step"] == 5
        assert abs(data[-1]["energy"] - data[0]["energy"]) < 1e-5
        assert len(path.read_text().splitlines()) == 6

    def test_integrate_output_holds_only_the_latest_run(self, runner, tmp_path):
        path = tmp_path / "run.jsonl"
        for x0 in ("1,0", "0.2,0"):
            run_json(
                runner, "rk", "integrate", "gauss2", "--field", "pendulum", "--x0", x0,
                "--h", "0.1", "--steps", "3", "--output", str(path),
            )
        records = TrajectoryReader(path).read_all()
        assert len(records) == 4
        assert records[0].x == [0.2, 0.0]
        assert TrajectoryReader(path).energy_drift() < 1e-5

    def test_integrate_bad_point(self, runner):
        result = runner.invoke(
            main, ["rk", "integrate", "rk4", "--field", "pendulum", "--x0", "1,a", "--h", "0.1", "--steps", "1"]
        )
        assert result.exit_code == 2

    def test_integrate_unknown_field(self, runner):
        result = runner.invoke(
            main, ["rk", "integrate", "rk4", "--field", "duffing", "--x0", "1,0", "--h", "0.1", "--steps", "1"]
        )
        assert result.exit_code == 2


class TestPreLie:
    def test_graft(self, runner):
        data = as_mapping(run_json(runner, "prelie", "graft", "[]", "[[]]"))
        assert data == {"[[[]]]": "1", "[[][]]": "1"}

    def test_identity_check(self, runner):
        data = run_json(runner, "prelie", "identity-check", "--max-order", "5", "--samples", "10")
        assert data["passed"]
        assert data["triples"] == 13
        assert data["failures"] == []

    def test_identity_check_text(self, runner):
        result = runner.invoke(main, ["prelie", "identity-check", "--max-order", "4", "--samples", "5"])
        assert result.exit_code == 0
        assert "ok" in result.output


class TestAromaticAndDemos:
    def test_aromatic_count(self, runner):
        data = run_json(runner, "aromatic", "count", "--max", "5")
        assert data["aromatic_trees"] == [1, 2, 6, 16, 45]

    def test_aromatic_cap(self, runner):
        result = runner.invoke(main, ["--aromatic-cap", "3", "aromatic", "count", "--max", "4"])
        assert result.exit_code == 1

    def test_aromatic_enumerate(self, runner):
        data = run_json(runner, "aromatic", "enumerate", "--order", "2")
        assert data == [{"aromatic": "1", "rooted": True}, {"aromatic": "2", "rooted": False}]

    def test_knockout(self, runner):
        data = run_json(runner, "demo", "knockout")
        assert data["passed"] is True
        assert data["self_loop_target"] == [0.0]

    def test_aromatic_method(self, runner):
        data = run_json(runner, "demo", "aromatic-method", "--field", "poly1d", "--x0", "1", "--h", "0.1")
        assert data["x1"][0] == pytest.approx(1.12)
        assert data["aromatic_series"][0] == pytest.approx(1.12)
        assert data["euler"][0] == pytest.approx(1.1)
