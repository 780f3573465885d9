import json

import pytest

from relaysim.cli import EXIT_EXECUTION, EXIT_OK, EXIT_PARSE, main
from relaysim.planning import plan_from_json
from relaysim.world import dump_semantic_map


@pytest.fixture
def map_file(five_zone_map, workspace20, tmp_path):
    path = tmp_path / "map.json"
    path.write_text(dump_semantic_map(five_zone_map, workspace20), encoding="utf-8")
    return str(path)


@pytest.fixture
def robots_file(tmp_path):
    path = tmp_path / "robots.json"
    path.write_text(json.dumps([[0, 5.5, 10.5], [1, 15.5, 10.5]]), encoding="utf-8")
    return str(path)


class TestPartition:
    def test_writes_diagram_json(self, map_file, robots_file, tmp_path):
        out = tmp_path / "diagram.json"
        assert main(["partition", "--map", map_file, "--robots", robots_file, "--out", str(out)]) == EXIT_OK
        data = json.loads(out.read_text(encoding="utf-8"))
        assert {c["site_id"] for c in data["cells"]} == {0, 1}

    def test_svg_output(self, map_file, robots_file, tmp_path):
        svg = tmp_path / "diagram.svg"
        code = main(
            ["partition", "--map", map_file, "--robots", robots_file,
             "--out", str(tmp_path / "d.json"), "--svg", str(svg)]
        )
        assert code == EXIT_OK
        assert svg.read_text(encoding="utf-8").startswith("<svg")


class TestPlan:
    def test_plan_schema(self, map_file, robots_file, tmp_path):
        out = tmp_path / "plan.json"
        code = main(
            ["plan", "--command", "bring the glass of water from the kitchen to the bedroom",
             "--map", map_file, "--robots", robots_file, "--out", str(out)]
        )
        assert code == EXIT_OK
        data = json.loads(out.read_text(encoding="utf-8"))
        assert set(data) >= {"task", "active", "transfers", "segments"}
        plan = plan_from_json(out.read_text(encoding="utf-8"))
        assert len(plan.transfers) == len(plan.active) - 1

    def test_unknown_zone_exit_code(self, map_file, robots_file, capsys):
        code = main(
            ["plan", "--command", "bring box from garage to bedroom",
             "--map", map_file, "--robots", robots_file]
        )
        assert code == EXIT_PARSE
        assert "error:" in capsys.readouterr().err

    def test_unparsable_exit_code(self, map_file, robots_file):
        code = main(
            ["plan", "--command", "do something useful",
             "--map", map_file, "--robots", robots_file]
        )
        assert code == EXIT_PARSE

    def test_same_zone_exit_code(self, map_file, robots_file):
        code = main(
            ["plan", "--command", "bring box from kitchen to kitchen",
             "--map", map_file, "--robots", robots_file]
        )
        assert code == EXIT_PARSE


class TestRun:
    def test_run_from_command(self, map_file, robots_file, tmp_path):
        out = tmp_path / "record.jsonl"
        msgs = tmp_path / "messages.jsonl"
        code = main(
            ["run", "--command", "bring the glass of water from the kitchen to the bedroom",
             "--map", map_file, "--robots", robots_file,
             "--out", str(out), "--messages", str(msgs)]
        )
        assert code == EXIT_OK
        rec = json.loads(out.read_text(encoding="utf-8"))
        assert rec["completed"] is True
        assert rec["total_moves"] > 0
        lines = [json.loads(l) for l in msgs.read_text(encoding="utf-8").splitlines()]
        kinds = [m["kind"] for m in lines]
        assert kinds.count("TaskComplete") == 1

    def test_handoff_count_matches_plan(self, map_file, robots_file, tmp_path):
        plan_path = tmp_path / "plan.json"
        main(
            ["plan", "--command", "bring the glass of water from the kitchen to the bedroom",
             "--map", map_file, "--robots", robots_file, "--out", str(plan_path)]
        )
        plan = plan_from_json(plan_path.read_text(encoding="utf-8"))
        msgs = tmp_path / "messages.jsonl"
        code = main(
            ["run", "--plan", str(plan_path), "--out", str(tmp_path / "rec.jsonl"),
             "--messages", str(msgs)]
        )
        assert code == EXIT_OK
        kinds = [
            json.loads(l)["kind"] for l in msgs.read_text(encoding="utf-8").splitlines()
        ]
        assert kinds.count("HandoffReady") == len(plan.transfers)
        assert kinds.count("HandoffAck") == len(plan.transfers)

    def test_budget_exceeded_exit_code(self, map_file, robots_file, tmp_path):
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({"tick_budget": 1}), encoding="utf-8")
        code = main(
            ["run", "--command", "bring box from kitchen to bedroom",
             "--map", map_file, "--robots", robots_file,
             "--config", str(cfg), "--out", str(tmp_path / "rec.jsonl")]
        )
        assert code == EXIT_EXECUTION


class TestBatch:
    def test_requires_seed(self, capsys):
        assert main(["batch", "--team-sizes", "1", "--trials", "1"]) == EXIT_PARSE

    def test_outputs_and_byte_identical_rerun(self, tmp_path, capsys):
        args = [
            "batch", "--seed", "12345", "--team-sizes", "1,3", "--trials", "3",
        ]
        csv1, jsonl1 = tmp_path / "a.csv", tmp_path / "a.jsonl"
        csv2, jsonl2 = tmp_path / "b.csv", tmp_path / "b.jsonl"
        assert main(args + ["--out-csv", str(csv1), "--out", str(jsonl1)]) == EXIT_OK
        out1 = capsys.readouterr().out
        assert main(args + ["--out-csv", str(csv2), "--out", str(jsonl2)]) == EXIT_OK
        out2 = capsys.readouterr().out
        assert csv1.read_bytes() == csv2.read_bytes()
        assert jsonl1.read_bytes() == jsonl2.read_bytes()
        assert out1 == out2
        header = csv1.read_text(encoding="utf-8").splitlines()[0]
        assert header == "team_size,mean_total,std_total,mean_per_agent,mean_active,reduction"
        records = [json.loads(l) for l in jsonl1.read_text(encoding="utf-8").splitlines()]
        assert len(records) == 6
        assert all(r["completed"] for r in records)


class TestRender:
    def test_render_stored_diagram(self, map_file, robots_file, tmp_path):
        diagram = tmp_path / "diagram.json"
        main(["partition", "--map", map_file, "--robots", robots_file, "--out", str(diagram)])
        svg = tmp_path / "out.svg"
        assert main(["render", "--diagram", str(diagram), "--svg", str(svg)]) == EXIT_OK
        assert "<svg" in svg.read_text(encoding="utf-8")

    def test_render_stored_plan(self, map_file, robots_file, tmp_path):
        plan_path = tmp_path / "plan.json"
        main(
            ["plan", "--command", "bring box from kitchen to bedroom",
             "--map", map_file, "--robots", robots_file, "--out", str(plan_path)]
        )
        svg = tmp_path / "plan.svg"
        code = main(
            ["render", "--plan", str(plan_path), "--map", map_file,
             "--robots", robots_file, "--svg", str(svg)]
        )
        assert code == EXIT_OK
        assert "<svg" in svg.read_text(encoding="utf-8")
