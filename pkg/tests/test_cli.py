"""CLI tests: exit codes, diagnostics, and byte-identical reruns."""

import json
from pathlib import Path

import pytest

from luxmote.cli import main

REPO = Path(__file__).resolve().parent.parent
DEPLOY_CONFIG = str(REPO / "configs" / "deployment_15node.json")
NODE_CONFIG = str(REPO / "configs" / "node_default.json")
SWEEP_CONFIG = str(REPO / "configs" / "sweep_default.json")
TRACE_DIR = str(REPO / "configs" / "traces")
LIGHT_TRACE = str(REPO / "configs" / "traces" / "n01_light.csv")


class TestSimulateNode:
    def test_happy_path(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(
            [
                "simulate-node",
                "--config", NODE_CONFIG,
                "--light-trace", LIGHT_TRACE,
                "--duration-s", "3600",
                "--seed", "0",
                "--out", str(out),
            ]
        )
        assert code == 0
        assert (out / "n01_log.csv").exists()
        ledger = json.loads((out / "n01_ledger.json").read_text())
        assert ledger["uptime_fraction"] == 1.0
        assert ledger["energy_residual_relative"] <= 1e-6

    def test_log_csv_header(self, tmp_path):
        out = tmp_path / "out"
        main(
            [
                "simulate-node",
                "--config", NODE_CONFIG,
                "--light-trace", LIGHT_TRACE,
                "--duration-s", "60",
                "--out", str(out),
            ]
        )
        first = (out / "n01_log.csv").read_text().splitlines()[0]
        assert first == "time_s,node_id,voltage_v,lux,qos,action,packets"

    def test_decreasing_trace_cites_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("time_s,value\n0.0,100\n10.0,100\n5.0,100\n")
        code = main(
            [
                "simulate-node",
                "--config", NODE_CONFIG,
                "--light-trace", str(bad),
                "--duration-s", "60",
                "--out", str(tmp_path / "o"),
            ]
        )
        assert code == 1
        assert "line 4" in capsys.readouterr().err

    def test_missing_config(self, tmp_path, capsys):
        code = main(
            [
                "simulate-node",
                "--config", str(tmp_path / "nope.json"),
                "--light-trace", LIGHT_TRACE,
                "--duration-s", "60",
                "--out", str(tmp_path / "o"),
            ]
        )
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_nonpositive_duration(self, tmp_path, capsys):
        code = main(
            [
                "simulate-node",
                "--config", NODE_CONFIG,
                "--light-trace", LIGHT_TRACE,
                "--duration-s", "0",
                "--out", str(tmp_path / "o"),
            ]
        )
        assert code == 1
        assert "duration" in capsys.readouterr().err

    def test_rerun_byte_identical(self, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            main(
                [
                    "simulate-node",
                    "--config", NODE_CONFIG,
                    "--light-trace", LIGHT_TRACE,
                    "--duration-s", "1800",
                    "--seed", "7",
                    "--out", str(out),
                ]
            )
            outs.append(
                (
                    (out / "n01_log.csv").read_bytes(),
                    (out / "n01_ledger.json").read_bytes(),
                )
            )
        assert outs[0] == outs[1]


class TestSimulateDeployment:
    def test_bundled_fifteen_node_config(self, tmp_path):
        out = tmp_path / "out"
        code = main(
            [
                "simulate-deployment",
                "--config", DEPLOY_CONFIG,
                "--trace-dir", TRACE_DIR,
                "--duration-s", "600",
                "--seed", "0",
                "--out", str(out),
            ]
        )
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert len(report["nodes"]) == 15
        assert report["aggregate"]["packets_delivered"] > 0
        for i in range(1, 16):
            assert (out / f"n{i:02d}_log.csv").exists()

    def test_missing_node_trace_names_node(self, tmp_path, capsys):
        config = {
            "nodes": [{"node_id": "lonely", "supercap": {"voltage_v": 3.0}}]
        }
        path = tmp_path / "dep.json"
        path.write_text(json.dumps(config))
        code = main(
            [
                "simulate-deployment",
                "--config", str(path),
                "--trace-dir", str(tmp_path),
                "--duration-s", "60",
                "--out", str(tmp_path / "o"),
            ]
        )
        assert code == 1
        assert "lonely" in capsys.readouterr().err

    def test_nonpositive_duration(self, tmp_path, capsys):
        code = main(
            [
                "simulate-deployment",
                "--config", DEPLOY_CONFIG,
                "--trace-dir", TRACE_DIR,
                "--duration-s", "-5",
                "--out", str(tmp_path / "o"),
            ]
        )
        assert code == 1


class TestExplore:
    def test_bundled_grid(self, tmp_path):
        out = tmp_path / "frontier.csv"
        code = main(["explore", "--config", SWEEP_CONFIG, "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 1 + 3 * 7  # header + rows
        assert lines[0].startswith("capacitance_f,qos_state,mode,min_lux,darkness_survival_s")

    def test_single_point_grid(self, tmp_path):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"capacitances_f": [1.0], "qos_states": [7]}))
        out = tmp_path / "one.csv"
        assert main(["explore", "--config", str(grid), "--out", str(out)]) == 0
        assert len(out.read_text().strip().splitlines()) == 2

    def test_malformed_grid(self, tmp_path, capsys):
        grid = tmp_path / "grid.json"
        grid.write_text(json.dumps({"qos_states": [0]}))
        code = main(["explore", "--config", str(grid), "--out", str(tmp_path / "o.csv")])
        assert code == 1

    def test_rerun_byte_identical(self, tmp_path):
        blobs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            main(["explore", "--config", SWEEP_CONFIG, "--out", str(out)])
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]


class TestValidateConfig:
    @pytest.mark.parametrize("path", [NODE_CONFIG, DEPLOY_CONFIG, SWEEP_CONFIG])
    def test_shipped_configs_valid(self, path):
        assert main(["validate-config", "--config", path]) == 0

    def test_overlapping_buckets_cite_rows(self, tmp_path, capsys):
        rows = [
            [7, 3.3, 3.6, 20.0, 10.0, 0.1],
            [6, 3.2, 3.4, 40.0, 20.0, 0.2],
            [5, 3.0, 3.2, 60.0, 30.0, 0.4],
            [4, 2.8, 3.0, 120.0, 60.0, 0.64],
            [3, 2.6, 2.8, 240.0, 120.0, 0.9],
            [2, 2.4, 2.6, 300.0, 300.0, 2.0],
            [1, 2.1, 2.4, 600.0, 600.0, 5.0],
        ]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"table": rows}))
        assert main(["validate-config", "--config", str(path)]) == 1
        err = capsys.readouterr().err
        assert "contiguous" in err

    def test_negative_capacitance(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"supercap": {"capacitance_f": -2.0}}))
        assert main(["validate-config", "--config", str(path)]) == 1
        assert "capacitance_f" in capsys.readouterr().err


class TestArgumentErrors:
    def test_unknown_command_maps_to_one(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_missing_required_flag_maps_to_one(self, capsys):
        assert main(["simulate-node"]) == 1

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
