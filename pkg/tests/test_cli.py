import csv
import json

import pytest

from groupform import LatticeState, TorusShape, analytic_densities, save_state
from groupform.cli import main
from groupform.verify import CheckResult

FIG_EXAMPLE = [0, 0, 1, 1, 2, 0, 0, 2, 1, 2, 0, 1, 1, 0]


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


class TestSimulate:
    def test_state_file_trajectory(self, tmp_path, capsys):
        state_path = tmp_path / "initial.json"
        save_state(LatticeState(TorusShape((14,)), FIG_EXAMPLE), state_path)
        out_path = tmp_path / "trajectory.jsonl"
        code = main(["simulate", "--state", str(state_path), "--out", str(out_path)])
        assert code == 0
        lines = [json.loads(line) for line in out_path.read_text().splitlines()]
        outcome = lines[-1]
        assert outcome["kind"] == "fixed"
        assert outcome["n_st"] == 3
        assert outcome["mass"] == 11
        states = lines[:-1]
        assert len(states) == 4  # T(0) .. T(3)
        assert all(sum(s["values"]) == 11 for s in states)
        assert states[0]["values"] == FIG_EXAMPLE
        assert outcome["steady_state"]["values"] == states[-1]["values"]
        manifest = json.loads((tmp_path / "trajectory.jsonl.manifest.json").read_text())
        assert manifest["command"] == "simulate"
        assert manifest["initial_state"]["values"] == FIG_EXAMPLE
        assert manifest["outputs"] == [str(out_path)]

    def test_periodic_state_flagged(self, tmp_path):
        state_path = tmp_path / "cycle.json"
        save_state(LatticeState(TorusShape((5,)), [1, 1, 1, 0, 0]), state_path)
        out_path = tmp_path / "cycle.jsonl"
        code = main(["simulate", "--state", str(state_path), "--out", str(out_path)])
        assert code == 0
        lines = [json.loads(line) for line in out_path.read_text().splitlines()]
        assert lines[-1]["kind"] == "periodic"
        assert lines[-1]["period"] == 2
        assert lines[-1]["entry_time"] == 0
        assert len(lines[:-1]) == 3  # entry state, other phase, revisit

    def test_random_state_to_stdout(self, capsys):
        code = main(["simulate", "--dims", "12", "--p", "0.5", "--seed", "3"])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert json.loads(lines[0])["dims"] == [12]
        assert json.loads(lines[-1])["kind"] in {"fixed", "periodic", "unresolved"}

    def test_unresolved_warns_but_succeeds(self, tmp_path, capsys):
        state_path = tmp_path / "cycle.json"
        save_state(LatticeState(TorusShape((5,)), [1, 1, 1, 0, 0]), state_path)
        code = main(["simulate", "--state", str(state_path), "--max-steps", "1", "--out", "-"])
        assert code == 0
        captured = capsys.readouterr()
        assert json.loads(captured.out.splitlines()[-1])["kind"] == "unresolved"
        assert "warning" in captured.err

    def test_missing_source_is_usage_error(self, capsys):
        assert main(["simulate"]) == 2
        assert "error" in capsys.readouterr().err
        assert main(["simulate", "--dims", "5"]) == 2
        assert "--p" in capsys.readouterr().err

    def test_conflicting_sources_is_usage_error(self, tmp_path, capsys):
        state_path = tmp_path / "s.json"
        save_state(LatticeState(TorusShape((5,)), [1, 0, 0, 0, 0]), state_path)
        assert main(["simulate", "--state", str(state_path), "--dims", "5", "--p", "0.5"]) == 2

    def test_invalid_state_file_is_usage_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"dims": [4], "values": [1, 2]}')
        assert main(["simulate", "--state", str(bad)]) == 2
        assert "error" in capsys.readouterr().err

    def test_unreadable_state_file_is_usage_error(self, tmp_path, capsys):
        assert main(["simulate", "--state", str(tmp_path / "missing.json")]) == 2
        assert "error" in capsys.readouterr().err


class TestSweep:
    def _config_payload(self, **overrides):
        payload = {
            "dims": [24],
            "p_max": 0.5,
            "p_steps": 2,
            "samples": 6,
            "master_seed": 321,
        }
        payload.update(overrides)
        return payload

    def test_writes_csv_and_manifest(self, tmp_path, capsys):
        config = write_json(tmp_path / "config.json", self._config_payload())
        out_dir = tmp_path / "out"
        code = main(["sweep", config, "--out", str(out_dir), "--threads", "1"])
        assert code == 0
        rows = list(csv.reader((out_dir / "sweep.csv").open()))
        header, body = rows[0], rows[1:]
        assert header == [
            "p",
            "r",
            "mean_Q",
            "stderr_Q",
            "mean_N_st",
            "fixed_count",
            "periodic_count",
            "unresolved_count",
            "samples",
        ]
        # three grid points, six rows each: sentinel, r=1..4, tail
        assert len(body) == 18
        assert [row[1] for row in body[:6]] == ["0", "1", "2", "3", "4", "tail"]
        sentinel = body[0]
        assert sentinel[0] == "0.0"
        assert sentinel[4] == "0.0"  # empty initial states settle at once
        assert sentinel[5] == "6" and sentinel[8] == "6"
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["parameters"]["master_seed"] == 321
        assert manifest["parameters"]["dims"] == [24]
        progress = capsys.readouterr().err
        assert "[3/3]" in progress

    def test_byte_identical_reruns(self, tmp_path):
        config = write_json(tmp_path / "config.json", self._config_payload())
        main(["sweep", config, "--out", str(tmp_path / "a"), "--threads", "1"])
        main(["sweep", config, "--out", str(tmp_path / "b"), "--threads", "2"])
        assert (tmp_path / "a/sweep.csv").read_bytes() == (tmp_path / "b/sweep.csv").read_bytes()

    def test_output_reproducible_from_manifest(self, tmp_path):
        config = write_json(tmp_path / "config.json", self._config_payload())
        main(["sweep", config, "--out", str(tmp_path / "a"), "--threads", "1"])
        manifest = json.loads((tmp_path / "a/manifest.json").read_text())
        replayed = write_json(tmp_path / "replayed.json", manifest["parameters"])
        main(["sweep", replayed, "--out", str(tmp_path / "b"), "--threads", "1"])
        assert (tmp_path / "a/sweep.csv").read_bytes() == (tmp_path / "b/sweep.csv").read_bytes()

    def test_invalid_config_names_field(self, tmp_path, capsys):
        config = write_json(tmp_path / "config.json", self._config_payload(samples=0))
        assert main(["sweep", config, "--out", str(tmp_path / "out")]) == 2
        assert "samples" in capsys.readouterr().err

    def test_missing_field_named(self, tmp_path, capsys):
        payload = self._config_payload()
        del payload["p_max"]
        config = write_json(tmp_path / "config.json", payload)
        assert main(["sweep", config, "--out", str(tmp_path / "out")]) == 2
        assert "p_max" in capsys.readouterr().err

    def test_malformed_json(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text("{oops")
        assert main(["sweep", str(config), "--out", str(tmp_path / "out")]) == 2


class TestPrimitive:
    def test_csv_columns_and_analytic_rows(self, tmp_path):
        out = tmp_path / "primitive.csv"
        code = main(
            ["primitive", "--m", "50", "--p-steps", "4", "--seeds", "3", "--out", str(out)]
        )
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 5
        first, last = rows[0], rows[-1]
        assert float(first["p"]) == 0.0
        assert all(float(first[c]) == 0.0 for c in first.keys() if c != "p")
        assert float(last["p"]) == 1.0
        assert float(last["q1_analytic"]) == 0.125
        assert float(last["q2_analytic"]) == 0.25
        assert float(last["q3_analytic"]) == 0.125
        for row in rows:
            expected = analytic_densities(float(row["p"]))
            assert float(row["q1_analytic"]) == expected.q1
            assert float(row["q2_analytic"]) == expected.q2
            assert float(row["q3_analytic"]) == expected.q3
            for column in ("q1_mc", "q2_mc", "q3_mc"):
                assert 0.0 <= float(row[column]) <= 1.0
        manifest = json.loads((tmp_path / "primitive.csv.manifest.json").read_text())
        assert manifest["parameters"]["m"] == 50

    def test_odd_m_is_usage_error(self, capsys):
        assert main(["primitive", "--m", "9"]) == 2
        assert "even" in capsys.readouterr().err

    def test_deterministic_output(self, tmp_path):
        args = ["primitive", "--m", "30", "--p-steps", "3", "--seeds", "2", "--seed", "8"]
        main(args + ["--out", str(tmp_path / "a.csv")])
        main(args + ["--out", str(tmp_path / "b.csv")])
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


class TestVerify:
    def test_pass_and_fail_exit_codes(self, monkeypatch, capsys):
        import groupform.cli as cli

        calls = {}

        def fake_quick(workers):
            calls["workers"] = workers
            return [CheckResult("demo-check", True, "fine", 0.01)]

        monkeypatch.setattr(cli, "quick_checks", fake_quick)
        assert main(["verify", "--scale", "quick", "--threads", "3"]) == 0
        out = capsys.readouterr().out
        assert "PASS demo-check" in out
        assert calls["workers"] == 3

        monkeypatch.setattr(
            cli,
            "quick_checks",
            lambda workers: [CheckResult("demo-check", False, "broken", 0.01)],
        )
        assert main(["verify"]) == 1
        assert "FAIL demo-check" in capsys.readouterr().out

    def test_unknown_scale_rejected(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["verify", "--scale", "huge"])
        assert excinfo.value.code == 2
