"""Command-line interface tests (invoked in-process through main)."""
import json

import pytest

from mdiqds.cli import CSV_COLUMNS, main


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text: str) -> tuple[list[str], list[dict], list[str]]:
    comments = [line for line in text.splitlines() if line.startswith("#")]
    rows = [line for line in text.splitlines() if line and not line.startswith("#")]
    header = rows[0].split(",")
    records = [dict(zip(header, line.split(","))) for line in rows[1:]]
    return header, records, comments


class TestRate:
    def test_defaults_echo_table_values(self, capsys):
        code, out, _ = run_cli(capsys, "rate", "--format", "json",
                               "--distance-km", "50")
        assert code == 0
        doc = json.loads(out)
        rec = doc["records"][0]
        assert doc["seed"] == 0
        assert rec["model"] == "smb1"
        assert rec["a_d2"] == 5e-4
        assert rec["a_s"] == 0.4
        assert rec["p_z"] == 0.5
        assert rec["feasible"] is True
        assert rec["R"] > 0

    def test_far_distance_reports_infeasible(self, capsys):
        code, out, _ = run_cli(capsys, "rate", "--distance-km", "10000")
        assert code == 0
        _, records, _ = parse_csv(out)
        assert records[0]["feasible"] == "false"
        assert records[0]["R"] == "0"

    def test_strict_infeasible_exit(self, capsys):
        code, _, _ = run_cli(capsys, "rate", "--distance-km", "10000", "--strict")
        assert code == 2

    def test_invalid_config_exit(self, capsys):
        code, _, err = run_cli(capsys, "rate", "--a-d1", "0.5")
        assert code == 1
        assert "error" in err

    def test_unknown_flag_exit(self, capsys):
        code, _, err = run_cli(capsys, "rate", "--no-such-flag", "1")
        assert code == 1

    def test_model_all_emits_three_records(self, capsys):
        code, out, _ = run_cli(capsys, "rate", "--model", "all",
                               "--distance-km", "50")
        assert code == 0
        _, records, _ = parse_csv(out)
        assert [r["model"] for r in records] == ["sob", "smb1", "smb2"]

    @pytest.mark.slow
    def test_optimized_rate_positive(self, capsys):
        code, out, _ = run_cli(capsys, "rate", "--model", "smb1",
                               "--distance-km", "150", "--pulses", "1e14",
                               "--optimize", "--format", "json")
        assert code == 0
        rec = json.loads(out)["records"][0]
        assert rec["feasible"] is True
        assert rec["R"] > 0


class TestSweep:
    def test_distance_grid_row_count(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", "--axis", "distance",
                               "--start", "0", "--stop", "300", "--step", "10",
                               "--model", "all", "--pulses", "1e12")
        assert code == 0
        header, records, comments = parse_csv(out)
        assert header == list(CSV_COLUMNS)
        assert len(records) == 3 * 31
        assert comments[0].startswith("# mdiqds csv schema v")
        assert "seed=0" in comments[1]
        distances = [float(r["distance_km"]) for r in records]
        assert distances == sorted(distances)

    def test_sob_constant_in_pulse_sweep(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", "--axis", "pulses",
                               "--values", "1e13,1e14,1e15,1e16",
                               "--distance-km", "150", "--model", "sob",
                               "--a-s", "0.28", "--p-as", "0.9",
                               "--p-ad1", "0.05", "--p-z", "0.9")
        assert code == 0
        _, records, _ = parse_csv(out)
        assert len(records) == 4
        assert all(r["feasible"] == "true" for r in records)
        assert len({r["R"] for r in records}) == 1

    def test_empty_range_rejected(self, capsys):
        code, _, err = run_cli(capsys, "sweep", "--axis", "distance",
                               "--start", "100", "--stop", "50", "--step", "10")
        assert code == 1

    def test_missing_range_rejected(self, capsys):
        code, _, _ = run_cli(capsys, "sweep", "--axis", "distance")
        assert code == 1

    def test_json_format(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", "--axis", "distance",
                               "--start", "40", "--stop", "80", "--step", "40",
                               "--model", "smb1", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["schema"].startswith("mdiqds-records-v")
        assert len(doc["records"]) == 2
        assert all("n_pool" in r for r in doc["records"])

    @pytest.mark.slow
    def test_optimized_sweep_warm_chains(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", "--axis", "distance",
                               "--start", "40", "--stop", "80", "--step", "40",
                               "--model", "smb1", "--optimize", "--seed", "3",
                               "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert doc["optimized"] is True
        rates = [r["R"] for r in doc["records"]]
        assert all(r > 0 for r in rates)
        assert rates[0] > rates[1]  # shorter distance wins

    def test_byte_deterministic(self, capsys, tmp_path):
        args = ("sweep", "--axis", "distance", "--start", "20", "--stop", "60",
                "--step", "20", "--model", "all", "--seed", "9")
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert main([*args, "--out", str(out_a)]) == 0
        assert main([*args, "--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()


class TestConfigRoundTrip:
    def test_dump_and_reload(self, capsys, tmp_path):
        first = tmp_path / "cfg1.json"
        second = tmp_path / "cfg2.json"
        code, _, _ = run_cli(capsys, "rate", "--distance-km", "42",
                             "--p-z", "0.7", "--model", "smb2",
                             "--dump-config", str(first))
        assert code == 0
        code, _, _ = run_cli(capsys, "rate", "--config", str(first),
                             "--dump-config", str(second))
        assert code == 0
        assert json.loads(first.read_text()) == json.loads(second.read_text())

    def test_flags_override_file(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"distance_km": 42.0, "p_z": 0.7}))
        code, out, _ = run_cli(capsys, "rate", "--config", str(cfg),
                               "--distance-km", "55", "--format", "json")
        assert code == 0
        rec = json.loads(out)["records"][0]
        assert rec["distance_km"] == 55.0
        assert rec["p_z"] == 0.7

    def test_unknown_keys_rejected(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"not_a_key": 1}))
        code, _, err = run_cli(capsys, "rate", "--config", str(cfg))
        assert code == 1


class TestOptimize:
    @pytest.mark.slow
    def test_optimize_beats_plain_rate(self, capsys):
        code, out, _ = run_cli(capsys, "optimize", "--model", "smb1",
                               "--distance-km", "50", "--format", "json",
                               "--seed", "4")
        assert code == 0
        doc = json.loads(out)
        assert doc["optimized"] is True
        optimized = doc["records"][0]["R"]
        code, out, _ = run_cli(capsys, "rate", "--model", "smb1",
                               "--distance-km", "50", "--format", "json")
        plain = json.loads(out)["records"][0]["R"]
        assert optimized >= plain > 0


class TestVerify:
    def test_small_run_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--trials", "20000", "--seed", "1")
        assert code == 0
        assert "PASS overall failures=0" in out
        for line in out.splitlines():
            if line.startswith(("PASS", "FAIL")):
                assert line.startswith("PASS")

    def test_inverted_bounds_fail(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--trials", "5000",
                               "--self-test-invert")
        assert code == 3
        assert "FAIL" in out

    def test_report_bytes_reproducible(self, tmp_path):
        out_a = tmp_path / "a.txt"
        out_b = tmp_path / "b.txt"
        assert main(["verify", "--trials", "20000", "--seed", "2",
                     "--out", str(out_a)]) == 0
        assert main(["verify", "--trials", "20000", "--seed", "2",
                     "--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()

    def test_bound_subset(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--trials", "5000",
                               "--bounds", "hoeffding,sampling_lambda")
        assert code == 0
        assert out.count("bound:") == 2

    def test_unknown_bound_rejected(self, capsys):
        code, _, _ = run_cli(capsys, "verify", "--bounds", "nope")
        assert code == 1


class TestSimulateProtocol:
    def test_report_lines(self, capsys):
        code, out, _ = run_cli(capsys, "simulate-protocol", "--trials", "5000",
                               "--length", "1000")
        assert code == 0
        for label in ("honest-abort", "repudiation", "forging"):
            assert label in out
