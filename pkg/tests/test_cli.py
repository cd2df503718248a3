"""CLI behavior: output formats, exit codes, determinism, manifest replay."""

import json
import math
import os

import pytest

from ftr_secrecy import (
    FtrParams,
    McConfig,
    Truncation,
    ftr_ccdf,
    ftr_cdf,
    ftr_pdf,
    mc_modified_sop,
    modified_sop,
    scenario_from_avg_snr,
)
from ftr_secrecy.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestDist:
    def test_exponential_row(self, capsys):
        code, out, _ = run(
            capsys, "dist", "--m", "1", "--k", "0", "--delta", "0.5",
            "--sigma2", "0.5", "--x", "1",
        )
        assert code == 0
        header, row = out.strip().split("\n")
        assert header == "x,pdf,cdf,ccdf"
        cells = row.split(",")
        assert float(cells[1]) == pytest.approx(math.exp(-1.0), rel=1e-11)

    def test_rows_match_library_bit_exactly(self, capsys):
        code, out, _ = run(
            capsys, "dist", "--m", "3.5", "--k", "15", "--delta", "0.5",
            "--sigma2", "0.5", "--x", "0.25", "1.5", "4.0",
        )
        assert code == 0
        p = FtrParams(3.5, 15.0, 0.5, 0.5)
        trunc = Truncation(max_terms=4000)
        for line, x in zip(out.strip().split("\n")[1:], (0.25, 1.5, 4.0)):
            cells = line.split(",")
            assert cells[1] == f"{ftr_pdf(p, x, trunc):.11e}"
            assert cells[2] == f"{ftr_cdf(p, x, trunc):.11e}"
            assert cells[3] == f"{ftr_ccdf(p, x, trunc):.11e}"

    def test_bad_delta_names_flag(self, capsys):
        code, _, err = run(
            capsys, "dist", "--m", "1", "--k", "0", "--delta", "1.5",
            "--sigma2", "0.5", "--x", "1",
        )
        assert code == 2
        assert "--delta" in err

    def test_requires_a_scale(self, capsys):
        code, _, err = run(capsys, "dist", "--m", "1", "--k", "0", "--x", "1")
        assert code == 2
        assert "--sigma2" in err or "--avg-snr-db" in err

    def test_truncation_failure_exit_code(self, capsys):
        code, _, err = run(
            capsys, "dist", "--m", "3.5", "--k", "15", "--delta", "0.5",
            "--sigma2", "0.5", "--x", "1", "--max-terms", "4",
        )
        assert code == 3


class TestScalarCommands:
    def test_sop_matches_library(self, capsys):
        code, out, _ = run(
            capsys, "sop", "--m", "3.5", "--k", "15", "--avg-snr-db", "20",
            "--gamma-e-db", "5", "--rs", "1", "--mu", "2",
        )
        assert code == 0
        s = scenario_from_avg_snr(
            3.5, 15.0, 0.5, 20.0, 5.0, rs=1.0, mu=2.0, trunc=Truncation(max_terms=4000)
        )
        assert out.strip() == f"{modified_sop(s):.11e}"

    def test_asop_and_conventional_run(self, capsys):
        for cmd in ("asop", "conventional"):
            code, out, _ = run(
                capsys, cmd, "--m", "3.5", "--k", "15", "--avg-snr-db", "20",
            )
            assert code == 0
            assert 0.0 <= float(out.strip()) <= 1.5


class TestMcCommand:
    def test_matches_library(self, capsys):
        code, out, _ = run(
            capsys, "mc", "--m", "3.5", "--k", "15", "--avg-snr-db", "15",
            "--samples", "50000", "--seed", "9",
        )
        assert code == 0
        header, row = out.strip().split("\n")
        assert header == "value,std_error,effective_samples"
        s = scenario_from_avg_snr(
            3.5, 15.0, 0.5, 15.0, 5.0, rs=1.0, mu=2.0, trunc=Truncation(max_terms=4000)
        )
        est = mc_modified_sop(s, cfg=McConfig(samples=50000, seed=9, batch_size=50000))
        cells = row.split(",")
        assert cells[0] == f"{est.value:.11e}"
        assert int(cells[2]) == est.effective_samples

    def test_starved_conditioning_exit_code(self, capsys):
        code, _, err = run(
            capsys, "mc", "--m", "3.5", "--k", "15", "--avg-snr-db", "0",
            "--mu", "1e6", "--samples", "10000", "--seed", "1",
        )
        assert code == 3


class TestSweep:
    def test_csv_and_manifest(self, capsys, tmp_path):
        out_csv = tmp_path / "sweep.csv"
        code, _, _ = run(
            capsys, "sweep", "--m", "3.5", "--k", "15",
            "--gamma-d-db", "0", "10", "20", "--methods", "exact", "asymptotic",
            "--out", str(out_csv),
        )
        assert code == 0
        lines = out_csv.read_text().split("\n")
        assert lines[0] == (
            "gamma_bar_d_db,sop_exact,sop_asymptotic,sop_conventional,"
            "sop_mc,mc_std_error,effective_samples"
        )
        assert len(lines) == 5  # header + 3 rows + trailing newline
        row = lines[1].split(",")
        assert row[0] == "0"
        assert row[3] == "" and row[4] == ""  # absent methods stay empty
        manifest = json.loads((tmp_path / "sweep.csv.manifest.json").read_text())
        assert manifest["command"] == "sweep"
        assert manifest["methods"] == ["exact", "asymptotic"]

    def test_empty_grid_is_usage_error(self, capsys):
        code, _, err = run(capsys, "sweep", "--m", "3.5", "--k", "15")
        assert code == 2
        assert "grid" in err

    def test_numerical_failure_flushes_completed_rows(self, capsys, tmp_path):
        out_csv = tmp_path / "partial.csv"
        code, _, err = run(
            capsys, "sweep", "--m", "3.5", "--k", "15",
            "--gamma-d-db", "10", "20", "--methods", "exact",
            "--max-terms", "4", "--out", str(out_csv),
        )
        assert code == 3
        lines = out_csv.read_text().strip().split("\n")
        assert lines[0].startswith("gamma_bar_d_db")  # header flushed

    def test_manifest_replay_is_bit_exact(self, capsys, tmp_path):
        out_csv = tmp_path / "a.csv"
        run(
            capsys, "sweep", "--m", "3.5", "--k", "15",
            "--gamma-d-db", "5", "15", "--methods", "exact", "mc",
            "--samples", "20000", "--seed", "4", "--out", str(out_csv),
        )
        replay_csv = tmp_path / "b.csv"
        code, _, _ = run(
            capsys, "sweep", "--from-manifest", str(out_csv) + ".manifest.json",
            "--out", str(replay_csv),
        )
        assert code == 0
        assert replay_csv.read_bytes() == out_csv.read_bytes()


class TestDiversity:
    def test_reports_both_slopes(self, capsys):
        code, out, _ = run(
            capsys, "diversity", "--m", "3.5", "--k", "15", "--avg-snr-db", "20",
            "--db-lo", "35", "--db-hi", "45",
        )
        assert code == 0
        lines = dict(line.split(",") for line in out.strip().split("\n"))
        assert abs(float(lines["diversity_slope_exact"]) - 1.0) < 0.05
        assert abs(float(lines["diversity_slope_asymptotic"]) - 1.0) < 1e-9

    def test_equal_points_usage_error(self, capsys):
        code, _, _ = run(
            capsys, "diversity", "--m", "3.5", "--k", "15", "--avg-snr-db", "20",
            "--db-lo", "40", "--db-hi", "40",
        )
        assert code == 2


class TestReproduce:
    def test_fig1_deterministic_and_thread_invariant(self, capsys, tmp_path, monkeypatch):
        args = ("reproduce", "fig1", "--seed", "42", "--samples", "20000")
        run(capsys, *args, "--out-dir", str(tmp_path / "r1"))
        run(capsys, *args, "--out-dir", str(tmp_path / "r2"))
        monkeypatch.setenv("FTR_SECRECY_THREADS", "3")
        run(capsys, *args, "--out-dir", str(tmp_path / "r3"))
        first = (tmp_path / "r1" / "fig1.csv").read_bytes()
        assert (tmp_path / "r2" / "fig1.csv").read_bytes() == first
        assert (tmp_path / "r3" / "fig1.csv").read_bytes() == first
        header = first.decode().split("\n")[0]
        assert header.startswith("m,k,gamma_bar_d_db")

    def test_fig1_manifest_replay(self, capsys, tmp_path):
        run(
            capsys, "reproduce", "fig1", "--seed", "7", "--samples", "20000",
            "--out-dir", str(tmp_path / "orig"),
        )
        code, _, _ = run(
            capsys, "sweep",
            "--from-manifest", str(tmp_path / "orig" / "fig1.manifest.json"),
            "--out-dir", str(tmp_path / "replay"),
        )
        assert code == 0
        assert (tmp_path / "replay" / "fig1.csv").read_bytes() == (
            tmp_path / "orig" / "fig1.csv"
        ).read_bytes()

    def test_fig1_exact_and_mc_columns_agree(self, capsys, tmp_path):
        # full default sample count so the deep-SNR rows have real counts
        code, _, _ = run(
            capsys, "reproduce", "fig1", "--seed", "42", "--out-dir", str(tmp_path),
        )
        assert code == 0
        rows = (tmp_path / "fig1.csv").read_text().strip().split("\n")[1:]
        assert len(rows) == 30
        for row in rows:
            cells = row.split(",")
            exact, mc, se = float(cells[3]), float(cells[6]), float(cells[7])
            assert se > 0.0
            assert abs(exact - mc) <= 3.0 * se, row

    def test_fig2_gap_shrinks_with_mu(self, capsys, tmp_path):
        code, _, _ = run(
            capsys, "reproduce", "fig2", "--out-dir", str(tmp_path),
        )
        assert code == 0
        rows = (tmp_path / "fig2.csv").read_text().strip().split("\n")[1:]
        gaps = {}
        for row in rows:
            cells = row.split(",")
            mu, db = float(cells[0]), float(cells[1])
            gaps[(mu, db)] = abs(float(cells[2]) - float(cells[4]))
        for db in (10.0, 20.0):
            assert gaps[(0.5, db)] < gaps[(2.0, db)]


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0


def test_unknown_command_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
