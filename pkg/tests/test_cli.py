"""Command-line behavior: files, formats, exit codes, determinism."""

import numpy as np
import pytest

from fracoepi.cli import main
from fracoepi.trajectory_io import load_trajectory_csv


def run(*argv):
    return main(list(argv))


class TestSimulate:
    def test_writes_csv_and_summary(self, tmp_path, capsys):
        out = tmp_path / "sim"
        rc = run("simulate", "--preset", "example1", "--alpha", "0.95",
                 "--t-end", "5", "--out", str(out))
        assert rc == 0
        files = sorted(p.name for p in out.iterdir())
        assert files == [
            "summary.txt",
            "traj_alpha0p95_x0.csv",
            "traj_alpha0p95_x1.csv",
            "traj_alpha0p95_x2.csv",
        ]
        traj = load_trajectory_csv(out / "traj_alpha0p95_x0.csv")
        assert np.array_equal(traj.states[0], np.array([30.0, 5.0, 10.0]))
        assert traj.times[1] - traj.times[0] == pytest.approx(0.05)
        summary = (out / "summary.txt").read_text()
        assert "nonnegative=pass" in summary and "bounded=pass" in summary

    def test_final_row_approaches_interior_equilibrium(self, tmp_path):
        # desk-scale run of the base preset: the written trajectory ends close
        # to the coexistence state (slow fractional tail, see solver tests for
        # the tight-tolerance long-span version)
        out = tmp_path / "long"
        rc = run("simulate", "--preset", "example1", "--alpha", "0.95",
                 "--step", "0.05", "--t-end", "2000", "--out", str(out))
        assert rc == 0
        traj = load_trajectory_csv(out / "traj_alpha0p95_x0.csv")
        assert np.abs(
            traj.states[-1] - np.array([22.27, 13.64, 2.98])
        ).max() <= 0.05

    def test_degenerate_span_single_row(self, tmp_path):
        out = tmp_path / "sim0"
        rc = run("simulate", "--preset", "example1", "--alpha", "0.9",
                 "--t-end", "0", "--out", str(out))
        assert rc == 0
        traj = load_trajectory_csv(out / "traj_alpha0p9_x0.csv")
        assert traj.states.shape == (1, 3)
        assert np.array_equal(traj.states[0], np.array([30.0, 5.0, 10.0]))

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run("simulate", "--preset", "example2", "--alpha", "0.85",
                       "--t-end", "10", "--out", str(out)) == 0
        for name in ("traj_alpha0p85_x0.csv", "summary.txt"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_order_above_one_rejected(self, tmp_path):
        rc = run("simulate", "--preset", "example1", "--alpha", "1.2",
                 "--t-end", "5", "--out", str(tmp_path / "x"))
        assert rc == 1

    def test_unknown_preset_rejected(self, tmp_path):
        rc = run("simulate", "--preset", "example9", "--t-end", "5",
                 "--out", str(tmp_path / "x"))
        assert rc == 1

    def test_config_file_driven(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "model.preset = example3\nsolver.alpha = 0.9\nsolver.t_end = 2\n"
            f"output.directory = {tmp_path / 'out'}\n",
            encoding="utf-8",
        )
        assert run("simulate", "--config", str(cfg)) == 0
        assert (tmp_path / "out" / "traj_alpha0p9_x0.csv").exists()

    def test_missing_config_file(self):
        assert run("simulate", "--config", "/nonexistent/run.cfg") == 1

    def test_divergence_exit_code(self, tmp_path, capsys):
        # a stiff parameter set at a coarse step blows the scheme up
        cfg = tmp_path / "explode.cfg"
        cfg.write_text(
            "model.r = 900\nmodel.k = 2\nmodel.lambda = 0.9\nmodel.m = 0.5\n"
            "model.mu = 0.1\nmodel.a = 1\nmodel.theta = 0.9\nmodel.d = 0.05\n"
            "solver.alpha = 1.0\nsolver.step = 0.5\nsolver.t_end = 400\n"
            "run.initial_states = [[1.5, 1, 1]]\n"
            f"output.directory = {tmp_path / 'boom'}\n",
            encoding="utf-8",
        )
        assert run("simulate", "--config", str(cfg)) == 2
        assert "diverged at node" in capsys.readouterr().err


class TestReport:
    def test_threshold_values_printed(self, capsys):
        assert run("report", "--preset", "example1") == 0
        text = capsys.readouterr().out
        assert "R0" in text and "2.14286" in text
        assert "0.172266" in text  # theta1
        assert "0.804375" in text  # theta2 at the base conversion efficiency
        assert "stable-node(i)" in text

    def test_low_infectivity_report(self, capsys):
        assert run("report", "--preset", "example3") == 0
        text = capsys.readouterr().out
        assert "exists=no" in text
        assert "0.714286" in text

    def test_both_theta2_conventions(self, capsys):
        assert run("report", "--preset", "example1-global",
                   "--theta2-reference", "0.189") == 0
        text = capsys.readouterr().out
        assert "0.10139" in text    # self-consistent value at theta = 0.5
        assert "0.804375" in text   # value at the reference level

    def test_equilibria_subcommand(self, capsys):
        assert run("equilibria", "--preset", "example1") == 0
        text = capsys.readouterr().out
        assert "E2" in text and "18.6667" in text
        assert "E*" in text and "22.2727" in text


class TestSweep:
    def test_conversion_sweep_brackets_existence_threshold(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        rc = run("sweep", "--preset", "example1", "--vary", "theta=0.08:0.9:42",
                 "--alpha", "0.85", "--out", str(out))
        assert rc == 0
        rows = out.read_text().strip().split("\n")
        header = rows[0].split(",")
        idx_value = header.index("value")
        idx_exists = header.index("E*_exists")
        flips = []
        previous = None
        for row in rows[1:]:
            cells = row.split(",")
            flag = cells[idx_exists]
            if previous is not None and flag != previous:
                flips.append(float(cells[idx_value]))
            previous = flag
        assert len(flips) == 1
        grid_step = (0.9 - 0.08) / 41
        assert abs(flips[0] - 0.172265625) <= grid_step

    def test_death_rate_sweep_flips_predator_free_verdict(self, tmp_path):
        out = tmp_path / "dsweep.csv"
        rc = run("sweep", "--preset", "example2", "--vary", "d=0.02:0.09:36",
                 "--alpha", "0.85", "--out", str(out))
        assert rc == 0
        rows = out.read_text().strip().split("\n")
        header = rows[0].split(",")
        idx_value = header.index("value")
        idx_label = header.index("E2_label")
        flips = []
        previous = None
        for row in rows[1:]:
            cells = row.split(",")
            stable = cells[idx_label].startswith("stable")
            if previous is not None and stable != previous:
                flips.append(float(cells[idx_value]))
            previous = stable
        assert len(flips) == 1
        grid_step = (0.09 - 0.02) / 35
        assert abs(flips[0] - 0.041795918367346939) <= grid_step

    def test_empty_grid_header_only(self, tmp_path):
        out = tmp_path / "empty.csv"
        rc = run("sweep", "--preset", "example1", "--vary", "theta=0.2:0.4:0",
                 "--alpha", "0.85", "--out", str(out))
        assert rc == 0
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 1 and lines[0].startswith("parameter,value,alpha")

    def test_grid_leaving_valid_region_rejected(self, tmp_path):
        rc = run("sweep", "--preset", "example1", "--vary", "theta=0.5:1.5:5",
                 "--alpha", "0.85", "--out", str(tmp_path / "bad.csv"))
        assert rc == 1

    def test_malformed_grid_rejected(self, tmp_path):
        rc = run("sweep", "--preset", "example1", "--vary", "theta=1:2",
                 "--alpha", "0.85", "--out", str(tmp_path / "bad.csv"))
        assert rc == 1


class TestReproduce:
    def test_unstable_scenario_bundle(self, tmp_path, capsys):
        out = tmp_path / "rep"
        rc = run("reproduce", "ex1-unstable", "--out", str(out))
        assert rc == 0
        text = capsys.readouterr().out
        assert "[pass] A1" in text
        assert "D(F)" in text
        assert (out / "fig3_alpha0p85.csv").exists()
        assert (out / "fig3_plot.py").exists()

    def test_unknown_example_id(self, capsys):
        assert run("reproduce", "nope") == 1


class TestVerify:
    def test_global_coexistence_run(self, capsys):
        rc = run("verify", "--preset", "example1-global", "--alpha", "0.95",
                 "--t-end", "60", "--tolerance", "0.5")
        assert rc == 0
        text = capsys.readouterr().out
        assert "nonnegativity pass" in text
        assert "boundedness pass" in text
        assert "Lipschitz bound" in text

    def test_help_exits_zero(self):
        assert run("--help") == 0
