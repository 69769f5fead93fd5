import csv
import os

import numpy as np

from zenochain.cli import main as cli_main
from zenochain.config import parse_config
from zenochain.experiments import (
    kappa_family,
    run_experiment,
    run_three_level,
    scaling_sweep,
    worker_count,
    write_theory_csv,
)

CONFIG = """
[chain]
n = 12
lambda = 2

[protocol]
kind = projective
m = 60
dist = [(1.0, 0.5), (5.0, 0.5)]

[experiment]
initial_state = wstate
realizations = 3
seed = 4242
"""


def read_csv(path):
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


class TestRunExperiment:
    def test_emits_expected_files(self, tmp_path):
        config = parse_config(CONFIG)
        result = run_experiment(config, out_dir=tmp_path, reproducible=True)
        names = set(result["files"])
        assert {"trajectory_r0.csv", "trajectory_r1.csv", "trajectory_r2.csv",
                "summary.csv", "theory.csv"} <= names

    def test_trajectory_columns(self, tmp_path):
        config = parse_config(CONFIG)
        run_experiment(config, out_dir=tmp_path, reproducible=True)
        header, rows = read_csv(tmp_path / "trajectory_r0.csv")
        assert header == ["step", "t_us", "mu_us", "q_j", "P_cum", "pop_subspace"]
        assert len(rows) == 60
        assert rows[0][0] == "1"

    def test_byte_identical_reruns(self, tmp_path):
        config = parse_config(CONFIG)
        run_experiment(config, out_dir=tmp_path / "a", reproducible=True)
        run_experiment(config, out_dir=tmp_path / "b", reproducible=True)
        for name in ("trajectory_r0.csv", "summary.csv", "theory.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_timestamp_header_suppressed_only_when_reproducible(self, tmp_path):
        config = parse_config(CONFIG)
        run_experiment(config, out_dir=tmp_path / "stamped", reproducible=False)
        run_experiment(config, out_dir=tmp_path / "clean", reproducible=True)
        stamped = (tmp_path / "stamped" / "summary.csv").read_text()
        clean = (tmp_path / "clean" / "summary.csv").read_text()
        assert stamped.startswith("# generated")
        assert not clean.startswith("#")

    def test_theory_columns_recomputable(self, tmp_path):
        config = parse_config(CONFIG)
        run_experiment(config, out_dir=tmp_path, reproducible=True)
        header, rows = read_csv(tmp_path / "theory.csv")
        row = dict(zip(header, rows[0]))
        m = float(row["m"])
        beta = float(row["beta"])
        kappa = float(row["kappa"])
        mean = float(row["mu_mean"])
        recomputed_avg = np.exp(-m * beta**2 * float(row["c2_time_avg"]) * (1 + kappa) * mean**2)
        recomputed_const = np.exp(-m * beta**2 * float(row["c2_eigen"]) * (1 + kappa) * mean**2)
        assert abs(recomputed_avg - float(row["pstar_time_avg"])) <= 1e-12
        assert abs(recomputed_const - float(row["pstar_const"])) <= 1e-12

    def test_summary_columns(self, tmp_path):
        config = parse_config(CONFIG)
        run_experiment(config, out_dir=tmp_path, reproducible=True)
        header, rows = read_csv(tmp_path / "summary.csv")
        assert header == ["lambda", "protocol", "F", "P_final", "pstar_theory",
                          "kappa", "m", "mu_mean"]
        row = dict(zip(header, rows[0]))
        assert row["protocol"] == "projective"
        assert 0.0 < float(row["F"]) <= 1.0

    def test_lambda_sweep_adds_rows(self, tmp_path):
        text = CONFIG.replace("seed = 4242", "seed = 4242\nlambda_sweep = 1,2,3")
        config = parse_config(text)
        run_experiment(config, out_dir=tmp_path, reproducible=True)
        _, rows = read_csv(tmp_path / "summary.csv")
        assert [r[0] for r in rows] == ["2", "1", "3"]

    def test_kappa_sweep_adds_rows(self, tmp_path):
        text = CONFIG.replace(
            "seed = 4242", "seed = 4242\nkappa_sweep = (1.0, 3.0, 3.0); (0.8, 1.0, 11.0)"
        )
        config = parse_config(text)
        run_experiment(config, out_dir=tmp_path, reproducible=True)
        header, rows = read_csv(tmp_path / "summary.csv")
        kappas = [float(r[header.index("kappa")]) for r in rows]
        assert abs(kappas[1] - 0.0) <= 1e-12
        assert abs(kappas[2] - 16.0 / 9.0) <= 1e-12

    def test_worker_pool_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("ZENO_LAB_THREADS", "2")
        assert worker_count() == 2
        config = parse_config(CONFIG)
        result = run_experiment(config, out_dir=tmp_path / "par", reproducible=True)
        monkeypatch.delenv("ZENO_LAB_THREADS")
        run_experiment(config, out_dir=tmp_path / "ser", reproducible=True)
        for name in result["files"]:
            assert (tmp_path / "par" / name).read_bytes() == (tmp_path / "ser" / name).read_bytes()

    def test_worker_count_auto(self, monkeypatch):
        monkeypatch.setenv("ZENO_LAB_THREADS", "0")
        assert worker_count() == (os.cpu_count() or 1)


class TestTheoryOnly:
    def test_write_theory_csv(self, tmp_path):
        config = parse_config(CONFIG)
        path = write_theory_csv(config, out_dir=tmp_path, reproducible=True)
        header, rows = read_csv(path)
        assert len(rows) == 1
        assert header[0] == "lambda"


class TestThreeLevelRunner:
    def test_columns_and_accuracy(self, tmp_path):
        path = run_three_level(1.0, [0.0, 10.0], t_max=20.0, dt=0.1,
                               out_dir=tmp_path, reproducible=True)
        header, rows = read_csv(path)
        assert header == ["g", "t", "P_formula", "P_numeric", "abs_diff"]
        diffs = [float(r[4]) for r in rows]
        assert max(diffs) <= 1e-8
        # g = 0 rows follow cos^2(omega t)
        for r in rows:
            if float(r[0]) == 0.0:
                assert abs(float(r[2]) - np.cos(float(r[1])) ** 2) <= 1e-12

    def test_larger_coupling_confines_better(self, tmp_path):
        path = run_three_level(1.0, [2.0, 8.0], t_max=30.0, dt=0.05,
                               out_dir=tmp_path, reproducible=True)
        header, rows = read_csv(path)
        worst = {}
        for r in rows:
            g = float(r[0])
            worst[g] = max(worst.get(g, 0.0), 1.0 - float(r[2]))
        assert worst[8.0] < worst[2.0]


class TestSweeps:
    def test_kappa_family_endpoints(self):
        fam = kappa_family()
        p1, mu1, mu2 = fam[0]
        assert (p1, mu1, mu2) == (1.0, 3.0, 3.0)
        p1, mu1, mu2 = fam[-1]
        assert abs(mu1 - 1.0) <= 1e-12 and abs(mu2 - 11.0) <= 1e-12
        # mean pinned at 3 for every member
        for p1, mu1, mu2 in fam:
            assert abs(p1 * mu1 + (1 - p1) * mu2 - 3.0) <= 1e-12

    def test_scaling_sweep_small(self):
        rows = scaling_sweep(lam=5, total_time=300.0, mu_min=1.0, mu_max=3.0, points=3)
        assert len(rows) == 3
        for mu, m, leak_pm, leak_pc, leak_cc in rows:
            assert abs(m * mu - 300.0) <= mu
            assert 0 < leak_pm < 1
            assert 0 < leak_pc < leak_pm
            assert 0 < leak_cc < 1


class TestCLI:
    def test_simulate_and_compare(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(CONFIG)
        rc = cli_main(["simulate", str(cfg), "--out-dir", str(tmp_path / "out"),
                       "--reproducible"])
        assert rc == 0
        assert (tmp_path / "out" / "summary.csv").exists()
        rc = cli_main(["compare", str(cfg), "--out-dir", str(tmp_path / "cmp"),
                       "--reproducible"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "mean ln P" in out and "relative deviation" in out

    def test_theory_subcommand(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(CONFIG)
        rc = cli_main(["theory", str(cfg), "--out-dir", str(tmp_path / "th")])
        assert rc == 0
        assert (tmp_path / "th" / "theory.csv").exists()

    def test_three_level_subcommand(self, tmp_path):
        rc = cli_main(["three-level", "--omega", "1.0", "--g", "0.5,5",
                       "--t-max", "10", "--dt", "0.1",
                       "--out-dir", str(tmp_path), "--reproducible"])
        assert rc == 0
        assert (tmp_path / "three_level.csv").exists()

    def test_figure_subcommand_small(self, tmp_path):
        rc = cli_main(["figure", "fig2", "--m", "40", "--out-dir", str(tmp_path),
                       "--seed", "3", "--reproducible"])
        assert rc == 0
        header, rows = read_csv(tmp_path / "fig2_survival.csv")
        assert header == ["lambda", "m", "t_us", "P_sim", "pstar_time_avg", "pstar_const"]
        assert len(rows) == 9 * 40

    def test_fig3_preset_small(self, tmp_path):
        from zenochain.experiments import preset_fig3

        preset_fig3(tmp_path, m=60, reproducible=True)
        header, rows = read_csv(tmp_path / "fig3_main.csv")
        assert header == ["m", "t_us", "P_sim", "pstar_time_avg", "edge_pop"]
        assert len(rows) == 60
        assert (tmp_path / "fig3_inset.csv").exists()

    def test_fig4_preset_small(self, tmp_path):
        from zenochain.experiments import preset_fig4

        preset_fig4(tmp_path, m=15, realizations=2, reproducible=True)
        header, rows = read_csv(tmp_path / "fig4_fidelity.csv")
        assert header == ["lambda", "protocol", "F_mean", "P_final_mean", "R"]
        protocols = {r[1] for r in rows}
        assert protocols == {"projective", "pulsed", "continuous"}
        assert (tmp_path / "fig4_inset_scaling.csv").exists()

    def test_fig5_preset_small(self, tmp_path):
        from zenochain.experiments import preset_fig5

        preset_fig5(tmp_path, m=25, realizations=2, reproducible=True)
        header, rows = read_csv(tmp_path / "fig5_kappa.csv")
        assert "ln_pstar_theory" in header
        assert len(rows) == 7
        kappas = [float(r[0]) for r in rows]
        assert abs(kappas[0]) <= 1e-12
        assert abs(kappas[-1] - 16.0 / 9.0) <= 1e-12

    def test_bad_config_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("[chain]\nn = 12\n")  # missing lambda and more
        rc = cli_main(["simulate", str(cfg)])
        assert rc == 2
        assert "config error" in capsys.readouterr().err

    def test_seed_override_changes_output(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(CONFIG)
        cli_main(["simulate", str(cfg), "--out-dir", str(tmp_path / "s1"),
                  "--seed", "1", "--reproducible"])
        cli_main(["simulate", str(cfg), "--out-dir", str(tmp_path / "s2"),
                  "--seed", "2", "--reproducible"])
        a = (tmp_path / "s1" / "trajectory_r0.csv").read_bytes()
        b = (tmp_path / "s2" / "trajectory_r0.csv").read_bytes()
        assert a != b
