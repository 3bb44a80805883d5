import json
import math

import numpy as np
import pytest

from npclassify.cli import (
    ConfigError,
    MappedSieve,
    build_distribution,
    build_lp_config,
    load_config,
    main,
)
from npclassify.distributions import corridor


def write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def rates_config(**overrides):
    cfg = {
        "experiment": "rates",
        "distribution": {"kind": "quadratic-ball", "dim": 1, "curvature": 0.25},
        "estimator": {
            "kind": "plugin-lp",
            "order": 1,
            "bandwidth": {"rule": "rate-optimal"},
            "kernel": {"kind": "uniform-ball", "radius": 1.0},
            "guard": {"rule": "fixed", "value": 1e-3},
        },
        "n_grid": [64, 128, 256],
        "replicates": 3,
        "mc_budget": 300,
        "seed": 11,
        "workers": 1,
        "tolerance": {"slope": 2.0},
    }
    cfg.update(overrides)
    return cfg


class TestConfigValidation:
    def test_missing_seed(self, tmp_path):
        cfg = rates_config()
        del cfg["seed"]
        path = write_config(tmp_path, "c.json", cfg)
        with pytest.raises(ConfigError, match="seed"):
            load_config(path, "rates")

    def test_n_grid_not_increasing(self, tmp_path):
        path = write_config(tmp_path, "c.json", rates_config(n_grid=[64, 64]))
        with pytest.raises(ConfigError, match="strictly increasing"):
            load_config(path, "rates")

    def test_wrong_experiment(self, tmp_path):
        path = write_config(tmp_path, "c.json", rates_config())
        with pytest.raises(ConfigError):
            load_config(path, "corridor")

    def test_unknown_distribution(self):
        with pytest.raises(ConfigError):
            build_distribution({"kind": "mystery"})

    def test_invalid_distribution_params(self):
        with pytest.raises(ConfigError):
            build_distribution({"kind": "quadratic-ball", "dim": 1,
                                "curvature": 0.9})

    def test_exit_code_2(self, tmp_path, capsys):
        cfg = rates_config(n_grid=[256, 128])
        path = write_config(tmp_path, "c.json", cfg)
        code = main(["rates", "--config", path, "--out", str(tmp_path)])
        assert code == 2
        assert "config error" in capsys.readouterr().err


class TestEstimatorConfig:
    def test_rate_optimal_bandwidth(self):
        dist = build_distribution(
            {"kind": "quadratic-ball", "dim": 2, "curvature": 0.25}
        )
        cfg = build_lp_config(
            {"bandwidth": {"rule": "rate-optimal"}}, dist, 4096
        )
        assert cfg.bandwidth == pytest.approx(4096 ** (-1 / 6))
        assert cfg.order == 1  # ceil(beta) - 1 for beta = 2

    def test_fixed_guard(self):
        dist = build_distribution({"kind": "corridor"})
        cfg = build_lp_config(
            {"guard": {"rule": "fixed", "value": 0.01}}, dist, 100
        )
        assert cfg.guard_threshold(100) == 0.01

    def test_unknown_rules_rejected(self):
        dist = build_distribution({"kind": "corridor"})
        with pytest.raises(ConfigError):
            build_lp_config({"bandwidth": {"rule": "adaptive"}}, dist, 100)
        with pytest.raises(ConfigError):
            build_lp_config({"guard": {"rule": "magic"}}, dist, 100)


class TestMappedSieve:
    def test_fits_on_corridor_support(self):
        dist = corridor()
        sample = dist.sample(500, np.random.default_rng(3))
        clf = MappedSieve(dist, sample, epsilon=0.2)
        preds = clf.predict(sample.x)
        assert set(np.unique(preds)).issubset({0, 1})
        # a reasonable fit recovers the sign rule on most of the support
        agreement = np.mean(preds == dist.bayes_label(sample.x))
        assert agreement > 0.8

    def test_rejects_smooth_classes(self):
        from npclassify.sieve import UnsupportedSmoothnessError

        dist = build_distribution(
            {"kind": "quadratic-ball", "dim": 1, "curvature": 0.25}
        )
        sample = dist.sample(50, np.random.default_rng(4))
        with pytest.raises(UnsupportedSmoothnessError):
            MappedSieve(dist, sample, epsilon=0.2)


def run_cli(tmp_path, name, cfg, out=None, extra=None):
    path = write_config(tmp_path, f"{name}.json", cfg)
    out_dir = out or tmp_path / name
    argv = [cfg["experiment"], "--config", path, "--out", str(out_dir)]
    if extra:
        argv += extra
    code = main(argv)
    stem = cfg["experiment"].replace("-", "_")
    csv_path = out_dir / f"{stem}.csv"
    summary_path = out_dir / f"{stem}_summary.json"
    return code, csv_path, summary_path


class TestRatesCommand:
    def test_rows_and_summary(self, tmp_path):
        cfg = rates_config(n_grid=[64, 128], replicates=1)
        code, csv_path, summary_path = run_cli(tmp_path, "r", cfg)
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "experiment,n,replicate,seed,excess,se,wall_ms"
        assert len(lines) == 1 + 2  # header + one row per (n, replicate)
        summary = json.loads(summary_path.read_text())
        for key in ("pass", "theoretical", "measured", "tolerance"):
            assert key in summary

    def test_byte_identical_rerun(self, tmp_path):
        cfg = rates_config()
        _, csv1, _ = run_cli(tmp_path, "a", cfg, out=tmp_path / "o1")
        _, csv2, _ = run_cli(tmp_path, "b", cfg, out=tmp_path / "o2")
        assert csv1.read_bytes() == csv2.read_bytes()

    def test_workers_do_not_change_output(self, tmp_path):
        cfg1 = rates_config()
        cfg2 = rates_config(workers=2)
        _, csv1, _ = run_cli(tmp_path, "w1", cfg1, out=tmp_path / "w1o")
        _, csv2, _ = run_cli(tmp_path, "w2", cfg2, out=tmp_path / "w2o")
        assert csv1.read_bytes() == csv2.read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        cfg = rates_config()
        _, csv1, _ = run_cli(tmp_path, "s1", cfg, out=tmp_path / "s1o")
        _, csv2, _ = run_cli(
            tmp_path, "s2", cfg, out=tmp_path / "s2o", extra=["--seed", "99"]
        )
        assert csv1.read_bytes() != csv2.read_bytes()

    def test_svg_artifact(self, tmp_path):
        cfg = rates_config(n_grid=[64, 128], replicates=2)
        out_dir = tmp_path / "svg"
        run_cli(tmp_path, "svg", cfg, out=out_dir, extra=["--svg", "plot.svg"])
        data = (out_dir / "plot.svg").read_text()
        assert "<svg" in data

    def test_sieve_estimator_arm(self, tmp_path):
        # rates also runs with the sieve estimator (explicit schedule alpha)
        cfg = rates_config(
            distribution={"kind": "corridor", "gap": 0.25, "slope": 0.25},
            estimator={"kind": "sieve", "p": "inf", "rho": 1.0, "alpha": 1.0},
            margin_alpha=1.0,
        )
        code, csv_path, summary_path = run_cli(tmp_path, "rs", cfg)
        summary = json.loads(summary_path.read_text())
        assert summary["theoretical"] == pytest.approx(1 / 2)
        assert len(csv_path.read_text().splitlines()) == 1 + 9

    def test_sieve_estimator_rejects_smooth_class(self, tmp_path):
        cfg = rates_config(
            estimator={"kind": "sieve", "p": "inf", "rho": 0.5},
            margin_alpha=0.5,
        )
        code, _, _ = run_cli(tmp_path, "rsq", cfg)
        assert code == 2  # quadratic-ball has beta = 2


class TestCorridorCommand:
    def corridor_config(self, **overrides):
        cfg = {
            "experiment": "corridor",
            "distribution": {"kind": "corridor", "gap": 0.25, "slope": 0.25},
            "estimator": {
                "kind": "plugin-lp",
                "order": 0,
                "bandwidth": {"rule": "fixed", "value": 0.2},
            },
            "n_grid": [64, 256, 1024],
            "replicates": 3,
            "mc_budget": 2000,
            "seed": 5,
            "workers": 1,
            "tolerance": {"final_excess": 0.05},
        }
        cfg.update(overrides)
        return cfg

    def test_runs_and_reports(self, tmp_path):
        code, csv_path, summary_path = run_cli(
            tmp_path, "c", self.corridor_config()
        )
        summary = json.loads(summary_path.read_text())
        assert summary["measured"] <= 0.05
        assert code == 0

    def test_rejects_rate_optimal_bandwidth(self, tmp_path):
        cfg = self.corridor_config(
            estimator={"kind": "plugin-lp", "order": 0,
                       "bandwidth": {"rule": "rate-optimal"}}
        )
        code, _, _ = run_cli(tmp_path, "cr", cfg)
        assert code == 2

    def test_rejects_non_corridor_distribution(self, tmp_path):
        cfg = self.corridor_config(
            distribution={"kind": "quadratic-ball", "dim": 1, "curvature": 0.25}
        )
        code, _, _ = run_cli(tmp_path, "cd", cfg)
        assert code == 2


class TestMarginCheckCommand:
    def margin_config(self, dist):
        return {
            "experiment": "margin-check",
            "distribution": dist,
            "mc_budget": 20000,
            "replicates": 1,
            "seed": 9,
            "workers": 1,
            "tolerance": {"z": 3.0},
        }

    @pytest.mark.parametrize(
        "dist",
        [
            {"kind": "quadratic-ball", "dim": 2, "curvature": 0.25},
            {"kind": "corridor", "gap": 0.25, "slope": 0.25},
            {"kind": "hypercube", "q": 4, "m": 4, "w": 0.03125, "beta": 1.0,
             "c_phi": 0.5, "sigma": [1, -1, 1, -1], "dim": 2, "alpha": 1.0},
        ],
    )
    def test_families_pass(self, tmp_path, dist):
        code, _, summary_path = run_cli(
            tmp_path, "m" + dist["kind"][0], self.margin_config(dist)
        )
        summary = json.loads(summary_path.read_text())
        assert summary["pass"] is True
        assert code == 0
        if dist["kind"] == "hypercube":
            assert summary["step_verified"] is True


class TestLowerBoundCommand:
    def lb_config(self, **overrides):
        cfg = {
            "experiment": "lower-bound",
            "distribution": {"kind": "hypercube", "q": 2, "m": 4, "w": 0.1,
                             "beta": 1.0, "c_phi": 0.5,
                             "sigma": [1, 1, 1, 1], "dim": 2, "alpha": 0.0,
                             "a0_mode": "outside-ball"},
            "classifier": {"kind": "bayes-plus"},
            "n_grid": [25, 100],
            "replicates": 1,
            "seed": 3,
            "workers": 1,
            "tolerance": {},
        }
        cfg.update(overrides)
        return cfg

    def test_pass_and_row_count(self, tmp_path):
        code, csv_path, summary_path = run_cli(tmp_path, "lb", self.lb_config())
        summary = json.loads(summary_path.read_text())
        assert code == 0 and summary["pass"] is True
        lines = csv_path.read_text().splitlines()
        assert len(lines) == 1 + 2 * 16  # two n values, 2^4 laws each

    def test_vacuous_flag(self, tmp_path):
        cfg = self.lb_config(n_grid=[25, 100000])
        _, _, summary_path = run_cli(tmp_path, "lbv", cfg)
        summary = json.loads(summary_path.read_text())
        assert summary["vacuous"]["100000"] is True
        assert summary["vacuous"]["25"] is False

    def test_m_cap(self, tmp_path):
        cfg = self.lb_config(
            distribution={"kind": "hypercube", "q": 3, "m": 5, "w": 0.05,
                          "beta": 1.0, "c_phi": 0.5, "sigma": [1] * 5,
                          "dim": 2, "alpha": 0.0}
        )
        code, _, _ = run_cli(tmp_path, "lbm", cfg)
        assert code == 2


class TestConcentrationCommand:
    def conc_config(self, **overrides):
        cfg = {
            "experiment": "concentration",
            "distribution": {"kind": "quadratic-ball", "dim": 1,
                             "curvature": 0.25},
            "estimator": {"order": 1, "guard": {"rule": "fixed", "value": 1e-6}},
            "n_grid": [32, 64, 128, 256, 512, 1024],
            "h": 0.3,
            "delta": 0.1,
            "x": [0.5],
            "replicates": 120,
            "seed": 2,
            "workers": 1,
            "tolerance": {"spearman": -0.9},
        }
        cfg.update(overrides)
        return cfg

    def test_runs(self, tmp_path):
        code, csv_path, summary_path = run_cli(tmp_path, "cc", self.conc_config())
        summary = json.loads(summary_path.read_text())
        assert summary["measured"] <= -0.9
        assert code == 0

    def test_replicate_floor(self, tmp_path):
        code, _, _ = run_cli(
            tmp_path, "ccf", self.conc_config(replicates=50)
        )
        assert code == 2


class TestSieveVsPluginCommand:
    def svp_config(self, **overrides):
        cfg = {
            "experiment": "sieve-vs-plugin",
            "distribution": {"kind": "corridor", "gap": 0.03125,
                             "slope": 0.25},
            "margin_alpha": 1.0,
            "estimator": {
                "plugin": {"kind": "plugin-lp", "order": 0,
                           "bandwidth": {"rule": "rate-optimal"},
                           "guard": {"rule": "fixed", "value": 1e-3}},
                "sieve": {"p": "inf", "rho": 1.0},
            },
            "n_grid": [64, 128, 256],
            "replicates": 3,
            "mc_budget": 400,
            "seed": 17,
            "workers": 1,
            "tolerance": {"slope_gap": 5.0},
        }
        cfg.update(overrides)
        return cfg

    def test_runs_and_reports_both_arms(self, tmp_path):
        code, csv_path, summary_path = run_cli(tmp_path, "svp", self.svp_config())
        summary = json.loads(summary_path.read_text())
        assert summary["theoretical"]["plugin"] == pytest.approx(2 / 3)
        assert summary["theoretical"]["sieve"] == pytest.approx(1 / 2)
        assert len(summary["shared_sample_hashes"]) == 3  # one per n
        lines = csv_path.read_text().splitlines()
        assert len(lines) == 1 + 2 * 9

    def test_rejects_smooth_class(self, tmp_path):
        cfg = self.svp_config(
            distribution={"kind": "quadratic-ball", "dim": 1, "curvature": 0.25}
        )
        code, _, _ = run_cli(tmp_path, "svps", cfg)
        assert code == 2


class TestCompareBoundsCommand:
    def cb_config(self, **overrides):
        cfg = {
            "experiment": "compare-bounds",
            "distribution": {"kind": "quadratic-ball", "dim": 1,
                             "curvature": 0.25},
            "replicates": 40,
            "seed": 23,
            "workers": 1,
            "tolerance": {},
        }
        cfg.update(overrides)
        return cfg

    def test_zero_violations(self, tmp_path):
        code, _, summary_path = run_cli(tmp_path, "cb", self.cb_config())
        summary = json.loads(summary_path.read_text())
        assert code == 0
        assert summary["measured"] == 0
        assert summary["min_slack"] >= 0

    def test_corridor_uses_finite_envelope(self, tmp_path):
        cfg = self.cb_config(
            distribution={"kind": "corridor", "gap": 0.25, "slope": 0.25}
        )
        code, _, summary_path = run_cli(tmp_path, "cbc", cfg)
        summary = json.loads(summary_path.read_text())
        assert code == 0
        assert summary["alpha"] == 1.0

    def test_rejects_multidimensional(self, tmp_path):
        cfg = self.cb_config(
            distribution={"kind": "quadratic-ball", "dim": 2, "curvature": 0.25}
        )
        code, _, _ = run_cli(tmp_path, "cbd", cfg)
        assert code == 2


class TestDeterminismAllCommands:
    def test_all_subcommands_byte_identical(self, tmp_path):
        configs = [
            rates_config(n_grid=[64, 128], replicates=2, mc_budget=200),
            TestCorridorCommand().corridor_config(
                n_grid=[64, 128], replicates=2, mc_budget=200
            ),
            TestMarginCheckCommand().margin_config(
                {"kind": "corridor", "gap": 0.25, "slope": 0.25}
            ),
            TestLowerBoundCommand().lb_config(),
            TestConcentrationCommand().conc_config(
                n_grid=[32, 64, 128], replicates=100
            ),
            TestSieveVsPluginCommand().svp_config(
                n_grid=[64, 128], replicates=2, mc_budget=200
            ),
            TestCompareBoundsCommand().cb_config(replicates=10),
        ]
        for cfg in configs:
            name = cfg["experiment"]
            _, csv1, _ = run_cli(tmp_path, name + "1", cfg,
                                 out=tmp_path / (name + "o1"))
            _, csv2, _ = run_cli(tmp_path, name + "2", cfg,
                                 out=tmp_path / (name + "o2"))
            assert csv1.read_bytes() == csv2.read_bytes(), name
