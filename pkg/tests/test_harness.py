from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

import lcpa.harness as harness_mod
from lcpa import (
    ConfigError,
    ExperimentRow,
    ExperimentSpec,
    SCHEMES,
    derived_seed,
    draw_channels,
    emit_csv,
    evaluate_allocation,
    gains_from_channels,
    load_config,
    model_error,
    rates,
    run_experiment,
    sample_count,
    two_user_cnn_svm,
    uniform,
)

CONFIG_INI = Path(__file__).resolve().parent.parent / "configs" / "cnn_svm.ini"


def _small_spec(scenario, schemes=("uniform", "water_filling"), runs=2, seed=11,
                axis="time_budget_s", values=(5.0, 10.0)):
    cfg, tasks = scenario
    return ExperimentSpec(config=cfg, tasks=tasks, schemes=schemes,
                          sweep_axis=axis, sweep_values=values, runs=runs, seed=seed)


class TestExperimentSpec:
    def test_rejects_unknown_scheme(self, scenario):
        with pytest.raises(ValueError):
            _small_spec(scenario, schemes=("uniform", "genie"))

    def test_rejects_non_increasing_values(self, scenario):
        with pytest.raises(ValueError):
            _small_spec(scenario, values=(10.0, 10.0))
        with pytest.raises(ValueError):
            _small_spec(scenario, values=())

    def test_rejects_bad_axis(self, scenario):
        with pytest.raises(ValueError):
            _small_spec(scenario, axis="noise_power_w")

    def test_rejects_fractional_antenna_counts(self, scenario):
        with pytest.raises(ValueError):
            _small_spec(scenario, axis="num_antennas", values=(4.0, 6.5))

    def test_rejects_zero_runs(self, scenario):
        with pytest.raises(ValueError):
            _small_spec(scenario, runs=0)


class TestRunExperiment:
    def test_single_uniform_run_recomputable_by_hand(self, scenario):
        cfg, tasks = scenario
        spec = _small_spec(scenario, schemes=("uniform",), runs=1, seed=21, values=(5.0, 10.0))
        rows = run_experiment(spec)
        row = rows[0]
        g = gains_from_channels(draw_channels(cfg, derived_seed(21, 0)))
        p = uniform(cfg).powers
        r = rates(g, p, cfg.noise_power_w)
        errors = [t.rho * model_error(t, sample_count(cfg, float(r[k]), t))
                  for k, t in enumerate(tasks)]
        samples = [sample_count(cfg, float(r[k]), t, continuous=False)
                   for k, t in enumerate(tasks)]
        assert row.scheme == "uniform"
        assert np.allclose(row.mean_powers_mw, 1e3 * p, rtol=1e-12)
        assert row.mean_modeled_max_error == pytest.approx(min(max(errors), 1.0), rel=1e-12)
        assert np.allclose(row.mean_discrete_samples, samples, rtol=1e-12)

    def test_budget_conserved_in_every_row(self, scenario):
        spec = _small_spec(scenario, schemes=SCHEMES, runs=2)
        psum_mw = 1e3 * spec.config.total_power_w
        for row in run_experiment(spec):
            assert abs(row.mean_powers_mw.sum() - psum_mw) <= 1e-6

    def test_deterministic(self, scenario):
        spec = _small_spec(scenario, schemes=("uniform", "lcpa_asymptotic"), runs=3)
        rows1 = run_experiment(spec)
        rows2 = run_experiment(spec)
        for r1, r2 in zip(rows1, rows2):
            assert r1.scheme == r2.scheme
            assert np.array_equal(r1.mean_powers_mw, r2.mean_powers_mw)
            assert r1.mean_modeled_max_error == r2.mean_modeled_max_error

    def test_failing_scheme_marked_not_fatal(self, scenario, monkeypatch):
        def boom(*args, **kwargs):
            raise RuntimeError("synthetic failure")

        monkeypatch.setattr(harness_mod, "max_min_fairness", boom)
        spec = _small_spec(scenario, schemes=("max_min", "uniform"), runs=1)
        rows = run_experiment(spec)
        by_scheme = {(r.sweep_value, r.scheme): r for r in rows}
        for value in spec.sweep_values:
            assert by_scheme[(value, "max_min")].failed
            assert np.all(np.isnan(by_scheme[(value, "max_min")].mean_powers_mw))
            assert not by_scheme[(value, "uniform")].failed

    def test_antenna_sweep_changes_draws(self, scenario):
        spec = _small_spec(scenario, schemes=("uniform",), runs=1,
                           axis="num_antennas", values=(4.0, 16.0))
        rows = run_experiment(spec)
        assert rows[0].mean_modeled_max_error != rows[1].mean_modeled_max_error


class TestEmitCsv:
    def test_empty_rows_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit_csv([], path)
        lines = path.read_bytes().decode("utf-8").split("\n")
        assert lines[-2] == "sweep_value,scheme,user,power_mw,modeled_max_error,samples"
        assert lines[-1] == ""
        assert all(line.startswith("#") for line in lines[:-2])

    def test_two_rows_two_users_gives_four_data_lines(self, tmp_path):
        rows = [
            ExperimentRow(5.0, "uniform", np.array([10.0, 10.0]), 0.25, np.array([100.0, 200.0])),
            ExperimentRow(10.0, "uniform", np.array([10.0, 10.0]), 0.2, np.array([150.0, 250.0])),
        ]
        path = tmp_path / "rows.csv"
        emit_csv(rows, path)
        data = [l for l in path.read_text().split("\n") if l and not l.startswith("#")]
        assert len(data) == 1 + 4
        assert data[1] == "5,uniform,1,10,0.25,100"

    def test_sorted_and_byte_identical(self, scenario, tmp_path):
        spec = _small_spec(scenario, schemes=("water_filling", "uniform"), runs=2)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        emit_csv(run_experiment(spec), p1)
        emit_csv(run_experiment(spec), p2)
        assert p1.read_bytes() == p2.read_bytes()
        data = [l for l in p1.read_text().split("\n") if l and not l.startswith("#")]
        keys = [(float(l.split(",")[0]), l.split(",")[1], int(l.split(",")[2])) for l in data[1:]]
        assert keys == sorted(keys)

    def test_lf_line_endings(self, scenario, tmp_path):
        path = tmp_path / "lf.csv"
        emit_csv(run_experiment(_small_spec(scenario, schemes=("uniform",), runs=1)), path)
        assert b"\r" not in path.read_bytes()

    def test_io_failure_names_path(self, tmp_path):
        missing = tmp_path / "no_such_dir" / "out.csv"
        with pytest.raises(OSError, match="no_such_dir"):
            emit_csv([], missing)


class TestEvaluateAllocation:
    def test_error_clamped_to_unit_interval(self, scenario):
        cfg, tasks = scenario
        g = gains_from_channels(draw_channels(cfg, 2))
        short = replace(cfg, time_budget_s=1e-9)
        err, _ = evaluate_allocation(g, short, tasks, uniform(short).powers)
        assert 0.0 <= err <= 1.0


class TestConfigIO:
    def test_reference_ini_matches_builtin_scenario(self):
        cfg, tasks = load_config(CONFIG_INI)
        ref_cfg, ref_tasks = two_user_cnn_svm()
        assert cfg.bandwidth_hz == ref_cfg.bandwidth_hz
        assert cfg.noise_power_w == pytest.approx(ref_cfg.noise_power_w, rel=1e-12)
        assert cfg.total_power_w == pytest.approx(ref_cfg.total_power_w, rel=1e-12)
        assert cfg.num_users == 2 and cfg.num_antennas == 10
        assert np.allclose(cfg.path_loss_linear, ref_cfg.path_loss_linear, rtol=1e-12)
        for t, ref in zip(tasks, ref_tasks):
            assert (t.a, t.b, t.rho, t.bits_per_sample, t.initial_samples) == (
                ref.a, ref.b, ref.rho, ref.bits_per_sample, ref.initial_samples)

    def test_missing_key_reported(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[system]\nbandwidth_khz = 180\n\n[task.one]\na = 1\n")
        with pytest.raises(ConfigError):
            load_config(bad)

    def test_missing_file_reported(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.ini")

    def test_per_task_path_loss_override(self, tmp_path):
        ini = tmp_path / "override.ini"
        ini.write_text(
            "[system]\nbandwidth_khz = 180\ntime_budget_s = 5\nnoise_power_dbm = -87\n"
            "total_power_dbm = 13\nnum_antennas = 4\npath_loss_db = -100\n\n"
            "[task.a]\na = 7.3\nb = 0.69\nbits_per_sample = 6276\ninitial_samples = 300\n\n"
            "[task.b]\na = 5.2\nb = 0.72\nbits_per_sample = 324\ninitial_samples = 200\n"
            "path_loss_db = -110\n"
        )
        cfg, _ = load_config(ini)
        assert cfg.path_loss_linear[0] == pytest.approx(1e-10, rel=1e-12)
        assert cfg.path_loss_linear[1] == pytest.approx(1e-11, rel=1e-12)
