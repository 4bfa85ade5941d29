# tests/test_harness.py
import json
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from collapsim import experiments
from collapsim.config import ExperimentConfig
from collapsim.experiments import EXPERIMENTS, Experiment
from collapsim.flash import FLASH_COLUMNS, FlashChain, FlashEvent
from collapsim.fock import FockReport
from collapsim.models import ExperimentResult, Metric, RunSummary
from collapsim.output_manager import OutputManager
from collapsim.runner import run_experiment, run_trials
from collapsim.scripts.cli import main
from collapsim.utils import WORKERS_ENV


def read_summary(out_dir, experiment="fock-macro", seed=0):
    path = Path(out_dir) / f"{experiment}_seed{seed}" / "summary.json"
    with open(path) as f:
        return json.load(f)


def interval_chains(values):
    return [FlashChain(FlashEvent.seed(), [FlashEvent(v, 0.0, v, 1)]) for v in values]


class TestCli:
    """Test the command line surface"""

    def test_list(self):
        result = CliRunner().invoke(main, ["list"])
        assert result.exit_code == 0
        for name in EXPERIMENTS:
            assert name in result.output

    def test_run_fock_macro(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            result = CliRunner().invoke(main, ["run", "fock-macro", "--out", temp_dir])
            assert result.exit_code == 0
            summary = read_summary(temp_dir)
            assert summary["passed"] is True
            assert summary["error"] is None
            assert summary["schema_version"] == 1
            assert "fock_report.json" in summary["artifacts"]
            assert "config.yaml" in summary["artifacts"]

    def test_summary_is_deterministic(self):
        with tempfile.TemporaryDirectory() as first, tempfile.TemporaryDirectory() as second:
            for out in (first, second):
                result = CliRunner().invoke(
                    main, ["run", "fock-macro", "--out", out, "--seed", "3"]
                )
                assert result.exit_code == 0
            summaries = [read_summary(out, seed=3) for out in (first, second)]
            for summary in summaries:
                assert set(summary.pop("run")) == {"timestamp"}
                assert "output_path" not in summary["config"]
            assert summaries[0] == summaries[1]

    def test_negative_tau_is_config_error(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            result = CliRunner().invoke(
                main, ["run", "grw1d", "--out", temp_dir, "--tau", "-1"]
            )
            assert result.exit_code == 2
            assert not any(Path(temp_dir).iterdir())

    def test_malformed_param(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            result = CliRunner().invoke(
                main, ["run", "fock-macro", "--out", temp_dir, "--param", "fock"]
            )
            assert result.exit_code == 2

    def test_unknown_experiment(self):
        result = CliRunner().invoke(main, ["run", "teleport"])
        assert result.exit_code != 0

    def test_experiment_error_exit_code(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            result = CliRunner().invoke(
                main,
                ["run", "fock-macro", "--out", temp_dir, "--param", "fock.r=2"],
            )
            assert result.exit_code == 1
            summary = read_summary(temp_dir)
            assert summary["error"]["type"] == "ValueError"
            assert "blob size" in summary["error"]["message"]


class TestRunner:
    """Test trial dispatch and experiment wrapping"""

    def test_trials_in_index_order(self):
        results = run_trials(lambda seed, index: (index, seed), 20, seed=1, stream=2)
        assert [index for index, _ in results] == list(range(20))

    def test_independent_of_worker_count(self, monkeypatch):
        def trial(seed, index):
            return float(np.random.default_rng(seed).random())

        monkeypatch.setenv(WORKERS_ENV, "1")
        serial = run_trials(trial, 12, seed=0, stream=0)
        monkeypatch.setenv(WORKERS_ENV, "4")
        parallel = run_trials(trial, 12, seed=0, stream=0)
        assert serial == parallel

    def test_experiment_error_is_recorded(self, monkeypatch):
        def broken(config):
            raise RuntimeError("flash 3 is not time-like from flash 2")

        monkeypatch.setitem(
            EXPERIMENTS, "fock-macro", Experiment("fock-macro", "broken", {}, broken)
        )
        with tempfile.TemporaryDirectory() as temp_dir:
            config = ExperimentConfig(experiment="fock-macro", output_path=temp_dir)
            summary, result = run_experiment(config)
        assert summary.passed is False
        assert summary.error == {
            "type": "RuntimeError",
            "message": "flash 3 is not time-like from flash 2",
        }
        assert result.metrics == {}
        assert list(summary.run) == ["timestamp"]


class TestModels:
    def test_metric_coerces_numpy_values(self):
        metric = Metric(np.float64(0.5), "< 1", np.bool_(True), np.float32(0.25))
        assert type(metric.value) is float
        assert type(metric.passed) is bool
        assert type(metric.ci_low) is float
        assert metric.ci_high is None

    def test_result_passes_only_if_all_metrics_pass(self):
        result = ExperimentResult(
            metrics={"a": Metric(1.0, "", True), "b": Metric(2.0, "", False)}
        )
        assert not result.passed
        assert ExperimentResult().passed


class TestOutputManager:
    """Test artifact writing"""

    def test_artifacts(self):
        chain = FlashChain(FlashEvent.seed(), [FlashEvent(2.0, 0.5, 1.9, 1)])
        result = ExperimentResult(
            metrics={"value": Metric(1.0, "= 1", True)},
            tables={"sweep": pd.DataFrame({"a": [1.0, 2.0], "b": [0.1, 0.2]})},
            chains=[chain],
            reports={"details": {"answer": 42}},
        )
        with tempfile.TemporaryDirectory() as temp_dir:
            config = ExperimentConfig(experiment="flash-chain", output_path=temp_dir, seed=5)
            summary = RunSummary(
                experiment="flash-chain",
                seed=5,
                trials=config.trials,
                config=config.model_dump(),
                passed=True,
                metrics=result.metrics,
            )
            path = Path(OutputManager()(config, summary, result))
            assert path == Path(temp_dir) / "flash-chain_seed5"

            flashes = pd.read_csv(path / "flashes.csv")
            assert list(flashes.columns) == FLASH_COLUMNS
            assert len(flashes) == 2
            assert flashes["delta_T"].iloc[1] == pytest.approx(1.9)
            assert pd.read_csv(path / "sweep.csv")["b"].tolist() == [0.1, 0.2]
            with open(path / "details.json") as f:
                assert json.load(f) == {"answer": 42}
            with open(path / "summary.json") as f:
                summary_data = json.load(f)
            assert summary_data["artifacts"] == sorted(
                ["config.yaml", "flashes.csv", "sweep.csv", "details.json"]
            )
            assert summary_data["metrics"]["value"]["passed"] is True


class TestAcceptanceMetrics:
    """Test pass/fail rules of experiment metrics"""

    def run_with_chains(self, monkeypatch, name, values, **sections):
        monkeypatch.setattr(
            experiments, "_flash_chains", lambda *args: interval_chains(values)
        )
        with tempfile.TemporaryDirectory() as temp_dir:
            config = ExperimentConfig(
                experiment=name, output_path=temp_dir, physics={"tau": 1.0}, **sections
            )
            return EXPERIMENTS[name].runner(config)

    def test_dilation_miss_fails_despite_wide_ci(self, monkeypatch):
        result = self.run_with_chains(
            monkeypatch, "dilation", [0.085, 1.615] * 15, flash={"rapidities": [0.0]}
        )
        metric = result.metrics["dilation_0"]
        assert metric.value == pytest.approx(0.85)
        assert metric.ci_low <= 1.0 <= metric.ci_high
        assert metric.passed is False

    def test_dilation_within_five_percent(self, monkeypatch):
        result = self.run_with_chains(
            monkeypatch, "dilation", [0.97, 1.03] * 15, flash={"rapidities": [0.0]}
        )
        assert result.metrics["dilation_0"].passed is True

    def test_mean_interval_three_standard_errors(self, monkeypatch):
        # offset of about 3.8 standard errors
        result = self.run_with_chains(
            monkeypatch, "flash-chain", [0.12, 2.12] * 500, flash={"boost": 0.0}
        )
        assert result.metrics["mean_delta_T"].passed is False

        result = self.run_with_chains(
            monkeypatch, "flash-chain", [0.05, 2.05] * 500, flash={"boost": 0.0}
        )
        assert result.metrics["mean_delta_T"].passed is True
        assert "3 standard errors" in EXPERIMENTS["grw1d"].tolerances["chain_interval"]

    @pytest.mark.parametrize("flash_time,passed", [(22.0, True), (13.0, False)])
    def test_light_cone_metric(self, monkeypatch, flash_time, passed):
        report = FockReport(
            n_modes=32, n_fermions=4, dimension=1, earliest_object2_flash_time=flash_time
        )
        monkeypatch.setattr(experiments, "macro_failure_report", lambda *args: report)
        with tempfile.TemporaryDirectory() as temp_dir:
            config = ExperimentConfig(experiment="fock-macro", output_path=temp_dir)
            result = EXPERIMENTS["fock-macro"].runner(config)
        assert result.metrics["earliest_object2_flash"].passed is passed
