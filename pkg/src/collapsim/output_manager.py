# src/collapsim/output_manager.py

import json
from dataclasses import asdict
from pathlib import Path

import yaml

from collapsim.flash import chains_to_frame
from collapsim.models import ExperimentResult, RunSummary

FLOAT_FORMAT = "%.17g"


class OutputManager:
    def __call__(self, config, summary: RunSummary, result: ExperimentResult):
        """Main entry point to save a run"""

        self.config = config
        self.summary = summary
        self.result = result
        self.output_path = self._get_path()
        self.output_path.mkdir(parents=True, exist_ok=True)

        # Save config
        self._save_config()

        # Save flashes and per-experiment tables
        self._save_tables()

        # Save summary last so it lists every artifact
        self._save_summary()

        return str(self.output_path)

    def _get_path(self) -> Path:
        path = Path(self.config.output_path)
        experiment_name = self.config.experiment.replace(" ", "_").lower()
        return path / f"{experiment_name}_seed{self.config.seed}"

    def _save_config(self) -> None:
        """Save the configuration used for the run"""
        config_path = self.output_path / "config.yaml"
        with open(config_path, "w") as f:
            yaml.dump(self.config.model_dump(), f, default_flow_style=False)

    def _save_tables(self) -> None:
        self.artifacts = ["config.yaml"]
        if self.result.chains:
            frame = chains_to_frame(self.result.chains)
            frame.to_csv(
                self.output_path / "flashes.csv", index=False, float_format=FLOAT_FORMAT
            )
            self.artifacts.append("flashes.csv")
        for name, table in self.result.tables.items():
            table.to_csv(
                self.output_path / f"{name}.csv", index=False, float_format=FLOAT_FORMAT
            )
            self.artifacts.append(f"{name}.csv")
        for name, report in self.result.reports.items():
            with open(self.output_path / f"{name}.json", "w") as f:
                json.dump(report, f, indent=4)
            self.artifacts.append(f"{name}.json")

    def _save_summary(self) -> None:
        data = asdict(self.summary)
        data["artifacts"] = sorted(self.artifacts)
        with open(self.output_path / "summary.json", "w") as f:
            json.dump(data, f, indent=4, sort_keys=True)
