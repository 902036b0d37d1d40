"""
Experiment wrapper around the metric pipeline. Handles choosing the result
folder and storing the configuration next to the artifacts.

MIT License

Copyright (c) 2026 The phmetric authors

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""

from phmetric.cli import EXIT_OK, cmd_build, cmd_evolve
from phmetric.config import RunConfig
from phmetric.serialization import read_json, write_json
from phmetric.verify import MetricReport

from dataclasses import dataclass, replace
import os

EXPERIMENTS_BASEPATH = "experiment_results"


@dataclass(kw_only=True)
class MetricExperiment:
  # name of the experiment (determines the folder name)
  name: str
  # configuration of build and evolve; its output_dir is replaced by the experiment folder
  config: RunConfig
  # run the evolution check after the build
  evolve: bool = True

  def _prepare(self) -> RunConfig:
    """Prepare the experiment folder."""
    self.experiment_path = os.path.join(EXPERIMENTS_BASEPATH, self.name)
    if os.path.exists(self.experiment_path):
      print(f"[MetricExperiment] overwriting artifacts in {self.experiment_path}")
    os.makedirs(self.experiment_path, exist_ok=True)
    config = replace(self.config, output_dir=self.experiment_path)
    write_json(os.path.join(self.experiment_path, "run_config.json"), config.to_json())
    return config

  def run(self) -> int:
    """Run the experiment as specified and return the first nonzero exit code."""
    config = self._prepare()
    code = cmd_build(config)
    if code == EXIT_OK and self.evolve:
      code = cmd_evolve(config)
    return code

  def summary(self) -> dict:
    """Per-method failed assertions read back from the stored report."""
    report = read_json(os.path.join(self.experiment_path, "report.json"))
    failures = {
      method: MetricReport(**fields).failures(self.config.tol, self.config.report_tol)
      for method, fields in report["methods"].items()
    }
    return {"regime": report["regime"], "failures": failures, "not_applicable": sorted(report["not_applicable"])}
