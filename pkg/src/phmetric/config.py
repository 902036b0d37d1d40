"""
Run configuration of the command line and the experiments.

A configuration file is either a flat Lee-model parameter set

  {"m_theta": 1.0, "m_V": 1.5, "m_N": 1.0, "g": 0.05, "n_max": 8, "tol": 1e-10}

or a nested object {"model": ..., "lee": {...}, "h_path": ..., ...} with the
fields of RunConfig. Matrix paths are resolved relative to the config file.

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

from phmetric.errors import ConfigurationError, ValidationError
from phmetric.lee_model import LeeParams
from phmetric.serialization import read_json
from phmetric.spectral_metric import DEFAULT_TOL, NORMALIZATIONS

from dataclasses import dataclass, fields, replace
import os
from typing import List, Optional

MODELS = ("lee", "custom")
METHODS = ("spectral", "generator", "closed-form")
METHOD_CHOICES = METHODS + ("all",)


@dataclass(kw_only=True)
class RunConfig:
  # "lee" or "custom" (H and S read from matrix files)
  model: str = "lee"
  # parameters of the Lee model, defaults if omitted
  lee: Optional[LeeParams] = None
  # matrix files of a custom model
  h_path: Optional[str] = None
  s_path: Optional[str] = None
  # one of METHOD_CHOICES
  method: str = "all"
  # numerical tolerance of decompositions and residual gates
  tol: float = DEFAULT_TOL
  # directory receiving all artifacts
  output_dir: str = "results"
  # seed of the random reference states
  seed: int = 0
  # eigenvector normalization of the spectral method
  normalization: str = "dirac"
  # time grid of the drift checks
  t_max: float = 10.
  steps: int = 101
  # tolerance of the report-level assertions (drift, Gram structure, equivalence)
  report_tol: float = 1e-8
  verbose: bool = False

  def __post_init__(self):
    if self.model not in MODELS:
      raise ConfigurationError(f"Unknown model {self.model!r}, expected one of {MODELS}.")
    if self.method not in METHOD_CHOICES:
      raise ConfigurationError(f"Unknown method {self.method!r}, expected one of {METHOD_CHOICES}.")
    if self.normalization not in NORMALIZATIONS:
      raise ConfigurationError(f"Unknown normalization {self.normalization!r}, expected one of {NORMALIZATIONS}.")
    if not 0 < self.tol < 1e-2:
      raise ConfigurationError(f"tol must lie in (0, 1e-2), got {self.tol}.")
    if not 0 < self.report_tol < 1:
      raise ConfigurationError(f"report_tol must lie in (0, 1), got {self.report_tol}.")
    if self.steps < 1 or self.t_max < 0:
      raise ConfigurationError(f"Invalid time grid: t_max={self.t_max}, steps={self.steps}.")
    if self.model == "lee" and self.lee is None:
      self.lee = LeeParams()
    if self.model == "custom":
      if self.method == "closed-form":
        raise ConfigurationError("The closed-form metric exists only for the Lee model.")
      if not self.h_path or not self.s_path:
        raise ConfigurationError("A custom model needs both h_path and s_path.")

  @property
  def methods(self) -> List[str]:
    if self.method != "all":
      return [self.method]
    return list(METHODS) if self.model == "lee" else ["spectral", "generator"]

  @classmethod
  def from_dict(cls, obj: dict, base_dir: str = "") -> "RunConfig":
    if not isinstance(obj, dict):
      raise ConfigurationError("A configuration must be a JSON object.")
    obj = dict(obj)
    names = {f.name for f in fields(cls)}
    try:
      if "lee" in obj:
        obj["lee"] = LeeParams.from_json(obj["lee"])
      elif "m_theta" in obj or "g" in obj:
        obj["lee"] = LeeParams.from_json(obj)
    except (ValidationError, TypeError) as e:
      raise ConfigurationError(f"Invalid Lee parameters: {e}")
    for key in ("h_path", "s_path"):
      if obj.get(key):
        obj[key] = os.path.join(base_dir, obj[key])
    try:
      return cls(**{key: value for key, value in obj.items() if key in names})
    except TypeError as e:
      raise ConfigurationError(f"Invalid configuration value: {e}")

  @classmethod
  def from_json(cls, path: str) -> "RunConfig":
    return cls.from_dict(read_json(path), base_dir=os.path.dirname(os.path.abspath(path)))

  def with_overrides(self, **overrides) -> "RunConfig":
    """Copy with every override that is not None applied."""
    return replace(self, **{key: value for key, value in overrides.items() if value is not None})

  def to_json(self) -> dict:
    obj = {f.name: getattr(self, f.name) for f in fields(self)}
    obj["lee"] = self.lee.to_json() if self.lee is not None else None
    return obj
