"""
Command line driver.

  phmetric build  --config CONFIG [--method NAME] [--out DIR] [--tol X] [--seed N]
  phmetric verify --config CONFIG --q Q.json
  phmetric evolve --config CONFIG [--state STATE.json] [--t-max X] [--steps N]

Exit codes: 0 success, 1 validation or verification failure, 2 regime or
parameter error, 3 I/O error.

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

from phmetric.config import METHOD_CHOICES, RunConfig
from phmetric.errors import ConfigurationError, RegimeError, ValidationError, VerificationError
from phmetric.generator_metric import cprime_consistency, generator_metric, rank_one_generators
from phmetric.lee_model import (CONVENTIONS, LEE_FLAGS, closed_form_q, closed_form_sector, displayed_energies,
                                interior_indices, lee_generator_family, lee_system, regime, seeded_sector_state)
from phmetric.serialization import (complex_to_json, read_json, read_matrix, vector_from_json,
                                    vector_to_json, write_json, write_matrix)
from phmetric.spectral_metric import (NORMALIZATIONS, PseudoHermitianSystem, build_q_spectral, decompose,
                                      normalize_s_form, phase_coefficients, validate_pseudo_hermitian)
from phmetric.verify import MetricReport, metric_report, norm_series, s_indefiniteness_witness, unitarity_check

import argparse
import json
import os
import sys
from typing import Dict, List, Optional

import numpy as np

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_REGIME = 2
EXIT_IO = 3


class MetricPipeline:
  """Builds the system of a run configuration and its metric operators."""

  def __init__(self, config: RunConfig):
    """
    :param config: the run configuration; config.verbose enables logging
    """
    self.config = config
    self.verbose = config.verbose
    self.basis = None
    self.system: Optional[PseudoHermitianSystem] = None
    self.sd = None
    self.regime: Optional[str] = None
    self.q_spectral: Optional[np.ndarray] = None
    self.metrics: Dict[str, np.ndarray] = {}
    self.skipped: Dict[str, str] = {}
    self.reports: Dict[str, MetricReport] = {}
    self.family = None
    self.conditions = None

  def log(self, *msg):
    if self.verbose:
      print("[MetricPipeline]", *msg)

  @property
  def is_lee(self) -> bool:
    return self.config.model == "lee"

  def load_system(self):
    """Set up H and S, run the pseudo-Hermiticity gate and decompose H."""
    config = self.config
    if self.is_lee:
      self.regime = regime(config.lee)
      self.basis, self.system = lee_system(config.lee, config.tol)
      self.log(f"Lee model {config.lee.to_json()} (dim {self.basis.dim}, {self.regime} regime)")
    else:
      H, S = read_matrix(config.h_path), read_matrix(config.s_path)
      self.system = PseudoHermitianSystem(H=H, S=S, tol=config.tol)
      self.log(f"custom model of dimension {self.system.dim}")
    self.log(f"similarity residual {self.system.similarity_residual:.3e}")
    validate_pseudo_hermitian(self.system)
    sd = decompose(self.system)
    if config.normalization == "s_form":
      sd = normalize_s_form(sd, self.system.S)
    self.sd = phase_coefficients(sd, self.system.S)
    self.q_spectral = build_q_spectral(self.system, self.sd)
    if self.regime is None:
      self.regime = "real" if self.sd.is_real_spectrum else "broken"
    self.log(self.sd)

  def build_spectral(self) -> np.ndarray:
    return self.q_spectral

  def build_generator(self) -> np.ndarray:
    if self.is_lee:
      self.family = lee_generator_family(self.config.lee, self.basis, self.config.tol)
    else:
      psi = np.zeros(self.system.dim, dtype=complex)
      psi[0] = 1.
      self.family = rank_one_generators(self.sd, psi, self.config.tol)
    q, self.conditions = generator_metric(self.system.H, self.family, self.sd, verbose=self.verbose)
    self.log(f"{len(self.family.entries)} generators, worst residuals "
             f"{self.conditions.condition_i.max():.3e} / {self.conditions.condition_ii.max():.3e}")
    return q

  def build_closed_form(self) -> np.ndarray:
    if not self.is_lee:
      raise ConfigurationError("The closed-form metric exists only for the Lee model.")
    return closed_form_q(self.config.lee, self.basis)

  def build(self, methods: Optional[List[str]] = None):
    """Construct the requested metrics; with method 'all' inapplicable ones are skipped."""
    builders = {"spectral": self.build_spectral, "generator": self.build_generator, "closed-form": self.build_closed_form}
    for method in methods or self.config.methods:
      try:
        self.metrics[method] = builders[method]()
        self.log(f"built {method} metric")
      except RegimeError as e:
        if self.config.method != "all":
          raise
        self.skipped[method] = str(e)
        self.log(f"skipped {method}: {e}")

  def t_grid(self) -> np.ndarray:
    return np.linspace(0., self.config.t_max, self.config.steps)

  def reference_state(self) -> np.ndarray:
    """Seeded random state inside H'."""
    rng = np.random.default_rng(self.config.seed)
    if self.is_lee:
      return seeded_sector_state(self.basis, rng)
    dim = self.system.dim
    state = self.sd.spect_projector() @ (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
    return state / np.linalg.norm(state)

  def report(self, q: np.ndarray, convention: str = "dirac") -> MetricReport:
    interior = interior_indices(self.sd, self.basis) if self.is_lee else None
    return metric_report(q, self.system, self.sd, reference=self.q_spectral, state=self.reference_state(),
                         t_grid=self.t_grid(), interior=interior, report_tol=self.config.report_tol,
                         convention=convention, verbose=self.verbose)

  def report_all(self):
    for method, q in self.metrics.items():
      convention = "raw-weighted generators" if method == "generator" and self.is_lee else self.config.normalization
      self.reports[method] = self.report(q, convention)
      if method == "generator":
        self.reports[method].cprime_deviation = cprime_consistency(self.family, self.system.S, self.sd)

  def summary(self) -> dict:
    config = self.config.to_json()
    for key in ("output_dir", "verbose"):
      del config[key]
    summary = {"config": config, "regime": self.regime, "similarity_residual": self.system.similarity_residual}
    if self.is_lee:
      params = self.config.lee
      summary["conventions"] = CONVENTIONS
      summary["flags"] = LEE_FLAGS
      summary["sectors"] = []
      for n in range(params.n_max):
        solution = closed_form_sector(params, n)
        summary["sectors"].append({
          "n": n,
          "radicand": solution.radicand,
          "E_minus": complex_to_json(solution.E_minus),
          "E_plus": complex_to_json(solution.E_plus),
          "displayed_E_minus": complex_to_json(displayed_energies(params, n)[0]),
          "displayed_E_plus": complex_to_json(displayed_energies(params, n)[1]),
        })
    try:
      v_plus, v_minus = s_indefiniteness_witness(self.system.S, self.basis)
      summary["s_witness"] = {"v_plus": vector_to_json(v_plus), "v_minus": vector_to_json(v_minus)}
    except ValidationError as e:
      summary["s_witness"] = str(e)
    summary["methods"] = {method: report.to_json() for method, report in self.reports.items()}
    summary["not_applicable"] = self.skipped
    return summary

  def write_artifacts(self):
    out = self.config.output_dir
    write_matrix(os.path.join(out, "H.json"), self.system.H)
    write_matrix(os.path.join(out, "S.json"), self.system.S)
    if self.basis is not None:
      write_json(os.path.join(out, "basis.json"), self.basis.to_json())
    write_json(os.path.join(out, "spectral_data.json"), self.sd.to_json())
    for method, q in self.metrics.items():
      write_matrix(os.path.join(out, f"q_{method.replace('-', '_')}.json"), q)
    if self.family is not None:
      write_json(os.path.join(out, "generator_family.json"), self.family.to_json())
    write_json(os.path.join(out, "report.json"), self.summary())
    self.log(f"artifacts written to {out}")


def cmd_build(config: RunConfig) -> int:
  pipeline = MetricPipeline(config)
  pipeline.load_system()
  pipeline.build()
  pipeline.report_all()
  pipeline.write_artifacts()
  return EXIT_OK


def cmd_verify(config: RunConfig, q_path: str) -> int:
  q = read_matrix(q_path)
  pipeline = MetricPipeline(config)
  pipeline.load_system()
  if q.shape != pipeline.system.H.shape:
    raise ValidationError(f"q has dimension {q.shape[0]}, the model has dimension {pipeline.system.dim}.")
  report = pipeline.report(q)
  write_json(os.path.join(config.output_dir, "verify_report.json"), report.to_json())
  failed = report.failures(config.tol, config.report_tol)
  if failed:
    raise VerificationError(f"failed: {', '.join(failed)} (self-adjointness residual {report.selfadjointness_residual:.3e}, "
                            f"positivity {report.positivity_status})")
  return EXIT_OK


def cmd_evolve(config: RunConfig, state_path: Optional[str] = None) -> int:
  pipeline = MetricPipeline(config)
  pipeline.load_system()
  method = "spectral" if config.method == "all" else config.method
  pipeline.build([method])
  q = pipeline.metrics[method]
  state = vector_from_json(read_json(state_path)) if state_path else pipeline.reference_state()
  if state.shape != (pipeline.system.dim,):
    raise ValidationError(f"State has length {state.shape[0]}, the model has dimension {pipeline.system.dim}.")
  table = norm_series(pipeline.sd, q, state, pipeline.t_grid(), verbose=config.verbose)
  os.makedirs(config.output_dir, exist_ok=True)
  table.to_csv(os.path.join(config.output_dir, "evolution.csv"), index=False, float_format="%.17g")
  drift = unitarity_check(pipeline.sd, q, state, pipeline.t_grid())
  if not pipeline.sd.is_real_spectrum:
    pipeline.log(f"complex spectrum, q-form drift {drift:.3e} reported without assertion")
    return EXIT_OK
  if drift > config.report_tol:
    raise VerificationError(f"q-norm drift {drift:.3e} exceeds {config.report_tol:.1e}")
  return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
  parser = argparse.ArgumentParser(prog="phmetric", description="Metric operators for pseudo-Hermitian Hamiltonians.")
  commands = parser.add_subparsers(dest="command", required=True)

  def add_common(command):
    command.add_argument("--config", required=True, help="JSON run configuration")
    command.add_argument("--method", choices=METHOD_CHOICES, default=None)
    command.add_argument("--out", default=None, help="output directory")
    command.add_argument("--tol", type=float, default=None)
    command.add_argument("--seed", type=int, default=None)
    command.add_argument("--normalization", choices=NORMALIZATIONS, default=None)
    command.add_argument("--verbose", action="store_true")

  add_common(commands.add_parser("build", help="construct metrics and write artifacts"))
  verify = commands.add_parser("verify", help="run the verification suite on a metric file")
  add_common(verify)
  verify.add_argument("--q", required=True, help="metric operator in the matrix JSON format")
  evolve = commands.add_parser("evolve", help="norm drift under exp(-iHt)")
  add_common(evolve)
  evolve.add_argument("--state", default=None, help="initial state as JSON [[re, im], ...]")
  evolve.add_argument("--t-max", type=float, default=None)
  evolve.add_argument("--steps", type=int, default=None)
  return parser


def main(argv: Optional[List[str]] = None) -> int:
  args = build_parser().parse_args(argv)
  try:
    config = RunConfig.from_json(args.config).with_overrides(
      method=args.method, output_dir=args.out, tol=args.tol, seed=args.seed, normalization=args.normalization,
      verbose=args.verbose or None, t_max=getattr(args, "t_max", None), steps=getattr(args, "steps", None),
    )
    if args.command == "build":
      return cmd_build(config)
    if args.command == "verify":
      return cmd_verify(config, args.q)
    return cmd_evolve(config, args.state)
  except (RegimeError, ConfigurationError) as e:
    print(f"{type(e).__name__}: {e}", file=sys.stderr)
    return EXIT_REGIME
  except ValidationError as e:
    print(f"{type(e).__name__}: {e}", file=sys.stderr)
    return EXIT_VERIFICATION
  except (OSError, json.JSONDecodeError, UnicodeDecodeError) as e:
    print(f"I/O error: {e}", file=sys.stderr)
    return EXIT_IO


if __name__ == "__main__":
  sys.exit(main())
