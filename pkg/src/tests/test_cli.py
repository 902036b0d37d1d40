from phmetric.cli import EXIT_IO, EXIT_OK, EXIT_REGIME, EXIT_VERIFICATION, MetricPipeline, build_parser, main
from phmetric.config import RunConfig
from phmetric.serialization import read_json, read_matrix, vector_to_json, write_json, write_matrix

import os

import numpy as np
import pandas as pd
import pytest

from conftest import MASSES

REPORT_TOL = 1e-8


def lee_config(tmp_path, g: float, n_max: int = 8, name: str = "lee.json") -> str:
  path = str(tmp_path / name)
  write_json(path, {**MASSES, "g": g, "n_max": n_max, "tol": 1e-10})
  return path


def custom_config(tmp_path, H: np.ndarray, S: np.ndarray) -> str:
  write_matrix(str(tmp_path / "H.json"), H)
  write_matrix(str(tmp_path / "S.json"), S)
  path = str(tmp_path / "custom.json")
  write_json(path, {"model": "custom", "h_path": "H.json", "s_path": "S.json"})
  return path


def test_parser():
  args = build_parser().parse_args(["evolve", "--config", "c.json", "--t-max", "5", "--steps", "11"])
  assert args.command == "evolve" and args.t_max == 5. and args.steps == 11
  with pytest.raises(SystemExit):
    build_parser().parse_args(["build", "--config", "c.json", "--method", "perturbative"])


def test_build_real_regime(tmp_path):
  out = str(tmp_path / "out")
  assert main(["build", "--config", lee_config(tmp_path, 0.05), "--out", out]) == EXIT_OK
  for name in ("H.json", "S.json", "basis.json", "spectral_data.json", "q_spectral.json", "q_generator.json",
               "q_closed_form.json", "generator_family.json", "report.json"):
    assert os.path.exists(os.path.join(out, name))
  report = read_json(os.path.join(out, "report.json"))
  assert report["regime"] == "real"
  assert report["not_applicable"] == {}
  assert report["similarity_residual"] <= 1e-12
  assert set(report["methods"]) == {"spectral", "generator", "closed-form"}
  for method in report["methods"].values():
    assert method["positivity_status"] == "positive"
    assert method["equivalent_to_reference"] is True
    assert method["unitarity_drift"] <= REPORT_TOL
  assert report["methods"]["generator"]["convention"] == "raw-weighted generators"
  assert report["methods"]["generator"]["cprime_deviation"] <= REPORT_TOL
  assert report["methods"]["spectral"]["cprime_deviation"] is None
  assert set(report["flags"]) == {"energy_radical", "coupling_sign", "theta_N_Vdagger", "doubly_occupied"}
  assert len(report["sectors"]) == 8
  assert report["s_witness"]["v_minus"][4] == [1., 0.]
  assert len(read_json(os.path.join(out, "basis.json"))) == 36


def test_build_at_critical_coupling(tmp_path, capsys):
  assert main(["build", "--config", lee_config(tmp_path, 0.25), "--out", str(tmp_path)]) == EXIT_REGIME
  assert "ExceptionalPointError" in capsys.readouterr().err


def test_build_broken_regime(tmp_path):
  out = str(tmp_path / "out")
  config = lee_config(tmp_path, 0.2)
  assert main(["build", "--config", config, "--out", out]) == EXIT_OK
  report = read_json(os.path.join(out, "report.json"))
  assert report["regime"] == "broken"
  assert list(report["not_applicable"]) == ["closed-form"]
  assert not os.path.exists(os.path.join(out, "q_closed_form.json"))
  for method in report["methods"].values():
    assert method["positivity_status"] == "not-applicable-complex-spectrum"
    assert method["gram_defect"] <= REPORT_TOL
  assert report["methods"]["spectral"]["pairing_diagonal"] <= REPORT_TOL
  assert report["methods"]["spectral"]["pairing_normalization"] <= REPORT_TOL
  assert report["methods"]["generator"]["cprime_deviation"] <= REPORT_TOL
  assert main(["build", "--config", config, "--out", out, "--method", "closed-form"]) == EXIT_REGIME


def test_build_with_broken_edge_radicand(tmp_path):
  # every sector below the cutoff is real, mu^2 - 4g^2 (n_max + 1) < 0
  out = str(tmp_path / "out")
  assert main(["build", "--config", lee_config(tmp_path, 0.085), "--out", out]) == EXIT_OK
  report = read_json(os.path.join(out, "report.json"))
  assert report["regime"] == "broken"
  assert list(report["not_applicable"]) == ["closed-form"]
  assert "mu^2 - 4g^2 * 9" in report["not_applicable"]["closed-form"]
  assert report["methods"]["spectral"]["positivity_status"] == "positive"


def test_build_custom(tmp_path):
  H = np.array([[1., 0.3j], [0.3j, 2.]])
  config = custom_config(tmp_path, H, np.diag([1., -1.]))
  out = str(tmp_path / "out")
  assert main(["build", "--config", config, "--out", out]) == EXIT_OK
  report = read_json(os.path.join(out, "report.json"))
  assert set(report["methods"]) == {"spectral", "generator"}
  assert "flags" not in report
  assert report["methods"]["generator"]["equivalent_to_reference"] is True


def test_build_rejects_non_pseudo_hermitian(tmp_path, capsys):
  config = custom_config(tmp_path, np.array([[0., 1.], [0., 0.]]), np.eye(2))
  assert main(["build", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_VERIFICATION
  assert "not pseudo-Hermitian" in capsys.readouterr().err


def test_io_errors(tmp_path):
  assert main(["build", "--config", str(tmp_path / "missing.json")]) == EXIT_IO
  broken = tmp_path / "broken.json"
  broken.write_text("{not json")
  assert main(["build", "--config", str(broken)]) == EXIT_IO
  config = custom_config(tmp_path, np.eye(2), np.eye(2))
  os.remove(str(tmp_path / "S.json"))
  assert main(["build", "--config", config, "--out", str(tmp_path / "out")]) == EXIT_IO


def test_invalid_config_is_a_parameter_error(tmp_path):
  path = str(tmp_path / "bad.json")
  write_json(path, {"g": 0.05, "method": "perturbative"})
  assert main(["build", "--config", path]) == EXIT_REGIME
  assert main(["build", "--config", lee_config(tmp_path, 0.05), "--tol", "0.5"]) == EXIT_REGIME


def test_verify(tmp_path):
  out = str(tmp_path / "out")
  config = lee_config(tmp_path, 0.05)
  assert main(["build", "--config", config, "--out", out, "--method", "spectral"]) == EXIT_OK
  q_path = os.path.join(out, "q_spectral.json")
  assert main(["verify", "--config", config, "--q", q_path, "--out", out]) == EXIT_OK
  assert read_json(os.path.join(out, "verify_report.json"))["positivity_status"] == "positive"

  # wrong dimension
  small = lee_config(tmp_path, 0.05, n_max=2, name="small.json")
  assert main(["verify", "--config", small, "--q", q_path, "--out", out]) == EXIT_VERIFICATION


def test_verify_rescaled_metric_in_broken_regime(tmp_path, capsys):
  out = str(tmp_path / "out")
  config = lee_config(tmp_path, 0.2)
  assert main(["build", "--config", config, "--out", out, "--method", "spectral"]) == EXIT_OK
  q_path = os.path.join(out, "q_spectral.json")
  assert main(["verify", "--config", config, "--q", q_path, "--out", out]) == EXIT_OK
  # 5 q keeps the Gram structure but not <psi_kbar|q|psi_k> = 1
  rescaled = str(tmp_path / "rescaled.json")
  write_matrix(rescaled, 5 * read_matrix(q_path))
  assert main(["verify", "--config", config, "--q", rescaled, "--out", out]) == EXIT_VERIFICATION
  assert "pairing_normalization" in capsys.readouterr().err
  report = read_json(os.path.join(out, "verify_report.json"))
  assert report["pairing_normalization"] == pytest.approx(4.)
  assert report["gram_defect"] <= REPORT_TOL


def test_verify_identity(tmp_path, capsys):
  identity = str(tmp_path / "identity.json")
  write_matrix(identity, np.eye(36))
  out = str(tmp_path / "out")
  assert main(["verify", "--config", lee_config(tmp_path, 0.1), "--q", identity, "--out", out]) == EXIT_VERIFICATION
  assert "selfadjointness" in capsys.readouterr().err
  hermitian = lee_config(tmp_path, 0., name="hermitian.json")
  assert main(["verify", "--config", hermitian, "--q", identity, "--out", out]) == EXIT_OK
  assert main(["verify", "--config", hermitian, "--q", str(tmp_path / "none.json"), "--out", out]) == EXIT_IO


def test_evolve_real_regime(tmp_path):
  out = str(tmp_path / "out")
  assert main(["evolve", "--config", lee_config(tmp_path, 0.05), "--out", out, "--t-max", "10", "--steps", "101",
              "--seed", "1"]) == EXIT_OK
  table = pd.read_csv(os.path.join(out, "evolution.csv"))
  assert list(table.columns) == ["t", "dirac_norm", "q_norm"]
  assert len(table) == 101
  assert table.t.iloc[-1] == 10.
  q_norm = table.q_norm.to_numpy()
  assert np.max(np.abs(q_norm - q_norm[0])) <= REPORT_TOL * abs(q_norm[0])
  dirac = table.dirac_norm.to_numpy()
  assert np.max(np.abs(dirac - dirac[0])) >= 1e-6


def test_evolve_hermitian_limit(tmp_path):
  out = str(tmp_path / "out")
  assert main(["evolve", "--config", lee_config(tmp_path, 0.), "--out", out, "--method", "closed-form"]) == EXIT_OK
  table = pd.read_csv(os.path.join(out, "evolution.csv"))
  assert np.allclose(table.dirac_norm, 1., atol=1e-12)
  assert np.allclose(table.q_norm, 1., atol=1e-12)


def test_evolve_broken_regime_reports_without_assertion(tmp_path):
  out = str(tmp_path / "out")
  assert main(["evolve", "--config", lee_config(tmp_path, 0.2), "--out", out]) == EXIT_OK
  assert len(pd.read_csv(os.path.join(out, "evolution.csv"))) == 101


def test_evolve_state_file(tmp_path):
  out = str(tmp_path / "out")
  config = lee_config(tmp_path, 0.05, n_max=3)
  state = np.zeros(16, dtype=complex)
  state[2] = 1.
  state_path = str(tmp_path / "state.json")
  write_json(state_path, vector_to_json(state))
  assert main(["evolve", "--config", config, "--out", out, "--state", state_path, "--steps", "11"]) == EXIT_OK
  assert len(pd.read_csv(os.path.join(out, "evolution.csv"))) == 11
  write_json(state_path, vector_to_json(state[:4]))
  assert main(["evolve", "--config", config, "--out", out, "--state", state_path]) == EXIT_VERIFICATION


def test_pipeline_skips_inapplicable_methods():
  from phmetric.lee_model import LeeParams

  pipeline = MetricPipeline(RunConfig(lee=LeeParams(g=0.2, n_max=3), method="all"))
  pipeline.load_system()
  pipeline.build()
  assert set(pipeline.metrics) == {"spectral", "generator"}
  assert "closed-form" in pipeline.skipped
  assert pipeline.regime == "broken"


def test_determinism(tmp_path):
  config = lee_config(tmp_path, 0.05)
  runs = [str(tmp_path / "a"), str(tmp_path / "b")]
  for out in runs:
    assert main(["build", "--config", config, "--out", out, "--seed", "5"]) == EXIT_OK
    assert main(["evolve", "--config", config, "--out", out, "--seed", "5"]) == EXIT_OK
  names = sorted(os.listdir(runs[0]))
  assert names == sorted(os.listdir(runs[1]))
  assert "evolution.csv" in names
  for name in names:
    with open(os.path.join(runs[0], name), "rb") as a, open(os.path.join(runs[1], name), "rb") as b:
      assert a.read() == b.read(), name
  q = read_matrix(os.path.join(runs[0], "q_spectral.json"))
  assert q.shape == (36, 36)
