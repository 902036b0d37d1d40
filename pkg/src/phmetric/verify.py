"""
Diagnostics for constructed metric operators: positivity on H', self-adjointness
of H under q, norm conservation under exp(-iHt), indefiniteness of S,
involution checks and equivalence of metrics up to positive per-level scalars.

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

from phmetric.errors import ValidationError
from phmetric.fock_algebra import FockBasis
from phmetric.spectral_metric import PseudoHermitianSystem, SpectralData, function_of_H

from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.linalg
from tqdm import tqdm

POSITIVE = "positive"
INDEFINITE = "indefinite"
DEGENERATE = "degenerate"
COMPLEX_SPECTRUM = "not-applicable-complex-spectrum"

# conventions in which <psi_kbar|q|psi_k> = 1 on spect(H)
NORMALIZED_CONVENTIONS = ("dirac", "s_form")

# a state counts as inside H' if its component outside is below this relative size
HPRIME_TOL = 1e-8


@dataclass
class MetricReport:
  """Diagnostics of one metric operator over a fixed decomposition."""
  hermiticity_residual: float
  min_q_eigenvalue_on_Hprime: float
  kernel_dimension: int
  selfadjointness_residual: float
  positivity_status: str
  # largest relative off-pairing entry of the q-Gram matrix of eigenvectors
  gram_defect: float
  unitarity_drift: Optional[float] = None
  dirac_drift: Optional[float] = None
  sector_scalars: Optional[List[float]] = None
  equivalent_to_reference: Optional[bool] = None
  involution_residual: Optional[float] = None
  # max |t_E - 1| of the generator family the metric was built from
  cprime_deviation: Optional[float] = None
  # complex spectrum only, see pairing_gram_check
  pairing_diagonal: Optional[float] = None
  pairing_normalization: Optional[float] = None
  convention: str = "dirac"

  def failures(self, tol: float, report_tol: float) -> List[str]:
    """Names of the failed assertions; the involution residual is diagnostic only."""
    failed = []
    if self.selfadjointness_residual > 10 * tol:
      failed.append("selfadjointness")
    if self.gram_defect > report_tol:
      failed.append("gram_structure")
    if self.cprime_deviation is not None and self.cprime_deviation > report_tol:
      failed.append("cprime")
    if self.positivity_status == COMPLEX_SPECTRUM:
      # raw generator weights rescale the Gram matrix, gram_defect covers them
      if self.convention in NORMALIZED_CONVENTIONS:
        if self.pairing_diagonal is not None and self.pairing_diagonal > report_tol:
          failed.append("pairing_structure")
        if self.pairing_normalization is not None and self.pairing_normalization > report_tol:
          failed.append("pairing_normalization")
      return failed
    if self.hermiticity_residual > 10 * tol:
      failed.append("hermiticity")
    if self.positivity_status != POSITIVE:
      failed.append("positivity")
    if self.unitarity_drift is not None and self.unitarity_drift > report_tol:
      failed.append("unitarity")
    if self.equivalent_to_reference is False:
      failed.append("equivalence")
    return failed

  def to_json(self) -> dict:
    return asdict(self)


def hermiticity_residual(q: np.ndarray) -> float:
  norm = np.linalg.norm(q)
  return float(np.linalg.norm(q - q.conj().T) / norm) if norm > 0 else 0.


def selfadjointness_residual(q: np.ndarray, H: np.ndarray) -> float:
  """||q H - H^dagger q|| / (||q|| ||H||)."""
  scale = np.linalg.norm(q) * np.linalg.norm(H)
  if scale == 0:
    return 0.
  return float(np.linalg.norm(q @ H - H.conj().T @ q) / scale)


def positivity_report(q: np.ndarray, sd: SpectralData, tol: Optional[float] = None) -> dict:
  """Eigenvalues of the Hermitian part of q restricted to H' and the resulting status."""
  tol = sd.tol if tol is None else tol
  Q = sd.hprime_basis()
  if Q.shape[1] == 0:
    return {"min_q_eigenvalue_on_Hprime": 0., "kernel_dimension": 0, "positivity_status": DEGENERATE,
            "hermiticity_residual": hermiticity_residual(q)}
  q_hermitian = 0.5 * (q + q.conj().T)
  w = scipy.linalg.eigvalsh(Q.conj().T @ q_hermitian @ Q)
  kernel = int(np.sum(np.abs(w) <= tol * max(1., np.abs(w).max())))
  if not sd.is_real_spectrum:
    status = COMPLEX_SPECTRUM
  elif w[0] > tol:
    status = POSITIVE
  elif w[0] < -tol:
    status = INDEFINITE
  else:
    status = DEGENERATE
  return {"min_q_eigenvalue_on_Hprime": float(w[0]), "kernel_dimension": kernel, "positivity_status": status,
          "hermiticity_residual": hermiticity_residual(q)}


def s_indefiniteness_witness(S: np.ndarray, basis: Optional[FockBasis] = None) -> Tuple[np.ndarray, np.ndarray]:
  """
  Vectors v_plus, v_minus with <v|S|v> > 0 and < 0.

  For diagonal S coordinate vectors are returned; with a Fock basis the state
  with the fewest quanta wins, bosonic excitations before fermionic ones.
  """
  S = np.asarray(S, dtype=complex)
  if np.linalg.norm(S - S.conj().T) > 1e-12 * max(1., np.linalg.norm(S)):
    raise ValidationError("S must be self-adjoint.")
  dim = S.shape[0]
  d = np.diag(S).real
  if np.allclose(S, np.diag(np.diag(S)), rtol=0, atol=0):
    order = list(range(dim))
    if basis is not None:
      order.sort(key=lambda i: (sum(basis.states[i]), basis.states[i][1] + basis.states[i][2], i))
    plus = [i for i in order if d[i] > 0]
    minus = [i for i in order if d[i] < 0]
    if not plus or not minus:
      raise ValidationError("S is semidefinite, no indefiniteness witness exists.")
    return np.eye(dim, dtype=complex)[:, plus[0]], np.eye(dim, dtype=complex)[:, minus[0]]
  w, U = scipy.linalg.eigh(S)
  if w[0] >= 0 or w[-1] <= 0:
    raise ValidationError("S is semidefinite, no indefiniteness witness exists.")
  return U[:, -1], U[:, 0]


def _norm_trajectory(sd: SpectralData, q: np.ndarray, state: np.ndarray, t_grid: Sequence[float],
                     verbose: bool = False) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
  state = np.asarray(state, dtype=complex).ravel()
  t_grid = np.asarray(t_grid, dtype=float)
  if not np.all(np.isfinite(t_grid)):
    raise ValidationError("Time grid must be finite.")
  projected = sd.spect_projector() @ state
  norm = np.linalg.norm(state)
  if np.linalg.norm(projected) <= sd.tol * norm:
    raise ValidationError("State is annihilated by the projector onto H'.")
  if np.linalg.norm(state - projected) > HPRIME_TOL * norm:
    raise ValidationError("State has components outside H'.")
  progress_bar = tqdm if verbose else lambda x: x
  dirac = np.empty(len(t_grid))
  q_form = np.empty(len(t_grid), dtype=complex)
  for i, t in enumerate(progress_bar(t_grid)):
    evolved = function_of_H(sd, lambda E: np.exp(-1j * t * E)) @ state
    dirac[i] = np.vdot(evolved, evolved).real
    q_form[i] = np.vdot(evolved, q @ evolved)
  return t_grid, dirac, q_form


def _relative_drift(series: np.ndarray) -> float:
  reference = np.abs(series[0])
  deviation = np.max(np.abs(series - series[0]))
  return float(deviation / reference) if reference > 0 else float(deviation)


def norm_series(sd: SpectralData, q: np.ndarray, state: np.ndarray, t_grid: Sequence[float],
                verbose: bool = False) -> pd.DataFrame:
  """Dirac norm and q-norm (real part) of exp(-iHt)|state> along the time grid."""
  t, dirac, q_form = _norm_trajectory(sd, q, state, t_grid, verbose)
  return pd.DataFrame({"t": t, "dirac_norm": dirac, "q_norm": q_form.real})


def unitarity_check(sd: SpectralData, q: np.ndarray, state: np.ndarray, t_grid: Sequence[float],
                    verbose: bool = False) -> float:
  """max_t |<psi(t)|q|psi(t)> - <psi(0)|q|psi(0)>| / |<psi(0)|q|psi(0)>|."""
  _, _, q_form = _norm_trajectory(sd, q, state, t_grid, verbose)
  return _relative_drift(q_form)


def dirac_drift(sd: SpectralData, state: np.ndarray, t_grid: Sequence[float]) -> float:
  _, dirac, _ = _norm_trajectory(sd, np.zeros((len(state), len(state))), state, t_grid)
  return _relative_drift(dirac)


def q_gram(q: np.ndarray, sd: SpectralData) -> np.ndarray:
  return sd.right_vectors.conj().T @ q @ sd.right_vectors


def gram_defect(q: np.ndarray, sd: SpectralData, indices: Optional[Sequence[int]] = None) -> float:
  """Largest off-pairing entry of the q-Gram matrix relative to its largest entry."""
  K = np.asarray(sd.spect_indices() if indices is None else indices, dtype=int)
  if len(K) == 0:
    return 0.
  G = q_gram(q, sd)[np.ix_(K, K)]
  scale = np.abs(G).max()
  if scale == 0:
    return 0.
  local = {k: i for i, k in enumerate(K)}
  mask = np.ones(G.shape, dtype=bool)
  for col, k in enumerate(K):
    partner = local.get(int(sd.pairing[k]))
    if partner is not None:
      mask[partner, col] = False
  return float(np.abs(G[mask]).max(initial=0.) / scale)


def pairing_gram_check(q: np.ndarray, sd: SpectralData) -> Tuple[float, float]:
  """
  (max |<psi_k|q|psi_k>| over complex levels, max |<psi_kbar|q|psi_k> - 1| over spect(H)).
  """
  G = q_gram(q, sd)
  K = sd.spect_indices()
  complex_levels = [k for k in K if not sd.is_real(k)]
  diagonal = max((abs(G[k, k]) for k in complex_levels), default=0.)
  paired = max((abs(G[sd.pairing[k], k] - 1.) for k in K), default=0.)
  return float(diagonal), float(paired)


def equivalence_up_to_positive_diagonal(q1: np.ndarray, q2: np.ndarray, sd: SpectralData, tol: float = 1e-8,
                                        indices: Optional[Sequence[int]] = None) -> Tuple[bool, List[float]]:
  """
  Whether q2 = q1 D with D diagonal and positive in the eigenbasis.

  Both q-Gram matrices must vanish off the pairing and the per-level ratios
  d_k = <psi_kbar|q2|psi_k> / <psi_kbar|q1|psi_k> must be real and positive.
  Returns the flag and the ratios d_k in eigenvector order.
  """
  K = np.asarray(sd.spect_indices() if indices is None else indices, dtype=int)
  if any(int(sd.pairing[k]) not in set(K.tolist()) for k in K):
    raise ValidationError("The selected eigenvectors are not closed under the conjugation pairing.")
  G1, G2 = q_gram(q1, sd), q_gram(q2, sd)
  paired1 = G1[sd.pairing[K], K]
  paired2 = G2[sd.pairing[K], K]
  supported = np.abs(paired1) > tol * max(1., np.abs(paired1).max(initial=0.))
  d = np.divide(paired2, paired1, out=np.zeros(len(K), dtype=complex), where=supported)
  positive = supported & (d.real > tol) & (np.abs(d.imag) <= tol * np.abs(d))
  diagonal = gram_defect(q1, sd, K) <= tol and gram_defect(q2, sd, K) <= tol
  return bool(diagonal and positive.all()), [float(x) for x in d.real]


def involution_check(C: np.ndarray, sd: SpectralData, indices: Optional[Sequence[int]] = None) -> float:
  """max over the selected eigenvectors of ||(C^2 - 1) v|| / ||v||."""
  K = np.arange(sd.size) if indices is None else np.asarray(indices, dtype=int)
  if len(K) == 0:
    return 0.
  V = sd.right_vectors[:, K]
  defect = C @ (C @ V) - V
  return float(np.max(np.linalg.norm(defect, axis=0) / np.linalg.norm(V, axis=0)))


def metric_report(q: np.ndarray, system: PseudoHermitianSystem, sd: SpectralData, reference: Optional[np.ndarray] = None,
                  state: Optional[np.ndarray] = None, t_grid: Optional[Sequence[float]] = None,
                  interior: Optional[Sequence[int]] = None, report_tol: float = 1e-8, convention: str = "dirac",
                  verbose: bool = False) -> MetricReport:
  """
  Full diagnostics of q.

  :param reference: metric the scalars and the equivalence flag are taken against (real spectrum only)
  :param state: initial state for the drift checks, together with t_grid
  :param interior: eigenvector indices on which C = q S is checked
  """
  q = np.asarray(q, dtype=complex)
  if q.shape != system.H.shape:
    raise ValidationError(f"q has shape {q.shape}, expected {system.H.shape}.")
  positivity = positivity_report(q, sd, system.tol)
  report = MetricReport(
    selfadjointness_residual=selfadjointness_residual(q, system.H),
    gram_defect=gram_defect(q, sd),
    convention=convention,
    **positivity,
  )
  real = sd.is_real_spectrum
  if reference is not None and real:
    report.equivalent_to_reference, report.sector_scalars = equivalence_up_to_positive_diagonal(reference, q, sd, report_tol)
  if not real:
    report.pairing_diagonal, report.pairing_normalization = pairing_gram_check(q, sd)
  if state is not None and t_grid is not None:
    report.unitarity_drift = unitarity_check(sd, q, state, t_grid, verbose)
    report.dirac_drift = dirac_drift(sd, state, t_grid)
  if interior is not None:
    report.involution_residual = involution_check(q @ system.S, sd, interior)
  return report
