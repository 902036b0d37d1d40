"""
Metric operator from a family of eigenvector generators sigma_E.

A generator satisfies H sigma_E = E sigma_E + sigma_E k_E and produces the
eigenvector psi_E = sigma_E |psi> from a reference vector with k_E|psi> = 0.
Given a reference |phi> with k_E^dagger |phi> = 0, the vector
sigma_Ebar^{dagger -1}|phi> is an eigenvector of H^dagger, and q is fixed by

  q sigma_E |psi> := w_E sigma_Ebar^{dagger -1} |phi>

on every generated eigenvector. w_E > 0 is the per-level freedom of q.
The operators k_E are never formed; only their consequences on the
reference vectors are checked.

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

from phmetric.errors import GeneratorError, ValidationError
from phmetric.serialization import complex_to_json, matrix_to_json, vector_to_json
from phmetric.spectral_metric import DEFAULT_TOL, SpectralData

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.linalg
from tqdm import tqdm


@dataclass(frozen=True, eq=False)
class GeneratorEntry:
  """Generator of the eigenvector with energy E."""
  E: complex
  sigma: np.ndarray
  # positive scale of the level in q
  weight: float = 1.
  label: str = ""

  def __post_init__(self):
    sigma = np.array(self.sigma, dtype=complex)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
      raise ValidationError(f"Generator {self.label!r} must be square, got shape {sigma.shape}.")
    if not np.all(np.isfinite(sigma)) or not np.isfinite(complex(self.E)):
      raise ValidationError(f"Generator {self.label!r} has non-finite entries.")
    if not (np.isfinite(self.weight) and self.weight > 0):
      raise ValidationError(f"Generator {self.label!r} needs a positive weight, got {self.weight}.")
    sigma.setflags(write=False)
    object.__setattr__(self, "sigma", sigma)
    object.__setattr__(self, "E", complex(self.E))
    object.__setattr__(self, "weight", float(self.weight))


@dataclass(frozen=True, eq=False)
class GeneratorFamily:
  """Generators for all levels plus the reference vectors |psi>, |phi> and q0 with q0|psi> = |phi>."""
  entries: Tuple[GeneratorEntry, ...]
  psi_ref: np.ndarray
  phi_ref: np.ndarray
  q0: np.ndarray
  tol: float = DEFAULT_TOL

  def __post_init__(self):
    psi = np.array(self.psi_ref, dtype=complex).ravel()
    phi = np.array(self.phi_ref, dtype=complex).ravel()
    q0 = np.array(self.q0, dtype=complex)
    dim = psi.shape[0]
    if phi.shape != (dim,) or q0.shape != (dim, dim):
      raise ValidationError(f"Reference vectors and q0 disagree in dimension: {psi.shape}, {phi.shape}, {q0.shape}.")
    for entry in self.entries:
      if entry.sigma.shape != (dim, dim):
        raise ValidationError(f"Generator {entry.label!r} has shape {entry.sigma.shape}, expected {(dim, dim)}.")
    for a in (psi, phi, q0):
      a.setflags(write=False)
    object.__setattr__(self, "entries", tuple(self.entries))
    object.__setattr__(self, "psi_ref", psi)
    object.__setattr__(self, "phi_ref", phi)
    object.__setattr__(self, "q0", q0)

  @classmethod
  def create(cls, entries: Sequence[GeneratorEntry], psi_ref: np.ndarray, phi_ref: Optional[np.ndarray] = None,
             q0: Optional[np.ndarray] = None, tol: float = DEFAULT_TOL) -> "GeneratorFamily":
    """
    Build a family normalized to <psi|phi> = 1.

    :param phi_ref: defaults to psi_ref
    :param q0: defaults to the identity if phi = psi, else |phi><psi|/<psi|psi>
    """
    psi = np.array(psi_ref, dtype=complex).ravel()
    phi = psi.copy() if phi_ref is None else np.array(phi_ref, dtype=complex).ravel()
    overlap = np.vdot(psi, phi)
    if np.abs(overlap) <= tol * np.linalg.norm(psi) * np.linalg.norm(phi):
      raise GeneratorError("Reference vectors are orthogonal, <psi|phi> = 0.")
    if q0 is None:
      if np.allclose(phi, psi):
        q0 = np.eye(len(psi), dtype=complex)
      else:
        q0 = np.outer(phi, psi.conj()) / np.vdot(psi, psi)
    return cls(entries=tuple(entries), psi_ref=psi, phi_ref=phi / overlap, q0=np.asarray(q0) / overlap, tol=tol)

  @property
  def overlap(self) -> complex:
    return complex(np.vdot(self.psi_ref, self.phi_ref))

  def generated(self, i: int) -> np.ndarray:
    """psi_E = sigma_E |psi> of entry i."""
    return self.entries[i].sigma @ self.psi_ref

  def validate(self):
    if np.abs(self.overlap) <= self.tol:
      raise GeneratorError("Reference vectors are orthogonal, <psi|phi> = 0.")
    mismatch = np.linalg.norm(self.q0 @ self.psi_ref - self.phi_ref)
    if mismatch > 10 * self.tol * max(1., np.linalg.norm(self.phi_ref)):
      raise GeneratorError(f"q0 does not map psi onto phi (mismatch {mismatch:.3e}).")
    for i, entry in enumerate(self.entries):
      if np.linalg.norm(self.generated(i)) <= self.tol * np.linalg.norm(self.psi_ref):
        raise GeneratorError(f"Generator {entry.label or i!r} annihilates the reference vector.")

  def to_json(self) -> dict:
    return {
      "entries": [
        {"E": complex_to_json(e.E), "label": e.label, "weight": e.weight, "sigma": matrix_to_json(e.sigma)}
        for e in self.entries
      ],
      "psi_ref": vector_to_json(self.psi_ref),
      "phi_ref": vector_to_json(self.phi_ref),
      "q0": matrix_to_json(self.q0),
      "tol": self.tol,
    }

  def __repr__(self):
    return f"GeneratorFamily({len(self.entries)} entries, dim={len(self.psi_ref)})"


def _check_dims(H: np.ndarray, *vectors: np.ndarray):
  for v in vectors:
    if v.shape[0] != H.shape[0]:
      raise ValidationError(f"Dimension mismatch: H is {H.shape}, vector has length {v.shape[0]}.")


def check_condition_i(H: np.ndarray, entry: GeneratorEntry, psi_ref: np.ndarray) -> float:
  """||(H - E) sigma_E psi|| / ||sigma_E psi||."""
  psi_ref = np.asarray(psi_ref).ravel()
  _check_dims(H, psi_ref, entry.sigma)
  psi_E = entry.sigma @ psi_ref
  norm = np.linalg.norm(psi_E)
  if norm == 0:
    raise GeneratorError(f"sigma_E annihilates the reference vector for E = {entry.E:.6g}.")
  return float(np.linalg.norm(H @ psi_E - entry.E * psi_E) / norm)


def _adjoint_inverse(sigma: np.ndarray, phi: np.ndarray, tol: float,
                     projector: Optional[np.ndarray]) -> Tuple[np.ndarray, float]:
  """Solution y of sigma^dagger y = phi and the scaled residual of that equation for the returned y."""
  sigma = np.asarray(sigma)
  phi = np.asarray(phi).ravel()
  if sigma.shape[0] != phi.shape[0]:
    raise ValidationError(f"Dimension mismatch: sigma is {sigma.shape}, phi has length {phi.shape[0]}.")
  y, _, _, _ = scipy.linalg.lstsq(sigma.conj().T, phi)
  residual = np.linalg.norm(sigma.conj().T @ y - phi) / np.linalg.norm(phi)
  if residual > tol:
    raise GeneratorError(f"phi is not in the range of sigma^dagger (relative residual {residual:.3e}).")
  if projector is None:
    return y, float(residual)
  y = np.asarray(projector).conj().T @ y
  scale = np.linalg.norm(phi) + np.linalg.norm(sigma) * np.linalg.norm(y)
  return y, float(np.linalg.norm(sigma.conj().T @ y - phi) / scale)


def adjoint_inverse_apply(sigma: np.ndarray, phi: np.ndarray, tol: float = DEFAULT_TOL,
                          projector: Optional[np.ndarray] = None) -> np.ndarray:
  """
  sigma^{dagger -1}|phi> as the minimum-norm least-squares solution of
  sigma^dagger y = phi, gated on its relative residual.

  :param projector: level projector P_E; if given, P_E^dagger y is returned,
    the adjoint inverse restricted to the image of P_E. That vector does not
    depend on which solution of sigma^dagger y = phi is used, but it solves
    the equation only if condition (ii) holds, which is gated as well.
  """
  y, residual = _adjoint_inverse(sigma, phi, tol, projector)
  if residual > tol:
    raise GeneratorError(f"The projected adjoint inverse no longer solves sigma^dagger y = phi (residual {residual:.3e}).")
  return y


def check_condition_ii(H: np.ndarray, entry: GeneratorEntry, phi_ref: np.ndarray, tol: float = DEFAULT_TOL,
                       projector: Optional[np.ndarray] = None, psi_ref: Optional[np.ndarray] = None) -> float:
  """
  ||(H^dagger - conj(E)) y|| / ||y|| with y = sigma_E^{dagger -1}|phi>.

  With a projector, y = P_E^dagger y is an eigenvector of H^dagger by
  construction; the residual is then the larger of the eigen-residual and the
  scaled residual of sigma^dagger y = phi, which vanishes iff some eigenvector
  of H^dagger solves the equation.
  """
  phi_ref = np.asarray(phi_ref).ravel()
  _check_dims(H, phi_ref)
  if psi_ref is not None and np.abs(np.vdot(psi_ref, phi_ref)) <= tol:
    raise GeneratorError("Reference vectors are orthogonal, <psi|phi> = 0.")
  y, solve_residual = _adjoint_inverse(entry.sigma, phi_ref, tol, projector)
  norm = np.linalg.norm(y)
  if norm <= tol * np.linalg.norm(phi_ref):
    raise GeneratorError(f"sigma_E^(dagger -1)|phi> vanishes for E = {entry.E:.6g}.")
  eigen_residual = float(np.linalg.norm(H.conj().T @ y - np.conj(entry.E) * y) / norm)
  if projector is None:
    return eigen_residual
  return max(eigen_residual, solve_residual)


def match_entries(family: GeneratorFamily, sd: SpectralData) -> Dict[int, List[int]]:
  """
  Assign every generator to the eigenvalue cluster of its energy.

  Returns cluster index -> entry indices for all clusters inside spect(H).
  Entries at levels outside spect(H) are dropped.
  """
  groups: Dict[int, List[int]] = {}
  for i, entry in enumerate(family.entries):
    distance = np.abs(sd.eigenvalues - entry.E)
    k = int(np.argmin(distance))
    cluster = sd.cluster_of(k)
    if distance[k] > sd.radius * (1 + len(sd.clusters[cluster])):
      raise GeneratorError(f"Generator {entry.label or i!r} has energy {entry.E:.10g}, which is not an eigenvalue of H.")
    groups.setdefault(cluster, []).append(i)
  supplied = {}
  for a, K in enumerate(sd.clusters):
    spect = sd.in_spect[list(K)]
    if not spect.any():
      continue
    if not spect.all():
      raise GeneratorError(f"Level {sd.eigenvalues[K[0]]:.6g} is only partly inside spect(H).")
    entries = groups.get(a, [])
    if len(entries) != len(K):
      raise GeneratorError(
        f"Level {sd.eigenvalues[K[0]]:.10g} of multiplicity {len(K)} has {len(entries)} generators; one per state is required."
      )
    supplied[a] = entries
  return supplied


def _conjugate_cluster(sd: SpectralData, cluster: int) -> int:
  K = sd.clusters[cluster]
  if sd.pairing[K[0]] != K[0] and len(K) > 1:
    raise GeneratorError("Degenerate complex levels are not supported by the generator construction.")
  return sd.cluster_of(sd.pairing[K[0]])


def cprime_factors(family: GeneratorFamily, S: np.ndarray, sd: SpectralData) -> np.ndarray:
  """
  t_E = c'_E <psi_Ebar|S|psi_E> for every generator, where c'_E is defined by
  sigma_Ebar^{dagger -1}|phi> = c'_E S|psi_E>. All t_E equal <psi|phi>.
  """
  groups = match_entries(family, sd)
  t = np.full(len(family.entries), np.nan, dtype=complex)
  for a, idx in groups.items():
    b = _conjugate_cluster(sd, a)
    partners = idx if a == b else groups[b]
    projector = sd.level_projector(b)
    for i, j in zip(idx, partners):
      psi_E = family.generated(i)
      psi_Ebar = family.generated(j)
      y = adjoint_inverse_apply(family.entries[j].sigma, family.phi_ref, family.tol, projector=projector)
      S_psi = S @ psi_E
      c_prime = np.vdot(S_psi, y) / np.vdot(S_psi, S_psi)
      t[i] = c_prime * np.vdot(psi_Ebar, S_psi)
  return t


def cprime_consistency(family: GeneratorFamily, S: np.ndarray, sd: SpectralData) -> float:
  t = cprime_factors(family, S, sd)
  t = t[np.isfinite(t)]
  if len(t) == 0:
    return 0.
  return float(np.max(np.abs(t - 1.)))


def build_q_generator(family: GeneratorFamily, sd: SpectralData, verbose: bool = False) -> np.ndarray:
  """
  Rank-one assembly of q = sum_E sigma_Ebar^{dagger -1} q0 sigma_E^{-1} P_E.

  Per level K: with generated vectors W = [sigma_E psi], duals X_K and the
  adjoint-inverse images Y, q receives Y (X_K^dagger W)^{-1} X_K^dagger, so
  q sigma_E psi = w_E sigma_Ebar^{dagger -1} phi holds exactly.
  """
  family.validate()
  progress_bar = tqdm if verbose else lambda x: x
  groups = match_entries(family, sd)
  phi = family.q0 @ family.psi_ref
  dim = len(phi)
  q = np.zeros((dim, dim), dtype=complex)
  for a in progress_bar(sorted(groups)):
    idx = groups[a]
    K = list(sd.clusters[a])
    b = _conjugate_cluster(sd, a)
    partners = idx if a == b else groups[b]
    W = np.column_stack([family.generated(i) for i in idx])
    X = sd.dual_vectors[:, K]
    M = X.conj().T @ W
    if np.linalg.cond(M) > 1. / family.tol:
      raise GeneratorError(f"Generators of level {sd.eigenvalues[K[0]]:.6g} do not span its eigenspace.")
    projector = sd.level_projector(b)
    Y = np.column_stack([
      family.entries[i].weight * adjoint_inverse_apply(family.entries[j].sigma, phi, family.tol, projector=projector)
      for i, j in zip(idx, partners)
    ])
    q += Y @ scipy.linalg.solve(M, X.conj().T)
  return q


def condition_table(H: np.ndarray, family: GeneratorFamily, sd: SpectralData) -> pd.DataFrame:
  """Residuals of conditions (i) and (ii) for every generator, (iii) being their gate."""
  groups = match_entries(family, sd)
  rows = []
  for a, idx in sorted(groups.items()):
    projector = sd.level_projector(a)
    for i in idx:
      entry = family.entries[i]
      rows.append({
        "label": entry.label,
        "E_re": entry.E.real,
        "E_im": entry.E.imag,
        "weight": entry.weight,
        "condition_i": check_condition_i(H, entry, family.psi_ref),
        "condition_ii": check_condition_ii(H, entry, family.phi_ref, family.tol, projector=projector, psi_ref=family.psi_ref),
      })
  return pd.DataFrame(rows, columns=["label", "E_re", "E_im", "weight", "condition_i", "condition_ii"])


def generator_metric(H: np.ndarray, family: GeneratorFamily, sd: SpectralData, verbose: bool = False) -> Tuple[np.ndarray, pd.DataFrame]:
  """Check conditions (i)-(iii) for all generators, then assemble q."""
  table = condition_table(H, family, sd)
  gate = family.tol * max(1., float(np.linalg.norm(H)))
  failed = table[(table.condition_i > gate) | (table.condition_ii > gate)]
  if len(failed) > 0:
    row = failed.iloc[0]
    raise GeneratorError(
      f"{len(failed)} generators violate conditions (i)/(ii), first {row.label!r}: residuals {row.condition_i:.3e}, {row.condition_ii:.3e}."
    )
  return build_q_generator(family, sd, verbose=verbose), table


def rank_one_generators(sd: SpectralData, psi_ref: np.ndarray, tol: float = DEFAULT_TOL) -> GeneratorFamily:
  """Transfer generators sigma_k = |psi_k><psi|/<psi|psi> for every state in spect(H)."""
  psi = np.asarray(psi_ref, dtype=complex).ravel()
  entries = [
    GeneratorEntry(E=sd.eigenvalues[k], sigma=np.outer(sd.right_vectors[:, k], psi.conj()) / np.vdot(psi, psi), label=f"k={k}")
    for k in sd.spect_indices()
  ]
  return GeneratorFamily.create(entries, psi, tol=tol)


if __name__ == "__main__":
  from phmetric.spectral_metric import PseudoHermitianSystem, decompose

  H = np.array([[2., 1.], [1., 3.]])
  sd = decompose(PseudoHermitianSystem(H=H, S=np.eye(2)))
  family = rank_one_generators(sd, np.array([1., 0.]))
  q, table = generator_metric(H, family, sd)
  print(table)
  print(np.round(q, 10))
