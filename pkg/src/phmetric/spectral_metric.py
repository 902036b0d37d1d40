"""
Spectral construction of the metric operator q = S A for a pseudo-Hermitian
Hamiltonian (S H = H^dagger S): biorthogonal decomposition, the S-quadratic
form, the physical subspace spect(H), phase coefficients c_E and
A = sum_E c_E P_E.

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

from phmetric.errors import DecompositionError, ValidationError
from phmetric.serialization import complex_to_json, matrix_to_json, vector_to_json

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Tuple

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

DEFAULT_TOL = 1e-10
NORMALIZATIONS = ("dirac", "s_form")


def _frozen(a, dtype=complex) -> np.ndarray:
  a = np.array(a, dtype=dtype)
  a.setflags(write=False)
  return a


def _square_matrix(M, name: str) -> np.ndarray:
  M = np.array(M, dtype=complex)
  if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
    raise ValidationError(f"{name} must be a non-empty square matrix, got shape {M.shape}.")
  if not np.all(np.isfinite(M)):
    raise ValidationError(f"{name} has non-finite entries.")
  return M


@dataclass(frozen=True, eq=False)
class PseudoHermitianSystem:
  """Hamiltonian H together with a self-adjoint, invertible S."""
  H: np.ndarray
  S: np.ndarray
  tol: float = DEFAULT_TOL

  def __post_init__(self):
    H = _square_matrix(self.H, "H")
    S = _square_matrix(self.S, "S")
    if H.shape != S.shape:
      raise ValidationError(f"H and S dimensions differ: {H.shape} vs {S.shape}.")
    if not 0 < self.tol < 1:
      raise ValidationError(f"Tolerance must lie in (0, 1), got {self.tol}.")
    s_norm = np.linalg.norm(S)
    if np.linalg.norm(S - S.conj().T) > self.tol * s_norm:
      raise ValidationError("S is not self-adjoint.")
    singular_values = scipy.linalg.svdvals(S)
    if singular_values[-1] <= self.tol * singular_values[0]:
      raise ValidationError(f"S is numerically singular (smallest singular value {singular_values[-1]:.3e}).")
    object.__setattr__(self, "H", _frozen(H))
    object.__setattr__(self, "S", _frozen(S))

  @property
  def dim(self) -> int:
    return self.H.shape[0]

  @property
  def h_norm(self) -> float:
    return float(np.linalg.norm(self.H))

  @property
  def similarity_residual(self) -> float:
    """Relative residual ||S H - H^dagger S|| / (||S|| ||H||)."""
    scale = np.linalg.norm(self.S) * self.h_norm
    if scale == 0:
      return 0.
    return float(np.linalg.norm(self.S @ self.H - self.H.conj().T @ self.S) / scale)

  def is_pseudo_hermitian(self) -> bool:
    return self.similarity_residual <= self.tol


def validate_pseudo_hermitian(sys: PseudoHermitianSystem):
  residual = sys.similarity_residual
  if residual > sys.tol:
    raise ValidationError(
      f"H is not pseudo-Hermitian with respect to S: ||SH - H^dagger S|| / (||S|| ||H||) = {residual:.3e} > tol = {sys.tol:.1e}."
    )


@dataclass(frozen=True, eq=False)
class SpectralData:
  """Biorthogonal eigensystem of H with conjugation pairing and spect(H) flags."""
  eigenvalues: np.ndarray
  # columns are the right eigenvectors psi_k
  right_vectors: np.ndarray
  # columns are the duals chi_k, chi_j^dagger psi_k = delta_jk
  dual_vectors: np.ndarray
  pairing: np.ndarray
  in_spect: np.ndarray
  c: np.ndarray
  clusters: Tuple[Tuple[int, ...], ...]
  tol: float
  h_norm: float
  normalization: str = "dirac"
  _cluster_of: Dict[int, int] = field(init=False, repr=False)

  def __post_init__(self):
    object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))
    object.__setattr__(self, "right_vectors", _frozen(self.right_vectors))
    object.__setattr__(self, "dual_vectors", _frozen(self.dual_vectors))
    object.__setattr__(self, "pairing", _frozen(self.pairing, dtype=int))
    object.__setattr__(self, "in_spect", _frozen(self.in_spect, dtype=bool))
    object.__setattr__(self, "c", _frozen(self.c))
    object.__setattr__(self, "clusters", tuple(tuple(int(k) for k in K) for K in self.clusters))
    object.__setattr__(self, "_cluster_of", {k: i for i, K in enumerate(self.clusters) for k in K})

  @property
  def size(self) -> int:
    return len(self.eigenvalues)

  @property
  def radius(self) -> float:
    """Clustering and pairing radius tol*||H||."""
    return self.tol * self.h_norm if self.h_norm > 0 else self.tol

  def cluster_of(self, k: int) -> int:
    return self._cluster_of[int(k)]

  def spect_indices(self) -> np.ndarray:
    return np.flatnonzero(self.in_spect)

  def is_real(self, k: int) -> bool:
    return self.pairing[k] == k

  @property
  def is_real_spectrum(self) -> bool:
    return all(self.is_real(k) for k in self.spect_indices())

  def projector(self, k: int) -> np.ndarray:
    return np.outer(self.right_vectors[:, k], self.dual_vectors[:, k].conj())

  def level_projector(self, cluster: int) -> np.ndarray:
    """P_E for the eigenvalue cluster with the given index."""
    K = list(self.clusters[cluster])
    return self.right_vectors[:, K] @ self.dual_vectors[:, K].conj().T

  def spect_projector(self) -> np.ndarray:
    """P_{H'} = sum over spect(H) of |psi_k><chi_k|."""
    K = self.spect_indices()
    return self.right_vectors[:, K] @ self.dual_vectors[:, K].conj().T

  def hprime_basis(self) -> np.ndarray:
    """Orthonormal basis (columns) of the physical subspace H'."""
    K = self.spect_indices()
    if len(K) == 0:
      return np.zeros((self.right_vectors.shape[0], 0), dtype=complex)
    return scipy.linalg.orth(self.right_vectors[:, K])

  def to_json(self) -> dict:
    return {
      "normalization": self.normalization,
      "tol": self.tol,
      "eigenvalues": vector_to_json(self.eigenvalues),
      "pairing": [int(k) for k in self.pairing],
      "in_spect": [bool(b) for b in self.in_spect],
      "c": vector_to_json(self.c),
      "clusters": [list(K) for K in self.clusters],
      "right_vectors": matrix_to_json(self.right_vectors),
      "dual_vectors": matrix_to_json(self.dual_vectors),
    }

  def __repr__(self):
    return f"SpectralData(size={self.size}, spect={int(self.in_spect.sum())}, real={self.is_real_spectrum}, normalization={self.normalization})"


def s_form(S: np.ndarray, phi: np.ndarray, psi: np.ndarray) -> complex:
  """<phi|S|psi>, conjugate-linear in phi."""
  S = np.asarray(S)
  phi = np.asarray(phi).ravel()
  psi = np.asarray(psi).ravel()
  if S.ndim != 2 or S.shape[0] != S.shape[1] or phi.shape[0] != S.shape[0] or psi.shape[0] != S.shape[1]:
    raise ValidationError(f"Dimension mismatch: S {S.shape}, phi {phi.shape}, psi {psi.shape}.")
  return complex(np.vdot(phi, S @ psi))


def sharp_adjoint_residual(sys: PseudoHermitianSystem) -> float:
  """||S^-1 H^dagger S - H|| / ||H||, zero iff H equals its #-adjoint."""
  try:
    sharp = scipy.linalg.solve(sys.S, sys.H.conj().T @ sys.S)
  except scipy.linalg.LinAlgError as e:
    raise ValidationError(f"S is numerically singular: {e}")
  difference = np.linalg.norm(sharp - sys.H)
  if sys.h_norm == 0:
    return float(difference)
  return float(difference / sys.h_norm)


def _invariant_blocks(H: np.ndarray) -> List[np.ndarray]:
  """Index sets of the connected components of the sparsity pattern of H."""
  pattern = csr_matrix((np.abs(H) + np.abs(H.T)) > 0)
  n_blocks, labels = connected_components(pattern, directed=False)
  return [np.flatnonzero(labels == b) for b in range(n_blocks)]


def _proximity_groups(values: np.ndarray, radius: float) -> List[List[int]]:
  """Single-linkage groups of complex values closer than radius."""
  close = np.abs(values[:, None] - values[None, :]) <= radius
  n_groups, labels = connected_components(csr_matrix(close), directed=False)
  return [list(np.flatnonzero(labels == g)) for g in range(n_groups)]


def _unit_phase(v: np.ndarray) -> np.ndarray:
  v = v / np.linalg.norm(v)
  i = np.argmax(np.abs(v))
  return v * (np.abs(v[i]) / v[i])


def _align_self_conjugate(V: np.ndarray, S: np.ndarray, tol: float) -> Tuple[np.ndarray, bool]:
  """Rotate a real-level eigenspace so that its S-Gram block is diagonal."""
  G = V.conj().T @ S @ V
  off_diagonal = G - np.diag(np.diag(G))
  if np.linalg.norm(off_diagonal) <= tol * max(1., np.linalg.norm(G)):
    return V, False
  Q, _ = scipy.linalg.qr(V, mode="economic")
  G = Q.conj().T @ S @ Q
  _, U = scipy.linalg.eigh(0.5 * (G + G.conj().T))
  return Q @ U, True


def _align_conjugate_pair(V: np.ndarray, V_bar: np.ndarray, S: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
  """Rotate two conjugate eigenspaces so that their cross S-Gram is diagonal."""
  Q, _ = scipy.linalg.qr(V, mode="economic")
  Q_bar, _ = scipy.linalg.qr(V_bar, mode="economic")
  U, _, Vh = scipy.linalg.svd(Q_bar.conj().T @ S @ Q)
  return Q @ Vh.conj().T, Q_bar @ U


def decompose(sys: PseudoHermitianSystem) -> SpectralData:
  """
  Biorthogonal eigendecomposition of H.

  Eigenpairs are computed per invariant block of H, sorted by (Re E, Im E)
  and grouped into clusters of radius tol*||H||. Every cluster is paired
  with the cluster at the conjugate eigenvalue and degenerate clusters are
  rotated so that the S-Gram matrix is diagonal under the pairing. The phase
  coefficients are left at zero, see phase_coefficients.
  """
  validate_pseudo_hermitian(sys)
  H, S, tol = sys.H, sys.S, sys.tol
  dim = sys.dim
  h_norm = sys.h_norm
  radius = tol * h_norm if h_norm > 0 else tol
  max_condition = 1. / np.sqrt(tol)

  values, vectors = [], []
  for block in _invariant_blocks(H):
    w, v = scipy.linalg.eig(H[np.ix_(block, block)])
    v = v / np.linalg.norm(v, axis=0)
    condition = np.linalg.cond(v)
    if not np.isfinite(condition) or condition > max_condition:
      raise DecompositionError(
        f"H is defective or at an exceptional point: eigenvector condition number {condition:.3e} on the block {list(block)}."
      )
    for j in range(len(block)):
      full = np.zeros(dim, dtype=complex)
      full[block] = v[:, j]
      values.append(w[j])
      vectors.append(full)
  values = np.array(values, dtype=complex)
  order = np.lexsort((values.imag, values.real))
  values = values[order]
  Psi = np.array(vectors, dtype=complex).T[:, order]

  clusters = _proximity_groups(values, radius)
  centers = np.array([values[K].mean() for K in clusters])
  pairing = np.arange(dim)
  for a, K in enumerate(clusters):
    partners = np.flatnonzero(np.abs(np.conj(centers[a]) - centers) <= radius * len(K))
    if len(partners) == 0:
      raise DecompositionError(f"Eigenvalue {centers[a]:.6g} has no conjugate partner; H is not pseudo-Hermitian.")
    if len(partners) > 1:
      raise DecompositionError(f"Ambiguous conjugate pairing for eigenvalue {centers[a]:.6g}: {len(partners)} candidates.")
    b = partners[0]
    K_bar = clusters[b]
    if len(K_bar) != len(K):
      raise DecompositionError(f"Conjugate levels {centers[a]:.6g} and {centers[b]:.6g} have different multiplicities.")
    if b == a:
      Psi[:, K], rotated = _align_self_conjugate(Psi[:, K], S, tol)
      values[K] = centers[a].real if rotated else values[K].real
      pairing[K] = K
    elif a < b:
      if len(K) > 1:
        Psi[:, K], Psi[:, K_bar] = _align_conjugate_pair(Psi[:, K], Psi[:, K_bar], S)
        values[K] = centers[a]
        values[K_bar] = centers[b]
      pairing[K] = K_bar
      pairing[K_bar] = K

  Psi = np.column_stack([_unit_phase(Psi[:, k]) for k in range(dim)])
  residuals = np.linalg.norm(H @ Psi - Psi * values, axis=0)
  worst = residuals.max()
  if worst > 10 * radius * max(len(K) for K in clusters):
    raise DecompositionError(f"Eigenvector residual {worst:.3e} exceeds the tolerance tol*||H||.")
  try:
    duals = scipy.linalg.inv(Psi).conj().T
  except scipy.linalg.LinAlgError as e:
    raise DecompositionError(f"Eigenvector basis is singular: {e}")

  G = Psi.conj().T @ S @ Psi
  paired_form = G[pairing, np.arange(dim)]
  in_spect = np.isfinite(paired_form) & (np.abs(paired_form) > tol)
  return SpectralData(
    eigenvalues=values,
    right_vectors=Psi,
    dual_vectors=duals,
    pairing=pairing,
    in_spect=in_spect,
    c=np.zeros(dim, dtype=complex),
    clusters=tuple(tuple(K) for K in clusters),
    tol=tol,
    h_norm=h_norm,
  )


def s_gram(sd: SpectralData, S: np.ndarray) -> np.ndarray:
  """G_jk = <psi_j|S|psi_k>."""
  S = np.asarray(S)
  if S.shape != (sd.right_vectors.shape[0],) * 2:
    raise ValidationError(f"S of shape {S.shape} does not match the eigenvectors.")
  return sd.right_vectors.conj().T @ S @ sd.right_vectors


def normalize_s_form(sd: SpectralData, S: np.ndarray) -> SpectralData:
  """
  Rescale every paired eigenvector so that |<psi_kbar|S|psi_k>| = 1.

  The phase coefficients then have unit modulus, and on real levels they are
  the signs of the S-form. Out-of-spect vectors keep their Dirac norm.
  """
  G = s_gram(sd, S)
  paired = np.abs(G[sd.pairing, np.arange(sd.size)])
  scale = np.ones(sd.size)
  scale[sd.in_spect] = 1. / np.sqrt(paired[sd.in_spect])
  return replace(
    sd,
    right_vectors=sd.right_vectors * scale,
    dual_vectors=sd.dual_vectors / scale,
    c=np.zeros(sd.size, dtype=complex),
    normalization="s_form",
  )


def phase_coefficients(sd: SpectralData, S: np.ndarray) -> SpectralData:
  """c_k = 1 / <psi_kbar|S|psi_k> on spect(H), 0 elsewhere."""
  G = s_gram(sd, S)
  paired = G[sd.pairing, np.arange(sd.size)]
  in_spect = sd.in_spect & np.isfinite(paired) & (np.abs(paired) > sd.tol)
  c = np.zeros(sd.size, dtype=complex)
  c[in_spect] = 1. / paired[in_spect]
  # reciprocal overflow moves the state out of spect(H)
  overflow = ~np.isfinite(c)
  c[overflow] = 0.
  return replace(sd, c=c, in_spect=in_spect & ~overflow)


def build_A(sd: SpectralData) -> np.ndarray:
  """A = sum_k c_k |psi_k><chi_k|."""
  return (sd.right_vectors * sd.c) @ sd.dual_vectors.conj().T


def build_q_spectral(sys: PseudoHermitianSystem, sd: SpectralData) -> np.ndarray:
  if sd.in_spect.any() and not np.any(sd.c):
    raise ValidationError("Phase coefficients have not been computed for this decomposition.")
  return sys.S @ build_A(sd)


def function_of_H(sd: SpectralData, f: Callable[[complex], complex]) -> np.ndarray:
  """f(H) restricted to H', i.e. sum over spect(H) of f(E_k)|psi_k><chi_k|."""
  K = sd.spect_indices()
  values = np.array([f(E) for E in sd.eigenvalues[K]], dtype=complex)
  if not np.all(np.isfinite(values)):
    bad = sd.eigenvalues[K][~np.isfinite(values)]
    raise ValidationError(f"Function is not finite at the eigenvalues {bad}.")
  return (sd.right_vectors[:, K] * values) @ sd.dual_vectors[:, K].conj().T


def spectral_metric(sys: PseudoHermitianSystem, normalization: str = "dirac") -> Tuple[np.ndarray, SpectralData]:
  """Decompose H and assemble q = S A in the requested eigenvector normalization."""
  if normalization not in NORMALIZATIONS:
    raise ValidationError(f"Unknown normalization {normalization!r}, expected one of {NORMALIZATIONS}.")
  sd = decompose(sys)
  if normalization == "s_form":
    sd = normalize_s_form(sd, sys.S)
  sd = phase_coefficients(sd, sys.S)
  return build_q_spectral(sys, sd), sd


def paired_values(sd: SpectralData, G: np.ndarray) -> np.ndarray:
  """Entries G[kbar, k] of a Gram matrix along the pairing."""
  return G[sd.pairing, np.arange(sd.size)]


if __name__ == "__main__":
  H = np.array([[1., 0.3j], [0.3j, 2.]])
  S = np.diag([1., -1.])
  q, sd = spectral_metric(PseudoHermitianSystem(H=H, S=S))
  print(sd)
  print(np.round(q, 6))
  print([complex_to_json(E) for E in sd.eigenvalues])
