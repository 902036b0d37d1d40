"""
Quantum-mechanical Lee model

  H = m_theta N_theta + m_V N_V + m_N N_N + i g (theta^dagger N^dagger V + V^dagger N theta)

on the truncated Fock space: Hamiltonian, closed-form sector eigensystem,
eigenvector generators with their explicit inverses, the closed-form metric
q and the involution C = q P.

N_V + N_N and N_V + N_theta are conserved, so the dynamics splits into the
two-dimensional sectors span{|n,1,0>, |n+1,0,1>} plus one-dimensional
trivial states. With mu = m_theta + m_N - m_V and R_n = sqrt(mu^2 - 4g^2(n+1))
the sector energies are E_n, E'_n = ((2n+1) m_theta + m_N + m_V -+ R_n) / 2.

Kets built by generators are raw: (theta^dagger)^n|0> has norm^2 n!.

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

from phmetric.errors import ExceptionalPointError, RegimeError, ValidationError
from phmetric.fock_algebra import (FockBasis, build_basis, identity, ladder_matrix, number_operator, occupations,
                                   parity_matrix, vacuum)
from phmetric.generator_metric import GeneratorEntry, GeneratorFamily
from phmetric.spectral_metric import DEFAULT_TOL, PseudoHermitianSystem, SpectralData

from dataclasses import asdict, dataclass, field
from math import factorial
from typing import List, Optional, Tuple

import numpy as np

# The reference closed forms for alpha, beta and the off-diagonal part of q
# solve the eigenproblem of the Hamiltonian with the opposite coupling sign.
# With <n+1,0,1|H|n,1,0> = +ig sqrt(n+1) they are evaluated at gamma = -g.
REFERENCE_COUPLING_SIGN = -1

# relative distance of a radicand from zero below which a sector counts as exceptional
EXCEPTIONAL_TOL = 1e-12

LEE_FLAGS = {
  "energy_radical": "Sector energies use sqrt(mu^2 - 4g^2(n+1)). The reference eigenvalue display shows "
                    "sqrt(mu^2 - 4g^2), which disagrees with the 2x2 sector diagonalization and with the "
                    "reference alpha, beta and identities; treated as a typo.",
  "coupling_sign": "The reference alpha, beta and off-diagonal q terms are evaluated at gamma = -g: with the "
                   "matrix convention <n+1,0,1|H|n,1,0> = +ig sqrt(n+1) the printed signs solve the eigenproblem "
                   "at the opposite coupling. The identity beta conj(alpha) = i gamma / R holds in this form.",
  "theta_N_Vdagger": "The term written theta N V^dagger is the adjoint of theta^dagger N^dagger V, realised under "
                     "the Jordan-Wigner ordering as V^dagger N theta.",
  "doubly_occupied": "The reference q expression vanishes on the states |n,1,1>. The completed metric adds N_V N_N "
                     "so that q is positive on the whole truncated space.",
}

CONVENTIONS = {
  "spectral_vectors": "dirac-normalized right eigenvectors",
  "generator_kets": "raw (theta^dagger)^n|0> without 1/sqrt(n!)",
  "generator_weights": "n! for E_n, (n+1)! for E'_n, so <Psi|q|Psi> reproduces the raw normalization",
}


@dataclass(frozen=True, kw_only=True)
class LeeParams:
  """Masses, coupling and boson cutoff of the Lee model."""
  m_theta: float = 1.
  m_V: float = 1.5
  m_N: float = 1.
  g: float = 0.05
  n_max: int = 8
  mu: float = field(init=False)

  def __post_init__(self):
    for name in ("m_theta", "m_V", "m_N", "g"):
      value = getattr(self, name)
      if not np.isfinite(value):
        raise ValidationError(f"Lee parameter {name} must be finite, got {value}.")
      object.__setattr__(self, name, float(value))
    if int(self.n_max) != self.n_max or self.n_max < 1:
      raise ValidationError(f"The boson cutoff n_max must be an integer >= 1, got {self.n_max}.")
    object.__setattr__(self, "n_max", int(self.n_max))
    object.__setattr__(self, "mu", self.m_theta + self.m_N - self.m_V)

  @property
  def gamma(self) -> float:
    """Coupling at which the reference closed forms are evaluated."""
    return REFERENCE_COUPLING_SIGN * self.g

  def radicand(self, n: int) -> float:
    """mu^2 - 4 g^2 (n+1) of sector n."""
    return self.mu ** 2 - 4 * self.g ** 2 * (n + 1)

  def to_json(self) -> dict:
    params = asdict(self)
    del params["mu"]
    return params

  @classmethod
  def from_json(cls, obj: dict) -> "LeeParams":
    known = ("m_theta", "m_V", "m_N", "g", "n_max")
    return cls(**{key: obj[key] for key in known if key in obj})


@dataclass(frozen=True)
class SectorSolution:
  """Closed-form eigensystem of sector n."""
  n: int
  E_minus: complex
  E_plus: complex
  # None unless mu > 0
  alpha: Optional[complex]
  beta: Optional[complex]
  radicand: float

  @property
  def root(self) -> complex:
    return np.sqrt(complex(self.radicand))

  @property
  def is_real(self) -> bool:
    return self.radicand > 0

  @property
  def trace(self) -> complex:
    return self.E_minus + self.E_plus


def _is_exceptional(params: LeeParams, n: int, tol: float = EXCEPTIONAL_TOL) -> bool:
  scale = max(params.mu ** 2, 4 * params.g ** 2 * (n + 1))
  return scale > 0 and abs(params.radicand(n)) <= tol * scale


def _check_basis(params: LeeParams, basis: FockBasis):
  if basis.n_max != params.n_max:
    raise ValidationError(f"Basis cutoff {basis.n_max} does not match n_max = {params.n_max}.")


def _check_sector(basis: FockBasis, n: int):
  if not 0 <= n <= basis.n_max - 1:
    raise ValidationError(f"Sector n={n} is not complete below the cutoff n_max={basis.n_max}.")


def _coefficients(params: LeeParams, n: int, root: complex) -> Tuple[complex, complex]:
  """(alpha, beta) of the eigenvector belonging to E = (trace - root)/2."""
  if params.g == 0:
    return -1j, 0j
  gamma = params.gamma
  beta = 2 * gamma / np.sqrt(2 * root * (params.mu + root))
  alpha = (params.mu + root) * beta / (2j * gamma)
  return complex(alpha), complex(beta)


def build_hamiltonian(params: LeeParams, basis: FockBasis) -> np.ndarray:
  _check_basis(params, basis)
  theta = ladder_matrix(basis, "theta")
  V = ladder_matrix(basis, "V")
  N = ladder_matrix(basis, "N")
  interaction = theta.conj().T @ N.conj().T @ V
  interaction = interaction + interaction.conj().T
  return (params.m_theta * number_operator(basis, "theta") + params.m_V * number_operator(basis, "V")
          + params.m_N * number_operator(basis, "N") + 1j * params.g * interaction)


def sector_indices(basis: FockBasis, n: int) -> Tuple[int, int]:
  """Indices of |n,1,0> and |n+1,0,1>."""
  _check_sector(basis, n)
  return basis.index_of((n, 1, 0)), basis.index_of((n + 1, 0, 1))


def closed_form_sector(params: LeeParams, n: int) -> SectorSolution:
  if n < 0:
    raise ValidationError(f"Sector index must be nonnegative, got {n}.")
  if _is_exceptional(params, n):
    raise ExceptionalPointError(
      f"Sector n={n} is at an exceptional point: g = {params.g} equals the critical coupling {abs(params.mu) / (2 * np.sqrt(n + 1)):.12g}."
    )
  radicand = params.radicand(n)
  root = np.sqrt(complex(radicand))
  trace = (2 * n + 1) * params.m_theta + params.m_N + params.m_V
  alpha, beta = _coefficients(params, n, root) if params.mu > 0 else (None, None)
  return SectorSolution(n=n, E_minus=complex((trace - root) / 2), E_plus=complex((trace + root) / 2),
                        alpha=alpha, beta=beta, radicand=radicand)


def displayed_energies(params: LeeParams, n: int) -> Tuple[complex, complex]:
  """Sector energies with the radical sqrt(mu^2 - 4g^2) of the reference display."""
  root = np.sqrt(complex(params.mu ** 2 - 4 * params.g ** 2))
  trace = (2 * n + 1) * params.m_theta + params.m_N + params.m_V
  return complex((trace - root) / 2), complex((trace + root) / 2)


def sector_identity_residuals(solution: SectorSolution, params: LeeParams) -> Tuple[float, float]:
  """
  Residuals of |alpha|^2 + (n+1)|beta|^2 = mu/R and beta conj(alpha) = i gamma/R.
  """
  if solution.alpha is None:
    raise RegimeError("Closed-form eigenvectors require mu > 0.")
  n, alpha, beta, root = solution.n, solution.alpha, solution.beta, solution.root
  norm_identity = abs(abs(alpha) ** 2 + (n + 1) * abs(beta) ** 2 - params.mu / root)
  cross_identity = abs(beta * np.conj(alpha) - 1j * params.gamma / root)
  return float(norm_identity), float(cross_identity)


def _ladders(basis: FockBasis):
  return (ladder_matrix(basis, "theta"), ladder_matrix(basis, "V"), ladder_matrix(basis, "N"))


def closed_form_sigma(params: LeeParams, basis: FockBasis, n: int) -> Tuple[np.ndarray, np.ndarray]:
  """
  Generators sigma_{E_n} = alpha (theta^dagger)^n V^dagger + beta (theta^dagger)^{n+1} N^dagger and
  sigma_{E'_n} = (n+1) conj(beta) (theta^dagger)^n V^dagger + conj(alpha) (theta^dagger)^{n+1} N^dagger.

  In the broken regime the second form is not an eigenvector generator and
  sigma_{E'_n} uses the coefficients of the other root instead.
  """
  _check_basis(params, basis)
  _check_sector(basis, n)
  solution = closed_form_sector(params, n)
  if solution.alpha is None:
    raise RegimeError(f"Closed-form generators require mu > 0, got mu = {params.mu}.")
  theta, V, N = _ladders(basis)
  raise_n = np.linalg.matrix_power(theta.conj().T, n)
  vertex = raise_n @ V.conj().T
  pair = raise_n @ theta.conj().T @ N.conj().T
  alpha, beta = solution.alpha, solution.beta
  if solution.is_real:
    alpha_p, beta_p = (n + 1) * np.conj(beta), np.conj(alpha)
  else:
    alpha_p, beta_p = _coefficients(params, n, -solution.root)
  return alpha * vertex + beta * pair, alpha_p * vertex + beta_p * pair


def closed_form_sigma_inv(params: LeeParams, basis: FockBasis, n: int) -> Tuple[np.ndarray, np.ndarray]:
  """
  sigma^{-1}_{E_n} = (conj(alpha)/n!) theta^n V - (conj(beta)/n!) theta^{n+1} N,
  sigma^{-1}_{E'_n} = -(beta/n!) theta^n V + (alpha/(n+1)!) theta^{n+1} N.
  """
  _check_basis(params, basis)
  _check_sector(basis, n)
  solution = closed_form_sector(params, n)
  if not solution.is_real or solution.alpha is None:
    raise RegimeError(f"Explicit generator inverses need a real sector spectrum and mu > 0 (sector n={n}).")
  theta, V, N = _ladders(basis)
  lower_n = np.linalg.matrix_power(theta, n)
  vertex = lower_n @ V
  pair = lower_n @ theta @ N
  alpha, beta = solution.alpha, solution.beta
  inv_minus = (np.conj(alpha) * vertex - np.conj(beta) * pair) / factorial(n)
  inv_plus = -beta / factorial(n) * vertex + alpha / factorial(n + 1) * pair
  return inv_minus, inv_plus


def sector_metric_block(params: LeeParams, basis: FockBasis, n: int) -> np.ndarray:
  """q_n = n! (sigma^{-1}_{E_n})^dagger sigma^{-1}_{E_n} + (n+1)! (sigma^{-1}_{E'_n})^dagger sigma^{-1}_{E'_n}."""
  inv_minus, inv_plus = closed_form_sigma_inv(params, basis, n)
  return (factorial(n) * inv_minus.conj().T @ inv_minus
          + factorial(n + 1) * inv_plus.conj().T @ inv_plus)


def regime(params: LeeParams) -> str:
  """
  'real' when the radicands of sectors 0..n_max are positive, 'broken' otherwise.

  The edge sector n_max is truncated to one state, so its energy stays real,
  but the closed-form metric needs its radicand.
  """
  for n in range(params.n_max + 1):
    if _is_exceptional(params, n):
      closed_form_sector(params, n)
  if all(params.radicand(n) > 0 for n in range(params.n_max + 1)):
    return "real"
  return "broken"


def closed_form_q(params: LeeParams, basis: FockBasis, complete: bool = True) -> np.ndarray:
  """
  q = 1 - N_N - N_V + N_N N_V + mu N_V (1 - N_N) / sqrt(mu^2 - 4g^2(N_theta + 1))
      + mu N_N (1 - N_V) / sqrt(mu^2 - 4g^2 N_theta)
      + theta N V^dagger c - c theta^dagger N^dagger V,   c = 2i gamma / sqrt(mu^2 - 4g^2 N_theta),

  with the operator ordering kept and the square roots taken on the diagonal
  occupation basis.

  :param complete: add N_V N_N so that q is also positive on |n,1,1>
  """
  _check_basis(params, basis)
  if params.mu <= 0:
    raise RegimeError(f"The closed-form metric requires mu > 0, got mu = {params.mu}.")
  for k in range(params.n_max + 2):
    if _is_exceptional(params, k - 1):
      raise ExceptionalPointError(f"Radicand mu^2 - 4g^2 * {k} vanishes; the closed-form metric is singular.")
    if params.mu ** 2 - 4 * params.g ** 2 * k <= 0:
      raise RegimeError(
        f"The closed-form metric needs a real spectrum: mu^2 - 4g^2 * {k} = {params.mu ** 2 - 4 * params.g ** 2 * k:.6g} <= 0."
      )
  n_theta = occupations(basis)[:, 0]
  one = identity(basis)
  NV = number_operator(basis, "V")
  NN = number_operator(basis, "N")
  theta, V, N = _ladders(basis)
  radicals = params.mu ** 2 - 4 * params.g ** 2 * n_theta
  inv_root = np.diag(1 / np.sqrt(radicals)).astype(complex)
  inv_root_shifted = np.diag(1 / np.sqrt(radicals - 4 * params.g ** 2)).astype(complex)
  c = 2j * params.gamma * inv_root
  # (theta^dagger N^dagger V)^dagger
  lowering = V.conj().T @ N @ theta
  q = ((one - NN) @ (one - NV)
       + params.mu * NV @ (one - NN) @ inv_root_shifted
       + params.mu * NN @ (one - NV) @ inv_root
       + lowering @ c - c @ lowering.conj().T)
  if complete:
    q = q + NV @ NN
  return q


def c_operator(q: np.ndarray, parity: np.ndarray) -> np.ndarray:
  """C = q P. Its adjoint P q commutes with H."""
  q = np.asarray(q)
  parity = np.asarray(parity)
  if q.shape != parity.shape or q.ndim != 2:
    raise ValidationError(f"Dimension mismatch: q {q.shape}, P {parity.shape}.")
  return q @ parity


def critical_coupling(params: LeeParams, n: int) -> float:
  """Coupling at which sector n becomes exceptional."""
  if params.mu == 0:
    raise RegimeError("mu = 0: every sector is exceptional at g = 0, no finite critical coupling.")
  return abs(params.mu) / (2 * np.sqrt(n + 1))


def lee_system(params: LeeParams, tol: float = DEFAULT_TOL) -> Tuple[FockBasis, PseudoHermitianSystem]:
  basis = build_basis(params.n_max)
  return basis, PseudoHermitianSystem(H=build_hamiltonian(params, basis), S=parity_matrix(basis), tol=tol)


def lee_generator_family(params: LeeParams, basis: FockBasis, tol: float = DEFAULT_TOL) -> GeneratorFamily:
  """
  Generators for every eigenstate of the truncated model, with psi = phi = |0>.
  Sector levels carry the raw-ket weights n! and (n+1)!, trivial states the
  squared norm of their raw ket.
  """
  _check_basis(params, basis)
  theta, V, N = _ladders(basis)
  theta_dag, V_dag, N_dag = theta.conj().T, V.conj().T, N.conj().T
  m_theta, m_V, m_N = params.m_theta, params.m_V, params.m_N
  entries: List[GeneratorEntry] = []
  for n in range(params.n_max + 1):
    raise_n = np.linalg.matrix_power(theta_dag, n)
    entries.append(GeneratorEntry(E=n * m_theta, sigma=raise_n, weight=factorial(n), label=f"|{n},0,0>"))
    entries.append(GeneratorEntry(E=n * m_theta + m_V + m_N, sigma=raise_n @ V_dag @ N_dag,
                                  weight=factorial(n), label=f"|{n},1,1>"))
  entries.append(GeneratorEntry(E=m_N, sigma=N_dag, label="|0,0,1>"))
  edge = params.n_max
  entries.append(GeneratorEntry(E=edge * m_theta + m_V, sigma=np.linalg.matrix_power(theta_dag, edge) @ V_dag,
                                weight=factorial(edge), label=f"|{edge},1,0>"))
  for n in range(params.n_max):
    solution = closed_form_sector(params, n)
    sigma_minus, sigma_plus = closed_form_sigma(params, basis, n)
    entries.append(GeneratorEntry(E=solution.E_minus, sigma=sigma_minus, weight=factorial(n), label=f"E_{n}"))
    entries.append(GeneratorEntry(E=solution.E_plus, sigma=sigma_plus, weight=factorial(n + 1), label=f"E'_{n}"))
  return GeneratorFamily.create(entries, vacuum(basis), tol=tol)


def sector_state_indices(basis: FockBasis) -> List[int]:
  return [i for n in range(basis.n_max) for i in sector_indices(basis, n)]


def interior_indices(sd: SpectralData, basis: FockBasis) -> List[int]:
  """Eigenvectors supported on the interacting sectors n <= n_max - 1."""
  outside = np.ones(basis.dim, dtype=bool)
  outside[sector_state_indices(basis)] = False
  interior = []
  for k in range(sd.size):
    v = np.abs(sd.right_vectors[:, k])
    if v[outside].max(initial=0.) <= 1e-12 * v.max():
      interior.append(k)
  return interior


def seeded_sector_state(basis: FockBasis, rng: np.random.Generator) -> np.ndarray:
  """Normalized random superposition of all interacting-sector basis states."""
  indices = sector_state_indices(basis)
  state = np.zeros(basis.dim, dtype=complex)
  state[indices] = rng.standard_normal(len(indices)) + 1j * rng.standard_normal(len(indices))
  return state / np.linalg.norm(state)


if __name__ == "__main__":
  params = LeeParams(g=0.1)
  for n in range(4):
    solution = closed_form_sector(params, n)
    print(n, solution.E_minus, solution.E_plus, displayed_energies(params, n), sector_identity_residuals(solution, params))
  print("critical couplings", [round(critical_coupling(params, n), 6) for n in range(params.n_max)])
