"""
Truncated Fock space of one boson (theta) and two fermions (V, N) with the
elementary ladder, number and parity operators as dense complex matrices.

States are ordered lexicographically in (n, n_V, n_N), which is the index
order of the tensor product theta (x) V (x) N, so the index of |n, n_V, n_N>
is 4n + 2n_V + n_N. Fermions follow the Jordan-Wigner ordering of that
product: V carries no string, N carries (-1)^{n_V}.

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

from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, List, Tuple

import numpy as np

MODES = ("theta", "V", "N")

Occupation = Tuple[int, int, int]

# two-level factors
_LOWER = np.array([[0., 1.], [0., 0.]], dtype=complex)
_STRING = np.diag([1., -1.]).astype(complex)
_ID2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class FockBasis:
  """Enumerated truncated basis |n, n_V, n_N>, n = 0..n_max."""
  n_max: int
  states: Tuple[Occupation, ...]
  _index: Dict[Occupation, int] = field(init=False, repr=False, compare=False)

  def __post_init__(self):
    object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})

  @property
  def dim(self) -> int:
    return len(self.states)

  def index_of(self, state: Occupation) -> int:
    try:
      return self._index[tuple(int(x) for x in state)]
    except KeyError:
      raise ValidationError(f"State {state} is not part of the basis with n_max={self.n_max}.")

  def state_of(self, index: int) -> Occupation:
    return self.states[index]

  def to_json(self) -> List[List[int]]:
    return [list(s) for s in self.states]

  def __repr__(self):
    return f"FockBasis(n_max={self.n_max}, dim={self.dim})"


def build_basis(n_max: int) -> FockBasis:
  if int(n_max) != n_max or n_max < 1:
    raise ValidationError(f"The boson cutoff must be an integer >= 1, got {n_max}.")
  n_max = int(n_max)
  states = tuple((n, nv, nn) for n in range(n_max + 1) for nv in (0, 1) for nn in (0, 1))
  return FockBasis(n_max=n_max, states=states)


def _boson_lowering(n_max: int) -> np.ndarray:
  return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def _check_mode(mode: str):
  if mode not in MODES:
    raise ValidationError(f"Unknown mode {mode!r}, expected one of {MODES}.")


def ladder_matrix(basis: FockBasis, mode: str, dagger: bool = False) -> np.ndarray:
  """
  Lowering operator of the given mode (raising operator if dagger is set).

  :param basis: the truncated basis
  :param mode: one of "theta", "V", "N"
  :param dagger: return the conjugate transpose
  """
  _check_mode(mode)
  id_boson = np.eye(basis.n_max + 1, dtype=complex)
  if mode == "theta":
    factors = (_boson_lowering(basis.n_max), _ID2, _ID2)
  elif mode == "V":
    factors = (id_boson, _LOWER, _ID2)
  else:
    factors = (id_boson, _STRING, _LOWER)
  op = reduce(np.kron, factors)
  return op.conj().T if dagger else op


def occupations(basis: FockBasis) -> np.ndarray:
  """(dim x 3) table of occupation numbers in basis order."""
  return np.array(basis.states, dtype=int).reshape(basis.dim, 3)


def number_operator(basis: FockBasis, mode: str) -> np.ndarray:
  _check_mode(mode)
  return np.diag(occupations(basis)[:, MODES.index(mode)]).astype(complex)


def parity_matrix(basis: FockBasis) -> np.ndarray:
  """All modes odd: P = (-1)^(N_theta + N_V + N_N)."""
  total = occupations(basis).sum(axis=1)
  return np.diag(np.where(total % 2 == 0, 1., -1.)).astype(complex)


def identity(basis: FockBasis) -> np.ndarray:
  return np.eye(basis.dim, dtype=complex)


def basis_vector(basis: FockBasis, state: Occupation) -> np.ndarray:
  v = np.zeros(basis.dim, dtype=complex)
  v[basis.index_of(state)] = 1.
  return v


def vacuum(basis: FockBasis) -> np.ndarray:
  return basis_vector(basis, (0, 0, 0))


if __name__ == "__main__":
  basis = build_basis(2)
  print(basis, basis.to_json())
  theta = ladder_matrix(basis, "theta")
  print(np.real(theta.conj().T @ theta).diagonal())
  print(np.real(parity_matrix(basis)).diagonal())
