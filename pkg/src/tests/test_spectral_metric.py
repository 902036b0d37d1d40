from phmetric.errors import DecompositionError, RegimeError, ValidationError
from phmetric.fock_algebra import basis_vector, build_basis, parity_matrix
from phmetric.spectral_metric import (PseudoHermitianSystem, build_A, build_q_spectral, decompose, function_of_H,
                                      normalize_s_form, paired_values, phase_coefficients, s_form, s_gram,
                                      sharp_adjoint_residual, spectral_metric, validate_pseudo_hermitian)
from phmetric.verify import POSITIVE, hermiticity_residual, involution_check, positivity_report, selfadjointness_residual

from dataclasses import replace

from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
import numpy as np
import pytest

TOL = 1e-10
GRAM_TOL = 1e-8


def test_system_validation():
  with pytest.raises(ValidationError):
    PseudoHermitianSystem(H=np.ones((2, 3)), S=np.eye(2))
  with pytest.raises(ValidationError):
    PseudoHermitianSystem(H=np.eye(2), S=np.eye(3))
  with pytest.raises(ValidationError):
    PseudoHermitianSystem(H=np.eye(2), S=np.array([[1., 1.], [0., 1.]]))
  with pytest.raises(ValidationError):
    PseudoHermitianSystem(H=np.eye(2), S=np.diag([1., 0.]))
  with pytest.raises(ValidationError):
    PseudoHermitianSystem(H=np.array([[np.nan, 0.], [0., 1.]]), S=np.eye(2))


def test_system_is_immutable():
  system = PseudoHermitianSystem(H=np.diag([1., 2.]), S=np.eye(2))
  with pytest.raises(ValueError):
    system.H[0, 0] = 5.


def test_pseudo_hermiticity_gate():
  system = PseudoHermitianSystem(H=np.array([[0., 1.], [0., 0.]]), S=np.eye(2))
  assert not system.is_pseudo_hermitian()
  with pytest.raises(ValidationError):
    validate_pseudo_hermitian(system)
  with pytest.raises(ValidationError):
    decompose(system)


def test_s_form_examples(rng):
  assert s_form(np.eye(3), [1., 0., 0.], [1., 0., 0.]) == pytest.approx(1.)
  basis = build_basis(2)
  odd = basis_vector(basis, (1, 0, 0))
  assert s_form(parity_matrix(basis), odd, odd) == pytest.approx(-1.)
  B = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
  S = B + B.conj().T
  phi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
  psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
  assert abs(s_form(S, phi, psi) - np.conj(s_form(S, psi, phi))) <= 1e-14 * np.linalg.norm(S) * 16
  with pytest.raises(ValidationError):
    s_form(S, phi[:3], psi)


def test_sharp_adjoint_residual(lee_factory):
  H = np.array([[1., 2j], [-2j, 3.]])
  assert sharp_adjoint_residual(PseudoHermitianSystem(H=H, S=np.eye(2))) <= 1e-14
  for g in (0., 0.05, 0.1, 0.2):
    assert sharp_adjoint_residual(lee_factory(g).system) <= 1e-12
  jordan = PseudoHermitianSystem(H=np.array([[0., 1.], [0., 0.]]), S=np.eye(2))
  assert sharp_adjoint_residual(jordan) == pytest.approx(np.sqrt(2.))


def test_decompose_diagonal():
  sd = decompose(PseudoHermitianSystem(H=np.diag([1., 2.]), S=np.eye(2)))
  assert np.allclose(sd.eigenvalues, [1., 2.])
  assert np.allclose(np.abs(sd.right_vectors), np.eye(2))
  assert sd.in_spect.all()
  assert list(sd.pairing) == [0, 1]


def test_decompose_lee_real(lee_real):
  sd, H = lee_real.sd, lee_real.system.H
  assert sd.size == 36
  assert np.all(np.abs(sd.eigenvalues.imag) == 0.)
  assert list(sd.pairing) == list(range(36))
  assert sd.is_real_spectrum
  residuals = np.linalg.norm(H @ sd.right_vectors - sd.right_vectors * sd.eigenvalues, axis=0)
  assert residuals.max() <= TOL * np.linalg.norm(H)
  assert np.allclose(np.linalg.norm(sd.right_vectors, axis=0), 1.)
  assert np.allclose(sd.dual_vectors.conj().T @ sd.right_vectors, np.eye(36), atol=TOL)
  projector = sd.spect_projector()
  assert np.allclose(projector @ projector, projector, atol=TOL)


def test_decompose_lee_broken(lee_broken):
  sd = lee_broken.sd
  complex_levels = [k for k in range(sd.size) if not sd.is_real(k)]
  # sectors n = 1..7 each contribute one conjugate pair
  assert len(complex_levels) == 14
  assert not sd.is_real_spectrum
  assert np.array_equal(sd.pairing[sd.pairing], np.arange(sd.size))
  for k in complex_levels:
    assert abs(sd.eigenvalues[sd.pairing[k]] - np.conj(sd.eigenvalues[k])) <= GRAM_TOL
    assert abs(sd.eigenvalues[k].imag) > 1e-3


def test_projector_identity(lee_real):
  sd = lee_real.sd
  for a in range(len(sd.clusters)):
    P_E = sd.level_projector(a)
    for k in range(sd.size):
      expected = sd.right_vectors[:, k] if sd.cluster_of(k) == a else 0.
      assert np.allclose(P_E @ sd.right_vectors[:, k], expected, atol=TOL)


def test_exceptional_point_is_rejected():
  # eigenvalues of [[1, ig], [ig, 2]] coalesce at g = 1/2
  H = np.array([[1., 0.5j], [0.5j, 2.]])
  system = PseudoHermitianSystem(H=H, S=np.diag([1., -1.]))
  assert system.is_pseudo_hermitian()
  with pytest.raises(DecompositionError):
    decompose(system)
  assert issubclass(DecompositionError, RegimeError)


def test_pairing_errors():
  tol = 1e-6
  # two real clusters within the pairing radius of each other
  delta = tol * np.linalg.norm(np.eye(3))
  system = PseudoHermitianSystem(H=np.diag([1., 1. + 0.9 * delta, 1. + 2. * delta]), S=np.eye(3), tol=tol)
  assert system.is_pseudo_hermitian()
  with pytest.raises(DecompositionError, match="Ambiguous"):
    decompose(system)

  # the imaginary part passes the similarity gate but exceeds the pairing radius
  real = 10. * np.arange(8)
  delta = tol * np.linalg.norm(np.append(real, 100.))
  system = PseudoHermitianSystem(H=np.diag(np.append(real, 100. + 1.2j * delta)), S=np.eye(9), tol=tol)
  assert system.is_pseudo_hermitian()
  with pytest.raises(DecompositionError, match="no conjugate partner"):
    decompose(system)

  # 1 - i eps is paired with the two-state cluster {1 + i eps, 1 + delta/2 + i eps}
  delta = tol * np.linalg.norm(np.ones(3))
  eps = 0.7 * delta
  H = np.diag([1. - 1j * eps, 1. + 1j * eps, 1. + 0.5 * delta + 1j * eps])
  S = np.array([[0., 1., 0.], [1., 0., 0.], [0., 0., 1.]])
  system = PseudoHermitianSystem(H=H, S=S, tol=tol)
  assert system.is_pseudo_hermitian()
  with pytest.raises(DecompositionError, match="different multiplicities"):
    decompose(system)


def test_degenerate_level_is_aligned():
  # the S-Gram block of the doubly degenerate level is off-diagonal in the coordinate basis
  H = np.diag([1., 1., 3.])
  S = np.array([[0., 1., 0.], [1., 0., 0.], [0., 0., 1.]])
  sd = decompose(PseudoHermitianSystem(H=H, S=S))
  G = s_gram(sd, S)
  assert np.abs(G - np.diag(np.diag(G))).max() <= GRAM_TOL
  assert sd.in_spect.all()


def test_s_gram(lee_hermitian, lee_real, lee_broken):
  G0 = s_gram(lee_hermitian.sd, lee_hermitian.system.S)
  assert np.allclose(G0, np.diag(np.diag(G0)))
  assert np.allclose(np.abs(np.diag(G0)), 1.)
  states = [lee_hermitian.basis.state_of(int(np.argmax(np.abs(v)))) for v in lee_hermitian.sd.right_vectors.T]
  assert np.allclose(np.diag(G0).real, [(-1) ** sum(s) for s in states])

  G = s_gram(lee_real.sd, lee_real.system.S)
  assert np.abs(G - np.diag(np.diag(G))).max() <= TOL

  sd = lee_broken.sd
  G = s_gram(sd, lee_broken.system.S)
  for k in range(sd.size):
    if not sd.is_real(k):
      assert abs(G[k, k]) <= GRAM_TOL
      assert abs(G[sd.pairing[k], k]) > 1e-3
  with pytest.raises(ValidationError):
    s_gram(sd, np.eye(3))


def test_orthogonality_relation(lee_broken):
  sd, S = lee_broken.sd, lee_broken.system.S
  G = s_gram(sd, S)
  E = sd.eigenvalues
  weighted = (E[None, :] - np.conj(E)[:, None]) * G
  assert np.abs(weighted).max() <= TOL * np.linalg.norm(lee_broken.system.H)


def test_phase_coefficients_hermitian_limit(lee_hermitian):
  sd, basis = lee_hermitian.sd, lee_hermitian.basis
  for n in range(basis.n_max + 1):
    index = basis.index_of((n, 1, 0))
    k = int(np.argmax(np.abs(sd.right_vectors[index, :])))
    assert sd.c[k] == pytest.approx((-1) ** (n + 1))


def test_phase_coefficient_is_reciprocal_of_s_form():
  system = PseudoHermitianSystem(H=np.diag([1., 2.]), S=np.diag([0.5, 1.]))
  sd = phase_coefficients(decompose(system), system.S)
  assert np.allclose(sd.c, [2., 1.])


def test_build_A(lee_hermitian, lee_real):
  sd = lee_real.sd
  ones = replace(sd, c=np.ones(sd.size))
  assert np.allclose(build_A(ones), sd.spect_projector(), atol=TOL)
  A = build_A(sd)
  H = lee_real.system.H
  assert np.linalg.norm(A @ H - H @ A) <= TOL * max(1., np.linalg.norm(A) * np.linalg.norm(H))
  P = lee_hermitian.system.S
  assert np.allclose(build_A(lee_hermitian.sd), P, atol=1e-12)


def test_build_q_spectral_requires_phases(lee_real):
  sd = decompose(lee_real.system)
  with pytest.raises(ValidationError):
    build_q_spectral(lee_real.system, sd)


def test_q_spectral_hermitian_limit(lee_hermitian):
  assert np.allclose(lee_hermitian.q, np.eye(36), atol=1e-12)


def test_q_spectral_real_regime(lee_real):
  q, sd, H = lee_real.q, lee_real.sd, lee_real.system.H
  assert hermiticity_residual(q) <= TOL
  assert selfadjointness_residual(q, H) <= TOL
  assert positivity_report(q, sd)["positivity_status"] == POSITIVE
  paired = paired_values(sd, sd.right_vectors.conj().T @ q @ sd.right_vectors)
  assert np.allclose(paired, 1., atol=TOL)


def test_q_spectral_broken_regime(lee_broken):
  q, sd = lee_broken.q, lee_broken.sd
  G = sd.right_vectors.conj().T @ q @ sd.right_vectors
  for k in sd.spect_indices():
    assert abs(G[sd.pairing[k], k] - 1.) <= GRAM_TOL
    if not sd.is_real(k):
      assert abs(G[k, k]) <= GRAM_TOL
  assert selfadjointness_residual(q, lee_broken.system.H) <= 10 * TOL


def test_function_of_H(lee_real):
  H = np.diag([1., 2.])
  sd = decompose(PseudoHermitianSystem(H=H, S=np.eye(2)))
  assert np.allclose(function_of_H(sd, lambda E: 1.), np.eye(2))
  assert np.allclose(function_of_H(sd, lambda E: E), H)

  sd = lee_real.sd
  c_of = lambda E: sd.c[np.argmin(np.abs(sd.eigenvalues - E))]
  assert np.allclose(function_of_H(sd, c_of), build_A(sd), atol=TOL)
  with pytest.raises(ValidationError):
    function_of_H(sd, lambda E: np.inf)


def test_s_form_normalization(lee_factory, lee_real):
  lee = lee_factory(0.05, normalization="s_form")
  sd, S = lee.sd, lee.system.S
  assert sd.normalization == "s_form"
  assert np.allclose(np.abs(sd.c[sd.in_spect]), 1.)
  assert np.allclose(np.abs(paired_values(sd, s_gram(sd, S))), 1.)
  assert positivity_report(lee.q, sd)["positivity_status"] == POSITIVE
  # with unit-modulus phases C = q S squares to one on every eigenvector
  assert involution_check(lee.q @ S, sd) <= GRAM_TOL
  renormalized = normalize_s_form(lee_real.sd, S)
  assert np.allclose(renormalized.right_vectors, sd.right_vectors)


def test_unknown_normalization(lee_real):
  with pytest.raises(ValidationError):
    spectral_metric(lee_real.system, normalization="unit")


@seed(1)
@settings(max_examples=25, deadline=None)
@given(
  perturbation=arrays(np.float64, (3, 3), elements=st.floats(min_value=-1., max_value=1.)),
  signs=st.lists(st.sampled_from([-1., 1.]), min_size=3, max_size=3),
)
def test_spectral_metric_hypothesis(perturbation, signs):
  # H = eta^-1 D eta is pseudo-Hermitian for S = eta^dagger J eta with [D, J] = 0
  eta = np.eye(3) + 0.3 * perturbation
  D = np.diag([-1., 0.5, 2.])
  J = np.diag(signs)
  H = np.linalg.solve(eta, D @ eta)
  S = eta.T @ J @ eta
  system = PseudoHermitianSystem(H=H, S=0.5 * (S + S.T))
  q, sd = spectral_metric(system)
  assert np.allclose(sd.eigenvalues, [-1., 0.5, 2.], atol=1e-8)
  assert selfadjointness_residual(q, H) <= 1e-9
  assert positivity_report(q, sd)["positivity_status"] == POSITIVE
  # the positive metric is eta^dagger eta up to per-level scalars
  G = sd.right_vectors.T.conj() @ q @ sd.right_vectors
  assert np.allclose(G, np.eye(3), atol=1e-8)
