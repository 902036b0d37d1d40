from phmetric.lee_model import LeeParams, lee_system
from phmetric.spectral_metric import spectral_metric

from types import SimpleNamespace

import numpy as np
import pytest

# masses shared by all Lee-model tests, mu = m_theta + m_N - m_V = 0.5
MASSES = {"m_theta": 1., "m_V": 1.5, "m_N": 1.}


def make_lee(g: float, n_max: int = 8, normalization: str = "dirac") -> SimpleNamespace:
  params = LeeParams(g=g, n_max=n_max, **MASSES)
  basis, system = lee_system(params)
  q, sd = spectral_metric(system, normalization)
  return SimpleNamespace(params=params, basis=basis, system=system, sd=sd, q=q)


@pytest.fixture(scope="session")
def lee_factory():
  return make_lee


@pytest.fixture(scope="session")
def lee_real():
  return make_lee(0.05)


@pytest.fixture(scope="session")
def lee_hermitian():
  return make_lee(0.)


@pytest.fixture(scope="session")
def lee_broken():
  return make_lee(0.2)


@pytest.fixture
def rng():
  return np.random.default_rng(1)
