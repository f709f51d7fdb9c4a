import numpy as np
import pytest
from scipy.linalg import expm

from steerwig.symplectic import symplectic_form

N_WHITE = 1.2
S_WHITE = 10 ** 0.4  # 4 dB


def random_symplectic(rng, m, scale=0.6):
    H = rng.normal(size=(2 * m, 2 * m)) * scale
    return expm(symplectic_form(m) @ (H + H.T) / 2)


def random_physical_cov(rng, m=2, scale=0.6, max_thermal=2.5):
    nus = rng.uniform(1.0, max_thermal, size=m)
    M = random_symplectic(rng, m, scale)
    return M @ np.diag(np.repeat(nus, 2)) @ M.T


@pytest.fixture
def rng():
    return np.random.default_rng(20201)
