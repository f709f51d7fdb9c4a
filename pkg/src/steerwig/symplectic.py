"""Real symplectic linear algebra on quadrature space.

Conventions used throughout the package: ``[x, p] = 2i`` so the vacuum
covariance matrix is the identity, and the canonical quadrature ordering
is interleaved ``(x1, p1, x2, p2, ...)``.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    DecompositionDomainError,
    DimensionError,
    SingularMarginalError,
)

CONDITION_CAP = 1e12


class QuadratureOrdering(str, Enum):
    INTERLEAVED = "interleaved"
    BLOCKWISE = "blockwise"


def _n_modes(dim):
    if dim <= 0 or dim % 2:
        raise DimensionError(f"expected an even, positive dimension, got {dim}")
    return dim // 2


def symplectic_form(m):
    """Interleaved symplectic form for ``m`` modes.

    Each mode carries the block ``[[0, -1], [1, 0]]`` so that ``Omega @ f``
    is the conjugate quadrature of ``f``, i.e. ``[q(f), q(Omega f)] = 2i``.
    """
    if m < 1:
        raise DimensionError(f"number of modes must be positive, got {m}")
    block = np.array([[0.0, -1.0], [1.0, 0.0]])
    return np.kron(np.eye(m), block)


def is_symplectic(M, tol=1e-10):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    omega = symplectic_form(_n_modes(M.shape[0]))
    return bool(np.max(np.abs(M.T @ omega @ M - omega)) <= tol)


def _permutation(m, source, target):
    source = QuadratureOrdering(source)
    target = QuadratureOrdering(target)
    # perm[i] = position in the interleaved vector of blockwise entry i
    to_block = np.concatenate([np.arange(0, 2 * m, 2), np.arange(1, 2 * m, 2)])
    if source == target:
        return np.arange(2 * m)
    if source is QuadratureOrdering.INTERLEAVED:
        return to_block
    return np.argsort(to_block)


def reorder(M, source, target):
    """Convert a vector or matrix between quadrature orderings."""
    M = np.asarray(M, dtype=float)
    if M.ndim not in (1, 2) or (M.ndim == 2 and M.shape[0] != M.shape[1]):
        raise DimensionError(f"cannot reorder an array of shape {M.shape}")
    perm = _permutation(_n_modes(M.shape[0]), source, target)
    if M.ndim == 1:
        return M[perm]
    return M[np.ix_(perm, perm)]


def safe_inv(A, what="matrix"):
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)) or np.linalg.cond(A) > CONDITION_CAP:
        raise SingularMarginalError(f"{what} is singular (condition number above {CONDITION_CAP:g})")
    return np.linalg.inv(A)


def conditional_covariance(V_f, V_g, V_fg):
    """Schur complement ``V_g - V_fg^T V_f^{-1} V_fg``."""
    V_f = np.asarray(V_f, dtype=float)
    V_fg = np.asarray(V_fg, dtype=float)
    out = np.asarray(V_g, dtype=float) - V_fg.T @ safe_inv(V_f, "V_f") @ V_fg
    return (out + out.T) / 2


def schur_conditional(pair):
    """Conditional covariance of the subtraction mode given the target mode."""
    return conditional_covariance(pair.V_f, pair.V_g, pair.V_fg)


@dataclass(frozen=True)
class WilliamsonFactors:
    """Single-mode Williamson factors with ``V = nu * S.T @ S``.

    ``S`` is fixed to the symmetric positive square root of ``V / nu``; other
    valid choices differ by a rotation and are not exposed.
    """

    nu: float
    S: np.ndarray


def williamson_2x2(V):
    V = np.asarray(V, dtype=float)
    if V.shape != (2, 2):
        raise DimensionError(f"expected a 2x2 matrix, got shape {V.shape}")
    if not np.allclose(V, V.T, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(V)))):
        raise DecompositionDomainError("matrix is not symmetric")
    V = (V + V.T) / 2
    w, U = np.linalg.eigh(V)
    if not np.all(np.isfinite(w)) or w[0] <= 0 or w[1] / w[0] > CONDITION_CAP:
        raise DecompositionDomainError(f"matrix is not positive definite (eigenvalues {w})")
    nu = float(np.sqrt(w[0] * w[1]))
    S = U @ np.diag(np.sqrt(w / nu)) @ U.T
    return WilliamsonFactors(nu=nu, S=(S + S.T) / 2)


def symplectic_eigenvalues(V):
    """Symplectic spectrum of a 2m x 2m covariance matrix, sorted ascending."""
    V = np.asarray(V, dtype=float)
    m = _n_modes(V.shape[0])
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(m) @ V))
    return np.sort(ev)[::2]


def rotation(theta):
    """Phase-space rotation matching ``exp(-i theta a^dag a)``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def squeezer(r):
    """``diag(e^r, e^-r)``: stretches x and compresses p for ``r > 0``."""
    return np.diag([np.exp(r), np.exp(-r)])


def euler_2x2(M):
    """Split a 2x2 symplectic ``M`` as ``rotation(a) @ squeezer(r) @ rotation(b)``.

    Returns ``(a, r, b)`` with ``r >= 0``.
    """
    U, sv, Vt = np.linalg.svd(np.asarray(M, dtype=float))
    if np.linalg.det(U) < 0:
        flip = np.diag([1.0, -1.0])
        U, Vt = U @ flip, flip @ Vt
    r = 0.5 * np.log(sv[0] / sv[1])
    a = np.arctan2(U[0, 1], U[0, 0])
    b = np.arctan2(Vt[0, 1], Vt[0, 0])
    return float(a), float(r), float(b)
