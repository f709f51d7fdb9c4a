"""Brute-force photon subtraction in a truncated number basis.

This module deliberately avoids the Gaussian formalism: states are density
matrices over Fock states ``|0>..|d-1>`` per mode, Gaussian unitaries are
matrix exponentials of their truncated generators, and the Wigner function
is evaluated from the number-basis kernel. It exists to check the closed
forms in :mod:`steerwig.subtraction` independently.

Operators follow ``a = (x + i p) / 2`` so that ``[x, p] = 2i``.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln

from .errors import DimensionError, InsufficientCutoffError, NoPhotonError, SteerwigError
from .subtraction import WignerGrid, grid_axes
from .symplectic import euler_2x2


@dataclass(frozen=True)
class OracleConfig:
    cutoff: int = 30
    leakage_bound: float = 1e-6
    # extra levels used while exponentiating single-mode generators
    pad: int = None
    window: float = 6.0
    resolution: int = 101

    def __post_init__(self):
        if self.cutoff < 4:
            raise SteerwigError(f"cutoff must be at least 4, got {self.cutoff}")

    @property
    def work_dim(self):
        return self.cutoff + (self.cutoff if self.pad is None else self.pad)


@dataclass(frozen=True, eq=False)
class FockDensityMatrix:
    rho: np.ndarray = field(repr=False)
    cutoff: int
    modes: int

    def __post_init__(self):
        if self.modes not in (1, 2):
            raise DimensionError("only one- and two-mode Fock states are supported")
        if self.rho.shape != (self.cutoff**self.modes,) * 2:
            raise DimensionError(f"rho has shape {self.rho.shape}")

    def tensor(self):
        d = self.cutoff
        return self.rho.reshape((d,) * (2 * self.modes))

    def marginal(self, k):
        if self.modes == 1:
            return self
        t = self.tensor()
        r = np.einsum("ijkj->ik", t) if k == 0 else np.einsum("ijil->jl", t)
        return FockDensityMatrix(r, self.cutoff, 1)

    def populations(self, k=0):
        return np.real(np.diag(self.marginal(k).rho))

    def leakage(self):
        """Largest top-level population over all modes."""
        return max(float(self.populations(k)[-1]) for k in range(self.modes))

    def mean_photons(self, k=0):
        return float(self.populations(k) @ np.arange(self.cutoff))

    def hermiticity_defect(self):
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def trace(self):
        return float(np.real(np.trace(self.rho)))

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh((self.rho + self.rho.conj().T) / 2)[0])


def annihilation(d):
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1)


def _cropped_unitary(generator, d, work_dim):
    """``exp(G)`` built in a larger space and restricted to the first ``d`` levels."""
    return expm(generator(work_dim))[:d, :d]


def squeeze_unitary(r, d, work_dim=None):
    """``exp((r / 2) (a^dag^2 - a^2))``: x-variance grows by ``e^{2r}``."""
    def gen(D):
        a = annihilation(D)
        return 0.5 * r * (a.T @ a.T - a @ a)
    return _cropped_unitary(gen, d, work_dim or d)


def rotation_unitary(theta, d):
    return np.diag(np.exp(-1j * theta * np.arange(d)))


def displacement_unitary(alpha, d, work_dim=None):
    def gen(D):
        a = annihilation(D)
        return alpha * a.T - np.conj(alpha) * a
    return _cropped_unitary(gen, d, work_dim or d)


def symplectic_unitary(M, d, work_dim=None):
    """Unitary whose action on quadrature means is the 2x2 symplectic ``M``."""
    a, r, b = euler_2x2(M)
    return rotation_unitary(a, d) @ squeeze_unitary(r, d, work_dim) @ rotation_unitary(b, d)


@lru_cache(maxsize=8)
def beamsplitter_unitary(d, theta=np.pi / 4):
    """``exp(theta (a^dag b - a b^dag))`` on two truncated modes.

    The generator conserves total photon number, so it is exponentiated one
    photon-number block at a time; this equals exponentiating the full
    truncated generator.
    """
    U = np.zeros((d * d, d * d))
    for N in range(2 * d - 1):
        i = np.arange(max(0, N - d + 1), min(N, d - 1) + 1)
        idx = i * d + (N - i)
        G = np.zeros((len(i), len(i)))
        # a^dag b |i, N-i> = sqrt((i+1)(N-i)) |i+1, N-i-1>
        amp = np.sqrt((i[:-1] + 1.0) * (N - i[:-1]))
        G[np.arange(1, len(i)), np.arange(len(i) - 1)] = theta * amp
        G = G - G.T
        U[np.ix_(idx, idx)] = expm(G)
    U.setflags(write=False)
    return U


def thermal_populations(nbar, d):
    k = np.arange(d)
    if nbar == 0:
        p = (k == 0).astype(float)
    else:
        p = (nbar / (nbar + 1.0)) ** k / (nbar + 1.0)
    return p


def squeezed_thermal(n, r, config):
    """Single-mode thermal state with quadrature variance ``n``, then squeezed by ``r``."""
    D = config.work_dim
    rho = np.diag(thermal_populations((n - 1.0) / 2.0, D)).astype(complex)
    S = squeeze_unitary(r, D)
    rho = (S @ rho @ S.conj().T)[: config.cutoff, : config.cutoff]
    return rho / np.trace(rho)


def _check_leakage(state, bound):
    leak = state.leakage()
    if leak > bound:
        raise InsufficientCutoffError(
            f"cutoff {state.cutoff} leaks {leak:.2e} population into the top level "
            f"(bound {bound:.0e})",
            leakage=leak,
        )
    return state


def build_epr_fock(s1, s2, n=1.0, config=None):
    """Noisy EPR state: two squeezed thermal modes on a balanced beamsplitter."""
    config = config or OracleConfig()
    if n < 1 or s1 <= 0 or s2 <= 0:
        raise SteerwigError("need n >= 1 and positive squeezing ratios")
    rho1 = squeezed_thermal(n, 0.5 * np.log(s1), config)
    rho2 = squeezed_thermal(n, -0.5 * np.log(s2), config)
    U = beamsplitter_unitary(config.cutoff)
    rho = _conjugate_real(U, np.kron(rho1, rho2))
    state = FockDensityMatrix(rho, config.cutoff, 2)
    return _check_leakage(state, config.leakage_bound)


def _conjugate_real(U, rho):
    # U real: keep the products in real arithmetic
    re = np.ascontiguousarray(rho.real)
    im = np.ascontiguousarray(rho.imag)
    return U @ re @ U.T + 1j * (U @ im @ U.T)


def _lower(state, k):
    """``a_k rho a_k^dag`` without forming the full two-mode operator."""
    a = annihilation(state.cutoff)
    if state.modes == 1:
        return a @ state.rho @ a.T
    d = state.cutoff
    t = state.tensor()
    if k == 0:
        t = np.einsum("ai,ijkl,bk->ajbl", a, t, a, optimize=True)
    else:
        t = np.einsum("aj,ijkl,bl->iakb", a, t, a, optimize=True)
    return t.reshape(d * d, d * d)


def apply_local_unitary(state, k, U):
    if state.modes == 1:
        return FockDensityMatrix(U @ state.rho @ U.conj().T, state.cutoff, 1)
    t = state.tensor()
    if k == 0:
        t = np.einsum("ai,ijkl,bk->ajbl", U, t, U.conj(), optimize=True)
    else:
        t = np.einsum("aj,ijkl,bl->iakb", U, t, U.conj(), optimize=True)
    d = state.cutoff
    return FockDensityMatrix(t.reshape(d * d, d * d), d, 2)


def displace_fock(state, k, delta, config=None):
    """Shift the quadrature means of mode ``k`` by ``delta = (dx, dp)``."""
    config = config or OracleConfig(cutoff=state.cutoff)
    alpha = (delta[0] + 1j * delta[1]) / 2.0
    U = displacement_unitary(alpha, state.cutoff, config.work_dim)
    return apply_local_unitary(state, k, U)


def apply_symplectic_fock(state, k, R, config=None):
    """Local Gaussian unitary whose covariance action is ``V_k -> R^T V_k R``."""
    config = config or OracleConfig(cutoff=state.cutoff)
    U = symplectic_unitary(np.asarray(R, dtype=float).T, state.cutoff, config.work_dim)
    return apply_local_unitary(state, k, U)


def subtract_photon_fock(state, k, R=None, config=None):
    """Apply ``a_k`` (after an optional local symplectic ``R``) and renormalize.

    Returns ``(subtracted_state, mean_photons)`` where ``mean_photons`` is the
    unnormalized weight ``tr[rho a_k^dag a_k]``.
    """
    if R is not None:
        state = apply_symplectic_fock(state, k, R, config)
    rho = _lower(state, k)
    d = state.cutoff
    weight = float(np.real(np.trace(rho)))
    if weight <= 1e-10:
        raise NoPhotonError(f"mode {k} holds no photons to subtract (<n> = {weight:.3e})")
    return FockDensityMatrix(rho / weight, d, state.modes), weight


def partial_trace(state, keep):
    return state.marginal(keep)


def wigner_single_mode_fock(state, beta):
    """Wigner function of a one-mode density matrix at points ``beta`` (shape ``(..., 2)``).

    Normalized over ``dx dp``: the vacuum gives ``exp(-|beta|^2 / 2) / (2 pi)``.
    """
    if state.modes != 1:
        raise DimensionError("Wigner kernel needs a single-mode state")
    rho = state.rho
    d = state.cutoff
    beta = np.asarray(beta, dtype=float)
    alpha = (beta[..., 0] + 1j * beta[..., 1]) / 2.0
    flat = alpha.ravel()
    r2 = 4.0 * np.abs(flat) ** 2
    total = np.zeros(flat.shape, dtype=complex)
    for k in range(d):
        n = np.arange(d - k)
        coef = rho[n + k, n] * (-1.0) ** n * np.exp(0.5 * (gammaln(n + 1) - gammaln(n + k + 1)))
        lag = eval_genlaguerre(n[:, None], k, r2[None, :])
        term = (coef @ lag) * (2.0 * np.conj(flat)) ** k
        total += term if k == 0 else 2.0 * term.real
    w = (2.0 / np.pi) * np.exp(-0.5 * r2) * total.real / 4.0
    return w.reshape(alpha.shape)


def quadrature_moments(state):
    """Means and covariance matrix (interleaved, vacuum = 1) of a Fock state."""
    d = state.cutoff
    a = annihilation(d)
    quads = [a + a.T, -1j * (a - a.T)]
    ops = [(k, q) for k in range(state.modes) for q in quads]

    def expect(terms):
        # terms: {mode: single-mode operator}; contracts without building kron products
        if state.modes == 1:
            return np.trace(state.rho @ terms[0])
        A = terms.get(0, np.eye(d))
        B = terms.get(1, np.eye(d))
        return np.einsum("ijkl,ki,lj->", state.tensor(), A, B, optimize=True)

    mean = np.array([np.real(expect({k: q})) for k, q in ops])
    V = np.empty((len(ops), len(ops)))
    for i, (ki, qi) in enumerate(ops):
        for j, (kj, qj) in enumerate(ops):
            if ki == kj:
                second = expect({ki: 0.5 * (qi @ qj + qj @ qi)})
            else:
                second = expect({ki: qi, kj: qj})
            V[i, j] = np.real(second) - mean[i] * mean[j]
    return mean, V


def oracle_state(s1, s2, n=1.0, R=None, xi_g=(0.0, 0.0), config=None):
    """Target-mode state after displacing, transforming and subtracting in mode g.

    Mode f is the first output port of the beamsplitter, mode g the second.
    Returns ``(reduced_state_f, mean_photons_g)``.
    """
    config = config or OracleConfig()
    state = build_epr_fock(s1, s2, n, config)
    if np.any(xi_g):
        state = displace_fock(state, 1, xi_g, config)
    if R is not None:
        state = apply_symplectic_fock(state, 1, R, config)
    _check_leakage(state, config.leakage_bound)
    minus, weight = subtract_photon_fock(state, 1)
    return partial_trace(minus, 0), weight


def oracle_reduced_wigner(s1, s2, n=1.0, R=None, xi_g=(0.0, 0.0), config=None,
                          window=None, resolution=None):
    config = config or OracleConfig()
    x, p = grid_axes(config.window if window is None else window,
                     config.resolution if resolution is None else resolution)
    reduced, _ = oracle_state(s1, s2, n, R, xi_g, config)
    beta = np.stack(np.meshgrid(x, p, indexing="ij"), axis=-1)
    values = wigner_single_mode_fock(reduced, beta)
    i, j = np.unravel_index(np.argmin(values), values.shape)
    return WignerGrid(x=x, p=p, values=values, w_min=float(values[i, j]),
                      minimum_location=np.array([x[i], p[j]]))
