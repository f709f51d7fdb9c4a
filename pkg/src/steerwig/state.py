"""Multimode Gaussian states: covariance + mean, and the operations on them."""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    ModeOverlapError,
    NormalizationError,
    NotSymplecticError,
    SingularMarginalError,
    SteerwigError,
    UnphysicalStateError,
)
from .symplectic import (
    CONDITION_CAP,
    QuadratureOrdering,
    is_symplectic,
    reorder,
    symplectic_eigenvalues,
    symplectic_form,
)

PHYSICALITY_TOL = 1e-9


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Gaussian state with interleaved covariance ``V`` and mean ``xi``.

    Vacuum has ``V = 1``. Construction only checks shapes and symmetry;
    use :func:`validate_state` or :meth:`check` for the uncertainty relation.
    """

    V: np.ndarray
    xi: np.ndarray = None

    def __post_init__(self):
        V = np.asarray(self.V, dtype=float)
        if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2 or V.shape[0] == 0:
            raise DimensionError(f"covariance must be 2m x 2m, got shape {V.shape}")
        xi = np.zeros(V.shape[0]) if self.xi is None else np.asarray(self.xi, dtype=float)
        if xi.shape != (V.shape[0],):
            raise DimensionError(f"mean has shape {xi.shape}, expected ({V.shape[0]},)")
        scale = max(1.0, float(np.max(np.abs(V))))
        if np.max(np.abs(V - V.T)) > 1e-9 * scale:
            raise SteerwigError("covariance matrix is not symmetric")
        object.__setattr__(self, "V", _frozen((V + V.T) / 2))
        object.__setattr__(self, "xi", _frozen(xi))

    @classmethod
    def from_blockwise(cls, V, xi=None):
        V = reorder(V, QuadratureOrdering.BLOCKWISE, QuadratureOrdering.INTERLEAVED)
        if xi is not None:
            xi = reorder(xi, QuadratureOrdering.BLOCKWISE, QuadratureOrdering.INTERLEAVED)
        return cls(V, xi)

    @classmethod
    def vacuum(cls, m):
        return cls(np.eye(2 * m))

    @property
    def modes(self):
        return self.V.shape[0] // 2

    def block(self, j, k=None):
        k = j if k is None else k
        return np.array(self.V[2 * j:2 * j + 2, 2 * k:2 * k + 2])

    def check(self):
        diag = validate_state(self)
        if not diag.physical:
            raise UnphysicalStateError(
                f"state violates the uncertainty relation "
                f"(min eigenvalue of V + i*Omega = {diag.min_eigenvalue:.3e})"
            )
        return self

    def __eq__(self, other):
        if not isinstance(other, GaussianState):
            return NotImplemented
        return np.array_equal(self.V, other.V) and np.array_equal(self.xi, other.xi)

    def __repr__(self):
        return f"GaussianState(modes={self.modes})"


@dataclass(frozen=True)
class StateDiagnostics:
    min_eigenvalue: float
    symmetry_defect: float
    symplectic_eigenvalues: np.ndarray = field(repr=False)
    physical: bool

    @property
    def min_symplectic_eigenvalue(self):
        return float(self.symplectic_eigenvalues[0])


def validate_state(state, tol=PHYSICALITY_TOL):
    V = np.asarray(state.V if isinstance(state, GaussianState) else state, dtype=float)
    omega = symplectic_form(V.shape[0] // 2)
    symmetry_defect = float(np.max(np.abs(V - V.T)))
    Vs = (V + V.T) / 2
    min_eig = float(np.min(np.linalg.eigvalsh(Vs + 1j * omega)))
    return StateDiagnostics(
        min_eigenvalue=min_eig,
        symmetry_defect=symmetry_defect,
        symplectic_eigenvalues=symplectic_eigenvalues(Vs),
        physical=bool(min_eig >= -tol and symmetry_defect <= tol),
    )


@dataclass(frozen=True, eq=False)
class ModePair:
    """Two-mode marginal for a target mode f and a subtraction mode g.

    ``V_fg`` holds the correlations between the quadratures of f (rows) and
    g (columns); its sign depends on the beamsplitter phase convention.
    """

    V_f: np.ndarray
    V_g: np.ndarray
    V_fg: np.ndarray
    xi_f: np.ndarray = None
    xi_g: np.ndarray = None

    def __post_init__(self):
        for name in ("V_f", "V_g", "V_fg"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.shape != (2, 2):
                raise DimensionError(f"{name} must be 2x2, got shape {a.shape}")
            object.__setattr__(self, name, _frozen(a))
        for name in ("xi_f", "xi_g"):
            v = getattr(self, name)
            v = np.zeros(2) if v is None else np.asarray(v, dtype=float)
            if v.shape != (2,):
                raise DimensionError(f"{name} must have length 2, got shape {v.shape}")
            object.__setattr__(self, name, _frozen(v))

    @property
    def joint(self):
        return np.block([[self.V_f, self.V_fg], [self.V_fg.T, self.V_g]])

    def as_state(self):
        return GaussianState(self.joint, np.concatenate([self.xi_f, self.xi_g]))

    def transformed(self, R):
        """Pair after the local symplectic ``R`` acts on the subtraction mode."""
        R = _check_local_symplectic(R)
        return ModePair(
            V_f=self.V_f,
            V_g=R.T @ self.V_g @ R,
            V_fg=self.V_fg @ R,
            xi_f=self.xi_f,
            xi_g=R.T @ self.xi_g,
        )

    def displaced(self, delta_f=(0.0, 0.0), delta_g=(0.0, 0.0)):
        return ModePair(
            self.V_f, self.V_g, self.V_fg,
            self.xi_f + np.asarray(delta_f, dtype=float),
            self.xi_g + np.asarray(delta_g, dtype=float),
        )


def _check_local_symplectic(R, tol=1e-10):
    R = np.asarray(R, dtype=float)
    if R.shape != (2, 2):
        raise DimensionError(f"local operation must be 2x2, got shape {R.shape}")
    if not is_symplectic(R, tol):
        raise NotSymplecticError(f"matrix is not symplectic (det = {np.linalg.det(R):.6g})")
    return R


def _mode_vector(state, f):
    dim = 2 * state.modes
    if isinstance(f, (int, np.integer)):
        if not 0 <= f < state.modes:
            raise DimensionError(f"mode index {f} out of range for {state.modes} modes")
        vec = np.zeros(dim)
        vec[2 * f] = 1.0
        return vec
    vec = np.asarray(f, dtype=float)
    if vec.shape != (dim,):
        raise DimensionError(f"mode vector must have length {dim}, got shape {vec.shape}")
    if abs(np.linalg.norm(vec) - 1.0) > 1e-12:
        raise NormalizationError(f"mode vector has norm {np.linalg.norm(vec):.15g}, expected 1")
    return vec


def extract_pair(state, f, g):
    """Two-mode marginal for modes ``f`` (target) and ``g`` (subtraction).

    Modes are given either as a canonical mode index or as a unit vector in
    phase space; the conjugate quadrature of a mode ``f`` is ``Omega @ f``.
    """
    fv = _mode_vector(state, f)
    gv = _mode_vector(state, g)
    omega = symplectic_form(state.modes)
    if abs(fv @ gv) > 1e-10 or abs(fv @ omega @ gv) > 1e-10:
        raise ModeOverlapError("modes f and g are not orthogonal")
    Bf = np.column_stack([fv, omega @ fv])
    Bg = np.column_stack([gv, omega @ gv])
    V = state.V
    return ModePair(
        V_f=Bf.T @ V @ Bf,
        V_g=Bg.T @ V @ Bg,
        V_fg=Bf.T @ V @ Bg,
        xi_f=Bf.T @ state.xi,
        xi_g=Bg.T @ state.xi,
    )


def _apply(state, M):
    return GaussianState(M @ state.V @ M.T, M @ state.xi)


def apply_local_symplectic(state, k, R):
    """Act with the 2x2 symplectic ``R`` on mode ``k``: ``V_k -> R^T V_k R``."""
    R = _check_local_symplectic(R)
    if not 0 <= k < state.modes:
        raise DimensionError(f"mode index {k} out of range for {state.modes} modes")
    M = np.eye(2 * state.modes)
    M[2 * k:2 * k + 2, 2 * k:2 * k + 2] = R.T
    return _apply(state, M)


def displace(state, delta):
    delta = np.asarray(delta, dtype=float)
    if delta.shape != state.xi.shape:
        raise DimensionError(f"displacement has shape {delta.shape}, expected {state.xi.shape}")
    return GaussianState(state.V, state.xi + delta)


def beamsplitter(state, j, k, t=0.5):
    """Mix modes ``j`` and ``k`` with transmittance ``t`` (``cos(theta)**2``).

    The mode-mixing matrix ``[[c, s], [-s, c]]`` acts identically on the x
    and p quadratures, matching ``exp(theta (a_j^dag a_k - a_j a_k^dag))``.
    """
    if j == k:
        raise DimensionError("beamsplitter needs two distinct modes")
    if not 0.0 <= t <= 1.0:
        raise SteerwigError(f"transmittance must lie in [0, 1], got {t}")
    for idx in (j, k):
        if not 0 <= idx < state.modes:
            raise DimensionError(f"mode index {idx} out of range for {state.modes} modes")
    c, s = np.sqrt(t), np.sqrt(1.0 - t)
    return _mix(state, j, k, c, s)


def _mix(state, j, k, c, s):
    M = np.eye(2 * state.modes)
    for q in (0, 1):
        a, b = 2 * j + q, 2 * k + q
        M[a, a], M[a, b] = c, s
        M[b, a], M[b, b] = -s, c
    return _apply(state, M)


def beamsplitter_inverse(state, j, k, t=0.5):
    """Undo :func:`beamsplitter` with the same arguments."""
    c, s = np.sqrt(t), np.sqrt(1.0 - t)
    return _mix(state, j, k, c, -s)


def purity_factor(V_f):
    """``det(V_f) ** -1/2``; equals 1 for a pure single-mode marginal."""
    if isinstance(V_f, ModePair):
        V_f = V_f.V_f
    V_f = np.asarray(V_f, dtype=float)
    det = np.linalg.det(V_f)
    if det <= 0 or np.linalg.cond(V_f) > CONDITION_CAP:
        raise SingularMarginalError("marginal covariance is singular")
    return float(det ** -0.5)
