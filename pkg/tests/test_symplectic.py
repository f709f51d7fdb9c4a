import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steerwig.errors import DecompositionDomainError, DimensionError, SingularMarginalError
from steerwig.state import ModePair
from steerwig.symplectic import (
    euler_2x2,
    is_symplectic,
    reorder,
    rotation,
    schur_conditional,
    squeezer,
    symplectic_eigenvalues,
    symplectic_form,
    williamson_2x2,
)

from conftest import N_WHITE, S_WHITE, random_physical_cov


def test_symplectic_form_structure():
    for m in (1, 2, 5):
        omega = symplectic_form(m)
        assert np.array_equal(omega @ omega, -np.eye(2 * m))
        assert np.array_equal(omega.T, -omega)
        assert set(np.unique(omega)) <= {-1.0, 0.0, 1.0}


@pytest.mark.parametrize(
    "M, expected",
    [
        (np.eye(2), True),
        (np.diag([2.0, 0.5]), True),
        (np.diag([2.0, 2.0]), False),
        (rotation(0.3), True),
    ],
)
def test_is_symplectic(M, expected):
    assert is_symplectic(M, tol=1e-12) is expected


def test_is_symplectic_odd_dimension():
    with pytest.raises(DimensionError):
        is_symplectic(np.eye(3))


def test_reorder_examples():
    v = np.array([1.0, 2.0, 3.0, 4.0])
    assert reorder(v, "interleaved", "blockwise").tolist() == [1.0, 3.0, 2.0, 4.0]
    D = np.diag([1.0, 2.0, 3.0, 4.0])
    assert np.array_equal(reorder(D, "interleaved", "blockwise"), np.diag([1.0, 3.0, 2.0, 4.0]))
    assert np.array_equal(reorder(np.eye(6), "blockwise", "interleaved"), np.eye(6))


def test_reorder_is_involution(rng):
    M = rng.normal(size=(6, 6))
    there = reorder(M, "interleaved", "blockwise")
    assert np.array_equal(reorder(there, "blockwise", "interleaved"), M)
    v = np.arange(6.0)
    assert np.array_equal(reorder(reorder(v, "blockwise", "interleaved"), "interleaved", "blockwise"), v)


def test_reorder_bad_dimension():
    with pytest.raises(DimensionError):
        reorder(np.arange(3.0), "interleaved", "blockwise")


def _epr_blocks(s1, s2, n):
    # explicit balanced-beamsplitter arithmetic on diag inputs
    a = np.array([n * s1 + n / s2, n / s1 + n * s2]) / 2
    b = np.array([n / s2 - n * s1, n * s2 - n / s1]) / 2
    return np.diag(a), np.diag(b)


def test_schur_uncorrelated_is_marginal():
    pair = ModePair(np.diag([2.0, 3.0]), np.eye(2), np.zeros((2, 2)))
    assert np.allclose(schur_conditional(pair), np.eye(2))


def test_schur_symmetric_epr():
    Vf, Vfg = _epr_blocks(S_WHITE, S_WHITE, N_WHITE)
    c = N_WHITE * (S_WHITE + 1 / S_WHITE) / 2
    out = schur_conditional(ModePair(Vf, Vf, Vfg))
    assert c == pytest.approx(1.746, abs=1e-3)
    assert np.allclose(out, N_WHITE**2 / c * np.eye(2), atol=1e-13)
    assert out[0, 0] == pytest.approx(0.8247, abs=1e-4)


def test_schur_asymmetric_epr():
    Vf, Vfg = _epr_blocks(10**0.7, 10**0.1, N_WHITE)
    out = schur_conditional(ModePair(Vf, Vf, Vfg))
    assert np.allclose(out, np.diag([1.6455, 0.41333]), atol=1e-4)


def test_schur_singular_marginal():
    with pytest.raises(SingularMarginalError):
        schur_conditional(ModePair(np.diag([1.0, 0.0]), np.eye(2), np.zeros((2, 2))))


def test_schur_invariant_under_rotation_of_f():
    rng = np.random.default_rng(3)
    V = random_physical_cov(rng)
    pair = ModePair(V[:2, :2], V[2:, 2:], V[:2, 2:])
    O = rotation(0.9)
    rotated = ModePair(O @ pair.V_f @ O.T, pair.V_g, O @ pair.V_fg)
    assert np.allclose(schur_conditional(rotated), schur_conditional(pair), atol=1e-12)
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    swapped = ModePair(swap @ pair.V_f @ swap, pair.V_g, swap @ pair.V_fg)
    assert np.allclose(schur_conditional(swapped), schur_conditional(pair), atol=1e-12)


@pytest.mark.parametrize(
    "V, nu, S",
    [
        (np.eye(2), 1.0, np.eye(2)),
        (np.diag([3.0, 3.0]), 3.0, np.eye(2)),
        (np.diag([1.6455, 0.41333]), 0.8247, np.diag([1.4126, 0.70794])),
    ],
)
def test_williamson_examples(V, nu, S):
    fac = williamson_2x2(V)
    assert fac.nu == pytest.approx(nu, abs=1e-4)
    assert np.allclose(fac.S, S, atol=1e-4)
    assert np.allclose(fac.nu * fac.S.T @ fac.S, V, atol=1e-12)


@pytest.mark.parametrize("V", [np.diag([1.0, -1.0]), np.zeros((2, 2)), np.array([[1.0, 2.0], [0.0, 1.0]])])
def test_williamson_domain(V):
    with pytest.raises(DecompositionDomainError):
        williamson_2x2(V)


spd_2x2 = st.tuples(
    st.floats(0.05, 20.0), st.floats(0.05, 20.0), st.floats(0.0, np.pi)
).map(lambda t: rotation(t[2]) @ np.diag([t[0], t[1]]) @ rotation(t[2]).T)


@settings(max_examples=200, deadline=None)
@given(spd_2x2)
def test_williamson_properties(V):
    fac = williamson_2x2(V)
    scale = np.max(np.abs(V))
    assert np.max(np.abs(fac.nu * fac.S.T @ fac.S - V)) <= 1e-10 * scale
    assert fac.nu**2 == pytest.approx(np.linalg.det(V), rel=1e-10)
    assert is_symplectic(fac.S, 1e-10)
    assert np.trace(fac.S.T @ fac.S) >= 2 - 1e-12


def test_schur_of_physical_state_has_nonnegative_nu():
    rng = np.random.default_rng(11)
    for _ in range(200):
        V = random_physical_cov(rng, scale=1.0)
        out = schur_conditional(ModePair(V[:2, :2], V[2:, 2:], V[:2, 2:]))
        assert np.all(np.linalg.eigvalsh(out) > 0)
        assert williamson_2x2(out).nu >= 0


def test_symplectic_eigenvalues_of_thermal():
    assert np.allclose(symplectic_eigenvalues(np.diag([2.0, 2.0, 3.0, 3.0])), [2.0, 3.0])


@pytest.mark.parametrize("M", [rotation(0.4) @ squeezer(0.7) @ rotation(-1.1), np.diag([0.5, 2.0]), np.eye(2)])
def test_euler_reconstructs(M):
    a, r, b = euler_2x2(M)
    assert np.allclose(rotation(a) @ squeezer(r) @ rotation(b), M, atol=1e-12)
    assert r >= 0
