import numpy as np
import pytest

from steerwig.errors import DimensionError, InsufficientCutoffError, NoPhotonError
from steerwig.factories import epr_state
from steerwig.fock import (
    FockDensityMatrix,
    OracleConfig,
    annihilation,
    beamsplitter_unitary,
    build_epr_fock,
    displacement_unitary,
    oracle_reduced_wigner,
    oracle_state,
    quadrature_moments,
    squeeze_unitary,
    subtract_photon_fock,
    symplectic_unitary,
    wigner_single_mode_fock,
)
from steerwig.state import extract_pair
from steerwig.subtraction import optimal_local_operation, subtraction_weight, wigner_grid
from steerwig.symplectic import rotation, squeezer

from conftest import N_WHITE, S_WHITE


def ket_state(psi):
    psi = np.asarray(psi, dtype=complex)
    return FockDensityMatrix(np.outer(psi, psi.conj()), len(psi), 1)


def fock(k, d=30):
    psi = np.zeros(d)
    psi[k] = 1.0
    return ket_state(psi)


def test_unsqueezed_epr_is_vacuum():
    state = build_epr_fock(1.0, 1.0, 1.0, OracleConfig(cutoff=8))
    expected = np.zeros(64)
    expected[0] = 1.0
    assert np.allclose(state.rho, np.outer(expected, expected), atol=1e-14)


def test_subtract_one_photon():
    out, weight = subtract_photon_fock(fock(1), 0)
    assert weight == pytest.approx(1.0)
    assert np.allclose(out.rho, fock(0).rho)
    with pytest.raises(NoPhotonError):
        subtract_photon_fock(fock(0), 0)


def test_coherent_state_is_eigenstate():
    d = 30
    psi = displacement_unitary(1.0, d, 2 * d)[:, 0]
    out, weight = subtract_photon_fock(ket_state(psi), 0)
    fidelity = np.real(psi.conj() @ out.rho @ psi) / np.real(psi.conj() @ psi)
    assert fidelity >= 1 - 1e-6
    assert weight == pytest.approx(1.0, abs=1e-6)


def test_wigner_vacuum_and_single_photon():
    beta = np.array([[0.0, 0.0], [1.0, -0.5], [2.0, 1.0]])
    vac = wigner_single_mode_fock(fock(0), beta)
    np.testing.assert_allclose(vac, np.exp(-0.5 * (beta**2).sum(-1)) / (2 * np.pi), rtol=1e-12)
    assert wigner_single_mode_fock(fock(1), [0.0, 0.0]) == pytest.approx(-1 / (2 * np.pi), rel=1e-12)


def test_wigner_needs_single_mode():
    with pytest.raises(DimensionError):
        wigner_single_mode_fock(build_epr_fock(1.0, 1.0, 1.0, OracleConfig(cutoff=6)), [0.0, 0.0])


def test_wigner_normalization():
    x = np.linspace(-8, 8, 161)
    beta = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1)
    for k in (0, 1, 3):
        values = wigner_single_mode_fock(fock(k), beta)
        assert np.trapezoid(np.trapezoid(values, x, axis=1), x) == pytest.approx(1.0, abs=1e-4)


def test_squeeze_and_displacement_moments():
    d = 40
    sq = ket_state(squeeze_unitary(0.3, d, 2 * d)[:, 0])
    mean, V = quadrature_moments(sq)
    np.testing.assert_allclose(V, np.diag([np.exp(0.6), np.exp(-0.6)]), atol=1e-8)
    coh = ket_state(displacement_unitary(0.5 - 0.25j, d, 2 * d)[:, 0])
    mean, V = quadrature_moments(coh)
    np.testing.assert_allclose(mean, [1.0, -0.5], atol=1e-10)
    np.testing.assert_allclose(V, np.eye(2), atol=1e-10)


def test_symplectic_unitary_matches_matrix():
    d = 40
    M = rotation(0.4) @ squeezer(0.25) @ rotation(-1.1)
    vac = ket_state(symplectic_unitary(M, d, 2 * d)[:, 0])
    _, V = quadrature_moments(vac)
    np.testing.assert_allclose(V, M @ M.T, atol=1e-8)


def test_beamsplitter_unitary_is_orthogonal():
    U = beamsplitter_unitary(10)
    assert np.allclose(U @ U.T, np.eye(100), atol=1e-12)


@pytest.mark.parametrize("s1,s2,n", [(S_WHITE, S_WHITE, N_WHITE), (S_WHITE, 10**0.1, 1.5), (2.0, 1.0, 1.0)])
def test_moments_match_gaussian_covariance(s1, s2, n):
    state = build_epr_fock(s1, s2, n)
    mean, V = quadrature_moments(state)
    np.testing.assert_allclose(V, epr_state(s1, s2, n).V, atol=1e-4)
    np.testing.assert_allclose(mean, 0.0, atol=1e-12)
    assert state.trace() == pytest.approx(1.0, abs=1e-12)
    assert state.hermiticity_defect() < 1e-12
    assert state.min_eigenvalue() > -1e-10


def test_mean_photon_number_white():
    state = build_epr_fock(S_WHITE, S_WHITE, N_WHITE)
    pair = extract_pair(epr_state(S_WHITE, S_WHITE, N_WHITE), 0, 1)
    expected = subtraction_weight(pair) / 4
    assert expected == pytest.approx(0.373, abs=1e-3)
    assert state.mean_photons(1) == pytest.approx(expected, abs=1e-4)
    _, weight = oracle_state(S_WHITE, S_WHITE, N_WHITE)
    assert weight == pytest.approx(expected, abs=1e-4)


def test_weight_includes_displacement():
    pair = extract_pair(epr_state(S_WHITE, S_WHITE, N_WHITE), 0, 1).displaced(delta_g=(1.0, -0.5))
    _, weight = oracle_state(S_WHITE, S_WHITE, N_WHITE, xi_g=(1.0, -0.5))
    assert weight == pytest.approx(subtraction_weight(pair) / 4, abs=1e-4)


def test_small_cutoff_reports_leakage():
    with pytest.raises(InsufficientCutoffError) as info:
        build_epr_fock(10.0, 10.0, 1.5, OracleConfig(cutoff=6))
    assert info.value.leakage > 1e-6


def test_independent_modes_give_plain_gaussian():
    # s2 = 1/s1 undoes the correlation: both outputs are the same squeezed thermal mode
    s, n = 2.0, 1.3
    pair = extract_pair(epr_state(s, 1 / s, n), 0, 1)
    assert np.allclose(pair.V_fg, 0, atol=1e-14)
    grid = oracle_reduced_wigner(s, 1 / s, n, window=6.0, resolution=41)
    x = grid.x
    beta = np.stack(np.meshgrid(x, grid.p, indexing="ij"), axis=-1)
    V_f = pair.V_f
    quad = np.einsum("...i,ij,...j->...", beta, np.linalg.inv(V_f), beta)
    plain = np.exp(-0.5 * quad) / (2 * np.pi * np.sqrt(np.linalg.det(V_f)))
    assert np.max(np.abs(grid.values - plain)) <= 1e-4


def _sup(s1, s2, n, R=None, xi_g=(0.0, 0.0), config=None):
    pair = extract_pair(epr_state(s1, s2, n), 0, 1).displaced(delta_g=xi_g)
    oracle = oracle_reduced_wigner(s1, s2, n, R, xi_g, config, window=6.0, resolution=61)
    analytic = wigner_grid(pair, R, window=6.0, resolution=61)
    return np.max(np.abs(oracle.values - analytic.values)), oracle, analytic


def test_oracle_agrees_with_closed_form_white():
    err, oracle, analytic = _sup(S_WHITE, S_WHITE, N_WHITE)
    assert err <= 1e-3
    assert oracle.w_min == pytest.approx(analytic.w_min, abs=1e-3)


def test_oracle_agrees_with_optimal_operation_and_displacement():
    s1, s2 = S_WHITE, 10**0.1
    R = optimal_local_operation(extract_pair(epr_state(s1, s2, 1.2), 0, 1))
    for xi in ((0.0, 0.0), (0.5, -0.3)):
        err, _, _ = _sup(s1, s2, 1.2, R, xi)
        assert err <= 1e-3


def test_cutoff_convergence():
    coarse = oracle_reduced_wigner(S_WHITE, S_WHITE, N_WHITE, config=OracleConfig(cutoff=30), resolution=41)
    fine = oracle_reduced_wigner(S_WHITE, S_WHITE, N_WHITE, config=OracleConfig(cutoff=60), resolution=41)
    assert np.max(np.abs(coarse.values - fine.values)) <= 1e-5


def test_annihilation_shape():
    a = annihilation(4)
    assert a[0, 1] == 1.0 and a[2, 3] == pytest.approx(np.sqrt(3))
