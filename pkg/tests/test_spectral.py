import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import hermite_e

from zitterlab.core import (
    OperatorMatrix,
    PhysicalParams,
    build_hamiltonian,
    build_parity,
    build_sigma_x,
    ladder_motional,
    max_norm,
)
from zitterlab.spectral import (
    SpectralError,
    TruncationWarning,
    ZeroStateError,
    default_p_grid,
    diagonalize,
    energy,
    energy_spinors,
    hermite_e_normalized,
    momentum_eigenstate,
    parity_coeigenstate,
    product_state,
    truncated_momentum_grid,
)

FAMILIES = [(1, "odd"), (1, "even"), (-1, "odd"), (-1, "even")]


def spectrum_for(params, n_cut):
    h = build_hamiltonian(params, n_cut)
    return h, diagonalize(h, build_parity(n_cut))


def test_single_level_spectrum():
    _, spec = spectrum_for(PhysicalParams(omega=1.0), 1)
    np.testing.assert_allclose(spec.eigenvalues, [-1.0, 1.0])
    np.testing.assert_array_equal(spec.parity_labels, [-1, 1])


@pytest.mark.parametrize("lambda_c", [0.6, 5.4])
def test_eigen_invariants(lambda_c):
    h, spec = spectrum_for(PhysicalParams.from_lambda_c(lambda_c), 64)
    v = spec.eigenvectors
    scale = max_norm(h)
    assert max_norm(h.entries @ v - v * spec.eigenvalues) <= 1e-10 * scale
    assert max_norm(v.conj().T @ v - np.eye(128)) <= 1e-10
    pi = build_parity(64).entries
    assert max_norm(pi @ v - v * spec.parity_labels) <= 1e-10
    assert np.all(np.diff(spec.eigenvalues) >= 0)


def test_spectrum_symmetric_and_sectors_balanced(nonrel):
    _, spec = spectrum_for(nonrel, 64)
    np.testing.assert_allclose(np.sort(spec.eigenvalues), np.sort(-spec.eigenvalues), atol=1e-10)
    assert spec.sector(1).size == spec.sector(-1).size == 64


@pytest.mark.parametrize("lambda_c", [0.6, 5.4])
def test_truncated_spectrum_is_dispersion_at_hermite_roots(lambda_c):
    # The truncated (a^dag - a) has eigenvalues -i p_k with p_k the roots of
    # He_n; H then reduces to 2x2 blocks with energies +/- E(p_k).
    params = PhysicalParams.from_lambda_c(lambda_c)
    n = 48
    nodes, _ = hermite_e.hermegauss(n)
    e = np.hypot(params.omega, params.eta_omega_tilde * nodes)
    expected = np.sort(np.concatenate([e, -e]))
    _, spec = spectrum_for(params, n)
    np.testing.assert_allclose(spec.eigenvalues, expected, atol=1e-10 * expected.max())


def test_lowest_energy_bounded_by_rest_energy(nonrel):
    _, spec = spectrum_for(nonrel, 64)
    assert np.min(np.abs(spec.eigenvalues)) >= nonrel.omega * (1 - 1e-12)


def test_degenerate_spectrum_gets_parity_eigenvectors():
    # zero coupling: every level of each spin block is degenerate
    _, spec = spectrum_for(PhysicalParams(eta_omega_tilde=0.0), 10)
    pi = build_parity(10).entries
    v = spec.eigenvectors
    assert max_norm(pi @ v - v * spec.parity_labels) <= 1e-12
    assert spec.sector(1).size == 10


def test_parity_breaking_hamiltonian_rejected(nonrel):
    h = build_hamiltonian(nonrel, 8)
    broken = OperatorMatrix(h.entries + 0.1 * build_sigma_x(8).entries, hermitian=True)
    with pytest.raises(SpectralError):
        diagonalize(broken, build_parity(8))


def test_non_parity_operator_rejected(nonrel):
    with pytest.raises(ValueError):
        diagonalize(build_hamiltonian(nonrel, 4), build_sigma_x(4))


@pytest.mark.parametrize("p", [-2.5, -0.3, 0.0, 1.0, 3.7])
def test_hermite_recurrence_matches_numpy(p):
    n = 30
    factorials = np.array([math.factorial(k) for k in range(n)], dtype=float)
    direct = np.array([hermite_e.hermeval(p, np.eye(n)[k]) for k in range(n)]) / np.sqrt(factorials)
    np.testing.assert_allclose(hermite_e_normalized(p, n), direct, rtol=1e-10, atol=1e-12)


def test_hermite_definition_by_derivatives():
    # He_n(x) = (-1)^n e^{x^2/2} d^n/dx^n e^{-x^2/2}, checked symbolically for small n
    import sympy as sp

    x = sp.Symbol("x")
    for n in range(6):
        poly = sp.simplify((-1) ** n * sp.exp(x**2 / 2) * sp.diff(sp.exp(-(x**2) / 2), x, n))
        value = float(poly.subs(x, 1.3)) / math.sqrt(math.factorial(n))
        assert hermite_e_normalized(1.3, 6)[n] == pytest.approx(value, rel=1e-12)


def test_momentum_zero_is_even_gaussian():
    state = momentum_eigenstate(0.0, 40, residual_threshold=np.inf)
    assert np.all(state.amplitudes[1::2] == 0)
    assert np.linalg.norm(state.amplitudes) == pytest.approx(1.0)


def test_momentum_residual_matches_matrix_application():
    n = 60
    a, ad = ladder_motional(n)
    with pytest.warns(TruncationWarning):
        state = momentum_eigenstate(1.0, n)
    direct = np.linalg.norm((ad - a) @ state.amplitudes + 1j * 1.0 * state.amplitudes)
    assert state.residual == pytest.approx(direct, rel=1e-12)


def test_momentum_exact_at_hermite_roots():
    n = 64
    for p in truncated_momentum_grid(n)[::7]:
        state = momentum_eigenstate(p, n)
        assert state.residual < 1e-10


def test_momentum_states_orthogonalize_with_cutoff():
    def overlap(n):
        a = momentum_eigenstate(1.0, n, residual_threshold=np.inf).amplitudes
        b = momentum_eigenstate(3.0, n, residual_threshold=np.inf).amplitudes
        return abs(np.vdot(a, b))

    coarse = min(overlap(16), overlap(32))
    fine = max(overlap(512), overlap(1024), overlap(2048))
    assert fine < coarse / 3


def test_spinors_rest_frame(nonrel):
    s_plus, s_minus = energy_spinors(0.0, nonrel)
    np.testing.assert_allclose(s_plus, [1, 0])
    np.testing.assert_allclose(s_minus, [0, 1])


@given(st.floats(-50, 50), st.floats(0.0, 4.0), st.floats(0.1, 3.0))
def test_spinors_are_orthonormal_eigenvectors(p, g, omega):
    params = PhysicalParams(omega=omega, eta_omega_tilde=g)
    s_plus, s_minus = energy_spinors(p, params)
    h2 = np.array([[omega, g * p], [g * p, -omega]])
    e = float(energy(p, params))
    assert abs(np.vdot(s_plus, s_minus)) < 1e-12
    assert np.linalg.norm(s_plus) == pytest.approx(1.0)
    assert np.linalg.norm(s_minus) == pytest.approx(1.0)
    np.testing.assert_allclose(h2 @ s_plus, e * s_plus, atol=1e-10 * max(e, 1))
    np.testing.assert_allclose(h2 @ s_minus, -e * s_minus, atol=1e-10 * max(e, 1))


def test_product_states_exact_on_hermite_roots(nonrel):
    n = 128
    h = build_hamiltonian(nonrel, n).entries
    for p in truncated_momentum_grid(n)[60:68]:
        mom = momentum_eigenstate(p, n)
        e = float(energy(p, nonrel))
        for sign, spinor in zip((1, -1), energy_spinors(p, nonrel)):
            psi = product_state(spinor, mom.amplitudes).amplitudes
            assert np.linalg.norm(h @ psi - sign * e * psi) <= 1e-10 * e


@pytest.mark.parametrize("sign,parity", FAMILIES)
def test_coeigenstate_parity_on_grid(nonrel, sign, parity):
    n = 128
    pi = build_parity(n).entries
    target = 1 if parity == "even" else -1
    for p in default_p_grid():
        if p == 0 and sign * target < 0:
            continue
        psi = parity_coeigenstate(sign, parity, p, nonrel, n).amplitudes
        assert np.linalg.norm(pi @ psi - target * psi) <= 1e-8
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("sign,parity", FAMILIES)
def test_coeigenstate_energy_exact_on_hermite_roots(rel, sign, parity):
    n = 128
    h = build_hamiltonian(rel, n).entries
    nodes = truncated_momentum_grid(n)
    for p in nodes[(nodes > 0) & (nodes <= 3)]:
        e = sign * float(energy(p, rel))
        psi = parity_coeigenstate(sign, parity, p, rel, n).amplitudes
        assert np.linalg.norm(h @ psi - e * psi) <= 1e-6 * abs(e)


def test_even_coeigenstate_at_rest(nonrel):
    psi = parity_coeigenstate("+", "even", 0.0, nonrel, 32).amplitudes
    expected = np.kron([1.0, 0.0], momentum_eigenstate(0.0, 32, np.inf).amplitudes)
    np.testing.assert_allclose(psi, expected, atol=1e-14)


@pytest.mark.parametrize("sign,parity", [(1, "odd"), (-1, "even")])
def test_cancelling_coeigenstate_at_rest_raises(nonrel, sign, parity):
    with pytest.raises(ZeroStateError):
        parity_coeigenstate(sign, parity, 0.0, nonrel, 32)


def test_bad_labels(nonrel):
    with pytest.raises(ValueError):
        parity_coeigenstate(0, "odd", 1.0, nonrel, 8)
    with pytest.raises(ValueError):
        parity_coeigenstate(1, "sideways", 1.0, nonrel, 8)
