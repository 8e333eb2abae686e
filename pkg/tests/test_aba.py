from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from multiwell import aba
from multiwell.bae import SectorLabel, enumerate_sectors
from multiwell.model import build_conserved_Q, build_hamiltonian, model_basis, to_spectral
from strategies import params_strategy

U_PAIRS = [(0.31 + 0.2j, -1.7 + 0.5j), (2.2, 0.4 - 1.1j), (-0.9 + 1.3j, 1.05)]


def test_r_matrix_layout():
    eta, u = 1.7, 0.4 + 0.3j
    R = aba.r_matrix(u, eta)
    b, c = u / (u + eta), eta / (u + eta)
    expected = np.array([[1, 0, 0, 0], [0, b, c, 0], [0, c, b, 0], [0, 0, 0, 1]])
    np.testing.assert_allclose(R, expected, atol=1e-15)
    assert b + c == pytest.approx(1)


def test_yang_baxter():
    rng = np.random.default_rng(0)
    z = rng.normal(size=(100, 2)) + 1j * rng.normal(size=(100, 2))
    assert max(aba.ybe_residual(u, v, 1.3) for u, v in z) < 1e-13


def test_lax_entries_at_zero(a1):
    sp = to_spectral(a1)
    L = aba.lax_entries(0.0, "A", a1, sp, 3)
    b = model_basis(a1, 3)
    NA = np.diag(b.occupations()[:, :2].sum(1))
    np.testing.assert_allclose(L[0][0].data, sp.eta * NA, atol=1e-14)
    # block (1,1) acts on the N+1 sector
    np.testing.assert_allclose(L[1][1].data, np.eye(L[1][1].domain.dim) / sp.eta, atol=1e-15)
    assert L[0][1].domain.N == 4 and L[0][1].codomain.N == 3


@pytest.mark.parametrize("side", "AB")
def test_rll(a2, side):
    sp = to_spectral(a2)
    for u, v in U_PAIRS:
        for C in range(4):
            assert aba.rll_residual(u, v, side, a2, sp, C) < 1e-10


def test_rtt_and_exchange_relations(a1, a2):
    for p in (a1, a2):
        sp = to_spectral(p)
        for u, v in U_PAIRS:
            for C in range(4):
                assert aba.rtt_residual(u, v, p, sp, C) < 1e-10
                assert aba.ac_relation_residual(u, v, p, sp, C) < 1e-10
                assert aba.dc_relation_residual(u, v, p, sp, C) < 1e-10


def test_closed_form_matches_lax_product(a2):
    sp = to_spectral(a2)
    assert max(aba.monodromy_crosscheck(u, a2, sp, 3) for u, _ in U_PAIRS) < 1e-12
    with pytest.raises(ValueError):
        aba.monodromy(0.1, a2, sp, 3, method="guess")


def test_d_is_u_independent(a1):
    sp = to_spectral(a1)
    D1 = aba.monodromy(0.3, a1, sp, 3).D.data
    D2 = aba.monodromy(-2.0 + 1j, a1, sp, 3).D.data
    np.testing.assert_array_equal(D1, D2)


def test_monodromy_shapes(a1):
    T = aba.monodromy(0.5, a1, to_spectral(a1), 2)
    assert T.A.domain.N == T.A.codomain.N == 2
    assert T.B.codomain.N == 1 and T.C.codomain.N == 3


@pytest.mark.parametrize("which", ["a1", "a2"])
def test_transfer_matrix_properties(which, request):
    p = request.getfixturevalue(which)
    sp = to_spectral(p)
    for u, v in U_PAIRS:
        t1, t2 = aba.transfer_matrix(u, p, sp, 3), aba.transfer_matrix(v, p, sp, 3)
        assert np.linalg.norm(t1.data @ t2.data - t2.data @ t1.data) < 1e-10
    c0, c1, c2 = aba.transfer_coefficients(p, sp, 3)
    eye = np.eye(c0.shape[0])
    np.testing.assert_allclose(c1, sp.eta * 3 * eye, atol=1e-10)
    np.testing.assert_allclose(c2, eye, atol=1e-10)
    H = aba.hamiltonian_from_transfer(p, sp, 3)
    np.testing.assert_allclose(H.data, build_hamiltonian(p, 3).data, atol=1e-10)


def test_pseudovacuum_vacuum_sector(a2):
    phi = aba.pseudovacuum(SectorLabel((0, 0), (0, 0)), a2.complement())
    assert phi.basis.N == 0
    np.testing.assert_array_equal(phi.amplitudes, [1.0])


def test_pseudovacuum_a1_l1(a1):
    phi = aba.pseudovacuum(SectorLabel((1,), ()), a1.complement())
    b = phi.basis
    expected = np.zeros(b.dim)
    expected[b.index[(1, 0, 0)]] = 1 / sqrt(2)
    expected[b.index[(0, 1, 0)]] = -1 / sqrt(2)
    np.testing.assert_allclose(phi.amplitudes, expected, atol=1e-15)


def test_pseudovacuum_errors(a1):
    with pytest.raises(ValueError):
        aba.pseudovacuum(SectorLabel((4,), ()), a1.complement(), N=3)
    with pytest.raises(ValueError):
        aba.pseudovacuum(SectorLabel((1, 0), ()), a1.complement())


@pytest.mark.parametrize("which", ["a1", "a2"])
def test_pseudovacuum_conditions_every_sector(which, request):
    p = request.getfixturevalue(which)
    sp = to_spectral(p)
    for lab in enumerate_sectors(p.n, p.m, 3):
        res = aba.pseudovacuum_residuals(lab, p, sp, [0.37, -1.21 + 0.4j, 2.03])
        assert max(res.values()) < 1e-12, lab


def test_bethe_state_r_equals_n_is_pseudovacuum(a1):
    sp = to_spectral(a1)
    lab = SectorLabel((3,), ())
    psi = aba.bethe_state((), lab, a1, sp, 3)
    phi = aba.pseudovacuum(lab, a1.complement(), 3)
    np.testing.assert_array_equal(psi.amplitudes, phi.amplitudes)


def test_bethe_state_table_root(a1):
    sp = to_spectral(a1)
    psi = aba.bethe_state((0.3731349939,), SectorLabel((2,), ()), a1, sp, 3)
    assert aba.hamiltonian_residual(psi, 1.47230743, a1) < 1e-6
    with pytest.raises(ValueError):
        aba.bethe_state((0.1, 0.2), SectorLabel((2,), ()), a1, sp, 3)


def test_bethe_state_permutation_is_scalar(a1):
    sp = to_spectral(a1)
    roots, _ = oracles.A1_ROOTS[0][0]
    lab = SectorLabel((0,), ())
    x = aba.bethe_state(roots, lab, a1, sp, 3).amplitudes
    y = aba.bethe_state(roots[::-1], lab, a1, sp, 3).amplitudes
    cos = abs(np.vdot(x, y)) / (np.linalg.norm(x) * np.linalg.norm(y))
    assert cos == pytest.approx(1, abs=1e-10)


def test_transfer_eigenvalue_on_bethe_state(a1):
    sp = to_spectral(a1)
    lab = SectorLabel((1,), ())
    roots, _ = oracles.A1_ROOTS[1][0]
    psi = aba.bethe_state(roots, lab, a1, sp, 3)
    for u in (0.37, -1.21, 2.03 + 0.5j):
        tau = aba.transfer_matrix(u, a1, sp, 3)
        lam = aba.transfer_eigenvalue(u, roots, lab, sp)
        resid = np.linalg.norm(tau @ psi.amplitudes - lam * psi.amplitudes) / (abs(lam) * psi.norm)
        assert resid < 1e-6


def test_q_eigenvalues(a1):
    comp = a1.complement()
    vac = aba.pseudovacuum(SectorLabel((0,), ()), comp, 3)
    assert aba.q_eigenvalue_check(vac, SectorLabel((0,), ()), comp) == [0.0]
    sp = to_spectral(a1)
    for l, rows in oracles.A1_ROOTS.items():
        lab = SectorLabel((l,), ())
        for roots, _ in rows:
            psi = aba.bethe_state(roots, lab, a1, sp, 3)
            assert max(aba.q_eigenvalue_check(psi, lab, comp)) < 1e-8
    zero = aba.StateVector(vac.basis, np.zeros(vac.basis.dim, complex))
    with pytest.raises(ValueError):
        aba.q_eigenvalue_check(zero, SectorLabel((0,), ()), comp)


def test_q_agrees_with_model_operators(a2):
    comp = a2.complement()
    lab = SectorLabel((1, 0), (0, 2))
    phi = aba.pseudovacuum(lab, comp, 3)
    Q = build_conserved_Q(a2, 3, comp)
    for op, val in zip(Q, [1, 0, 0, 2]):
        np.testing.assert_allclose(op @ phi.amplitudes, val * phi.amplitudes, atol=1e-12)


@settings(max_examples=10, deadline=None)
@given(params_strategy(max_modes=4), st.integers(1, 3), st.complex_numbers(max_magnitude=3),
       st.complex_numbers(max_magnitude=3))
def test_rtt_random_models(p, N, u, v):
    sp = to_spectral(p)
    if abs(u - v + sp.eta) < 1e-3 or abs(u - v) < 1e-3:
        return
    assert aba.rtt_residual(u, v, p, sp, N) < 1e-10 * max(1, abs(u) ** 2, abs(v) ** 2)
