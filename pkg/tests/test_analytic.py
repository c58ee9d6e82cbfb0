import cmath
import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from catgen import analytic
from catgen.fock import CatTarget, cat_vector
from catgen.closed import JointPureState, condition_on_qubit
from catgen.model import SystemParams

from conftest import preset_params

# reference coherent amplitude at t_s for the delta = g working point, four decimals
ALPHA_TS_REF = complex(-1.9005, 0.6228)
# [DERIVED] 0.5 (1 +/- e^{-8}) evaluated in mpmath
P_PLUS = 0.50016773131395126
P_MINUS = 0.49983226868604874
# [DERIVED] log2[(1/4)(sqrt2/sqrt(1+e^-8) + sqrt2/sqrt(1-e^-8))^2] in mpmath
LN_TS = 0.99999996
# [DERIVED] entropy at |alpha| = 2 from the two eigenvalues above, mpmath
S_TS = 0.99999991882302923


@pytest.fixture(scope="module")
def sol():
    return analytic.rwa_solution(preset_params("fig6"))


def test_alpha_at_origin_and_peak(sol, t_s):
    assert analytic.alpha_t(sol, 0.0) == 0
    a = analytic.alpha_t(sol, t_s)
    assert abs(a - ALPHA_TS_REF) < 1e-4
    assert abs(a) == pytest.approx(2.0, abs=1e-9)
    assert cmath.phase(a) == pytest.approx(2.8249, abs=1e-4)


def test_resonant_branch_grows_linearly():
    sol = analytic.RwaSolution(SystemParams(omega_r=200.0, omega_0=100.0, xi=1.5271), g=0.3, delta=0.0)
    for t in (0.5, 3.0, 11.0):
        assert abs(analytic.alpha_t(sol, t)) == pytest.approx(0.3 * t, rel=1e-14)
        assert analytic.mean_excitation(sol, t) == pytest.approx((0.3 * t) ** 2, rel=1e-14)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.0, 60.0))
def test_alpha_bounded_periodic_and_consistent(t):
    sol = analytic.rwa_solution(preset_params("fig6"))
    period = 2 * math.pi / sol.delta
    a = analytic.alpha_t(sol, t)
    assert abs(a) <= 2 * sol.g / sol.delta + 1e-12
    assert abs(abs(analytic.alpha_t(sol, t + period)) - abs(a)) < 1e-9
    assert abs(analytic.mean_excitation(sol, t) - abs(a) ** 2) < 1e-12
    p_plus, p_minus = analytic.cat_probabilities(sol, t)
    assert p_plus + p_minus == 1.0
    assert p_plus >= 0.5 >= p_minus >= 0.0
    assert abs(analytic.entropy(sol, t) - analytic.entropy(sol, t + period)) < 1e-9


def test_mean_excitation_values(sol, t_s):
    assert analytic.mean_excitation(sol, 0.0) == 0
    assert analytic.mean_excitation(sol, t_s) == pytest.approx(4.0, abs=1e-9)
    assert analytic.mean_excitation(sol, t_s / 2) == pytest.approx(2.0, abs=1e-9)


def test_probabilities(sol, t_s):
    assert analytic.cat_probabilities(sol, 0.0) == (1.0, 0.0)
    p = analytic.cat_probabilities(sol, t_s)
    assert p[0] == pytest.approx(P_PLUS, abs=1e-12)
    assert p[1] == pytest.approx(P_MINUS, abs=1e-12)
    dec = analytic.cat_probabilities(sol, 2 * t_s)
    assert dec[0] == pytest.approx(1.0, abs=1e-12)


def test_entanglement_measures(sol, t_s):
    assert analytic.entropy(sol, 0.0) == 0
    assert analytic.log_negativity_closed(sol, 0.0) == 0
    assert analytic.entropy(sol, t_s) == pytest.approx(S_TS, abs=1e-12)
    assert abs(analytic.entropy(sol, t_s) - 1) < 1e-3
    assert analytic.log_negativity_closed(sol, t_s) == pytest.approx(LN_TS, abs=1e-8)
    assert analytic.log_negativity_closed(sol, 2 * t_s) < 1e-9
    big = analytic.RwaSolution(sol.params, g=5.0, delta=1.0)
    assert analytic.log_negativity_closed(big, math.pi) == pytest.approx(1.0, abs=1e-12)


def test_propagator_identity_at_zero(sol):
    u = analytic.rwa_propagator(sol, 0.0, 10)
    assert np.max(np.abs(u - np.eye(22))) < 1e-15


def test_propagator_truncation_error_hint(sol, t_s):
    with pytest.raises(ValueError, match=r"n_d >= \d+"):
        analytic.rwa_propagator(sol, t_s, 8)


@pytest.mark.parametrize("t1,t2", [(0.3, 2.1), (1.7, 5.9), (4.4, 0.0)])
def test_rwa_hamiltonian_commutator_is_c_number(sol, t1, t2):
    n_d = 30
    h1 = analytic.rwa_hamiltonian(sol, t1, n_d)
    h2 = analytic.rwa_hamiltonian(sol, t2, n_d)
    comm = h1 @ h2 - h2 @ h1
    # [a e^{-i d t1} + h.c., a e^{-i d t2} + h.c.] = -2i sin(d (t1 - t2)); C^2 = 1
    expected = -2j * sol.g ** 2 * math.sin(sol.delta * (t1 - t2))
    # the truncated a, a^dag commutator is exact except on the top Fock level
    keep = np.r_[0:n_d, n_d + 1:2 * n_d + 1]
    block = comm[np.ix_(keep, keep)]
    assert np.max(np.abs(block - expected * np.eye(keep.size))) < 1e-12


def test_propagator_matches_rk4_integration(sol):
    """RK4 oracle on an enlarged Fock space so its own cutoff cannot reach n_d = 30."""
    n_d, big, nsteps = 30, 90, 8000
    dim = big + 1
    a = sp.diags(np.sqrt(np.arange(1, dim)), 1, format="csr").astype(complex)
    A = sp.kron(sp.csr_matrix(sol.coupling_operator), a, format="csr")
    Ad = A.conj().T.tocsr()
    cols = np.r_[0:n_d + 1, dim:dim + n_d + 1]
    U = np.zeros((2 * dim, cols.size), complex)
    U[cols, np.arange(cols.size)] = 1

    def rhs(t, y):
        e = cmath.exp(-1j * sol.delta * t)
        return -1j * sol.g * (e * (A @ y) + e.conjugate() * (Ad @ y))

    h = 2 * math.pi / sol.delta / nsteps
    worst = 0.0
    for k in range(nsteps + 1):
        t = k * h
        if k % (nsteps // 16) == 0:
            worst = max(worst, np.max(np.abs(analytic.rwa_propagator(sol, t, n_d) - U[cols])))
        if k == nsteps:
            break
        k1 = rhs(t, U)
        k2 = rhs(t + h / 2, U + h / 2 * k1)
        k3 = rhs(t + h / 2, U + h / 2 * k2)
        k4 = rhs(t + h, U + h * k3)
        U = U + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert worst < 1e-8


def test_propagator_unitary_on_trusted_block(sol, t_s):
    u = analytic.rwa_propagator(sol, t_s, 60)
    keep = np.r_[0:10, 61:71]
    g = (u.conj().T @ u)[np.ix_(keep, keep)]
    assert np.max(np.abs(g - np.eye(keep.size))) < 1e-9


def test_joint_state_initial(sol):
    psi = analytic.rwa_joint_state(sol, 0.0, 14)
    expected = np.zeros((2, 15), complex)
    expected[:, 0] = 1 / math.sqrt(2)
    assert np.max(np.abs(psi - expected)) < 1e-15


def test_joint_state_norm_and_excitation(sol, t_s):
    for t in (1.0, t_s, 9.3):
        psi = analytic.rwa_joint_state(sol, t, 40)
        assert abs(np.sum(np.abs(psi) ** 2) - 1) < 1e-10
        n = np.sum(np.arange(41) * np.sum(np.abs(psi) ** 2, axis=0))
        assert abs(n - analytic.mean_excitation(sol, t)) < 1e-9


def test_joint_state_conditions_to_cats(sol, t_s):
    for t in (2.0, t_s, 8.0):
        psi = JointPureState.from_table(analytic.rwa_joint_state(sol, t, 40), t)
        pair = condition_on_qubit(psi)
        a = analytic.alpha_t(sol, t)
        for state, parity in ((pair.plus, "even"), (pair.minus, "odd")):
            target = cat_vector(CatTarget(a, parity), 40)
            assert abs(np.vdot(target.amps, state.amps)) ** 2 > 1 - 1e-9


def test_propagator_reproduces_joint_state(sol, t_s):
    """V(t) U(t) |+,0> equals the lab-frame closed form."""
    from catgen.model import to_lab_frame_vector

    n_d = 40
    psi0 = np.zeros(2 * (n_d + 1), complex)
    psi0[0] = psi0[n_d + 1] = 1 / math.sqrt(2)
    rot = (analytic.rwa_propagator(sol, t_s, n_d) @ psi0).reshape(2, n_d + 1)
    lab = to_lab_frame_vector(sol.params, rot, t_s)
    assert np.max(np.abs(lab - analytic.rwa_joint_state(sol, t_s, n_d))) < 1e-12
