import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from catgen import analytic, closed
from catgen.errors import InvariantViolation
from catgen.model import SystemParams, drive_frequency_for, hamiltonian_matrix

from conftest import preset_params, random_state


def small_params(**kw):
    base = dict(omega_r=10.0, omega_0=drive_frequency_for(10.0, 1.5271), xi=1.5271)
    base.update(kw)
    return SystemParams(**base)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 30.0), st.integers(1, 12))
def test_amplitude_rhs_equals_matrix_form(seed, t, n_d):
    rng = np.random.default_rng(seed)
    p = preset_params("fig3a_w200")
    psi = closed.JointPureState.from_table(random_state(rng, n_d))
    dA, dB = closed.amplitude_rhs(p, psi, t)
    ref = -1j * hamiltonian_matrix(p, t, n_d) @ psi.vector
    assert np.max(np.abs(np.concatenate([dA, dB]) - ref)) < 1e-12 * max(1.0, np.max(np.abs(ref)))
    norm_rate = 2 * np.real(np.vdot(psi.A, dA) + np.vdot(psi.B, dB))
    assert abs(norm_rate) < 1e-12 * max(1.0, np.max(np.abs(ref)))


def test_amplitude_rhs_free_rotation(rng):
    p = small_params(g_0=0.0, xi=0.0)
    psi = closed.JointPureState.from_table(random_state(rng, 5))
    dA, dB = closed.amplitude_rhs(p, psi, 0.7)
    m = np.arange(6)
    assert np.allclose(dA, -1j * m * 10.0 * psi.A, atol=1e-14)
    assert np.allclose(dB, -1j * m * 10.0 * psi.B, atol=1e-14)


def test_amplitude_rhs_rejects_other_variants():
    p = small_params(coupling_variant="sigma_x_displacement")
    with pytest.raises(ValueError):
        closed.amplitude_rhs(p, closed.JointPureState.initial(3), 0.0)


def test_zero_duration_returns_initial():
    p = preset_params("fig3a_w200")
    traj = closed.integrate(p, closed.IntegratorConfig(), 0.0)
    assert len(traj) == 1
    assert np.array_equal(traj.final.table, closed.JointPureState.initial(14).table)


def test_matches_time_ordered_exponentials():
    """Midpoint product of exp(-i H h) over 10^4 micro-steps at n_d = 6, t = 1."""
    p = small_params()
    n_d, t_end, n = 6, 1.0, 10000
    h = t_end / n
    v = closed.JointPureState.initial(n_d).vector
    for k in range(n):
        v = expm(-1j * h * hamiltonian_matrix(p, (k + 0.5) * h, n_d)) @ v
    ours = closed.state_at(p, closed.IntegratorConfig(n_d=n_d), t_end).vector
    assert np.linalg.norm(v - ours) < 1e-7


@pytest.mark.parametrize("variant", ["sigma_x_displacement", "jaynes_cummings"])
def test_other_variants_match_dense_exponentials(variant):
    p = small_params(coupling_variant=variant, omega_q=0.4)
    n_d, t_end, n = 5, 0.5, 5000
    h = t_end / n
    q = np.array([0.6, 0.8j])
    v = closed.JointPureState.initial(n_d, q).vector
    for k in range(n):
        v = expm(-1j * h * hamiltonian_matrix(p, (k + 0.5) * h, n_d)) @ v
    ours = closed.state_at(p, closed.IntegratorConfig(n_d=n_d), t_end,
                           initial=closed.JointPureState.initial(n_d, q)).vector
    assert np.linalg.norm(v - ours) < 1e-7


def test_sampling_grid_and_norm(w200):
    cfg = closed.IntegratorConfig(sample_interval=0.5)
    traj = closed.integrate(w200, cfg, 3.0)
    assert traj.times[0] == 0.0
    assert traj.times[-1] == pytest.approx(3.0, abs=1e-12)
    assert np.all(np.diff(traj.times) > 0)
    for s in traj:
        assert abs(s.norm_squared - 1) < 1e-8
        assert closed.mean_excitation_numeric(s) <= s.n_d
    assert traj.diagnostics["max_norm_drift"] < 1e-8


def test_explicit_times_are_hit_exactly(w200):
    times = [0.25, 1.0, 1.0 + 1e-3, 2.5]
    traj = closed.integrate(w200, closed.IntegratorConfig(), 2.5, times=times)
    assert list(traj.times) == pytest.approx(times, abs=1e-14)
    with pytest.raises(ValueError):
        closed.integrate(w200, closed.IntegratorConfig(), 2.5, times=[1.0, 0.5])


def test_huge_step_aborts_with_diagnostics(w200):
    with pytest.raises(InvariantViolation) as info:
        closed.integrate(w200, closed.IntegratorConfig(step=0.05), 5.0)
    assert "reduce the step" in str(info.value)
    assert info.value.diagnostics["step"] == 0.05


def test_step_halving_converges_at_fourth_order():
    p = preset_params("fig3a_w50")
    t = 3.0
    base = 2 * math.pi / p.omega_r

    def run(div):
        cfg = closed.IntegratorConfig(step=base / div)
        return closed.state_at(p, cfg, t).vector

    a, b, c = run(20), run(40), run(80)
    ratio = np.linalg.norm(a - b) / np.linalg.norm(b - c)
    assert 12 <= ratio <= 20


def test_mean_excitation_numeric_simple_states():
    assert closed.mean_excitation_numeric(closed.JointPureState.initial(4)) == 0
    amps = np.zeros((2, 5), complex)
    amps[0, 1] = 1
    assert closed.mean_excitation_numeric(closed.JointPureState.from_table(amps)) == 1


def test_conditioning_trivial_cases():
    pair = closed.condition_on_qubit(closed.JointPureState.initial(6))
    assert pair.p_plus == pytest.approx(1.0, abs=1e-15) and pair.p_minus == 0
    assert pair.minus is None
    assert abs(pair.plus.amps[0]) == pytest.approx(1.0)
    table = np.zeros((2, 7), complex)
    table[:, 2] = table[:, 3] = 0.5
    pair = closed.condition_on_qubit(closed.JointPureState.from_table(table))
    assert pair.p_minus == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_conditioning_probabilities_sum(seed):
    rng = np.random.default_rng(seed)
    pair = closed.condition_on_qubit(closed.JointPureState.from_table(random_state(rng, 8)))
    assert abs(pair.p_plus + pair.p_minus - 1) < 1e-12
    assert abs(pair.plus.norm - 1) < 1e-12 and abs(pair.minus.norm - 1) < 1e-12


def test_fidelities_at_start(w200, w200_solution):
    s0 = closed.JointPureState.initial(14)
    assert closed.fidelity_vs_rwa(s0, w200_solution) == pytest.approx(1.0, abs=1e-15)
    f_plus, f_minus = closed.fidelity_vs_cat(s0, 0.0)
    assert f_plus == pytest.approx(1.0, abs=1e-15) and f_minus is None


def test_working_point_at_peak(w200_at_ts, w200_solution, t_s):
    s = w200_at_ts.final
    assert abs(closed.mean_excitation_numeric(s) - 4) / 4 < 0.02
    assert closed.fidelity_vs_rwa(s, w200_solution) > 0.99
    f_plus, f_minus = closed.fidelity_vs_cat(s, analytic.alpha_t(w200_solution, t_s))
    assert f_plus > 0.98 and f_minus > 0.98
    pair = closed.condition_on_qubit(s)
    assert abs(pair.p_plus - 0.5) < 0.01


def test_cat_target_degenerate_odd():
    v = closed.cat_target_vector(0.0, "odd", 4)
    assert np.array_equal(v.amps, np.eye(5)[1])


@settings(max_examples=10, deadline=None)
@given(st.floats(0.5, 2.5), st.floats(0.0, 2 * math.pi), st.integers(1, 4))
def test_step_halving_ratio_property(xi, phase, periods):
    p = small_params(xi=xi, omega_0=drive_frequency_for(10.0, xi))
    q = np.array([math.cos(0.3), math.sin(0.3) * complex(math.cos(phase), math.sin(phase))])
    init = closed.JointPureState.initial(8, q)
    base = 2 * math.pi / p.omega_r
    # whole oscillator periods keep every run on a uniform step grid
    t_end = periods * base

    def run(div):
        cfg = closed.IntegratorConfig(n_d=8, step=base / div)
        return closed.state_at(p, cfg, t_end, initial=init).vector

    a, b, c = run(40), run(80), run(160)
    assert np.linalg.norm(b - c) < 1e-6
    ratio = np.linalg.norm(a - b) / np.linalg.norm(b - c)
    assert 12 <= ratio <= 20
