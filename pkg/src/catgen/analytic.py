"""Closed-form solution of the conditionally displaced oscillator under the RWA.

In the rotating frame the effective Hamiltonian g C (a e^{-i delta t} + h.c.),
with C the qubit coupling operator, has a scalar two-time commutator, so the
propagator is exactly

    U(t) = exp(i theta(t)) exp{C [eta(t) a^dag - eta(t)^* a]},
    theta(t) = (g/delta)^2 (delta t - sin delta t),
    eta(t) = (g/delta) (1 - exp(i delta t)).

Lab-frame states follow by applying V(t), which turns eta into
alpha(t) = eta(t) exp(-i w_r t).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .fock import cat_normalization, coherent_amplitudes, displacement_matrix
from .model import (
    SIGMA_X,
    SIGMA_Z,
    SystemParams,
    effective_for,
    frame_qubit_unitary,
)
from .specfun import bessel_j


@dataclass(frozen=True)
class RwaSolution:
    """Effective RWA model: coupling g C, detuning delta, plus the frame data."""

    params: SystemParams
    g: float
    delta: float

    @property
    def coupling_operator(self) -> np.ndarray:
        """Hermitian qubit operator C with eigenvalues +/-1."""
        variant = self.params.coupling_variant
        if variant == "sigma_x_displacement":
            return SIGMA_X
        if variant == "jaynes_cummings":
            # H_RWA = -g' sz (...), folded into the sign of C
            return -SIGMA_Z
        return SIGMA_Z

    @property
    def qubit_energy(self) -> float:
        """Surviving static qubit splitting w_q J_0(2 xi)."""
        return self.params.omega_q * bessel_j(0, 2.0 * self.params.xi)

    def eta(self, t: float) -> complex:
        if self.delta == 0:
            return -1j * self.g * t
        return (self.g / self.delta) * (1.0 - cmath.exp(1j * self.delta * t))

    def theta(self, t: float) -> float:
        if self.delta == 0:
            return 0.0
        r = self.g / self.delta
        return r * r * (self.delta * t - math.sin(self.delta * t))


def rwa_solution(params: SystemParams) -> RwaSolution:
    eff = effective_for(params)
    if params.coupling_variant == "sigma_x_displacement" and params.omega_q:
        raise ValueError("the sigma_x variant has a closed-form RWA solution only for omega_q = 0")
    return RwaSolution(params=params, g=eff.g, delta=eff.delta)


def alpha_t(sol: RwaSolution, t: float) -> complex:
    """Lab-frame coherent amplitude (g/delta)(1 - e^{i delta t}) e^{-i w_r t}."""
    return sol.eta(t) * cmath.exp(-1j * sol.params.omega_r * t)


def mean_excitation(sol: RwaSolution, t: float) -> float:
    if sol.delta == 0:
        return (sol.g * t) ** 2
    r = sol.g / sol.delta
    return 4.0 * r * r * math.sin(0.5 * sol.delta * t) ** 2


def cat_probabilities(sol: RwaSolution, t: float) -> tuple[float, float]:
    """(P+, P-) = (1 +/- exp(-2|alpha|^2)) / 2."""
    a2 = abs(alpha_t(sol, t)) ** 2
    p_minus = -0.5 * math.expm1(-2.0 * a2)
    return 1.0 - p_minus, p_minus


def entropy(sol: RwaSolution, t: float) -> float:
    """Von Neumann entanglement entropy in bits."""
    s = 0.0
    for p in cat_probabilities(sol, t):
        if p > 0.0:
            s -= p * math.log2(p)
    return s


def log_negativity_closed(sol: RwaSolution, t: float) -> float:
    """log2[(1/N+ + 1/N-)^2 / 4]."""
    a = alpha_t(sol, t)
    inv_plus = 1.0 / cat_normalization(a, "even")
    n_minus = cat_normalization(a, "odd")
    inv_minus = 0.0 if math.isinf(n_minus) else 1.0 / n_minus
    return max(0.0, math.log2(0.25 * (inv_plus + inv_minus) ** 2))


def _eigenbasis(op: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(op)
    order = np.argsort(-vals)
    return vals[order], vecs[:, order]


def rwa_propagator(sol: RwaSolution, t: float, n_d: int, tail_tol: float = 1e-8) -> np.ndarray:
    """Rotating-frame RWA propagator on the truncated space, dimension 2(n_d+1).

    The blocks use exact displacement matrix elements, so the result agrees
    with the infinite-dimensional operator on every retained element.
    """
    eta = sol.eta(t)
    tail = abs(coherent_amplitudes(eta, n_d)[-1]) ** 2
    if tail > tail_tol:
        need = n_d
        while abs(coherent_amplitudes(eta, need)[-1]) ** 2 > tail_tol:
            need += 1
        raise ValueError(
            f"truncation n_d={n_d} cannot represent displacement |eta|={abs(eta):.3g}; "
            f"use n_d >= {need}"
        )
    dim = n_d + 1
    vals, vecs = _eigenbasis(sol.coupling_operator)
    u = np.zeros((2 * dim, 2 * dim), dtype=np.complex128)
    e_q = sol.qubit_energy
    for lam, v in zip(vals, vecs.T):
        proj = np.outer(v, v.conj())
        phase = cmath.exp(-0.5j * e_q * t * _sz_expectation(v))
        u += phase * np.kron(proj, displacement_matrix(lam * eta, dim))
    return cmath.exp(1j * sol.theta(t)) * u


def _sz_expectation(v: np.ndarray) -> float:
    # C commutes with sz whenever w_q != 0 is allowed, so v is an sz eigenvector
    return float(np.real(np.vdot(v, SIGMA_Z @ v)))


def default_qubit_state(params: SystemParams) -> np.ndarray:
    """Equal superposition of the coupling operator's eigenstates.

    |+>_q for the sigma_z and Jaynes-Cummings variants, |0>_q for sigma_x.
    """
    if params.coupling_variant == "sigma_x_displacement":
        return np.array([1.0, 0.0], dtype=np.complex128)
    return np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2.0)


def rwa_joint_state(
    sol: RwaSolution, t: float, n_d: int, qubit_state: np.ndarray | None = None
) -> np.ndarray:
    """Lab-frame RWA state as a (2, n_d+1) table [A_m; B_m], global phase kept."""
    q0 = default_qubit_state(sol.params) if qubit_state is None else np.asarray(qubit_state, complex)
    vals, vecs = _eigenbasis(sol.coupling_operator)
    a = alpha_t(sol, t)
    psi = np.zeros((2, n_d + 1), dtype=np.complex128)
    e_q = sol.qubit_energy
    for lam, v in zip(vals, vecs.T):
        weight = np.vdot(v, q0)
        phase = cmath.exp(-0.5j * e_q * t * _sz_expectation(v))
        psi += phase * weight * np.outer(v, coherent_amplitudes(lam * a, n_d))
    psi = frame_qubit_unitary(sol.params, t) @ psi
    return cmath.exp(1j * sol.theta(t)) * psi


def rwa_hamiltonian(sol: RwaSolution, t: float, n_d: int) -> np.ndarray:
    """Rotating-frame g C (a e^{-i delta t} + a^dag e^{i delta t}) + w_q J_0 sz / 2."""
    dim = n_d + 1
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=np.float64)), 1)
    x = a * cmath.exp(-1j * sol.delta * t)
    x = x + x.conj().T
    return sol.g * np.kron(sol.coupling_operator, x) + 0.5 * sol.qubit_energy * np.kron(
        SIGMA_Z, np.eye(dim)
    )

