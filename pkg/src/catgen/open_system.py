"""Lindblad dynamics of the driven qubit-oscillator system with thermal baths.

    d rho/dt = -i[H(t), rho] + gamma_q (nbar_q + 1) D[s-] + gamma_q nbar_q D[s+]
               + kappa_r (nbar_r + 1) D[a] + kappa_r nbar_r D[a^dag]

The integration runs in the same rotating frame as the closed module. The
oscillator dissipators are invariant under that frame; the qubit jump
operators are rotated by exp(-i phi(t) P). Returned samples are lab-frame.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .closed import (
    IntegratorConfig,
    Trajectory,
    cat_target_vector,
    explicit_schedule,
    sample_schedule,
)
from .errors import InvariantViolation
from .model import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SystemParams,
    annihilation,
    hamiltonian_matrix,
    qubit_structure,
    to_lab_frame_density,
    to_rotating_frame_density,
)

log = logging.getLogger(__name__)

OPEN_STEP_DIVISOR = 40
TRACE_ABORT = 1e-5
EIGEN_ABORT = -1e-5
UNDEFINED_PROBABILITY = 1e-9


def open_truncation(nbar_r: float, base: int = 14) -> int:
    return base + int(math.ceil(6.0 * nbar_r))


def open_integrator_config(params: SystemParams, **overrides) -> IntegratorConfig:
    """Defaults for master-equation runs: n_d = 14 + ceil(6 nbar_r), step (2 pi/w_r)/40."""
    settings = {"n_d": open_truncation(params.nbar_r), "step_divisor": OPEN_STEP_DIVISOR}
    settings.update({k: v for k, v in overrides.items() if v is not None})
    return IntegratorConfig(**settings)


@dataclass(frozen=True)
class JointDensityMatrix:
    """Density matrix on qubit x Fock, flat index s * (n_d + 1) + m."""

    rho: np.ndarray
    t: float = 0.0

    @classmethod
    def from_blocks(cls, blocks: np.ndarray, t: float = 0.0) -> "JointDensityMatrix":
        n = blocks.shape[-1]
        return cls(np.ascontiguousarray(blocks.transpose(0, 2, 1, 3)).reshape(2 * n, 2 * n), t)

    @classmethod
    def from_pure(cls, psi: np.ndarray, t: float = 0.0) -> "JointDensityMatrix":
        v = np.asarray(psi, dtype=np.complex128).ravel()
        return cls(np.outer(v, v.conj()), t)

    @classmethod
    def initial(cls, n_d: int) -> "JointDensityMatrix":
        """|+>_q|0>_r: rho_{0,0,0,0} = rho_{0,0,1,0} = rho_{1,0,0,0} = rho_{1,0,1,0} = 1/2."""
        blocks = np.zeros((2, 2, n_d + 1, n_d + 1), dtype=np.complex128)
        blocks[:, :, 0, 0] = 0.5
        return cls.from_blocks(blocks)

    @property
    def n_d(self) -> int:
        return self.rho.shape[0] // 2 - 1

    @property
    def blocks(self) -> np.ndarray:
        """(2, 2, N, N) view indexed [s, s', m, n]."""
        n = self.n_d + 1
        return self.rho.reshape(2, n, 2, n).transpose(0, 2, 1, 3)

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    @property
    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.rho)[0])

    @property
    def purity(self) -> float:
        return float(np.sum(np.abs(self.rho) ** 2))

    @property
    def top_population(self) -> float:
        b = self.blocks
        return float((b[0, 0, -1, -1] + b[1, 1, -1, -1]).real)

    def oscillator_reduced(self) -> np.ndarray:
        b = self.blocks
        return b[0, 0] + b[1, 1]

    def mean_excitation(self) -> float:
        return float(np.dot(np.arange(self.n_d + 1), np.diagonal(self.oscillator_reduced()).real))


def _dissipator(op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    od = op.conj().T
    odo = od @ op
    return op @ rho @ od - 0.5 * (odo @ rho + rho @ odo)


def lindblad_rhs(params: SystemParams, rho, t: float) -> np.ndarray:
    """Lab-frame d rho/dt as a dense matrix; reference form used by the tests."""
    mat = rho.rho if isinstance(rho, JointDensityMatrix) else np.asarray(rho, dtype=np.complex128)
    n_d = mat.shape[0] // 2 - 1
    h = hamiltonian_matrix(params, t, n_d)
    out = 1j * (mat @ h - h @ mat)
    eye_r = np.eye(n_d + 1)
    a = annihilation(n_d)
    terms = (
        (params.gamma_q * (params.nbar_q + 1.0), np.kron(SIGMA_MINUS, eye_r)),
        (params.gamma_q * params.nbar_q, np.kron(SIGMA_PLUS, eye_r)),
        (params.kappa_r * (params.nbar_r + 1.0), np.kron(np.eye(2), a)),
        (params.kappa_r * params.nbar_r, np.kron(np.eye(2), a.conj().T)),
    )
    for rate, op in terms:
        if rate:
            out = out + rate * _dissipator(op, mat)
    return out


def _rates(params: SystemParams) -> np.ndarray:
    return np.array([
        params.gamma_q * (params.nbar_q + 1.0),
        params.gamma_q * params.nbar_q,
        params.kappa_r * (params.nbar_r + 1.0),
        params.kappa_r * params.nbar_r,
    ])


def _check(state: JointDensityMatrix, h: float, n_d: int) -> dict:
    trace_drift = abs(state.trace - 1.0)
    min_eig = state.min_eigenvalue
    info = {
        "t": state.t,
        "trace_drift": trace_drift,
        "min_eigenvalue": min_eig,
        "hermiticity": state.hermiticity_residual,
        "top_population": state.top_population,
    }
    if trace_drift > TRACE_ABORT or min_eig < EIGEN_ABORT:
        raise InvariantViolation(
            f"density matrix invariant broken at t={state.t:.6g} (trace drift {trace_drift:.3g}, "
            f"min eigenvalue {min_eig:.3g}); reduce the step (h={h:.3g}) or raise n_d (={n_d})",
            {**info, "step": h, "n_d": n_d},
        )
    return info


def integrate_master(
    params: SystemParams,
    config: IntegratorConfig | None = None,
    t_end: float = 0.0,
    *,
    times=None,
    initial: JointDensityMatrix | None = None,
) -> Trajectory:
    """RK4 on the rotating-frame master equation; lab-frame samples out."""
    if config is None:
        config = open_integrator_config(params)
    h = config.resolved_step(params)
    if initial is None:
        initial = JointDensityMatrix.initial(config.n_d)
    if initial.n_d != config.n_d:
        raise ValueError("initial state truncation does not match config.n_d")
    if times is None:
        segments = sample_schedule(t_end, h, config.stride(h))
        record_initial = True
    else:
        segments = explicit_schedule(times, h)
        record_initial = False
    qs = qubit_structure(params)
    args = (
        qs.drive, params.xi, params.omega_0, params.omega_r, qs.static, qs.coupling,
        SIGMA_MINUS, SIGMA_PLUS, _rates(params),
    )
    r = np.ascontiguousarray(to_rotating_frame_density(params, initial.blocks, initial.t))
    states, stamps = [], []
    worst = {"max_trace_drift": 0.0, "min_eigenvalue": 1.0, "max_hermiticity": 0.0,
             "max_top_population": 0.0}

    def record(state):
        info = _check(state, h, config.n_d)
        worst["max_trace_drift"] = max(worst["max_trace_drift"], info["trace_drift"])
        worst["min_eigenvalue"] = min(worst["min_eigenvalue"], info["min_eigenvalue"])
        worst["max_hermiticity"] = max(worst["max_hermiticity"], info["hermiticity"])
        worst["max_top_population"] = max(worst["max_top_population"], info["top_population"])
        states.append(state)
        stamps.append(state.t)

    if record_initial:
        record(JointDensityMatrix.from_blocks(to_lab_frame_density(params, r, 0.0), 0.0))
    for t0, nsteps, step in segments:
        if nsteps:
            r = _kernels.rk4_density(r, t0, step, nsteps, *args)
        t = t0 + nsteps * step
        record(JointDensityMatrix.from_blocks(to_lab_frame_density(params, r, t), t))
    if worst["max_top_population"] > 1e-6:
        log.warning(
            "top Fock level population reached %.3g (n_d=%d); results near the cutoff are untrusted",
            worst["max_top_population"], config.n_d,
        )
    worst["step"] = h
    return Trajectory(np.array(stamps), states, worst)


@dataclass(frozen=True)
class ConditionedOscillatorState:
    """Oscillator state after a sigma_x readout; rho_r is None when undefined."""

    rho_r: np.ndarray | None
    probability: float
    sign: str

    @property
    def defined(self) -> bool:
        return self.rho_r is not None


def condition_on_qubit_open(rho) -> tuple:
    """(plus, minus) from Lambda^{+/-} = rho_11 + rho_00 +/- (rho_10 + rho_01)."""
    state = rho if isinstance(rho, JointDensityMatrix) else JointDensityMatrix(np.asarray(rho))
    b = state.blocks
    diag = b[1, 1] + b[0, 0]
    cross = b[1, 0] + b[0, 1]
    out = []
    for sign, lam in (("+", diag + cross), ("-", diag - cross)):
        p = 0.5 * float(np.trace(lam).real)
        rho_r = 0.5 * lam / p if p > UNDEFINED_PROBABILITY else None
        out.append(ConditionedOscillatorState(rho_r, p, sign))
    return tuple(out)


def fidelity_open(cond: ConditionedOscillatorState, alpha: complex):
    """F = <alpha_{+/-}| rho_r |alpha_{+/-}>, or None when the branch is undefined."""
    if not cond.defined:
        return None
    parity = "even" if cond.sign == "+" else "odd"
    c = cat_target_vector(alpha, parity, cond.rho_r.shape[0] - 1).amps
    return float(np.real(np.vdot(c, cond.rho_r @ c)))


def partial_transpose_oscillator(rho: np.ndarray) -> np.ndarray:
    n = rho.shape[0] // 2
    return rho.reshape(2, n, 2, n).transpose(0, 3, 2, 1).reshape(2 * n, 2 * n)


@dataclass(frozen=True)
class LogNegativity:
    value: float
    raw: float


def log_negativity_numeric(rho) -> LogNegativity:
    """log2 of the trace norm of the oscillator partial transpose, clamped at 0."""
    mat = rho.rho if isinstance(rho, JointDensityMatrix) else np.asarray(rho, dtype=np.complex128)
    pt = partial_transpose_oscillator(mat)
    pt = 0.5 * (pt + pt.conj().T)
    try:
        eig = np.linalg.eigvalsh(pt)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed on partial transpose: {exc}") from exc
    raw = math.log2(float(np.sum(np.abs(eig))))
    return LogNegativity(max(0.0, raw), raw)
