"""Closed-system dynamics under the full time-dependent Hamiltonian.

States are tables of amplitudes A_m (qubit |0>) and B_m (qubit |1>). The
Schrodinger equation is integrated with fixed-step classical RK4 in the frame
of V(t) = exp(-i[xi sin(w_0 t) P + w_r t a^dag a]), which removes the fast
m w_r phases and the drive exactly; samples are mapped back to the lab frame
before they are returned. In the lab frame itself RK4 at any affordable step
is badly non-unitary on the high Fock levels.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .analytic import RwaSolution, default_qubit_state, rwa_joint_state
from .errors import InvariantViolation
from .fock import CatTarget, FockVector, cat_vector
from .model import (
    SystemParams,
    qubit_structure,
    to_lab_frame_vector,
    to_rotating_frame_vector,
)

log = logging.getLogger(__name__)

NORM_ABORT = 1e-5
TOP_POPULATION_WARN = 1e-6
UNDEFINED_PROBABILITY = 1e-12


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integrator settings.

    ``step`` defaults to (2 pi / w_r) / ``step_divisor``; ``sample_every`` is
    the number of steps between stored samples (default: closest to
    ``sample_interval``).
    """

    n_d: int = 14
    step: float | None = None
    step_divisor: int = 160
    sample_every: int | None = None
    sample_interval: float = 0.01
    norm_renormalize: bool = False
    method: str = "rk4-rotating-frame"

    def __post_init__(self):
        if self.step is not None and not self.step > 0:
            raise ValueError("step must be > 0")
        if self.n_d < 0:
            raise ValueError("n_d must be >= 0")

    def resolved_step(self, params: SystemParams) -> float:
        if self.step is not None:
            return float(self.step)
        return 2.0 * math.pi / params.omega_r / self.step_divisor

    def stride(self, h: float) -> int:
        if self.sample_every is not None:
            return max(1, int(self.sample_every))
        return max(1, int(round(self.sample_interval / h)))


@dataclass(frozen=True)
class JointPureState:
    A: np.ndarray
    B: np.ndarray
    t: float = 0.0

    @classmethod
    def from_table(cls, psi: np.ndarray, t: float = 0.0) -> "JointPureState":
        return cls(np.array(psi[0], dtype=np.complex128), np.array(psi[1], dtype=np.complex128), t)

    @classmethod
    def initial(cls, n_d: int, qubit_state=None) -> "JointPureState":
        """|q>_q |0>_r, by default |+>_q |0>_r: A_0 = B_0 = 1/sqrt(2)."""
        q = np.array([1.0, 1.0]) / math.sqrt(2.0) if qubit_state is None else np.asarray(qubit_state)
        psi = np.zeros((2, n_d + 1), dtype=np.complex128)
        psi[:, 0] = q
        return cls.from_table(psi)

    @property
    def n_d(self) -> int:
        return self.A.size - 1

    @property
    def table(self) -> np.ndarray:
        return np.vstack([self.A, self.B])

    @property
    def vector(self) -> np.ndarray:
        """Flat vector in the (s, m) basis used by model.hamiltonian_matrix."""
        return np.concatenate([self.A, self.B])

    @property
    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.A) ** 2 + np.abs(self.B) ** 2))

    @property
    def top_population(self) -> float:
        return float(abs(self.A[-1]) ** 2 + abs(self.B[-1]) ** 2)


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    @property
    def final(self):
        return self.states[-1]


def amplitude_rhs(params: SystemParams, state: JointPureState, t: float):
    """Lab-frame dA/dt, dB/dt for the sigma_z-displacement Hamiltonian."""
    if params.coupling_variant != "sigma_z_displacement":
        raise ValueError("amplitude_rhs implements the sigma_z-displacement equations only")
    A, B = state.A, state.B
    m = np.arange(A.size)
    sq = np.sqrt(m[1:].astype(np.float64))

    def ladder(x):
        out = np.zeros_like(x)
        out[:-1] += sq * x[1:]
        out[1:] += sq * x[:-1]
        return out

    drive = -1j * params.xi * params.omega_0 * math.cos(params.omega_0 * t)
    half_q = 0.5j * params.omega_q
    dA = drive * B - 1j * m * params.omega_r * A - half_q * A - 1j * params.g_0 * ladder(A)
    dB = drive * A - 1j * m * params.omega_r * B + half_q * B + 1j * params.g_0 * ladder(B)
    return dA, dB


def _kernel_args(params: SystemParams):
    qs = qubit_structure(params)
    return (qs.drive, params.xi, params.omega_0, params.omega_r, qs.static, qs.coupling)


def sample_schedule(t_end: float, h: float, stride: int):
    """Uniform schedule: list of (t_start, n_steps, step) segments ending at t_end."""
    if t_end < 0:
        raise ValueError("t_end must be >= 0")
    if t_end == 0:
        return []
    n = max(1, int(math.ceil(t_end / h - 1e-9)))
    h = t_end / n
    segments = []
    k = 0
    while k < n:
        steps = min(stride, n - k)
        segments.append((k * h, steps, h))
        k += steps
    return segments


def explicit_schedule(times, h: float):
    """Segments that land exactly on each requested time."""
    times = np.asarray(times, dtype=np.float64)
    if np.any(np.diff(times) < 0) or (times.size and times[0] < 0):
        raise ValueError("sample times must be non-negative and increasing")
    segments = []
    t_prev = 0.0
    for t in times:
        span = t - t_prev
        if span > 0:
            n = max(1, int(math.ceil(span / h - 1e-9)))
            segments.append((t_prev, n, span / n))
        else:
            segments.append((t_prev, 0, 0.0))
        t_prev = t
    return segments


def integrate(
    params: SystemParams,
    config: IntegratorConfig,
    t_end: float,
    *,
    times=None,
    initial: JointPureState | None = None,
) -> Trajectory:
    """Integrate from t = 0 and return lab-frame samples.

    Without ``times`` the samples are t = 0, every ``config.stride`` steps,
    and t_end. With ``times`` exactly those instants are returned.
    """
    h = config.resolved_step(params)
    if initial is None:
        initial = JointPureState.initial(config.n_d, default_qubit_state(params))
    if initial.n_d != config.n_d:
        raise ValueError("initial state truncation does not match config.n_d")
    if times is None:
        segments = sample_schedule(t_end, h, config.stride(h))
        record_initial = True
    else:
        segments = explicit_schedule(times, h)
        record_initial = False
    args = _kernel_args(params)
    y = to_rotating_frame_vector(params, initial.table, initial.t)
    y = np.ascontiguousarray(y)
    states, stamps = [], []
    if record_initial:
        states.append(JointPureState.from_table(to_lab_frame_vector(params, y, 0.0), 0.0))
        stamps.append(0.0)
    max_drift = abs(initial.norm_squared - 1.0)
    max_top = initial.top_population
    for t0, nsteps, step in segments:
        if nsteps:
            y = _kernels.rk4_pure(y, t0, step, nsteps, *args)
        t = t0 + nsteps * step
        state = JointPureState.from_table(to_lab_frame_vector(params, y, t), t)
        drift = abs(state.norm_squared - 1.0)
        max_drift = max(max_drift, drift)
        max_top = max(max_top, state.top_population)
        if drift > NORM_ABORT:
            raise InvariantViolation(
                f"norm drift {drift:.3g} at t={t:.6g} exceeds {NORM_ABORT:g}; "
                f"reduce the step (h={h:.3g}) or raise n_d (={config.n_d})",
                {"t": t, "norm_drift": drift, "step": h, "n_d": config.n_d},
            )
        if config.norm_renormalize:
            y = y / math.sqrt(state.norm_squared)
            state = JointPureState.from_table(state.table / math.sqrt(state.norm_squared), t)
        states.append(state)
        stamps.append(t)
    if max_top > TOP_POPULATION_WARN:
        log.warning(
            "top Fock level population reached %.3g (n_d=%d); results near the cutoff are untrusted",
            max_top, config.n_d,
        )
    diagnostics = {"max_norm_drift": max_drift, "max_top_population": max_top, "step": h}
    return Trajectory(np.array(stamps), states, diagnostics)


def state_at(params: SystemParams, config: IntegratorConfig, t: float, **kw) -> JointPureState:
    return integrate(params, config, t, times=[t], **kw).final


def mean_excitation_numeric(state: JointPureState) -> float:
    m = np.arange(state.A.size)
    return float(np.sum(m * (np.abs(state.A) ** 2 + np.abs(state.B) ** 2)))


@dataclass(frozen=True)
class ConditionedPair:
    """Oscillator states after measuring sigma_x; None where p <= 1e-12."""

    plus: FockVector | None
    minus: FockVector | None
    p_plus: float
    p_minus: float


def condition_on_qubit(state: JointPureState) -> ConditionedPair:
    s = state.A + state.B
    d = state.A - state.B
    p_plus = 0.5 * float(np.sum(np.abs(s) ** 2))
    p_minus = 0.5 * float(np.sum(np.abs(d) ** 2))
    plus = FockVector(s / math.sqrt(2.0 * p_plus)) if p_plus > UNDEFINED_PROBABILITY else None
    minus = FockVector(d / math.sqrt(2.0 * p_minus)) if p_minus > UNDEFINED_PROBABILITY else None
    return ConditionedPair(plus, minus, p_plus, p_minus)


def fidelity_vs_rwa(state: JointPureState, sol: RwaSolution) -> float:
    """f = |<Psi(t)|psi(t)>|^2 against the lab-frame RWA state at the same t."""
    ref = rwa_joint_state(sol, state.t, state.n_d)
    return float(min(1.0, abs(np.vdot(state.table.ravel(), ref.ravel())) ** 2))


def cat_target_vector(alpha: complex, parity: str, n_d: int) -> FockVector:
    """Cat state, with |1> standing in for the odd cat at alpha = 0."""
    if parity == "odd" and alpha == 0:
        amps = np.zeros(n_d + 1, dtype=np.complex128)
        amps[1] = 1.0
        return FockVector(amps)
    return cat_vector(CatTarget(alpha, parity), n_d)


def fidelity_vs_cat(state: JointPureState, alpha: complex):
    """(f+, f-) against the even/odd cats at alpha; None if a branch is undefined."""
    pair = condition_on_qubit(state)
    out = []
    for vec, parity in ((pair.plus, "even"), (pair.minus, "odd")):
        if vec is None:
            out.append(None)
            continue
        target = cat_target_vector(alpha, parity, state.n_d)
        out.append(float(min(1.0, abs(target.inner(vec)) ** 2)))
    return tuple(out)
