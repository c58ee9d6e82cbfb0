"""Physical parameters, effective RWA parameters and Hamiltonian builders.

All frequencies and rates are in units of the bare coupling g_0 and times in
units of 1/g_0. Basis ordering everywhere is |s>_q |m>_r with the s = 0
(excited) block first and m ascending, i.e. flat index s * (n_d + 1) + m.

Three coupling variants are supported:

``sigma_z_displacement``
    H = w_q/2 sz + xi w_0 cos(w_0 t) sx + w_r a^dag a + g_0 sz (a + a^dag)
``sigma_x_displacement``
    H = w_q/2 sz + xi w_0 cos(w_0 t) sz + w_r a^dag a + g_0 sx (a + a^dag)
``jaynes_cummings``
    H = w_q/2 sz + xi w_0 cos(w_0 t) sx + w_r a^dag a + g_0 (s+ a + s- a^dag)
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Literal

import numpy as np

from .specfun import bessel_j

CouplingVariant = Literal["sigma_z_displacement", "sigma_x_displacement", "jaynes_cummings"]
VARIANTS = ("sigma_z_displacement", "sigma_x_displacement", "jaynes_cummings")

IDENTITY = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
# |0>_q is the excited state: sigma_+ = |0><1|, sigma_- = |1><0|.
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=np.complex128)


@dataclass(frozen=True)
class SystemParams:
    omega_r: float
    omega_0: float
    xi: float
    g_0: float = 1.0
    omega_q: float = 0.0
    gamma_q: float = 0.0
    kappa_r: float = 0.0
    nbar_q: float = 0.0
    nbar_r: float = 0.0
    coupling_variant: CouplingVariant = "sigma_z_displacement"

    def __post_init__(self):
        if self.coupling_variant not in VARIANTS:
            raise ValueError(
                f"unknown coupling variant {self.coupling_variant!r}; expected one of {VARIANTS}"
            )
        if not self.omega_r > 0:
            raise ValueError("omega_r must be > 0")
        if self.omega_0 < 0:
            raise ValueError("omega_0 must be >= 0")
        for name in ("xi", "g_0", "gamma_q", "kappa_r", "nbar_q", "nbar_r"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)

    @property
    def dissipative(self) -> bool:
        return bool(self.gamma_q or self.kappa_r)


@dataclass(frozen=True)
class EffectiveParams:
    n_0: int
    delta: float
    g: float

    @property
    def alpha_max(self) -> float:
        """Largest coherent amplitude 2|g/delta|; inf on exact resonance."""
        if self.delta == 0:
            return math.inf if self.g else 0.0
        return 2.0 * abs(self.g / self.delta)

    @property
    def t_peak(self) -> float:
        return math.pi / abs(self.delta) if self.delta else math.inf

    @property
    def negative_detuning(self) -> bool:
        return self.delta < 0


def round_half_away(x: float) -> int:
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def effective_params(params: SystemParams) -> EffectiveParams:
    """n_0 = Round[w_r / 2w_0], delta = w_r - 2 n_0 w_0, g = g_0 J_{2n_0}(2 xi).

    delta keeps its sign; callers can inspect ``negative_detuning``.
    """
    if params.coupling_variant == "jaynes_cummings":
        raise ValueError("use jc_effective_params for the Jaynes-Cummings variant")
    if params.omega_0 == 0:
        raise ValueError("omega_0 must be nonzero to define the resonant harmonic")
    n0 = round_half_away(params.omega_r / (2.0 * params.omega_0))
    delta = params.omega_r - 2 * n0 * params.omega_0
    g = params.g_0 * bessel_j(2 * n0, 2.0 * params.xi)
    return EffectiveParams(n_0=n0, delta=delta, g=g)


def jc_effective_params(params: SystemParams) -> EffectiveParams:
    """delta' = w_r - (2n_0 - 1) w_0 and g' = g_0 J_{2n_0-1}(2 xi) / 2."""
    if params.coupling_variant != "jaynes_cummings":
        raise ValueError("jc_effective_params requires the jaynes_cummings variant")
    if params.omega_0 == 0:
        raise ValueError("omega_0 must be nonzero to define the resonant harmonic")
    n0 = max(1, round_half_away(0.5 * (params.omega_r / params.omega_0 + 1.0)))
    delta = params.omega_r - (2 * n0 - 1) * params.omega_0
    g = 0.5 * params.g_0 * bessel_j(2 * n0 - 1, 2.0 * params.xi)
    return EffectiveParams(n_0=n0, delta=delta, g=g)


def effective_for(params: SystemParams) -> EffectiveParams:
    if params.coupling_variant == "jaynes_cummings":
        return jc_effective_params(params)
    return effective_params(params)


def drive_frequency_for(
    omega_r: float, xi: float, n_0: int = 1, delta_over_g: float = 1.0, g_0: float = 1.0,
    coupling_variant: CouplingVariant = "sigma_z_displacement",
) -> float:
    """Drive frequency w_0 that puts the n_0-th harmonic at delta = ratio * g."""
    if coupling_variant == "jaynes_cummings":
        g = 0.5 * g_0 * bessel_j(2 * n_0 - 1, 2.0 * xi)
        return (omega_r - delta_over_g * g) / (2 * n_0 - 1)
    g = g_0 * bessel_j(2 * n_0, 2.0 * xi)
    return (omega_r - delta_over_g * g) / (2 * n_0)


@dataclass(frozen=True)
class RwaValidity:
    g0_over_omega_r: float
    g0_over_omega_0: float
    delta_over_omega_0: float
    omega_q_over_2omega_0: float
    threshold: float

    @property
    def ratios(self) -> dict:
        return {
            "g0/omega_r": self.g0_over_omega_r,
            "g0/omega_0": self.g0_over_omega_0,
            "|delta|/omega_0": self.delta_over_omega_0,
            "omega_q/(2 omega_0)": self.omega_q_over_2omega_0,
        }

    @property
    def passed(self) -> bool:
        return all(v < self.threshold for v in self.ratios.values())


def rwa_validity(params: SystemParams, eff: EffectiveParams, threshold: float = 0.05) -> RwaValidity:
    w0 = params.omega_0
    return RwaValidity(
        g0_over_omega_r=params.g_0 / params.omega_r,
        g0_over_omega_0=params.g_0 / w0 if w0 else math.inf,
        delta_over_omega_0=abs(eff.delta) / w0 if w0 else math.inf,
        omega_q_over_2omega_0=abs(params.omega_q) / (2 * w0) if w0 else math.inf,
        threshold=threshold,
    )


# --- operator structure ------------------------------------------------------

@dataclass(frozen=True)
class QubitStructure:
    """Qubit-side pieces of H(t) = w_q/2 sz + xi w_0 cos(w_0 t) P + w_r n
    + (Ca a + Ca^dag a^dag), with P the driven Pauli operator."""

    drive: np.ndarray
    static: np.ndarray
    coupling: np.ndarray


def qubit_structure(params: SystemParams) -> QubitStructure:
    static = 0.5 * params.omega_q * SIGMA_Z
    variant = params.coupling_variant
    if variant == "sigma_z_displacement":
        return QubitStructure(SIGMA_X, static, params.g_0 * SIGMA_Z)
    if variant == "sigma_x_displacement":
        return QubitStructure(SIGMA_Z, static, params.g_0 * SIGMA_X)
    if variant == "jaynes_cummings":
        return QubitStructure(SIGMA_X, static, params.g_0 * SIGMA_PLUS)
    raise ValueError(f"unknown coupling variant {variant!r}")


def annihilation(n_d: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_d + 1, dtype=np.float64)), 1).astype(np.complex128)


def hamiltonian_matrix(params: SystemParams, t: float, n_d: int) -> np.ndarray:
    """Dense lab-frame H(t) of dimension 2(n_d + 1), exactly Hermitian."""
    if n_d < 0:
        raise ValueError("n_d must be >= 0")
    qs = qubit_structure(params)
    dim = n_d + 1
    a = annihilation(n_d)
    num = np.diag(np.arange(dim, dtype=np.float64))
    eye = np.eye(dim)
    drive = params.xi * params.omega_0 * math.cos(params.omega_0 * t)
    h = (
        np.kron(qs.static + drive * qs.drive, eye)
        + params.omega_r * np.kron(IDENTITY, num)
        + np.kron(qs.coupling, a)
        + np.kron(qs.coupling.conj().T, a.conj().T)
    )
    upper = np.triu(h, 1)
    return upper + upper.conj().T + np.diag(h.diagonal().real)


# --- rotating frame ----------------------------------------------------------

def frame_phase(params: SystemParams, t: float) -> float:
    """phi(t) = xi sin(w_0 t), the accumulated drive angle."""
    return params.xi * math.sin(params.omega_0 * t)


def frame_qubit_unitary(params: SystemParams, t: float) -> np.ndarray:
    """exp(-i phi(t) P) for the variant's drive operator P."""
    phi = frame_phase(params, t)
    return math.cos(phi) * IDENTITY - 1j * math.sin(phi) * qubit_structure(params).drive


def to_lab_frame_vector(params: SystemParams, psi: np.ndarray, t: float) -> np.ndarray:
    """Apply V(t) = exp(-i[phi(t) P + w_r t a^dag a]) to a (2, n_d+1) amplitude table."""
    m = np.arange(psi.shape[-1])
    osc = np.exp(-1j * params.omega_r * t * m)
    return frame_qubit_unitary(params, t) @ (psi * osc)


def to_lab_frame_density(params: SystemParams, rho: np.ndarray, t: float) -> np.ndarray:
    """V(t) rho V(t)^dagger for rho stored as (2, 2, n_d+1, n_d+1)."""
    m = np.arange(rho.shape[-1])
    osc = np.exp(-1j * params.omega_r * t * m)
    vq = frame_qubit_unitary(params, t)
    out = rho * osc[:, None] * osc.conj()[None, :]
    return np.einsum("ab,bcmn,dc->admn", vq, out, vq.conj())


def to_rotating_frame_vector(params: SystemParams, psi: np.ndarray, t: float) -> np.ndarray:
    m = np.arange(psi.shape[-1])
    osc = np.exp(1j * params.omega_r * t * m)
    return frame_qubit_unitary(params, t).conj().T @ psi * osc


def to_rotating_frame_density(params: SystemParams, rho: np.ndarray, t: float) -> np.ndarray:
    m = np.arange(rho.shape[-1])
    osc = np.exp(1j * params.omega_r * t * m)
    vq = frame_qubit_unitary(params, t).conj().T
    out = rho * osc[:, None] * osc.conj()[None, :]
    return np.einsum("ab,bcmn,dc->admn", vq, out, vq.conj())
