"""Truncated Fock-space building blocks.

State vectors, coherent and cat states, displacement-operator matrix elements
and rotated-quadrature wavefunctions. Factorial-bearing amplitudes are
assembled as exp(log-magnitude) * phase so that truncations past m ~ 170 do
not overflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .specfun import hermite, laguerre_assoc, log_factorial

Parity = Literal["even", "odd"]

_LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class FockVector:
    """Oscillator amplitudes on |0>, ..., |n_d>."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("FockVector amplitudes must be a non-empty 1-d array")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def n_d(self) -> int:
        return self.amps.size - 1

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    @property
    def tail_mass(self) -> float:
        """Population of the highest retained Fock level."""
        return float(abs(self.amps[-1]) ** 2)

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amps, self.amps.conj())

    def inner(self, other: "FockVector") -> complex:
        """<self|other>."""
        if other.n_d != self.n_d:
            raise ValueError("inner product requires equal truncation")
        return complex(np.vdot(self.amps, other.amps))


@dataclass(frozen=True)
class CatTarget:
    alpha: complex
    parity: Parity

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")

    @property
    def degenerate(self) -> bool:
        return self.parity == "odd" and self.alpha == 0

    @property
    def normalization(self) -> float:
        return cat_normalization(self.alpha, self.parity)


def cat_normalization(alpha: complex, parity: Parity) -> float:
    """N_{+/-} = [2 (1 +/- exp(-2|alpha|^2))]^{-1/2}.

    The odd constant diverges at alpha = 0; expm1 keeps it accurate for tiny
    nonzero amplitudes.
    """
    x = 2.0 * abs(alpha) ** 2
    if parity == "even":
        return 1.0 / math.sqrt(2.0 * (1.0 + math.exp(-x)))
    if x == 0.0:
        return math.inf
    return 1.0 / math.sqrt(-2.0 * math.expm1(-x))


def _log_factorials(n: int) -> np.ndarray:
    return np.array([log_factorial(k) for k in range(n)])


def coherent_amplitudes(alpha: complex, n_d: int) -> np.ndarray:
    """exp(-|alpha|^2/2) alpha^m / sqrt(m!) for m = 0..n_d."""
    if n_d < 0:
        raise ValueError("n_d must be >= 0")
    m = np.arange(n_d + 1)
    amps = np.zeros(n_d + 1, dtype=np.complex128)
    r = abs(alpha)
    if r == 0:
        amps[0] = 1.0
        return amps
    logmag = -0.5 * r * r + m * math.log(r) - 0.5 * _log_factorials(n_d + 1)
    amps[:] = np.exp(logmag) * np.exp(1j * m * cmath.phase(alpha))
    return amps


def coherent_vector(alpha: complex, n_d: int) -> FockVector:
    """Coherent state |alpha> truncated at n_d.

    Severe truncation is visible through ``tail_mass`` and ``norm``; it is not
    an error here.
    """
    return FockVector(coherent_amplitudes(complex(alpha), n_d))


def cat_vector(target: CatTarget, n_d: int) -> FockVector:
    """Even or odd cat state N_{+/-}(|alpha> +/- |-alpha>)."""
    if target.degenerate:
        raise ValueError("odd cat state is undefined at alpha = 0")
    alpha = complex(target.alpha)
    n = target.normalization
    m = np.arange(n_d + 1)
    amps = coherent_amplitudes(alpha, n_d)
    if target.parity == "even":
        amps = np.where(m % 2 == 0, 2.0 * n * amps, 0.0)
    else:
        amps = np.where(m % 2 == 1, 2.0 * n * amps, 0.0)
    return FockVector(amps)


def recommended_truncation(alpha_max: float, nbar_r: float = 0.0) -> int:
    """Poisson tail bound plus thermal headroom for the oscillator cutoff."""
    a2 = abs(alpha_max) ** 2
    return int(math.ceil(a2 + 6.0 * math.sqrt(a2) + 4.0 * (nbar_r + 1.0)))


def displacement_element(m: int, n: int, beta: complex) -> complex:
    """<m|D(beta)|n> from the two-branch associated-Laguerre formula."""
    m, n = int(m), int(n)
    if m < 0 or n < 0:
        raise ValueError("Fock indices must be >= 0")
    beta = complex(beta)
    x = abs(beta) ** 2
    lo, k = min(m, n), abs(m - n)
    if k == 0:
        return complex(math.exp(-0.5 * x) * laguerre_assoc(lo, 0, x))
    if beta == 0:
        return 0j
    logmag = 0.5 * (log_factorial(lo) - log_factorial(lo + k)) - 0.5 * x + k * math.log(abs(beta))
    lag = laguerre_assoc(lo, k, x)
    if m > n:
        phase = cmath.exp(1j * k * cmath.phase(beta))
    else:
        phase = (-1) ** k * cmath.exp(-1j * k * cmath.phase(beta))
    return complex(math.exp(logmag) * lag * phase)


def _offdiagonal_elements(k: int, dim: int, beta: np.ndarray, logfact: np.ndarray):
    """Yield (m, <m+k|D(beta)|m>) for m = 0..dim-1-k, vectorised over beta."""
    x = np.abs(beta) ** 2
    if k:
        with np.errstate(divide="ignore"):
            logr = np.log(np.abs(beta))
        phase = np.exp(1j * k * np.angle(beta))
    prev = None
    cur = np.ones_like(x)
    for m in range(dim - k):
        if m == 1:
            prev, cur = cur, 1.0 + k - x
        elif m > 1:
            prev, cur = cur, ((2 * m - 1 + k - x) * cur - (m - 1 + k) * prev) / m
        if k == 0:
            yield m, np.exp(-0.5 * x) * cur
        else:
            logmag = 0.5 * (logfact[m] - logfact[m + k]) - 0.5 * x + k * logr
            yield m, np.exp(logmag) * cur * phase


def displacement_matrix(beta: complex, dim: int) -> np.ndarray:
    """Exact matrix elements <m|D(beta)|n> for m, n < dim.

    The block is the top-left corner of the infinite operator, not the
    exponential of a truncated generator.
    """
    beta_arr = np.asarray(complex(beta))
    logfact = _log_factorials(dim)
    out = np.zeros((dim, dim), dtype=np.complex128)
    for k in range(dim):
        sign = -1.0 if k % 2 else 1.0
        for m, val in _offdiagonal_elements(k, dim, beta_arr, logfact):
            v = complex(val)
            out[m + k, m] = v
            if k:
                out[m, m + k] = sign * v.conjugate()
    return out


def parity_displaced_expectation(rho: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """sum_{m,n} rho_{mn} (-1)^m <n|D(gamma)|m> for every gamma in an array.

    This equals Tr[rho D(gamma/2) P D(gamma/2)^dagger] with P the parity
    operator, i.e. the displaced-parity expectation that defines the Wigner
    function. rho must be Hermitian.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    dim = rho.shape[0]
    gamma = np.asarray(gamma, dtype=np.complex128)
    logfact = _log_factorials(dim)
    total = np.zeros(gamma.shape, dtype=np.float64)
    for k in range(dim):
        for m, val in _offdiagonal_elements(k, dim, gamma, logfact):
            sign = -1.0 if m % 2 else 1.0
            if k == 0:
                total += sign * rho[m, m].real * val.real
            else:
                total += 2.0 * sign * (rho[m, m + k] * val).real
    return total


def hermite_functions(n_max: int, x: np.ndarray) -> np.ndarray:
    """Normalised Hermite functions psi_m(x), m = 0..n_max, shape (n_max+1, len(x)).

    Uses the orthonormal recurrence, which never forms H_m(x) explicitly.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for m in range(1, n_max):
        out[m + 1] = math.sqrt(2.0 / (m + 1)) * x * out[m] - math.sqrt(m / (m + 1)) * out[m - 1]
    return out


def quadrature_overlap(m: int, X: float, theta: float) -> complex:
    """<X(theta)|m> = H_m(X) exp(-X^2/2) exp(-i theta m) / sqrt(sqrt(pi) 2^m m!)."""
    m = int(m)
    if m < 0:
        raise ValueError("m must be >= 0")
    h = hermite(m, X)
    if h == 0.0:
        return 0j
    log_norm = 0.5 * (0.5 * _LOG_PI + m * math.log(2.0) + log_factorial(m))
    mag = math.exp(math.log(abs(h)) - 0.5 * X * X - log_norm)
    return math.copysign(mag, h) * cmath.exp(-1j * theta * m)
