"""Phase-space diagnostics for oscillator states.

The Wigner function is evaluated as the displaced-parity expectation

    W(beta) = (2/pi) sum_{m,n} rho_{mn} (-1)^m <n|D(2 beta)|m>,

which equals (2/pi) Tr[D^dag(beta) rho D(beta) (-1)^{a^dag a}] without any
truncated intermediate sum over a third Fock index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FockVector, hermite_functions, parity_displaced_expectation

DEFAULT_RANGE = (-3.5, 3.5)
DEFAULT_RESOLUTION = 141
DEFAULT_X = np.round(np.linspace(-6.0, 6.0, 1201), 12)


def as_density(state) -> np.ndarray:
    """Fock-basis density matrix from a FockVector, amplitude array or matrix."""
    if isinstance(state, FockVector):
        return state.density_matrix()
    arr = np.asarray(state, dtype=np.complex128)
    if arr.ndim == 1:
        return np.outer(arr, arr.conj())
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("expected a Fock vector or a square density matrix")
    return arr


@dataclass(frozen=True)
class WignerGrid:
    """W sampled on re_axis x im_axis; values[i, j] = W(re_axis[i] + i im_axis[j])."""

    re_axis: np.ndarray
    im_axis: np.ndarray
    values: np.ndarray

    @property
    def cell_area(self) -> float:
        dre = (self.re_axis[-1] - self.re_axis[0]) / (self.re_axis.size - 1)
        dim = (self.im_axis[-1] - self.im_axis[0]) / (self.im_axis.size - 1)
        return float(dre * dim)

    @property
    def integral(self) -> float:
        return float(np.sum(self.values) * self.cell_area)

    def points(self) -> np.ndarray:
        re, im = np.meshgrid(self.re_axis, self.im_axis, indexing="ij")
        return re + 1j * im


def wigner_at(state, beta) -> np.ndarray:
    rho = as_density(state)
    beta = np.asarray(beta, dtype=np.complex128)
    return (2.0 / np.pi) * parity_displaced_expectation(rho, 2.0 * beta)


def wigner(state, re_range=DEFAULT_RANGE, im_range=DEFAULT_RANGE, resolution=DEFAULT_RESOLUTION) -> WignerGrid:
    if isinstance(resolution, int):
        resolution = (resolution, resolution)
    re_axis = np.linspace(re_range[0], re_range[1], resolution[0])
    im_axis = np.linspace(im_range[0], im_range[1], resolution[1])
    re, im = np.meshgrid(re_axis, im_axis, indexing="ij")
    return WignerGrid(re_axis, im_axis, wigner_at(state, re + 1j * im))


def wigner_negativity_volume(grid: WignerGrid) -> float:
    return float(np.sum(np.maximum(-grid.values, 0.0)) * grid.cell_area)


def interference_amplitude(grid: WignerGrid, alpha: complex) -> float:
    """|integral of W(beta) exp(4i Im(beta alpha^*)) d^2 beta|.

    This is the Fourier component of W at the fringe wavevector of a cat with
    lobes at +/-alpha; it equals the quadrature ``fringe_amplitude`` at
    theta_0 = arg(alpha) - pi/2 and vanishes for an incoherent mixture of the
    two lobes.
    """
    phase = np.exp(4j * np.imag(grid.points() * np.conj(alpha)))
    return float(abs(np.sum(grid.values * phase)) * grid.cell_area)


@dataclass(frozen=True)
class QuadratureDistribution:
    theta: float
    X: np.ndarray
    P: np.ndarray

    @property
    def integral(self) -> float:
        return float(np.trapezoid(self.P, self.X))


def quadrature_amplitudes(n_max: int, X, theta: float) -> np.ndarray:
    """<X(theta)|m> for m = 0..n_max as an (n_max+1, len(X)) array."""
    m = np.arange(n_max + 1)
    return hermite_functions(n_max, X) * np.exp(-1j * theta * m)[:, None]


def quadrature_distribution(state, theta: float, X=None) -> QuadratureDistribution:
    """P[X(theta)] = <X(theta)|rho|X(theta)>."""
    X = DEFAULT_X if X is None else np.asarray(X, dtype=np.float64)
    if isinstance(state, FockVector) or np.asarray(state).ndim == 1:
        amps = state.amps if isinstance(state, FockVector) else np.asarray(state, dtype=np.complex128)
        o = quadrature_amplitudes(amps.size - 1, X, theta)
        P = np.abs(amps @ o) ** 2
    else:
        rho = as_density(state)
        o = quadrature_amplitudes(rho.shape[0] - 1, X, theta)
        P = np.einsum("mx,mn,nx->x", o, rho, o.conj()).real
    return QuadratureDistribution(float(theta), X, np.maximum(P, 0.0))


def fringe_wavenumber(alpha: complex) -> float:
    """Spatial frequency 2 sqrt(2) |alpha| of the fringes at theta_0 = arg(alpha) - pi/2."""
    return 2.0 * np.sqrt(2.0) * abs(alpha)


def fringe_amplitude(dist: QuadratureDistribution, wavenumber: float) -> float:
    """|integral of P(X) exp(i k X) dX|, the weight of the interference term.

    The envelope contributes only exp(-k^2/4)-small terms, so the value tracks
    coherence between the two lobes rather than their shape.
    """
    return float(abs(np.trapezoid(dist.P * np.exp(1j * wavenumber * dist.X), dist.X)))
