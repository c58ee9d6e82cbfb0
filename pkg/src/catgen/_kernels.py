"""Fixed-step RK4 kernels in the frame of V(t) = exp(-i[phi(t) P + w_r t n]).

In that frame the generator is
    H~(t) = Q0(t) x 1 + Qa(t) x a + Qa(t)^dag x a^dag,
    Q0 = U^dag S U,  Qa = exp(-i w_r t) U^dag C U,  U = cos(phi) - i sin(phi) P,
with phi = xi sin(w_0 t). The fast w_r n and drive terms are carried exactly by
V(t), so the step only has to resolve the residual time dependence.

Pure states are (2, N) arrays, density matrices (2, 2, N, N) arrays indexed
[s, s', m, n]. Everything here is compiled with numba.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _mul2(a, b):
    out = np.empty((2, 2), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            out[i, j] = a[i, 0] * b[0, j] + a[i, 1] * b[1, j]
    return out


@njit(cache=True)
def _dag2(a):
    out = np.empty((2, 2), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            out[i, j] = np.conj(a[j, i])
    return out


@njit(cache=True)
def _frame_unitary(t, drive, xi, w0):
    phi = xi * np.sin(w0 * t)
    c = np.cos(phi)
    s = np.sin(phi)
    u = np.empty((2, 2), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            u[i, j] = -1j * s * drive[i, j]
        u[i, i] += c
    return u


@njit(cache=True)
def _rotate(u, ud, op):
    return _mul2(ud, _mul2(op, u))


@njit(cache=True)
def _pure_rhs(t, y, out, drive, xi, w0, wr, static, coupling, sq):
    n = y.shape[1]
    u = _frame_unitary(t, drive, xi, w0)
    ud = _dag2(u)
    q0 = _rotate(u, ud, static)
    qa = _rotate(u, ud, coupling) * np.exp(-1j * wr * t)
    qd = _dag2(qa)
    for a in range(2):
        for m in range(n):
            acc = 0j
            for b in range(2):
                x = q0[a, b] * y[b, m]
                if m + 1 < n:
                    x += qa[a, b] * sq[m + 1] * y[b, m + 1]
                if m > 0:
                    x += qd[a, b] * sq[m] * y[b, m - 1]
                acc += x
            out[a, m] = -1j * acc


@njit(cache=True)
def rk4_pure(y0, t0, h, nsteps, drive, xi, w0, wr, static, coupling):
    """Advance a rotating-frame amplitude table by nsteps RK4 steps of size h."""
    n = y0.shape[1]
    sq = np.sqrt(np.arange(n).astype(np.float64))
    y = y0.copy()
    k1 = np.empty_like(y)
    k2 = np.empty_like(y)
    k3 = np.empty_like(y)
    k4 = np.empty_like(y)
    tmp = np.empty_like(y)
    for step in range(nsteps):
        t = t0 + step * h
        _pure_rhs(t, y, k1, drive, xi, w0, wr, static, coupling, sq)
        for a in range(2):
            for m in range(n):
                tmp[a, m] = y[a, m] + 0.5 * h * k1[a, m]
        _pure_rhs(t + 0.5 * h, tmp, k2, drive, xi, w0, wr, static, coupling, sq)
        for a in range(2):
            for m in range(n):
                tmp[a, m] = y[a, m] + 0.5 * h * k2[a, m]
        _pure_rhs(t + 0.5 * h, tmp, k3, drive, xi, w0, wr, static, coupling, sq)
        for a in range(2):
            for m in range(n):
                tmp[a, m] = y[a, m] + h * k3[a, m]
        _pure_rhs(t + h, tmp, k4, drive, xi, w0, wr, static, coupling, sq)
        for a in range(2):
            for m in range(n):
                y[a, m] += h / 6.0 * (k1[a, m] + 2.0 * k2[a, m] + 2.0 * k3[a, m] + k4[a, m])
    return y


@njit(cache=True)
def _density_rhs(t, r, out, drive, xi, w0, wr, static, coupling, lower, raise_, rates, sq, damp):
    n = r.shape[2]
    c_down, c_up, k_down, k_up = rates[0], rates[1], rates[2], rates[3]
    u = _frame_unitary(t, drive, xi, w0)
    ud = _dag2(u)
    qa = _rotate(u, ud, coupling) * np.exp(-1j * wr * t)
    qd = _dag2(qa)
    lm = _rotate(u, ud, lower)
    lp = _rotate(u, ud, raise_)
    lmc = np.conj(lm)
    lpc = np.conj(lp)
    # effective non-Hermitian qubit part: Q0 - (i/2) sum_k c_k L_k^dag L_k
    q0 = _rotate(u, ud, static) - 0.5j * (
        c_down * _mul2(_dag2(lm), lm) + c_up * _mul2(_dag2(lp), lp)
    )
    # M = -i H_eff rho
    for a in range(2):
        for c in range(2):
            for m in range(n):
                for k in range(n):
                    acc = 0j
                    for b in range(2):
                        x = q0[a, b] * r[b, c, m, k]
                        if m + 1 < n:
                            x += qa[a, b] * sq[m + 1] * r[b, c, m + 1, k]
                        if m > 0:
                            x += qd[a, b] * sq[m] * r[b, c, m - 1, k]
                        acc += x
                    out[a, c, m, k] = -1j * acc + damp[m] * r[a, c, m, k]
    # out <- M + M^dag
    for a in range(2):
        for m in range(n):
            for c in range(2):
                for k in range(n):
                    i1 = a * n + m
                    i2 = c * n + k
                    if i1 < i2:
                        s = out[a, c, m, k] + np.conj(out[c, a, k, m])
                        out[a, c, m, k] = s
                        out[c, a, k, m] = np.conj(s)
                    elif i1 == i2:
                        out[a, a, m, m] = 2.0 * out[a, a, m, m].real
    # jump terms
    for a in range(2):
        for c in range(2):
            for m in range(n):
                for k in range(n):
                    acc = 0j
                    if k_down != 0.0 and m + 1 < n and k + 1 < n:
                        acc += k_down * sq[m + 1] * sq[k + 1] * r[a, c, m + 1, k + 1]
                    if k_up != 0.0 and m > 0 and k > 0:
                        acc += k_up * sq[m] * sq[k] * r[a, c, m - 1, k - 1]
                    if c_down != 0.0 or c_up != 0.0:
                        for b in range(2):
                            for d in range(2):
                                w = c_down * lm[a, b] * lmc[c, d] + c_up * lp[a, b] * lpc[c, d]
                                acc += w * r[b, d, m, k]
                    out[a, c, m, k] += acc


@njit(cache=True)
def _axpy(out, r, h, k):
    flat_o = out.reshape(-1)
    flat_r = r.reshape(-1)
    flat_k = k.reshape(-1)
    for i in range(flat_o.size):
        flat_o[i] = flat_r[i] + h * flat_k[i]


@njit(cache=True)
def rk4_density(r0, t0, h, nsteps, drive, xi, w0, wr, static, coupling, lower, raise_, rates):
    """Advance a rotating-frame density matrix by nsteps RK4 steps.

    rates = (gamma_q (nbar_q + 1), gamma_q nbar_q, kappa_r (nbar_r + 1), kappa_r nbar_r)
    for the jump operators sigma_-, sigma_+, a, a^dag. The matrix is
    re-symmetrised to (rho + rho^dag)/2 after every step.
    """
    n = r0.shape[2]
    sq = np.sqrt(np.arange(n).astype(np.float64))
    damp = np.empty(n)
    for m in range(n):
        # truncated a a^dag has no (m + 1) entry on the top level
        up = m + 1 if m + 1 < n else 0
        damp[m] = -0.5 * (rates[2] * m + rates[3] * up)
    r = r0.copy()
    k1 = np.empty_like(r)
    k2 = np.empty_like(r)
    k3 = np.empty_like(r)
    k4 = np.empty_like(r)
    tmp = np.empty_like(r)
    args = (drive, xi, w0, wr, static, coupling, lower, raise_, rates, sq, damp)
    for step in range(nsteps):
        t = t0 + step * h
        _density_rhs(t, r, k1, *args)
        _axpy(tmp, r, 0.5 * h, k1)
        _density_rhs(t + 0.5 * h, tmp, k2, *args)
        _axpy(tmp, r, 0.5 * h, k2)
        _density_rhs(t + 0.5 * h, tmp, k3, *args)
        _axpy(tmp, r, h, k3)
        _density_rhs(t + h, tmp, k4, *args)
        for a in range(2):
            for c in range(2):
                for m in range(n):
                    for k in range(n):
                        r[a, c, m, k] += h / 6.0 * (
                            k1[a, c, m, k] + 2.0 * k2[a, c, m, k] + 2.0 * k3[a, c, m, k] + k4[a, c, m, k]
                        )
        for a in range(2):
            for m in range(n):
                for c in range(2):
                    for k in range(n):
                        i1 = a * n + m
                        i2 = c * n + k
                        if i1 < i2:
                            s = 0.5 * (r[a, c, m, k] + np.conj(r[c, a, k, m]))
                            r[a, c, m, k] = s
                            r[c, a, k, m] = np.conj(s)
                        elif i1 == i2:
                            r[a, a, m, m] = r[a, a, m, m].real
    return r
