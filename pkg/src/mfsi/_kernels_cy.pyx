# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of mfsi._kernels_np; same signatures, same semantics."""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, sin, sqrt

cnp.import_array()

NAME = "compiled"


cdef inline double complex _cis(double t) noexcept nogil:
    # e^{-i t}
    return cos(t) - 1j * sin(t)


def jacobi_eigh(a_in, double tol=1e-14, int max_sweeps=60):
    """Cyclic complex Jacobi; see the NumPy twin for the contract."""
    a_arr = np.array(a_in, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = a_arr.shape[0]
    v_arr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] a = a_arr
    cdef double complex[:, ::1] v = v_arr
    cdef double fro = 0.0, off = 0.0
    cdef Py_ssize_t i, j, p, q
    cdef double complex apq, alpha, cp, cq, rp, rq
    cdef double r, theta, cs, sn, m

    with nogil:
        for i in range(n):
            for j in range(n):
                m = a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
                fro += m
                if i != j:
                    off += m
    fro = sqrt(fro)
    off = sqrt(off)
    if n == 1 or fro == 0.0:
        return np.real(np.diagonal(a_arr)).copy(), v_arr, 0, True

    cdef int sweeps = 0
    cdef bint converged = off <= tol * fro
    while not converged and sweeps < max_sweeps:
        with nogil:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    r = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                    if r == 0.0:
                        continue
                    alpha = apq / r
                    theta = 0.5 * atan2(2.0 * r, a[p, p].real - a[q, q].real)
                    cs = cos(theta)
                    sn = sin(theta)
                    for i in range(n):
                        cp = a[i, p]
                        cq = a[i, q]
                        a[i, p] = cs * cp + sn * alpha.conjugate() * cq
                        a[i, q] = -sn * alpha * cp + cs * cq
                    for i in range(n):
                        rp = a[p, i]
                        rq = a[q, i]
                        a[p, i] = cs * rp + sn * alpha * rq
                        a[q, i] = -sn * alpha.conjugate() * rp + cs * rq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    a[p, p] = a[p, p].real
                    a[q, q] = a[q, q].real
                    for i in range(n):
                        cp = v[i, p]
                        cq = v[i, q]
                        v[i, p] = cs * cp + sn * alpha.conjugate() * cq
                        v[i, q] = -sn * alpha * cp + cs * cq
            off = 0.0
            for i in range(n):
                for j in range(n):
                    if i != j:
                        off += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
            off = sqrt(off)
        sweeps += 1
        converged = off <= tol * fro
    return np.real(np.diagonal(a_arr)).copy(), v_arr, sweeps, bool(converged)


def picard_sums(xs_in, double dtau, int n_freq, psi_in, inv_lam_in):
    """Spectral series values for a batch of phase arguments."""
    xs_arr = np.ascontiguousarray(xs_in, dtype=np.float64)
    psi_c = np.conj(np.ascontiguousarray(psi_in, dtype=np.complex128))
    lam_arr = np.ascontiguousarray(inv_lam_in, dtype=np.float64)
    cdef double[::1] xs = xs_arr
    # split real/imag planes so the inner loop is plain real arithmetic
    pr_arr = np.ascontiguousarray(psi_c.real)
    pi_arr = np.ascontiguousarray(psi_c.imag)
    cdef double[:, ::1] pr = pr_arr
    cdef double[:, ::1] pi = pi_arr
    cdef double[::1] inv_lam = lam_arr
    cdef Py_ssize_t npts = xs.shape[0]
    cdef Py_ssize_t nk = pr.shape[1]
    out_arr = np.zeros(npts, dtype=np.float64)
    cdef double[::1] out = out_arr
    acc_arr = np.zeros(2 * nk, dtype=np.float64)
    cdef double[::1] acc = acc_arr
    cdef Py_ssize_t ip, n, k
    cdef double sr, si, fr, fi, t, s

    with nogil:
        for ip in range(npts):
            t = dtau * xs[ip]
            sr = cos(t)
            si = -sin(t)
            fr = sr
            fi = si
            for k in range(2 * nk):
                acc[k] = 0.0
            for n in range(n_freq):
                for k in range(nk):
                    acc[2 * k] += pr[n, k] * fr - pi[n, k] * fi
                    acc[2 * k + 1] += pr[n, k] * fi + pi[n, k] * fr
                t = fr * sr - fi * si
                fi = fr * si + fi * sr
                fr = t
            s = 0.0
            for k in range(nk):
                s += (acc[2 * k] * acc[2 * k] + acc[2 * k + 1] * acc[2 * k + 1]) * inv_lam[k]
            out[ip] = s
    return out_arr


def band_sums(amp_in, xs_in, double omega0, double domega, int n_omega):
    """Weighted exponential sums over one uniform frequency ladder."""
    amp_arr = np.ascontiguousarray(amp_in, dtype=np.float64)
    xs_arr = np.ascontiguousarray(xs_in, dtype=np.float64)
    cdef double[::1] amp = amp_arr
    cdef double[::1] xs = xs_arr
    cdef Py_ssize_t nq = xs.shape[0]
    out_arr = np.zeros(n_omega, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t q, w
    cdef double complex f, step

    with nogil:
        for q in range(nq):
            f = amp[q] * _cis(omega0 * xs[q])
            step = _cis(domega * xs[q])
            for w in range(n_omega):
                out[w] = out[w] + f
                f = f * step
    return out_arr
