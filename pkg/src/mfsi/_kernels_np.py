"""NumPy implementations of the numerical hot kernels.

These are the reference implementations; `mfsi._kernels_cy` provides a
compiled twin with identical signatures and semantics.  Selection happens
in :mod:`mfsi.backends`.
"""

import numpy as np

NAME = "numpy"

# Chunk size for cell batches; keeps the phase matrices ~25 MB.
_CHUNK = 16384


def jacobi_eigh(a, tol=1e-14, max_sweeps=60):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Sweeps run row-cyclic over the strict upper triangle; each rotation is
    a complex Givens rotation annihilating one off-diagonal entry.  The
    iteration stops once the off-diagonal Frobenius mass drops below
    ``tol`` times the Frobenius norm of the input.

    Parameters
    ----------
    a : (n, n) complex ndarray
        Hermitian matrix (not validated here; the caller checks).
    tol : float
        Relative off-diagonal mass at which to declare convergence.
    max_sweeps : int
        Hard sweep limit.

    Returns
    -------
    w : (n,) float ndarray
        Unsorted eigenvalues (final diagonal).
    v : (n, n) complex ndarray
        Unitary matrix, column k pairs with ``w[k]``.
    sweeps : int
        Sweeps performed.
    converged : bool
    """
    a = np.array(a, dtype=np.complex128)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    fro = np.linalg.norm(a)
    if n == 1 or fro == 0.0:
        return a.real.diagonal().copy(), v, 0, True

    def off_mass(m):
        o = m.copy()
        np.fill_diagonal(o, 0.0)
        return np.linalg.norm(o)

    sweeps = 0
    converged = off_mass(a) <= tol * fro
    while not converged and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                alpha = apq / r
                theta = 0.5 * np.arctan2(2.0 * r, a[p, p].real - a[q, q].real)
                cs, sn = np.cos(theta), np.sin(theta)
                # Column update A <- A U with U[p,p]=c, U[p,q]=-s*alpha,
                # U[q,p]=s*conj(alpha), U[q,q]=c.
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = cs * cp + sn * np.conj(alpha) * cq
                a[:, q] = -sn * alpha * cp + cs * cq
                # Row update A <- U^H A.
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = cs * rp + sn * alpha * rq
                a[q, :] = -sn * np.conj(alpha) * rp + cs * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = cs * vp + sn * np.conj(alpha) * vq
                v[:, q] = -sn * alpha * vp + cs * vq
        sweeps += 1
        converged = off_mass(a) <= tol * fro
    return a.real.diagonal().copy(), v, sweeps, bool(converged)


def picard_sums(xs, dtau, n_freq, psi, inv_lam):
    """Spectral series values for a batch of phase arguments.

    For each x in ``xs`` the probe vector has entries ``exp(-1j*tau_n*x)``
    with ``tau_n = n*dtau`` (n = 1..n_freq); the returned value is

        sum_k inv_lam[k] * |psi[:, k]^H probe|^2 .

    Parameters
    ----------
    xs : (p,) float ndarray
    dtau : float
    n_freq : int
    psi : (n_freq, k) complex ndarray
        Retained eigenvector columns.
    inv_lam : (k,) float ndarray
        Reciprocal eigenvalues matching the columns of ``psi``.
    """
    xs = np.asarray(xs, dtype=np.float64)
    taus = np.arange(1, n_freq + 1) * dtau
    psi_c = np.conj(psi)
    out = np.empty(xs.shape[0], dtype=np.float64)
    for lo in range(0, xs.shape[0], _CHUNK):
        hi = min(lo + _CHUNK, xs.shape[0])
        phase = np.exp(-1j * np.outer(xs[lo:hi], taus))
        coef = phase @ psi_c
        out[lo:hi] = (coef.real**2 + coef.imag**2) @ inv_lam
    return out


def band_sums(amp, xs, omega0, domega, n_omega):
    """Weighted exponential sums over one uniform frequency ladder.

    Computes ``u[w] = sum_q amp[q] * exp(-1j*(omega0 + w*domega)*xs[q])``
    for w = 0..n_omega-1.
    """
    amp = np.asarray(amp, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    omegas = omega0 + domega * np.arange(n_omega)
    out = np.zeros(n_omega, dtype=np.complex128)
    for lo in range(0, xs.shape[0], _CHUNK):
        hi = min(lo + _CHUNK, xs.shape[0])
        out += np.exp(-1j * np.outer(omegas, xs[lo:hi])) @ amp[lo:hi]
    return out
