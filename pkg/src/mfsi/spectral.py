"""Hermitian eigendecomposition (cyclic complex Jacobi) and the positive
operator ``|Re F| + |Im F|`` that drives every indicator.

The Jacobi solver is deterministic: row-cyclic sweep order, fixed rotation
convention, stable descending sort of the final diagonal.
"""

from dataclasses import dataclass

import numpy as np

from . import backends
from .errors import ConvergenceError, MfsiError
from .operators import ToeplitzMatrix

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 60

# Input must be Hermitian to this relative entrywise tolerance.
HERMITICITY_RTOL = 1e-10

# Rounding may push a few eigenvalues of the positive operator slightly
# negative; anything below -CLAMP_RTOL * lambda_max indicates a real defect.
CLAMP_RTOL = 1e-12


@dataclass
class EigenSystem:
    """Eigenvalues in descending order, column k of ``vectors`` pairing with
    ``values[k]``."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian_eigen(a):
    """Full eigensystem of a Hermitian matrix.

    Raises
    ------
    MfsiError
        If the input is not Hermitian to within ``HERMITICITY_RTOL``.
    ConvergenceError
        If the sweep limit is reached before the off-diagonal mass falls
        under ``JACOBI_TOL`` relative to the Frobenius norm.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MfsiError("expected a square matrix")
    scale = np.abs(a).max()
    if scale > 0 and np.abs(a - a.conj().T).max() > HERMITICITY_RTOL * scale:
        raise MfsiError("matrix is not Hermitian")
    kern = backends.active()
    w, v, sweeps, converged = kern.jacobi_eigh(a, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if not converged:
        raise ConvergenceError(f"Jacobi sweep limit reached ({sweeps} sweeps)")
    order = np.argsort(-w, kind="stable")
    return EigenSystem(values=w[order], vectors=v[:, order])


def spectral_abs(a):
    """Operator absolute value ``V |Lambda| V^H`` of a Hermitian matrix."""
    eig = hermitian_eigen(a)
    b = (eig.vectors * np.abs(eig.values)) @ eig.vectors.conj().T
    return 0.5 * (b + b.conj().T)


@dataclass
class SharpOperator:
    """Positive operator ``|Re F| + |Im F|`` with its eigensystem."""

    matrix: np.ndarray
    eig: EigenSystem
    direction: np.ndarray
    grid: object


def sharpen(f, grid=None, direction=None):
    """Build the positive operator and its eigensystem from a band operator.

    Accepts a :class:`~mfsi.operators.ToeplitzMatrix` (metadata is carried
    over) or a bare square array, e.g. after noise pollution, in which case
    ``grid`` and ``direction`` identify the data it came from.
    """
    if isinstance(f, ToeplitzMatrix):
        grid = f.grid if grid is None else grid
        direction = f.direction if direction is None else direction
        f = f.entries
    f = np.asarray(f, dtype=np.complex128)
    re = 0.5 * (f + f.conj().T)
    im = (f - f.conj().T) / 2j
    matrix = spectral_abs(re) + spectral_abs(im)
    eig = hermitian_eigen(matrix)
    lam_max = eig.values[0] if eig.values.size else 0.0
    if lam_max > 0 and eig.values[-1] < -CLAMP_RTOL * lam_max:
        raise MfsiError("positive operator has a significantly negative eigenvalue")
    eig.values[eig.values < 0.0] = 0.0
    return SharpOperator(matrix=matrix, eig=eig, direction=direction, grid=grid)
