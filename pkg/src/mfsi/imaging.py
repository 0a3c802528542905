"""Spectral-series indicators: probe vectors, strip/hull fields, the
pulse-moment profile and its interval estimate.

Every indicator reduces to one scalar series per spatial probe: the squared
eigenvector coefficients of a unimodular probe vector, weighted by the
reciprocal eigenvalues of the positive band operator.  The series is finite
exactly on the strip membership set, so reciprocals of (sums of) series
light up strips, their intersections, and hulls.

Finite data realizes "divergence" as very large values; all classifications
below are therefore relative, with thresholds exposed as parameters.
"""

from dataclasses import dataclass

import numpy as np

from . import backends
from .errors import MfsiError, NoSupportError
from .geometry import direction as as_direction

# Spectral cutoff: keep eigenvalues above cutoff_rel * lambda_max.  The
# clean-data default keeps everything that carries information (the spectrum
# of the positive operator collapses to rounding noise a couple of decades
# lower); noisy data wants a much stiffer cut.
DEFAULT_CUTOFF_CLEAN = 1e-14
DEFAULT_CUTOFF_NOISY = 1e-3

# Relative threshold detecting the support of the moment profile.
DEFAULT_REL_THRESHOLD = 0.01

COMBINE_MODES = ("single_pair_W", "multi_direction_I")


@dataclass
class TestVector:
    """Unimodular probe encoding a spatial point and a temporal shift."""

    values: np.ndarray
    y: np.ndarray
    eta: float
    direction: np.ndarray
    c: float
    grid: object


@dataclass
class PulseEstimate:
    """Recovered emission instant and projected support width."""

    eta1: float
    eta2: float
    t0: float
    width: float


@dataclass
class IndicatorField:
    """Scalar indicator values over the cells of a sampling grid."""

    grid: object
    values: np.ndarray
    normalization: str = "raw"


def test_vector(y, eta, dir_, c, grid):
    """Probe vector with entries ``exp(-1j * tau_n * (dir.y / c - eta))``."""
    dir_ = as_direction(dir_)
    y = np.asarray(y, dtype=np.float64)
    x = float(y @ dir_) / c - eta
    values = np.exp(-1j * grid.taus() * x)
    return TestVector(values=values, y=y, eta=float(eta), direction=dir_, c=float(c), grid=grid)


def _retained(sharp, cutoff_rel):
    if not 0.0 <= cutoff_rel < 1.0:
        raise MfsiError("cutoff_rel must lie in [0, 1)")
    if sharp.grid is None or sharp.direction is None:
        raise MfsiError("operator lacks grid/direction metadata")
    lam = sharp.eig.values
    lam_max = lam[0] if lam.size else 0.0
    if lam_max <= 0.0:
        return None, None
    keep = lam > cutoff_rel * lam_max
    return sharp.eig.vectors[:, keep], 1.0 / lam[keep]


def _series_at_projections(sharp, proj, eta, c, cutoff_rel):
    """Series values for a batch of projection values ``proj = dir . y``."""
    psi, inv_lam = _retained(sharp, cutoff_rel)
    proj = np.atleast_1d(np.asarray(proj, dtype=np.float64))
    if psi is None:
        return np.full(proj.shape[0], np.inf)
    xs = proj / c - eta
    kern = backends.active()
    return kern.picard_sums(xs, sharp.grid.domega, sharp.grid.n, psi, inv_lam)


def picard_indicator(sharp, phi, cutoff_rel=DEFAULT_CUTOFF_CLEAN):
    """Spectral series of a probe vector against one band operator.

    Returns ``sum_k |psi_k^H phi|^2 / lambda_k`` over the retained
    eigenpairs, or ``inf`` when the operator vanishes.  Finiteness (in the
    infinite-data limit) characterizes membership of the probe point in the
    strip translated to the probe time.
    """
    if phi.grid != sharp.grid:
        raise MfsiError("probe and operator use different frequency grids")
    if np.linalg.norm(phi.direction - sharp.direction) > 1e-12:
        raise MfsiError("probe and operator use different directions")
    p = float(phi.y @ phi.direction)
    return float(_series_at_projections(sharp, p, phi.eta, phi.c, cutoff_rel)[0])


def w_indicator(sharp_plus, sharp_minus, y, eta, c=1.0, cutoff_rel=DEFAULT_CUTOFF_CLEAN):
    """Two-sided indicator for one antipodal direction pair at one point."""
    _check_pair(sharp_plus, sharp_minus)
    y = np.asarray(y, dtype=np.float64)
    p = float(y @ sharp_plus.direction)
    s = (_series_at_projections(sharp_plus, p, eta, c, cutoff_rel)[0]
         + _series_at_projections(sharp_minus, -p, eta, c, cutoff_rel)[0])
    return 0.0 if np.isinf(s) else float(1.0 / s)


def _check_pair(sharp_plus, sharp_minus):
    if sharp_plus.grid != sharp_minus.grid:
        raise MfsiError("pair members use different frequency grids")
    if np.linalg.norm(sharp_plus.direction + sharp_minus.direction) > 1e-12:
        raise MfsiError("pair members are not antipodal")


def _accumulate_series(sharps, cells, eta, c, cutoff_rel):
    """Sum of series over operators, evaluated at every cell center.

    Cells sharing a projection value are deduplicated before the kernel
    call; the result is identical to per-cell evaluation.
    """
    total = np.zeros(cells.shape[0])
    for sharp in sharps:
        proj = cells @ sharp.direction
        uniq, inverse = np.unique(proj, return_inverse=True)
        total += _series_at_projections(sharp, uniq, eta, c, cutoff_rel)[inverse]
    return total


def strip_field(sharp, grid, eta, c=1.0, cutoff_rel=DEFAULT_CUTOFF_CLEAN):
    """Single-direction strip image: reciprocal series over the grid."""
    cells = grid.cell_centers()
    total = _accumulate_series([sharp], cells, eta, c, cutoff_rel)
    with np.errstate(divide="ignore"):
        values = np.where(total > 0.0, 1.0 / total, np.inf)
    return IndicatorField(grid=grid, values=values)


def scan_field(pairs, grid, eta, c=1.0, cutoff_rel=DEFAULT_CUTOFF_CLEAN,
               combine="multi_direction_I"):
    """Indicator field over a sampling grid.

    ``pairs`` is a list of ``(sharp_plus, sharp_minus)`` antipodal pairs.
    With ``combine='single_pair_W'`` exactly one pair is allowed and the
    field is the two-sided strip indicator; ``'multi_direction_I'`` sums the
    series of every operator in every pair before inverting, which lights up
    the intersection of the per-direction strips.
    """
    if combine not in COMBINE_MODES:
        raise MfsiError(f"combine must be one of {COMBINE_MODES}")
    if combine == "single_pair_W" and len(pairs) != 1:
        raise MfsiError("single_pair_W takes exactly one direction pair")
    if not pairs:
        raise MfsiError("need at least one direction pair")
    sharps = []
    for sp, sm in pairs:
        _check_pair(sp, sm)
        sharps.extend((sp, sm))
    if any(s.grid != sharps[0].grid for s in sharps):
        raise MfsiError("operators use mixed frequency grids")
    cells = grid.cell_centers()
    total = _accumulate_series(sharps, cells, eta, c, cutoff_rel)
    with np.errstate(divide="ignore"):
        values = np.where(total > 0.0, 1.0 / total, np.inf)
    return IndicatorField(grid=grid, values=values)


def moment_profile(sharp_plus, sharp_minus, ball_grid, etas, c=1.0,
                   cutoff_rel=DEFAULT_CUTOFF_CLEAN, radius=None):
    """Peak two-sided indicator over a ball, per temporal shift.

    For each value in ``etas`` this returns the maximum of the two-sided
    indicator over the cells of ``ball_grid`` lying within ``radius`` of the
    origin (default: the grid circumradius).  The support of the resulting
    profile brackets the emission instant.
    """
    _check_pair(sharp_plus, sharp_minus)
    etas = np.asarray(etas, dtype=np.float64)
    if etas.size == 0 or np.any(np.diff(etas) <= 0):
        raise MfsiError("etas must be nonempty and ascending")
    cells = ball_grid.cell_centers()
    if radius is None:
        radius = ball_grid.circumradius()
    cells = cells[(cells**2).sum(axis=1) <= radius**2]
    if cells.shape[0] == 0:
        raise MfsiError("no grid cells inside the ball")
    proj = np.unique(cells @ sharp_plus.direction)
    out = np.empty(etas.shape[0])
    for i, eta in enumerate(etas):
        s = (_series_at_projections(sharp_plus, proj, eta, c, cutoff_rel)
             + _series_at_projections(sharp_minus, -proj, eta, c, cutoff_rel))
        with np.errstate(divide="ignore"):
            w = np.where(s > 0.0, 1.0 / s, np.inf)
        out[i] = w.max()
    return out


def estimate_pulse(h, etas, rel_threshold=DEFAULT_REL_THRESHOLD, c=1.0):
    """Support interval and midpoint of a moment profile.

    The interval endpoints are the first and last shifts where the profile
    reaches ``rel_threshold`` times its maximum; the midpoint estimates the
    emission instant and ``c`` times the interval length the projected
    support width.
    """
    h = np.asarray(h, dtype=np.float64)
    etas = np.asarray(etas, dtype=np.float64)
    if h.shape != etas.shape:
        raise MfsiError("profile and eta grid lengths differ")
    peak = h.max() if h.size else 0.0
    if not peak > 0.0:
        raise NoSupportError("moment profile is identically zero")
    above = np.nonzero(h >= rel_threshold * peak)[0]
    eta1 = float(etas[above[0]])
    eta2 = float(etas[above[-1]])
    return PulseEstimate(eta1=eta1, eta2=eta2, t0=0.5 * (eta1 + eta2),
                         width=c * (eta2 - eta1))


def normalize(field):
    """Scale a field to unit maximum (no-op on all-zero fields)."""
    peak = field.values.max() if field.values.size else 0.0
    if not np.isfinite(peak):
        raise MfsiError("cannot normalize a field with non-finite values")
    if peak <= 0.0:
        return IndicatorField(grid=field.grid, values=field.values.copy(),
                              normalization="max_one")
    return IndicatorField(grid=field.grid, values=field.values / peak,
                          normalization="max_one")
