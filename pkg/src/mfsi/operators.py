"""Discrete far-field operator: Toeplitz assembly, operator norm, noise.

The band operator acting on the frequency samples is discretized by the
rectangular rule into an n-by-n Toeplitz matrix whose diagonals walk through
the 2n-1 band samples, scaled by the frequency step.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, MfsiError


@dataclass
class ToeplitzMatrix:
    """Dense Toeplitz operator with its band metadata."""

    entries: np.ndarray
    grid: object
    direction: np.ndarray

    @property
    def n(self):
        return self.entries.shape[0]


def assemble_toeplitz(band):
    """Toeplitz matrix of a far-field band.

    Entry (r, c) equals ``domega`` times the band sample at frequency offset
    ``(r - c + 0.5) * domega`` from the central frequency, so row/column
    walks sweep the plus samples below the diagonal and the minus samples
    above it; the diagonal carries the first plus sample.
    """
    n = band.grid.n
    if band.plus_samples.shape[0] != n or band.minus_samples.shape[0] != n - 1:
        raise MfsiError("band sample count does not match its grid")
    ladder = band.ladder_samples()
    rows, cols = np.indices((n, n))
    entries = band.grid.domega * ladder[n - 1 + rows - cols]
    return ToeplitzMatrix(entries=entries, grid=band.grid, direction=band.direction)


def spectral_norm(a, rel_tol=1e-8, max_iter=10_000):
    """Largest singular value via power iteration on ``a^H a``.

    Deterministic: the start vector comes from a fixed counter-based stream,
    making orthogonality to the leading singular vector a probability-zero
    accident rather than a structural one.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MfsiError("spectral_norm expects a square matrix")
    n = a.shape[0]
    if n == 0:
        return 0.0
    gram = a.conj().T @ a
    rng = np.random.Generator(np.random.Philox(key=0x5EED))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iter):
        w = gram @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        new_sigma = float(np.sqrt(nw))
        v = w / nw
        if abs(new_sigma - sigma) <= rel_tol * max(new_sigma, np.finfo(float).tiny):
            return new_sigma
        sigma = new_sigma
    raise ConvergenceError("power iteration did not converge")


@dataclass(frozen=True)
class NoiseSpec:
    """Multiplicative data-noise description; deterministic given the seed."""

    level: float
    seed: int = 0
    distribution: str = "uniform"

    def __post_init__(self):
        if self.level < 0:
            raise MfsiError("noise level must be nonnegative")
        if self.distribution not in ("uniform", "gaussian"):
            raise MfsiError("distribution must be 'uniform' or 'gaussian'")

    def child(self, *indices):
        """Independent spec for a sub-draw (per pulse, per direction, ...)."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=tuple(indices))
        sub = int(ss.generate_state(1, dtype=np.uint64)[0])
        return NoiseSpec(self.level, seed=sub, distribution=self.distribution)


def add_noise(matrix, spec):
    """Pollute an assembled operator: ``F + level * ||F||_2 * M``.

    ``M`` has independent real and imaginary parts, each uniform on [-1, 1]
    (or standard normal with ``distribution='gaussian'``), drawn from a
    counter-based generator keyed by the spec seed.  The result is generally
    no longer Toeplitz.
    """
    entries = matrix.entries if isinstance(matrix, ToeplitzMatrix) else np.asarray(matrix)
    if spec.level == 0.0:
        return entries.copy()
    n = entries.shape[0]
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    if spec.distribution == "uniform":
        re = rng.uniform(-1.0, 1.0, (n, n))
        im = rng.uniform(-1.0, 1.0, (n, n))
    else:
        re = rng.standard_normal((n, n))
        im = rng.standard_normal((n, n))
    return entries + spec.level * spectral_norm(entries) * (re + 1j * im)
