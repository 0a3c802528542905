import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfsi import forward, spectral
from mfsi.errors import MfsiError
from mfsi.forward import FarFieldBand, FrequencyGrid
from mfsi.operators import NoiseSpec, add_noise, assemble_toeplitz, spectral_norm


def band_from_ladder(ladder, grid, direction=(1.0, 0.0)):
    ladder = np.asarray(ladder, dtype=np.complex128)
    n = grid.n
    return FarFieldBand(direction=np.asarray(direction, dtype=np.float64), grid=grid,
                        plus_samples=ladder[n - 1:],
                        minus_samples=ladder[: n - 1][::-1].copy())


class TestAssemble:
    def test_single_entry(self):
        g = FrequencyGrid(0.0, 1.0, 1)
        mat = assemble_toeplitz(band_from_ladder([2.0 + 1.0j], g))
        np.testing.assert_allclose(mat.entries, [[g.domega * (2 + 1j)]])

    def test_constant_samples(self):
        g = FrequencyGrid(0.0, 0.3, 3)
        mat = assemble_toeplitz(band_from_ladder(np.ones(5), g))
        np.testing.assert_allclose(mat.entries, np.full((3, 3), 0.1))

    def test_layout_first_row_and_column(self, paper_grid, disk_scene):
        band = forward.far_field_band(disk_scene, 0, [1.0, 0.0], paper_grid)
        mat = assemble_toeplitz(band).entries
        dw = paper_grid.domega
        np.testing.assert_array_equal(mat[:, 0], dw * band.plus_samples)
        np.testing.assert_array_equal(mat[0, 1:], dw * band.minus_samples)
        np.testing.assert_array_equal(np.diagonal(mat),
                                      np.full(48, dw * band.plus_samples[0]))

    @given(n=st.integers(2, 12), seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_toeplitz_property(self, n, seed):
        rng = np.random.default_rng(seed)
        ladder = rng.standard_normal(2 * n - 1) + 1j * rng.standard_normal(2 * n - 1)
        g = FrequencyGrid(0.0, 1.0, n)
        mat = assemble_toeplitz(band_from_ladder(ladder, g)).entries
        for k in range(-(n - 1), n):
            diag = np.diagonal(mat, k)
            assert np.all(diag == diag[0])

    def test_each_sample_used_once_per_diagonal(self):
        n = 5
        ladder = np.arange(2 * n - 1, dtype=float)
        g = FrequencyGrid(0.0, 1.0, n)
        mat = assemble_toeplitz(band_from_ladder(ladder, g)).entries
        seen = {np.real(np.diagonal(mat, k))[0] for k in range(-(n - 1), n)}
        assert seen == {g.domega * v for v in ladder}

    def test_sample_count_mismatch(self):
        g = FrequencyGrid(0.0, 1.0, 3)
        band = band_from_ladder(np.ones(5), g)
        band.plus_samples = band.plus_samples[:2]
        with pytest.raises(MfsiError):
            assemble_toeplitz(band)


class TestSpectralNorm:
    def test_diagonal(self):
        assert spectral_norm(np.diag([3.0, -1.0])) == pytest.approx(3.0, rel=1e-8)

    def test_zero_matrix(self):
        assert spectral_norm(np.zeros((4, 4))) == 0.0

    def test_matches_hermitian_eigensolver(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((10, 10)) + 1j * rng.standard_normal((10, 10))
        eig = spectral.hermitian_eigen(a.conj().T @ a)
        assert spectral_norm(a) == pytest.approx(np.sqrt(eig.values[0]), abs=1e-7)

    def test_unitary_has_unit_norm(self):
        rng = np.random.default_rng(6)
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        q, _ = np.linalg.qr(a)
        assert spectral_norm(q) == pytest.approx(1.0, abs=1e-8)

    def test_hard_start_vector(self):
        # leading eigenvector orthogonal to the all-ones vector
        a = np.array([[2.0, -1.0], [-1.0, 2.0]])
        assert spectral_norm(a) == pytest.approx(3.0, rel=1e-7)


@pytest.fixture(scope="module")
def matrix(paper_grid, disk_scene):
    band = forward.far_field_band(disk_scene, 0, [1.0, 0.0], paper_grid)
    return assemble_toeplitz(band)


class TestNoise:
    def test_zero_level_is_identity(self, matrix):
        out = add_noise(matrix, NoiseSpec(0.0, seed=1))
        np.testing.assert_array_equal(out, matrix.entries)

    def test_norm_bound(self, matrix):
        spec = NoiseSpec(0.02, seed=3)
        out = add_noise(matrix, spec)
        norm_f = spectral_norm(matrix.entries)
        m = (out - matrix.entries) / (0.02 * norm_f)
        assert spectral_norm(out - matrix.entries) <= 0.02 * norm_f * spectral_norm(m) + 1e-12

    def test_deterministic(self, matrix):
        spec = NoiseSpec(0.05, seed=1234)
        a = add_noise(matrix, spec)
        b = add_noise(matrix, spec)
        assert np.array_equal(a, b)

    def test_seed_changes_draw(self, matrix):
        a = add_noise(matrix, NoiseSpec(0.05, seed=1))
        b = add_noise(matrix, NoiseSpec(0.05, seed=2))
        assert not np.array_equal(a, b)

    def test_entries_in_range(self, matrix):
        out = add_noise(matrix, NoiseSpec(1.0, seed=9))
        m = (out - matrix.entries) / spectral_norm(matrix.entries)
        assert np.abs(m.real).max() <= 1.0 and np.abs(m.imag).max() <= 1.0

    def test_gaussian_switch(self, matrix):
        out = add_noise(matrix, NoiseSpec(1.0, seed=9, distribution="gaussian"))
        m = (out - matrix.entries) / spectral_norm(matrix.entries)
        assert np.abs(m.real).max() > 1.0  # normal tails exceed the uniform box

    def test_child_specs_independent_and_stable(self):
        root = NoiseSpec(0.1, seed=77)
        assert root.child(3, 1) == root.child(3, 1)
        assert root.child(3, 1) != root.child(1, 3)

    def test_result_not_toeplitz(self, matrix):
        out = add_noise(matrix, NoiseSpec(0.05, seed=4))
        assert np.ptp(np.abs(np.diagonal(out))) > 0
