import numpy as np
import pytest
from numpy.testing import assert_allclose

import models.errors as errors
import models.fields as fields
from tests.conftest import cplx, real, roundoff_floor


class TestGrid:
    def test_points_and_wavenumbers(self):
        g = fields.make_grid(2 * np.pi, 8)
        assert_allclose(g.x, np.arange(8) * np.pi / 4)
        assert_allclose(np.sort(g.k), np.arange(-4, 4), atol=1e-14)

    def test_unit_box(self):
        g = fields.make_grid(1.0, 4)
        assert g.dx == 0.25
        assert_allclose(np.sort(g.k), [-4 * np.pi, -2 * np.pi, 0.0, 2 * np.pi])
        assert g.k[g.nyquist_index] == pytest.approx(-4 * np.pi)

    @pytest.mark.parametrize("L, N", [(2 * np.pi, 7), (2 * np.pi, 2), (0.0, 8), (-1.0, 8), (1.0, 8.5)])
    def test_rejects_bad_grids(self, L, N):
        with pytest.raises(ValueError):
            fields.make_grid(L, N)

    def test_arrays_are_read_only(self, grid):
        with pytest.raises(ValueError):
            grid.x[0] = 1.0


class TestFields:
    def test_real_field_rejects_complex(self, grid):
        with pytest.raises(ValueError):
            real(grid, np.exp(1j * grid.x))

    def test_rejects_wrong_length_and_nan(self, grid):
        with pytest.raises(ValueError):
            real(grid, np.zeros(grid.N + 1))
        with pytest.raises(ValueError):
            real(grid, np.full(grid.N, np.nan))

    def test_values_are_copied(self, grid):
        raw = np.cos(grid.x)
        f = real(grid, raw)
        raw[0] = 99.0
        assert f.values[0] == 1.0

    def test_grid_mismatch(self, grid):
        other = fields.make_grid(2 * np.pi, 32)
        with pytest.raises(errors.GridMismatch):
            fields.require_same_grid(real(grid, np.zeros(64)), real(other, np.zeros(32)))

    def test_modal_round_trip(self, grid, random_state):
        u = random_state(3, grid).u
        back = fields.synthesize(grid, fields.modes(u), real=True)
        assert fields.relative_deviation(back, u) <= 1e-13


class TestSpectralDerivative:
    def test_sine_second_derivative(self, grid):
        d = fields.spectral_derivative(real(grid, np.sin(grid.x)), 2)
        assert isinstance(d, fields.RealField)
        assert_allclose(d.values, -np.sin(grid.x), atol=1e-12)

    def test_exponential_first_derivative(self, grid):
        d = fields.spectral_derivative(cplx(grid, np.exp(1j * grid.x)), 1)
        assert_allclose(d.values, 1j * np.exp(1j * grid.x), atol=1e-12)

    def test_cosine_fourth_derivative(self, grid):
        d = fields.spectral_derivative(real(grid, np.cos(2 * grid.x)), 4)
        assert_allclose(d.values, 16 * np.cos(2 * grid.x), atol=roundoff_floor(grid, 4))

    def test_nyquist_first_derivative_is_zero(self, grid):
        nyquist = real(grid, (-1.0) ** np.arange(grid.N))
        assert fields.max_norm(fields.spectral_derivative(nyquist, 1)) <= 1e-12

    def test_real_spectrum_is_conjugate_symmetric(self, grid, random_state):
        spectrum = fields.modes(random_state(2, grid, kmax_fraction=0.5).u)
        mirrored = np.conj(spectrum[-np.arange(grid.N) % grid.N])
        assert np.array_equal(spectrum, mirrored)

    @pytest.mark.parametrize("order", [1, 2, 3, 4])
    def test_full_band_real_input_stays_real(self, grid, random_state, order):
        u = random_state(6, grid, kmax_fraction=0.5).u
        d = fields.spectral_derivative(u, order)
        assert isinstance(d, fields.RealField)
        expected = fields.synthesize(grid, fields.derivative_symbol(grid, order) * fields.modes(u), real=False)
        assert fields.max_norm(d.values - expected.values) <= roundoff_floor(grid, order) * fields.max_norm(u)

    def test_residue_is_measured_against_the_given_scale(self, grid):
        spectrum = np.zeros(grid.N, dtype=complex)
        spectrum[1], spectrum[-1] = 1.0, 1.0 + 1e-12j
        with pytest.raises(ValueError):
            fields.synthesize(grid, spectrum, real=True, scale=1.0)
        spectrum[-1] = 1.0 + 1e-15j
        assert isinstance(fields.synthesize(grid, spectrum, real=True, scale=1.0), fields.RealField)

    @pytest.mark.parametrize("order", [0, 5, -1])
    def test_unsupported_order(self, grid, order):
        with pytest.raises(ValueError):
            fields.spectral_derivative(real(grid, np.sin(grid.x)), order)

    def test_linearity(self, grid, random_state):
        s = random_state(5, grid)
        combo = real(grid, 2.5 * s.u.values - 0.75 * s.v.values)
        lhs = fields.spectral_derivative(combo, 3).values
        rhs = 2.5 * fields.spectral_derivative(s.u, 3).values - 0.75 * fields.spectral_derivative(s.v, 3).values
        assert fields.relative_deviation(lhs, rhs) <= 1e-13


class TestDoubleAntiderivative:
    def test_cosine(self, grid):
        g = fields.spectral_double_antiderivative(real(grid, -np.cos(grid.x)))
        assert_allclose(g.values, np.cos(grid.x), atol=1e-13)

    def test_exponential(self, grid):
        g = fields.spectral_double_antiderivative(cplx(grid, np.exp(2j * grid.x)))
        assert_allclose(g.values, -np.exp(2j * grid.x) / 4, atol=1e-14)

    def test_constant_has_no_periodic_antiderivative(self, grid):
        with pytest.raises(errors.NonZeroMean) as info:
            fields.spectral_double_antiderivative(cplx(grid, np.ones(grid.N)))
        assert info.value.mean_modulus == pytest.approx(1.0)

    def test_inverts_second_derivative(self, grid, random_state):
        v = random_state(11, grid).v
        back = fields.spectral_derivative(fields.spectral_double_antiderivative(v), 2)
        assert fields.relative_deviation(back, v) <= 1e-11


class TestIntegrate:
    def test_constant(self):
        g = fields.make_grid(2 * np.pi, 16)
        assert fields.integrate(real(g, np.ones(16))) == pytest.approx(2 * np.pi)

    def test_band_limited_integrands(self, grid):
        assert fields.integrate(real(grid, np.cos(grid.x) ** 2)) == pytest.approx(np.pi, abs=1e-13)
        assert abs(fields.integrate(real(grid, np.sin(grid.x)))) <= 1e-14

    def test_complex_integrand(self, grid):
        assert isinstance(fields.integrate(cplx(grid, np.exp(1j * grid.x))), complex)

    def test_derivative_integrates_to_zero(self, grid, random_state):
        u = random_state(2, grid).u
        assert abs(fields.integrate(fields.spectral_derivative(u, 1))) <= 1e-12 * fields.max_norm(u)


def test_relative_deviation_is_absolute_for_zero_reference():
    assert fields.relative_deviation(np.array([0.5, -1.0]), np.zeros(2)) == 1.0
    assert fields.relative_deviation(np.array([1.0, 3.0]), np.array([1.0, 2.0])) == 0.5
