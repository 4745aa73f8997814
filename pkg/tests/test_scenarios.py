import numpy as np
import pytest

import datasource.scenarios as scenarios
import models.energetics as energetics
import models.errors as errors
import models.fields as fields
import models.propagators as propagators
from tests.conftest import real


@pytest.fixture
def centered():
    return scenarios.PacketSpec(x0=40.0, s0=1.0, k0=0.0)


class TestGaussianPacket:
    def test_normalization_constant(self, centered, packet_grid):
        psi = scenarios.gaussian_packet(centered, packet_grid)
        assert energetics.normalization_constant(psi) == pytest.approx(1 / np.sqrt(2 * np.pi), rel=1e-10)

    def test_zero_carrier_is_real_and_even(self, centered, packet_grid):
        psi = scenarios.gaussian_packet(centered, packet_grid).values
        assert np.max(np.abs(psi.imag)) == 0.0
        i0 = int(round(40.0 / packet_grid.dx))
        left, right = psi.real[i0 - 50:i0], psi.real[i0 + 1:i0 + 51][::-1]
        np.testing.assert_allclose(left, right, rtol=0, atol=1e-14)

    def test_too_wide_for_the_box(self, packet_grid):
        with pytest.raises(errors.PacketTooWide):
            scenarios.gaussian_packet(scenarios.PacketSpec(x0=40.0, s0=80.0, k0=0.0), packet_grid)

    def test_spreading_counts_against_the_box(self, centered, unit):
        grid = fields.make_grid(20.0, 512)
        scenarios.gaussian_packet(centered, grid)
        with pytest.raises(errors.PacketTooWide):
            scenarios.gaussian_packet(centered, grid, t_max=5.0, p=unit)

    def test_rejects_nonpositive_width(self):
        with pytest.raises(ValueError):
            scenarios.PacketSpec(x0=0.0, s0=0.0, k0=0.0)


class TestPacketWidth:
    def test_initial_width(self, centered, packet_grid):
        psi = scenarios.gaussian_packet(centered, packet_grid)
        rho = energetics.probability_density(psi, energetics.normalization_constant(psi))
        assert scenarios.packet_width(rho) == pytest.approx(1.0, rel=1e-3)

    def test_width_wraps_around_the_box(self, packet_grid):
        psi = scenarios.gaussian_packet(scenarios.PacketSpec(x0=1.0, s0=1.0, k0=0.0), packet_grid)
        rho = energetics.probability_density(psi, energetics.normalization_constant(psi))
        assert scenarios.packet_width(rho) == pytest.approx(1.0, rel=1e-3)

    def test_uniform_density(self, packet_grid):
        rho = real(packet_grid, np.full(packet_grid.N, 1 / packet_grid.L))
        assert scenarios.packet_width(rho) == pytest.approx(packet_grid.L / np.sqrt(12), rel=1e-3)

    def test_spread_after_unit_time(self, centered, packet_grid, unit):
        psi0 = scenarios.gaussian_packet(centered, packet_grid, t_max=1.0, p=unit)
        lam = energetics.normalization_constant(psi0)
        rho = energetics.probability_density(propagators.propagate_schrodinger(psi0, 1.0, unit), lam)
        assert scenarios.packet_width(rho) == pytest.approx(np.sqrt(2), rel=1e-3)

    def test_unnormalized_density(self, packet_grid):
        rho = real(packet_grid, np.full(packet_grid.N, 2 / packet_grid.L))
        with pytest.raises(errors.NotNormalized):
            scenarios.packet_width(rho)

    @pytest.mark.parametrize("t, expected", [(0.0, 1.0), (1.0, np.sqrt(2)), (2.0, np.sqrt(5))])
    def test_analytic_width(self, unit, t, expected):
        assert scenarios.analytic_width(1.0, t, unit) == pytest.approx(expected, rel=1e-14)

    def test_analytic_width_is_even_in_time(self, params):
        assert scenarios.analytic_width(0.8, -1.5, params) == scenarios.analytic_width(0.8, 1.5, params)


class TestRandomBandLimited:
    def test_deterministic(self, grid):
        s1 = scenarios.random_band_limited(7, 0.25, grid)
        s2 = scenarios.random_band_limited(7, 0.25, grid)
        assert np.array_equal(s1.u.values, s2.u.values)
        assert np.array_equal(s1.v.values, s2.v.values)

    def test_seeds_differ(self, grid):
        s1 = scenarios.random_band_limited(1, 0.25, grid)
        s2 = scenarios.random_band_limited(2, 0.25, grid)
        assert not np.array_equal(s1.u.values, s2.u.values)

    def test_zero_mean_velocity(self, grid):
        s = scenarios.random_band_limited(3, 0.25, grid)
        assert abs(fields.modes(s.v)[0]) < 1e-14

    def test_velocity_mean_kept_on_request(self, grid):
        s = scenarios.random_band_limited(3, 0.25, grid, zero_mean_v=False)
        assert abs(fields.modes(s.v)[0]) > 1e-6

    def test_mean_switch_leaves_other_modes_alone(self, grid):
        s1 = scenarios.random_band_limited(3, 0.25, grid)
        s2 = scenarios.random_band_limited(3, 0.25, grid, zero_mean_v=False)
        np.testing.assert_allclose(fields.modes(s1.v)[1:], fields.modes(s2.v)[1:], atol=1e-14)

    def test_band_limit(self, grid):
        s = scenarios.random_band_limited(5, 0.25, grid)
        cutoff = int(0.25 * grid.N // 2)
        n = np.abs(np.fft.fftfreq(grid.N, d=1.0 / grid.N))
        for f in (s.u, s.v):
            spectrum = np.abs(fields.modes(f))
            assert np.max(spectrum[n > cutoff]) < 1e-15
            assert np.max(spectrum[(n > 0) & (n <= cutoff)]) > 0

    @pytest.mark.parametrize("fraction", [0.0, -0.1, 0.6])
    def test_rejects_bad_fraction(self, grid, fraction):
        with pytest.raises(ValueError):
            scenarios.random_band_limited(1, fraction, grid)

    def test_random_wavefunction(self, grid):
        psi = scenarios.random_wavefunction(4, 0.25, grid)
        s = scenarios.random_band_limited(4, 0.25, grid, zero_mean_v=False)
        assert psi.is_complex
        assert np.array_equal(psi.values.real, s.u.values)
        assert np.array_equal(psi.values.imag, s.v.values)


class TestSingleMode:
    def test_kinds(self, grid):
        assert np.allclose(scenarios.single_mode(grid, 2, "cos").values, np.cos(2 * grid.x))
        assert np.allclose(scenarios.single_mode(grid, 2, "sin").values, np.sin(2 * grid.x))
        mode = scenarios.single_mode(grid, 2, "exp")
        assert mode.is_complex
        assert np.allclose(mode.values, np.exp(2j * grid.x))

    def test_unknown_kind(self, grid):
        with pytest.raises(ValueError):
            scenarios.single_mode(grid, 1, "tan")


class TestInitialData:
    def test_packet_is_wavefunction(self, packet_grid, unit):
        data = scenarios.initial_data("packet", packet_grid, unit)
        assert isinstance(data, fields.ComplexField)

    def test_mode_has_zero_velocity(self, grid, unit):
        data = scenarios.initial_data("mode", grid, unit, mode_n=3)
        assert isinstance(data, propagators.BeamState)
        assert np.max(np.abs(data.v.values)) == 0.0
        assert np.allclose(data.u.values, np.cos(3 * grid.x))

    def test_zero(self, grid, unit):
        data = scenarios.initial_data("zero", grid, unit)
        assert not np.any(data.u.values) and not np.any(data.v.values)

    def test_random_matches_generator(self, grid, unit):
        data = scenarios.initial_data("random", grid, unit, seed=9, kmax_fraction=0.5)
        ref = scenarios.random_band_limited(9, 0.5, grid)
        assert np.array_equal(data.u.values, ref.u.values)

    def test_complex_mode_kind_rejected(self, grid, unit):
        with pytest.raises(ValueError):
            scenarios.initial_data("mode", grid, unit, mode_kind="exp")

    def test_unknown_kind(self, grid, unit):
        with pytest.raises(ValueError):
            scenarios.initial_data("soliton", grid, unit)
