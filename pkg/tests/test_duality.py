import numpy as np
import pytest
from numpy.testing import assert_allclose

import models.duality as duality
import models.errors as errors
import models.fields as fields
import models.propagators as propagators
from tests.conftest import cplx, real, roundoff_floor


def beam(grid, u, v):
    kind = cplx if np.iscomplexobj(u) or np.iscomplexobj(v) else real
    return propagators.BeamState(u=kind(grid, u), v=kind(grid, v))


class TestBeamFromWavefunction:
    def test_initial_velocity(self, grid, unit):
        s0 = duality.beam_ic_from_wavefunction(cplx(grid, np.exp(1j * grid.x)), propagators.Branch.PLUS, unit)
        assert_allclose(s0.v.values, -1j * np.exp(1j * grid.x), atol=1e-12)

    def test_zero(self, grid, unit):
        s0 = duality.beam_ic_from_wavefunction(cplx(grid, np.zeros(grid.N)), propagators.Branch.MINUS, unit)
        assert fields.max_norm(s0.u) == 0.0 and fields.max_norm(s0.v) == 0.0

    def test_beam_evolution_equals_schrodinger_evolution(self, grid, unit):
        psi0 = cplx(grid, np.exp(1j * grid.x))
        s0 = duality.beam_ic_from_wavefunction(psi0, propagators.Branch.PLUS, unit)
        u = propagators.propagate_beam(s0, np.pi, unit).u
        assert_allclose(u.values, -np.exp(1j * grid.x), atol=1e-12)

    @pytest.mark.parametrize("branch", list(propagators.Branch))
    def test_both_branches_on_random_data(self, grid, params, random_state, branch):
        s = random_state(6, grid)
        psi0 = fields.complex_from_parts(grid, s.u.values, s.v.values)
        s0 = duality.beam_ic_from_wavefunction(psi0, branch, params)
        for t in (0.1, 1.0, 5.0):
            assert fields.relative_deviation(
                propagators.propagate_beam(s0, t, params).u,
                propagators.propagate_schrodinger(psi0, t, params, branch),
            ) <= 1e-11


class TestSplitInitialData:
    def test_displacement_only(self, grid, unit):
        pair = duality.split_initial_data(beam(grid, np.cos(grid.x), np.zeros(grid.N)), unit)
        assert_allclose(pair.psi_plus.values, np.cos(grid.x) / 2, atol=1e-14)
        assert_allclose(pair.psi_minus.values, np.cos(grid.x) / 2, atol=1e-14)

    def test_velocity_only(self, grid, unit):
        pair = duality.split_initial_data(beam(grid, np.zeros(grid.N), np.sin(grid.x)), unit)
        assert_allclose(pair.psi_plus.values, 0.5j * np.sin(grid.x), atol=1e-14)
        assert_allclose(pair.psi_minus.values, -0.5j * np.sin(grid.x), atol=1e-14)

    def test_velocity_with_mean_is_rejected(self, grid, unit):
        with pytest.raises(errors.NonZeroMean):
            duality.split_initial_data(beam(grid, np.cos(grid.x), 1.0 + np.sin(grid.x)), unit)

    def test_real_data_give_a_conjugate_pair(self, grid, params, random_state):
        pair = duality.split_initial_data(random_state(1, grid), params)
        assert duality.conjugate_gap(pair) <= 1e-12

    def test_reconstructs_data_up_to_mean(self, grid, params, random_state):
        s0 = random_state(2, grid)
        pair = duality.split_initial_data(s0, params)
        u0 = s0.u.values - np.mean(s0.u.values)
        assert fields.relative_deviation(duality.superpose(pair), u0) <= 1e-11
        # i·b·(Ψ+'' − Ψ−'') = a·u̇
        diff = fields.spectral_derivative(pair.psi_plus, 2).values - fields.spectral_derivative(pair.psi_minus, 2).values
        assert fields.relative_deviation(1j * params.b * diff, params.a * s0.v.values) <= 1e-11


class TestSuperpose:
    @pytest.mark.parametrize("t", [0.3, 1.7])
    def test_standing_wave(self, grid, unit, t):
        pair = duality.split_initial_data(beam(grid, np.cos(grid.x), np.zeros(grid.N)), unit)
        u = duality.superpose(duality.evolve_pair(pair, t, unit))
        assert isinstance(u, fields.RealField)
        assert_allclose(u.values, np.cos(grid.x) * np.cos(t), atol=1e-13)

    def test_zero_pair(self, grid):
        zero = cplx(grid, np.zeros(grid.N))
        assert fields.max_norm(duality.superpose(duality.ConjugatePair(zero, zero))) == 0.0

    @pytest.mark.parametrize("t", [0.3, 1.7])
    def test_complex_data_match_beam_propagation(self, grid, unit, t):
        s0 = beam(grid, np.exp(1j * grid.x), np.zeros(grid.N, dtype=complex))
        u = duality.superpose(duality.evolve_pair(duality.split_initial_data(s0, unit), t, unit))
        assert isinstance(u, fields.ComplexField)
        assert fields.relative_deviation(u, propagators.propagate_beam(s0, t, unit).u) <= 1e-11


class TestRealStateFromPsiPlus:
    def test_standing_wave(self, grid, unit):
        t = 0.8
        psi_plus = cplx(grid, np.exp(-1j * t) * np.cos(grid.x) / 2)
        s = duality.real_state_from_psi_plus(psi_plus, unit)
        assert_allclose(s.u.values, np.cos(grid.x) * np.cos(t), atol=1e-13)
        assert_allclose(s.v.values, -np.cos(grid.x) * np.sin(t), atol=1e-13)

    def test_real_psi_plus_has_no_velocity(self, grid, unit):
        s = duality.real_state_from_psi_plus(cplx(grid, np.sin(3 * grid.x)), unit)
        assert fields.max_norm(s.v) <= 2 * unit.ratio * roundoff_floor(grid, 2)

    def test_matches_beam_propagation(self, grid, params, random_state):
        s0 = random_state(9, grid)
        pair = duality.split_initial_data(s0, params)
        for t in (0.1, 1.0, 5.0):
            exact = propagators.propagate_beam(s0, t, params)
            rebuilt = duality.real_state_from_psi_plus(duality.evolve_pair(pair, t, params).psi_plus, params)
            assert fields.relative_deviation(rebuilt.u, exact.u.values - np.mean(s0.u.values)) <= 1e-11
            assert fields.relative_deviation(rebuilt.v, exact.v) <= 1e-11


class TestStrainVelocityBijection:
    def test_pointwise_formula_and_inverse(self, grid):
        p = fields.PhysParams(a=1.0, b=2.0)
        s = duality.StrainState(gamma=real(grid, np.full(grid.N, 3.0)), v=real(grid, np.full(grid.N, 2.0)))
        psi = duality.wavefunction_from_state(s, p)
        assert_allclose(psi.values, 6 - 2j)
        back = duality.state_from_wavefunction(psi, p)
        assert_allclose(back.gamma.values, 3.0)
        assert_allclose(back.v.values, 2.0)

    def test_zero(self, grid, unit):
        zero = real(grid, np.zeros(grid.N))
        psi = duality.wavefunction_from_state(duality.StrainState(zero, zero), unit)
        assert fields.max_norm(psi) == 0.0

    def test_round_trips(self, grid, params, random_state):
        s = random_state(12, grid)
        psi = fields.complex_from_parts(grid, s.u.values, s.v.values)
        again = duality.wavefunction_from_state(duality.state_from_wavefunction(psi, params), params)
        assert fields.relative_deviation(again, psi) <= 1e-15
        strain = duality.strain_velocity(s)
        back = duality.state_from_wavefunction(duality.wavefunction_from_state(strain, params), params)
        assert fields.relative_deviation(back.gamma, strain.gamma) <= 1e-15
        assert fields.relative_deviation(back.v, strain.v) <= 1e-15

    def test_strain_of_modes(self, grid):
        s = duality.strain_velocity(beam(grid, np.cos(grid.x), np.zeros(grid.N)))
        assert_allclose(s.gamma.values, -np.cos(grid.x), atol=1e-13)
        s = duality.strain_velocity(beam(grid, np.sin(2 * grid.x), np.cos(grid.x)))
        assert_allclose(s.gamma.values, -4 * np.sin(2 * grid.x), atol=1e-12)
        assert_allclose(s.v.values, np.cos(grid.x))

    def test_strain_needs_real_state(self, grid):
        with pytest.raises(ValueError):
            duality.strain_velocity(beam(grid, np.exp(1j * grid.x), np.zeros(grid.N, dtype=complex)))

    def test_standing_wave_wavefunction(self, grid, unit):
        t = 1.1
        s = propagators.propagate_beam(beam(grid, np.cos(grid.x), np.zeros(grid.N)), t, unit)
        psi = duality.wavefunction_from_beam(s, unit)
        assert_allclose(psi.values, -np.cos(grid.x) * np.exp(-1j * t), atol=1e-13)


class TestEvolutionCommutes:
    @pytest.mark.parametrize("N", [64, 256])
    def test_beam_then_map_equals_map_then_schrodinger(self, params, random_state, N):
        grid = fields.make_grid(2 * np.pi, N)
        s0 = random_state(3, grid)
        psi0 = duality.wavefunction_from_beam(s0, params)
        for t in (0.1, 1.0, 5.0):
            lhs = duality.wavefunction_from_beam(propagators.propagate_beam(s0, t, params), params)
            rhs = propagators.propagate_schrodinger(psi0, t, params)
            assert fields.relative_deviation(lhs, rhs) <= 1e-11

    def test_psi_is_twice_b_times_psi_plus_curvature(self, grid, params, random_state):
        s0 = random_state(4, grid)
        pair = duality.split_initial_data(s0, params)
        for t in (0.0, 0.1, 1.0, 5.0):
            psi = duality.wavefunction_from_beam(propagators.propagate_beam(s0, t, params), params)
            psi_plus = duality.evolve_pair(pair, t, params).psi_plus
            expected = 2 * params.b * fields.spectral_derivative(psi_plus, 2).values
            assert fields.relative_deviation(psi, expected) <= 1e-11

    def test_pair_stays_conjugate(self, grid, params, random_state):
        pair = duality.split_initial_data(random_state(5, grid), params)
        for t in (0.1, 1.0, 5.0):
            assert duality.conjugate_gap(duality.evolve_pair(pair, t, params)) <= 1e-12
