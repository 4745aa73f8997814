"""
Mappings between beam data and wave functions.

Schrödinger → beam. A solution of S±Ψ = 0 is a beam solution whose initial data are
    u(0) = Ψ⁰,   u̇(0) = ±(i·b/a)·Ψ⁰''                     (complex beam data)

Beam → conjugate pair. Any beam solution splits as u = Ψ+ + Ψ− with S±Ψ± = 0 and
    Ψ±⁰'' = (∓i·a·u̇⁰ + b·u⁰'') / (2b)
integrated twice with zero n = 0 mode (the periodic form of choosing both
integration constants zero). u is therefore recovered up to its mean. For real
beam data Ψ− = conj(Ψ+), u = 2·Re Ψ+ and u̇ = −(2b/a)·Im Ψ+''.

Strain-velocity bijection. For a real beam solution,
    ψ = b·γ − i·a·v = 2b·Ψ+''        γ = u'' (strain), v = u̇ (particle velocity)
solves S+ψ = 0, and (γ, v) = (Re ψ / b, −Im ψ / a). The displacement itself
(its rigid mean and drift) is not recoverable from (γ, v).
"""

from dataclasses import dataclass

import numpy as np

import models.fields as fields
import models.propagators as propagators

_REAL_SUPERPOSITION_TOL = 1e-12  # imag residue / max|u| below which u = Ψ+ + Ψ− is real


@dataclass(frozen=True, eq=False)
class StrainState:
    """Beam strain γ = u'' and particle velocity v = u̇, both real."""
    gamma: fields.RealField
    v:     fields.RealField

    def __post_init__(self):
        fields.require_same_grid(self.gamma, self.v)
        if self.gamma.is_complex or self.v.is_complex:
            raise ValueError("StrainState holds real fields only.")

    @property
    def grid(self) -> fields.Grid:
        return self.gamma.grid


@dataclass(frozen=True, eq=False)
class ConjugatePair:
    """Ψ+ (evolves under S+) and Ψ− (evolves under S−) with u = Ψ+ + Ψ−."""
    psi_plus:  fields.ComplexField
    psi_minus: fields.ComplexField

    def __post_init__(self):
        fields.require_same_grid(self.psi_plus, self.psi_minus)

    @property
    def grid(self) -> fields.Grid:
        return self.psi_plus.grid


# ── Schrödinger → beam ────────────────────────────────────────────────────────


def beam_ic_from_wavefunction(
    psi0: fields.Field,
    sign: propagators.Branch,
    p: fields.PhysParams,
) -> propagators.BeamState:
    """Complex beam initial data whose beam evolution equals the S± evolution of psi0."""
    psi0 = fields.as_complex(psi0)
    return propagators.BeamState(u=psi0, v=propagators.schrodinger_velocity(psi0, p, sign))


# ── Beam → conjugate pair ─────────────────────────────────────────────────────


def split_initial_data(s0: propagators.BeamState, p: fields.PhysParams) -> ConjugatePair:
    """
    Initial data (Ψ+⁰, Ψ−⁰) of the two conjugate Schrödinger problems.

    Raises NonZeroMean when u̇⁰ has a non-zero mean (no periodic antiderivative).
    """
    grid = s0.grid
    u_xx = fields.spectral_derivative(s0.u, 2).values
    v = s0.v.values
    a_v = p.a * v
    b_u_xx = p.b * u_xx

    def _initial(branch: propagators.Branch) -> fields.ComplexField:
        rhs = (b_u_xx - int(branch) * 1j * a_v) / (2 * p.b)
        return fields.spectral_double_antiderivative(fields.ComplexField(grid, rhs))

    return ConjugatePair(
        psi_plus=_initial(propagators.Branch.PLUS),
        psi_minus=_initial(propagators.Branch.MINUS),
    )


def evolve_pair(pair: ConjugatePair, t: float, p: fields.PhysParams) -> ConjugatePair:
    """Ψ+ under S+ and Ψ− under S− (the conjugate phase)."""
    return ConjugatePair(
        psi_plus=propagators.propagate_schrodinger(pair.psi_plus, t, p, propagators.Branch.PLUS),
        psi_minus=propagators.propagate_schrodinger(pair.psi_minus, t, p, propagators.Branch.MINUS),
    )


def superpose(pair: ConjugatePair) -> fields.Field:
    """
    u = Ψ+ + Ψ−.

    Returned as a RealField when the imaginary part is round-off
    (≤ 1e-12 · max|u|), which is the case for real beam data; otherwise complex.
    """
    total = pair.psi_plus.values + pair.psi_minus.values
    residue = float(np.max(np.abs(total.imag), initial=0.0))
    if residue <= _REAL_SUPERPOSITION_TOL * fields.max_norm(total):
        return fields.RealField(pair.grid, total.real)
    return fields.ComplexField(pair.grid, total)


def conjugate_gap(pair: ConjugatePair) -> float:
    """max|Ψ− − conj(Ψ+)| relative to max|Ψ+|; zero for pairs split from real data."""
    return fields.relative_deviation(pair.psi_minus.values, np.conj(pair.psi_plus.values))


def real_state_from_psi_plus(psi_plus: fields.ComplexField, p: fields.PhysParams) -> propagators.BeamState:
    """(u, v) = (2·Re Ψ+, −(2b/a)·Im Ψ+''); valid when Ψ+ was split from real beam data."""
    grid = psi_plus.grid
    psi_xx = fields.spectral_derivative(psi_plus, 2).values
    return propagators.BeamState(
        u=fields.RealField(grid, 2 * psi_plus.values.real),
        v=fields.RealField(grid, -2 * p.ratio * psi_xx.imag),
    )


# ── Strain-velocity bijection ─────────────────────────────────────────────────


def strain_velocity(s: propagators.BeamState) -> StrainState:
    """γ = u'', v = u̇ for a real beam state."""
    if s.is_complex:
        raise ValueError("strain_velocity needs a real beam state.")
    return StrainState(gamma=fields.spectral_derivative(s.u, 2), v=s.v)


def wavefunction_from_state(s: StrainState, p: fields.PhysParams) -> fields.ComplexField:
    """ψ = b·γ − i·a·v."""
    return fields.complex_from_parts(s.grid, p.b * s.gamma.values, -(p.a * s.v.values))


def state_from_wavefunction(psi: fields.Field, p: fields.PhysParams) -> StrainState:
    """Inverse of wavefunction_from_state: γ = Re ψ / b, v = −Im ψ / a."""
    values = fields.as_complex(psi).values
    return StrainState(
        gamma=fields.RealField(psi.grid, values.real / p.b),
        v=fields.RealField(psi.grid, -values.imag / p.a),
    )


def wavefunction_from_beam(s: propagators.BeamState, p: fields.PhysParams) -> fields.ComplexField:
    """Composite (u, v) → (γ, v) → ψ."""
    return wavefunction_from_state(strain_velocity(s), p)

