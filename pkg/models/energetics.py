"""
Energy and probability transport.

For a real beam solution with strain γ and particle velocity v:

    E = (b²/2)·γ² + (a²/2)·v²        mechanical energy density
    Q = b²·(v·γ' − v'·γ)             mechanical energy flux,      Ė = −Q'

For the corresponding wave function ψ = b·γ − i·a·v:

    ρ = λ·|ψ|²                       probability density,         ρ̇ = −q'
    q = (2bλ/a)·Im(ψ*·ψ')            probability current
    λ = 1 / ∫|ψ|² dx                 normalization (time-independent)

and pointwise ρ = 2λ·E, q = 2λ·Q. On the periodic box the total energy and ∫ρ
are conserved exactly by periodicity; no decay condition at infinity is needed.
"""

from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum

import numpy as np

import models.errors as errors
import models.fields as fields
import models.duality as duality
import models.propagators as propagators

_ZERO_NORM = 1e-300

Trajectory = Callable[[float], duality.StrainState]


class Balance(StrEnum):
    ENERGY = "energy"
    PROBABILITY = "probability"


@dataclass(frozen=True, eq=False)
class EnergyFields:
    E: fields.RealField  # energy per unit length (≥ 0)
    Q: fields.RealField  # energy flux


@dataclass(frozen=True, eq=False)
class ProbabilityFields:
    rho: fields.RealField  # probability density (≥ 0)
    q:   fields.RealField  # probability current
    lam: float             # normalization constant λ


# ── Mechanical side ───────────────────────────────────────────────────────────


def energy_density(s: duality.StrainState, p: fields.PhysParams) -> fields.RealField:
    gamma, v = s.gamma.values, s.v.values
    return fields.RealField(s.grid, 0.5 * p.b ** 2 * gamma ** 2 + 0.5 * p.a ** 2 * v ** 2)


def energy_flux(s: duality.StrainState, p: fields.PhysParams) -> fields.RealField:
    gamma_x = fields.spectral_derivative(s.gamma, 1).values
    v_x = fields.spectral_derivative(s.v, 1).values
    gamma, v = s.gamma.values, s.v.values
    return fields.RealField(s.grid, p.b ** 2 * (v * gamma_x - v_x * gamma))


def energy_fields(s: duality.StrainState, p: fields.PhysParams) -> EnergyFields:
    return EnergyFields(E=energy_density(s, p), Q=energy_flux(s, p))


def total_energy(s: duality.StrainState, p: fields.PhysParams) -> float:
    return fields.integrate(energy_density(s, p))


# ── Quantum side ──────────────────────────────────────────────────────────────


def _modulus_squared(psi: fields.Field) -> np.ndarray:
    values = fields.as_complex(psi).values
    return values.real ** 2 + values.imag ** 2


def normalization_constant(psi: fields.Field) -> float:
    """λ = 1 / ∫|ψ|² dx. Raises ZeroWaveFunction for an (essentially) zero ψ."""
    norm = fields.integrate(fields.RealField(psi.grid, _modulus_squared(psi)))
    if norm <= _ZERO_NORM:
        raise errors.ZeroWaveFunction(f"∫|ψ|² dx = {norm:.3e}; the wave function cannot be normalized.")
    return 1.0 / norm


def normalization_or_zero(psi: fields.Field) -> float:
    """λ, or 0 for a zero ψ so that ρ, q and their balance residual all vanish."""
    try:
        return normalization_constant(psi)
    except errors.ZeroWaveFunction:
        return 0.0


def probability_density(psi: fields.Field, lam: float) -> fields.RealField:
    return fields.RealField(psi.grid, lam * _modulus_squared(psi))


def probability_current(psi: fields.Field, lam: float, p: fields.PhysParams) -> fields.RealField:
    psi = fields.as_complex(psi)
    psi_x = fields.spectral_derivative(psi, 1).values
    return fields.RealField(psi.grid, 2 * p.b * lam / p.a * np.imag(np.conj(psi.values) * psi_x))


def probability_fields(psi: fields.Field, lam: float, p: fields.PhysParams) -> ProbabilityFields:
    return ProbabilityFields(
        rho=probability_density(psi, lam),
        q=probability_current(psi, lam, p),
        lam=lam,
    )


# ── Identities ────────────────────────────────────────────────────────────────


def duality_gap(s: duality.StrainState, psi: fields.Field, lam: float, p: fields.PhysParams) -> float:
    """max_x |ρ − 2λ·E|. Zero (to round-off) when ψ corresponds to s; a diagnostic, never raises."""
    fields.require_same_grid(s.gamma, psi)
    rho = probability_density(psi, lam).values
    E = energy_density(s, p).values
    return fields.max_norm(rho - 2 * lam * E)


def flux_current_gap(s: duality.StrainState, psi: fields.Field, lam: float, p: fields.PhysParams) -> float:
    """max_x |q − 2λ·Q|; the current is the flux rescaled exactly like the density."""
    fields.require_same_grid(s.gamma, psi)
    q = probability_current(psi, lam, p).values
    Q = energy_flux(s, p).values
    return fields.max_norm(q - 2 * lam * Q)


# ── Balance laws ──────────────────────────────────────────────────────────────


def default_fd_step(grid: fields.Grid, p: fields.PhysParams) -> float:
    """1e-4·(a/b)·Δx², a small fraction of the period of the fastest grid mode."""
    return 1e-4 * grid.dx ** 2 / p.ratio


def beam_trajectory(s0: propagators.BeamState, p: fields.PhysParams) -> Trajectory:
    """t ↦ (γ, v)(t) of the exactly propagated real beam state."""
    return lambda t: duality.strain_velocity(propagators.propagate_beam(s0, t, p))


def schrodinger_trajectory(psi0: fields.Field, p: fields.PhysParams) -> Trajectory:
    """t ↦ (γ, v)(t) read off the exactly propagated wave function."""
    return lambda t: duality.state_from_wavefunction(propagators.propagate_schrodinger(psi0, t, p), p)


def _density_and_flux(
    s: duality.StrainState,
    which: Balance,
    p: fields.PhysParams,
    lam: float | None,
) -> tuple[fields.RealField, fields.RealField]:
    if which is Balance.ENERGY:
        return energy_density(s, p), energy_flux(s, p)
    psi = duality.wavefunction_from_state(s, p)
    if lam is None:
        lam = normalization_or_zero(psi)
    return probability_density(psi, lam), probability_current(psi, lam, p)


def balance_residual(
    trajectory: Trajectory,
    t: float,
    dt_fd: float,
    which: Balance,
    p: fields.PhysParams,
    lam: float | None = None,
) -> fields.RealField:
    """
    [D(t + dt) − D(t − dt)] / (2·dt) + F'(t) for (D, F) = (E, Q) or (ρ, q).

    Exact trajectories leave only the O(dt²) centered-difference error.
    For the probability balance λ defaults to the normalization of ψ(t),
    or 0 for a zero state.
    """
    if dt_fd <= 0:
        raise ValueError(f"dt_fd must be positive, got {dt_fd!r}.")
    which = Balance(which)
    state = trajectory(t)
    if which is Balance.PROBABILITY and lam is None:
        lam = normalization_or_zero(duality.wavefunction_from_state(state, p))

    D_after, _ = _density_and_flux(trajectory(t + dt_fd), which, p, lam)
    D_before, _ = _density_and_flux(trajectory(t - dt_fd), which, p, lam)
    _, F = _density_and_flux(state, which, p, lam)

    D_dot = (D_after.values - D_before.values) / (2 * dt_fd)
    F_x = fields.spectral_derivative(F, 1).values
    return fields.RealField(state.grid, D_dot + F_x)
