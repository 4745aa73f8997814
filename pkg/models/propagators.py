"""
Dispersion relations, the operator factorization and exact spectral propagation.

    S± = ±i·a·∂t + b·∂x²          (Schrödinger-type operators, S− = S+*)
    B  = a²·∂t² + b²·∂x⁴ = S± S∓   (Euler-Bernoulli beam operator)

A plane wave exp(i(kx − Ωt)) solves S+ψ = 0 for Ω = (b/a)k² and Bu = 0 for
ω = ±(b/a)k², so both equations share one dispersion law. Propagation is done
mode by mode with the exact phase, so there is no time-discretization error:

    S+ :  ψ̂_n(t) = ψ̂_n(0) · exp(−i·Ω_n·t)
    S− :  ψ̂_n(t) = ψ̂_n(0) · exp(+i·Ω_n·t)
    B  :  each mode is a harmonic oscillator of frequency ω_n; n = 0 drifts rigidly.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

import models.fields as fields


class Branch(IntEnum):
    """Which Schrödinger-type operator: S+ (phase e^{−iΩt}) or S− (phase e^{+iΩt})."""
    PLUS = 1
    MINUS = -1


@dataclass(frozen=True, eq=False)
class BeamState:
    """Displacement u and particle velocity v = u̇ at one time."""
    u: fields.Field
    v: fields.Field

    def __post_init__(self):
        fields.require_same_grid(self.u, self.v)
        if type(self.u) is not type(self.v):
            raise ValueError("u and v must both be real or both be complex.")

    @property
    def grid(self) -> fields.Grid:
        return self.u.grid

    @property
    def is_complex(self) -> bool:
        return self.u.is_complex


@dataclass(frozen=True)
class ModeSymbols:
    """Plane-wave symbols of one wavenumber (principal, non-negative branch)."""
    k:     float  # wavenumber
    Omega: float  # Schrödinger frequency (rad/time)
    omega: float  # beam frequency (rad/time)


def dispersion_schrodinger(k, p: fields.PhysParams):
    """Ω = b·k²/a. Accepts scalars or arrays."""
    return p.b * np.square(k) / p.a


def dispersion_beam(k, p: fields.PhysParams):
    """ω = (b/a)·k², the principal root of a²ω² = b²k⁴; the time branches are ±ω."""
    return p.ratio * np.square(k)


def mode_symbols(k: float, p: fields.PhysParams) -> ModeSymbols:
    return ModeSymbols(
        k=float(k),
        Omega=float(dispersion_schrodinger(k, p)),
        omega=float(dispersion_beam(k, p)),
    )


def factorization_residual(k: float, Omega: float, p: fields.PhysParams) -> complex:
    """
    Symbol of S+ times symbol of S− minus symbol of B, for the plane wave
    exp(i(kx − Ωt)). Identically zero: (aΩ − bk²)(−aΩ − bk²) = −a²Ω² + b²k⁴.
    """
    dt = -1j * Omega       # ∂t ↦ −iΩ
    dxx = (1j * k) ** 2    # ∂x² ↦ −k²
    s_plus = 1j * p.a * dt + p.b * dxx
    s_minus = -1j * p.a * dt + p.b * dxx
    beam = p.a ** 2 * dt ** 2 + p.b ** 2 * dxx ** 2
    return complex(s_plus * s_minus - beam)


def plane_wave_residual(grid: fields.Grid, n: int, p: fields.PhysParams) -> dict:
    """
    Substitute the grid plane wave exp(i·k_n·x) with frequency from the dispersion
    law into the discrete operators (spectral x-derivatives, exact ∂t ↦ −iΩ).

    Each residual is divided by the operator's largest symbol on the grid,
    2b·k_max² for S+ and 2b²·k_max⁴ for B. Sampling round-off reaches every
    mode and is multiplied by that symbol, so the relative floor is a few
    machine epsilons for any n.

    Returns:
        {"schrodinger": max|S+ψ| / (2b·k_max²), "beam": max|Bψ| / (2b²·k_max⁴)}
    """
    k = 2 * np.pi * n / grid.L
    psi = fields.ComplexField(grid, np.exp(1j * k * grid.x))
    Omega = dispersion_schrodinger(k, p)
    psi_xx = fields.spectral_derivative(psi, 2).values
    psi_xxxx = fields.spectral_derivative(psi, 4).values
    s_plus = 1j * p.a * (-1j * Omega) * psi.values + p.b * psi_xx
    beam = p.a ** 2 * (-1j * Omega) ** 2 * psi.values + p.b ** 2 * psi_xxxx
    return {
        "schrodinger": fields.max_norm(s_plus) / (2 * p.b * grid.k_max ** 2),
        "beam":        fields.max_norm(beam) / (2 * p.b ** 2 * grid.k_max ** 4),
    }


# ── Exact propagation ─────────────────────────────────────────────────────────


def _phase_angle(grid: fields.Grid, t: float, p: fields.PhysParams) -> tuple[np.ndarray, np.ndarray]:
    """(ω_n, ω_n·t). Both propagators share this so their trig values agree bit for bit."""
    omega = dispersion_beam(grid.k, p)
    return omega, omega * t


def propagate_schrodinger(
    psi0: fields.Field,
    t: float,
    p: fields.PhysParams,
    branch: Branch = Branch.PLUS,
) -> fields.ComplexField:
    """Exact solution of S±ψ = 0 at time t (any sign of t) from ψ(0) = psi0."""
    _, theta = _phase_angle(psi0.grid, t, p)
    phase = np.cos(theta) - 1j * int(branch) * np.sin(theta)
    return fields.synthesize(psi0.grid, fields.modes(psi0) * phase, real=False)


def propagate_beam(s0: BeamState, t: float, p: fields.PhysParams) -> BeamState:
    """
    Exact solution of a²ü + b²u'''' = 0 at time t from (u, u̇)(0) = (s0.u, s0.v).

    Mode n ≠ 0:  û(t) = û0·cos ωt + v̂0·sin(ωt)/ω,   v̂(t) = −û0·ω·sin ωt + v̂0·cos ωt
    Mode n = 0:  û(t) = û0 + t·v̂0,                   v̂(t) = v̂0
    """
    grid = s0.grid
    omega, theta = _phase_angle(grid, t, p)
    cos, sin = np.cos(theta), np.sin(theta)
    moving = omega > 0
    sin_over_omega = np.full(grid.N, float(t))
    sin_over_omega[moving] = sin[moving] / omega[moving]

    u_hat, v_hat = fields.modes(s0.u), fields.modes(s0.v)
    u_t = u_hat * cos + v_hat * sin_over_omega
    v_t = -u_hat * omega * sin + v_hat * cos

    real = not s0.is_complex
    return BeamState(
        u=fields.synthesize(grid, u_t, real=real),
        v=fields.synthesize(grid, v_t, real=real),
    )


def schrodinger_velocity(psi: fields.Field, p: fields.PhysParams, branch: Branch = Branch.PLUS) -> fields.ComplexField:
    """ψ̇ = ±(i·b/a)·ψ'' implied by S±ψ = 0."""
    psi_xx = fields.spectral_derivative(fields.as_complex(psi), 2)
    return fields.ComplexField(psi.grid, int(branch) * 1j * p.ratio * psi_xx.values)
