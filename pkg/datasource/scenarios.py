"""
Canonical initial data.

+----------------------+--------------------------------------------------------+
| Scenario             | Data                                                   |
+----------------------+--------------------------------------------------------+
| Gaussian packet      | ψ0 = exp(−(x − x0)²/(4·s0²) + i·k0·x), |ψ0|² has std s0 |
| Single mode          | cos / sin / exp(i·k_n·x) of one grid wavenumber        |
| Random band-limited  | seeded real (u, v), modes above a cutoff exactly zero  |
| Zero                 | u = v = 0                                              |
+----------------------+--------------------------------------------------------+

A free packet spreads as s(t) = s0·√(1 + (b·t / (a·s0²))²). Packet moments are
taken in minimal-image coordinates around the density maximum so the periodic
wrap does not add spurious variance.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

import models.errors as errors
import models.fields as fields
import models.propagators as propagators

PACKET_HALF_WIDTHS = 6.0   # support of a packet: ±6 standard deviations
_NORM_TOLERANCE = 1e-6     # |∫ρ − 1| accepted by packet_width

SCENARIO_KINDS = ("packet", "random", "mode", "zero")


@dataclass(frozen=True)
class PacketSpec:
    x0: float  # center position
    s0: float  # initial density standard deviation (> 0)
    k0: float  # carrier wavenumber

    def __post_init__(self):
        if not np.isfinite(self.s0) or self.s0 <= 0:
            raise ValueError(f"s0 must be a positive width, got {self.s0!r}.")


def analytic_width(s0: float, t: float, p: fields.PhysParams) -> float:
    """s(t) = s0·√(1 + (b·t / (a·s0²))²)."""
    return s0 * float(np.sqrt(1.0 + (p.b * t / (p.a * s0 ** 2)) ** 2))


def minimal_image(grid: fields.Grid, center: float) -> np.ndarray:
    """x − center wrapped into [−L/2, L/2)."""
    half = 0.5 * grid.L
    return np.mod(grid.x - center + half, grid.L) - half


def gaussian_packet(
    spec: PacketSpec,
    grid: fields.Grid,
    t_max: float = 0.0,
    p: fields.PhysParams | None = None,
) -> fields.ComplexField:
    """
    Free Gaussian packet on the periodic box.

    The support ±6·s(t_max) must fit inside the box (s(t_max) = s0 when no
    physics or run length is given); raises PacketTooWide otherwise.
    """
    widest = spec.s0 if p is None else analytic_width(spec.s0, t_max, p)
    support = 2 * PACKET_HALF_WIDTHS * widest
    if support > grid.L:
        raise errors.PacketTooWide(
            f"packet support {support:.4g} (±{PACKET_HALF_WIDTHS:g} widths of {widest:.4g}) "
            f"exceeds the box length L = {grid.L:.4g}"
        )
    d = minimal_image(grid, spec.x0)
    return fields.ComplexField(grid, np.exp(-d ** 2 / (4 * spec.s0 ** 2) + 1j * spec.k0 * grid.x))


def packet_width(rho: fields.RealField) -> float:
    """√(∫(x − x̄)²ρ dx) in minimal-image coordinates; ρ must be normalized."""
    total = fields.integrate(rho)
    if abs(total - 1.0) > _NORM_TOLERANCE:
        raise errors.NotNormalized(f"∫ρ dx = {total:.12g}; a normalized density is required.")
    grid = rho.grid
    d = minimal_image(grid, grid.x[int(np.argmax(rho.values))])
    mean = fields.integrate(fields.RealField(grid, d * rho.values))
    variance = fields.integrate(fields.RealField(grid, (d - mean) ** 2 * rho.values))
    return float(np.sqrt(variance))


def single_mode(grid: fields.Grid, n: int, kind: str = "cos") -> fields.Field:
    """cos(k_n·x), sin(k_n·x) (real) or exp(i·k_n·x) (complex)."""
    phase = 2 * np.pi * n / grid.L * grid.x
    if kind == "cos":
        return fields.RealField(grid, np.cos(phase))
    if kind == "sin":
        return fields.RealField(grid, np.sin(phase))
    if kind == "exp":
        return fields.ComplexField(grid, np.exp(1j * phase))
    raise ValueError(f"unknown mode kind {kind!r}; expected 'cos', 'sin' or 'exp'.")


def zero_state(grid: fields.Grid) -> propagators.BeamState:
    zeros = fields.RealField(grid, np.zeros(grid.N))
    return propagators.BeamState(u=zeros, v=zeros)


def _random_real_field(rng: np.random.Generator, grid: fields.Grid, cutoff: int, zero_mean: bool) -> fields.RealField:
    """
    Half spectrum c_0..c_cutoff of unit-variance complex Gaussians (c_0 real);
    conjugate symmetry is implied by irfft. Everything above cutoff is exactly 0.
    """
    half = np.zeros(grid.N // 2 + 1, dtype=np.complex128)
    draws = rng.standard_normal((cutoff, 2)) / np.sqrt(2.0)
    half[1:cutoff + 1] = draws[:, 0] + 1j * draws[:, 1]
    mean = rng.standard_normal()
    if not zero_mean:
        half[0] = mean
    return fields.RealField(grid, sfft.irfft(half, n=grid.N, norm="forward"))


def random_band_limited(
    seed: int,
    kmax_fraction: float,
    grid: fields.Grid,
    zero_mean_v: bool = True,
) -> propagators.BeamState:
    """
    Reproducible real (u, v) with modes |n| ≤ kmax_fraction·N/2.

    The same seed always gives bit-identical fields; with zero_mean_v the
    velocity has no n = 0 mode, as split_initial_data requires.
    """
    if not 0 < kmax_fraction <= 0.5:
        raise ValueError(f"kmax_fraction must be in (0, 0.5], got {kmax_fraction!r}.")
    cutoff = max(1, int(kmax_fraction * grid.N // 2))
    rng = np.random.default_rng(seed)
    u = _random_real_field(rng, grid, cutoff, zero_mean=False)
    v = _random_real_field(rng, grid, cutoff, zero_mean=zero_mean_v)
    return propagators.BeamState(u=u, v=v)


def random_wavefunction(seed: int, kmax_fraction: float, grid: fields.Grid) -> fields.ComplexField:
    """Complex band-limited field u + i·v built from random_band_limited."""
    s = random_band_limited(seed, kmax_fraction, grid, zero_mean_v=False)
    return fields.complex_from_parts(grid, s.u.values, s.v.values)


def initial_data(
    kind: str,
    grid: fields.Grid,
    p: fields.PhysParams,
    *,
    seed: int = 1,
    kmax_fraction: float = 0.25,
    mode_n: int = 1,
    mode_kind: str = "cos",
    zero_mean_v: bool = True,
    packet: PacketSpec | None = None,
    t_max: float = 0.0,
) -> propagators.BeamState | fields.ComplexField:
    """
    Build one named scenario.

    "packet" yields a wave function; "random", "mode" and "zero" yield real
    beam data (u, v) with v ≡ 0 for single modes. Random velocities keep their
    mean mode unless zero_mean_v.
    """
    if kind == "packet":
        spec = packet if packet is not None else PacketSpec(x0=grid.L / 2, s0=1.0, k0=0.0)
        return gaussian_packet(spec, grid, t_max=t_max, p=p)
    if kind == "random":
        return random_band_limited(seed, kmax_fraction, grid, zero_mean_v=zero_mean_v)
    if kind == "mode":
        if mode_kind not in ("cos", "sin"):
            raise ValueError(f"a beam mode scenario needs a real mode kind, got {mode_kind!r}.")
        u = single_mode(grid, mode_n, mode_kind)
        return propagators.BeamState(u=u, v=fields.RealField(grid, np.zeros(grid.N)))
    if kind == "zero":
        return zero_state(grid)
    raise ValueError(f"unknown scenario {kind!r}; expected one of {SCENARIO_KINDS}.")
