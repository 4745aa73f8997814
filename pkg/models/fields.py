"""
Periodic grids, sampled fields and spectral calculus.

All fields live on a uniform periodic grid x_j = j·L/N, j = 0..N−1 (x = L is
identified with x = 0). The Fourier convention is fixed project-wide:

    f(x_j) = Σ_n f̂_n · exp(i·k_n·x_j),     k_n = 2πn/L,  n ∈ {−N/2, …, N/2 − 1}

so the forward transform carries the 1/N factor (scipy.fft with norm="forward").
Spectra are kept in FFT order; index N/2 holds the unpaired Nyquist mode n = −N/2.

The free-space problem is posed on ℝ; here it is posed on a large periodic box.
Keeping the data decayed well inside the box is the caller's responsibility.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import ClassVar

import numpy as np
import scipy.fft as sfft

import models.errors as errors

MEAN_TOLERANCE = 1e-10      # |f̂_0| / max|f̂_n| allowed for a periodic antiderivative
_REAL_RESIDUE_TOL = 1e-13   # imaginary residue / max|f̂_n| discarded for real outputs
_SUPPORTED_ORDERS = (1, 2, 3, 4)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic 1D grid of N points on [0, L)."""
    L: float  # domain length (> 0)
    N: int    # number of points (even, ≥ 4)

    def __post_init__(self):
        if not np.isfinite(self.L) or self.L <= 0:
            raise ValueError(f"L must be a positive finite length, got {self.L!r}.")
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise ValueError(f"N must be an integer, got {self.N!r}.")
        if self.N < 4 or self.N % 2:
            raise ValueError(f"N must be even and at least 4, got {self.N}.")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "N", int(self.N))

    @property
    def dx(self) -> float:
        return self.L / self.N

    @cached_property
    def x(self) -> np.ndarray:
        x = np.arange(self.N) * self.dx
        x.flags.writeable = False
        return x

    @cached_property
    def k(self) -> np.ndarray:
        """Wavenumbers in FFT order: 0, 1, …, N/2 − 1, −N/2, …, −1 (times 2π/L)."""
        k = 2 * np.pi * sfft.fftfreq(self.N, d=self.dx)
        k.flags.writeable = False
        return k

    @cached_property
    def k_rfft(self) -> np.ndarray:
        """Non-negative wavenumbers of the half spectrum used by rfft/irfft."""
        k = 2 * np.pi * sfft.rfftfreq(self.N, d=self.dx)
        k.flags.writeable = False
        return k

    @property
    def nyquist_index(self) -> int:
        return self.N // 2

    @property
    def k_max(self) -> float:
        return np.pi * self.N / self.L


def make_grid(L: float, N: int) -> Grid:
    """Validated constructor; raises ValueError for odd or tiny N and non-positive L."""
    return Grid(L=L, N=N)


@dataclass(frozen=True)
class PhysParams:
    """
    The two positive constants shared by both equations.

        beam:     a² · ü + b² · u'''' = 0     (a² mass per length, b² flexural rigidity)
        quantum:  i·a·ψ̇ + b·ψ'' = 0           (a = ħ, b = ħ²/2m)
    """
    a: float
    b: float

    def __post_init__(self):
        for name in ("a", "b"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a positive finite number, got {value!r}.")
            object.__setattr__(self, name, float(value))

    @property
    def ratio(self) -> float:
        """b/a, the common dispersion coefficient in Ω = ω = (b/a)·k²."""
        return self.b / self.a


# ── Field containers ──────────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class _SampledField:
    grid:   Grid
    values: np.ndarray

    _dtype: ClassVar[type]

    def __post_init__(self):
        raw = np.asarray(self.values)
        if self._dtype is np.float64 and np.iscomplexobj(raw):
            raise ValueError("RealField values must be real; use ComplexField for complex data.")
        values = np.array(raw, dtype=self._dtype)
        if values.shape != (self.grid.N,):
            raise ValueError(
                f"expected {self.grid.N} samples for this grid, got shape {values.shape}."
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field samples must all be finite.")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def is_complex(self) -> bool:
        return self._dtype is np.complex128


@dataclass(frozen=True, eq=False)
class RealField(_SampledField):
    """Real samples of a function of x at a fixed time (u, v, γ, E, Q, ρ, q)."""
    _dtype: ClassVar[type] = np.float64


@dataclass(frozen=True, eq=False)
class ComplexField(_SampledField):
    """Complex samples of a function of x at a fixed time (ψ, Ψ+, Ψ−)."""
    _dtype: ClassVar[type] = np.complex128


Field = RealField | ComplexField


def as_complex(f: Field) -> ComplexField:
    if isinstance(f, ComplexField):
        return f
    return ComplexField(f.grid, f.values)


def complex_from_parts(grid: Grid, real: np.ndarray, imag: np.ndarray) -> ComplexField:
    """Assemble re + i·im without mixing the parts through complex multiplication."""
    values = np.empty(grid.N, dtype=np.complex128)
    values.real = real
    values.imag = imag
    return ComplexField(grid, values)


def require_same_grid(*fs: Field) -> Grid:
    grid = fs[0].grid
    for f in fs[1:]:
        if f.grid != grid:
            raise errors.GridMismatch(f"fields live on different grids: {grid} vs {f.grid}")
    return grid


# ── Modal analysis / synthesis ────────────────────────────────────────────────


def modes(f: Field) -> np.ndarray:
    """
    Modal coefficients f̂_n in FFT order (forward transform carries 1/N).
    A real field gives an exactly conjugate-symmetric spectrum.
    """
    if f.is_complex:
        return sfft.fft(f.values, norm="forward")
    half = sfft.rfft(f.values, norm="forward")
    N = f.grid.N
    return np.concatenate((half, np.conj(half[1:N - N // 2][::-1])))


def _mirror(spectrum: np.ndarray) -> np.ndarray:
    """n ↦ conj(ĝ_{−n})."""
    return np.conj(spectrum[-np.arange(spectrum.size) % spectrum.size])


def synthesize(grid: Grid, spectrum: np.ndarray, real: bool, scale: float | None = None) -> Field:
    """
    Inverse of modes().

    With real=True the imaginary part of the result is the synthesis of the
    anti-symmetric part (ĝ_n − conj ĝ_{−n})/2. It must stay within
    1e-13·scale (default max|ĝ_n|) and is discarded.
    """
    if not real:
        return ComplexField(grid, sfft.ifft(spectrum, norm="forward"))
    if scale is None:
        scale = float(np.max(np.abs(spectrum), initial=0.0))
    residue = 0.5 * float(np.sum(np.abs(spectrum - _mirror(spectrum))))
    if residue > _REAL_RESIDUE_TOL * scale:
        raise ValueError(
            f"real synthesis left an imaginary residue of {residue:.3e} "
            f"(scale {scale:.3e}); the spectrum is not conjugate-symmetric"
        )
    half = spectrum[:grid.N // 2 + 1]
    return RealField(grid, sfft.irfft(half, n=grid.N, norm="forward"))


def _like(f: Field, spectrum: np.ndarray, scale: float | None = None) -> Field:
    return synthesize(f.grid, spectrum, real=not f.is_complex, scale=scale)


# ── Spectral calculus ─────────────────────────────────────────────────────────


def derivative_symbol(grid: Grid, order: int) -> np.ndarray:
    """(i·k_n)^order, with the Nyquist mode zeroed for odd orders."""
    if order not in _SUPPORTED_ORDERS:
        raise ValueError(f"derivative order must be one of {_SUPPORTED_ORDERS}, got {order!r}.")
    symbol = (1j ** order) * grid.k ** order
    if order % 2:
        symbol[grid.nyquist_index] = 0.0
    return symbol


def spectral_derivative(f: Field, order: int) -> Field:
    """d^order f / dx^order; a real input gives a real output."""
    spectrum = modes(f)
    scale = float(np.max(np.abs(spectrum), initial=0.0))
    return _like(f, derivative_symbol(f.grid, order) * spectrum, scale=scale)


def spectral_double_antiderivative(f: Field) -> Field:
    """
    The periodic g with g'' = f and ĝ_0 = 0.

    Exists only for a zero-mean integrand: raises NonZeroMean when
    |f̂_0| > MEAN_TOLERANCE · max|f̂_n|.
    """
    spectrum = modes(f)
    mean_modulus = float(np.abs(spectrum[0]))
    scale = float(np.max(np.abs(spectrum)))
    if mean_modulus > MEAN_TOLERANCE * scale:
        raise errors.NonZeroMean(mean_modulus, scale)

    k = f.grid.k
    g_hat = np.zeros_like(spectrum)
    nonzero = k != 0
    g_hat[nonzero] = -spectrum[nonzero] / k[nonzero] ** 2
    return _like(f, g_hat)


def integrate(f: Field) -> float | complex:
    """∫_0^L f dx by the trapezoid rule, spectrally exact for band-limited integrands."""
    total = f.grid.L * np.mean(f.values)
    return complex(total) if f.is_complex else float(total)


# ── Norms ─────────────────────────────────────────────────────────────────────


def max_norm(f: Field | np.ndarray) -> float:
    values = f.values if isinstance(f, _SampledField) else np.asarray(f)
    return float(np.max(np.abs(values), initial=0.0))


def relative_deviation(actual: Field | np.ndarray, expected: Field | np.ndarray) -> float:
    """max|actual − expected| / max|expected|; absolute when expected is zero."""
    a = actual.values if isinstance(actual, _SampledField) else np.asarray(actual)
    e = expected.values if isinstance(expected, _SampledField) else np.asarray(expected)
    diff = float(np.max(np.abs(a - e), initial=0.0))
    scale = max_norm(e)
    return diff / scale if scale > 0 else diff
