"""
Classical RK4 method-of-lines integration of both formulations, and the
cost / accuracy / stability benchmark comparing them.

    beam (first-order system):  u̇ = v,   v̇ = −(b/a)²·u''''     2N real unknowns
    Schrödinger:                ψ̇ = i·(b/a)·ψ''                 N complex unknowns

Spatial derivatives are spectral. Both systems have purely imaginary modal
eigenvalues ±i·ω_n, so they share the RK4 imaginary-axis stability limit
|ω·dt| ≤ 2√2 set by the fastest mode ω_max = (b/a)·k_max².

The benchmark only reports; it does not assume either route is cheaper.
"""

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
import scipy.fft as sfft
from scipy import optimize

import models.duality as duality
import models.errors as errors
import models.fields as fields
import models.propagators as propagators

logger = logging.getLogger(__name__)

RK4_STABILITY_LIMIT = 2 * np.sqrt(2)  # |ω·dt| bound on the imaginary axis
BLOWUP_FACTOR = 10.0                  # norm growth that flags an unstable run
_RK4_STAGES = 4
_SEED_AMPLITUDE = 1e-10               # fastest-mode seed for stability scans (relative)
_ORDER_GRID_N = 4
_FFT_FLOPS = {"complex": 5.0, "real": 2.5}  # × N·log2 N per transform

State = propagators.BeamState | fields.ComplexField


class Formulation(StrEnum):
    BEAM = "beam_first_order_system"
    SCHRODINGER = "schrodinger"


@dataclass(frozen=True)
class IntegratorConfig:
    formulation: Formulation
    dt:          float              # time step (> 0)
    T:           float              # final time (≥ 0)
    grid:        fields.Grid
    p:           fields.PhysParams

    def __post_init__(self):
        object.__setattr__(self, "formulation", Formulation(self.formulation))
        if not np.isfinite(self.dt) or self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}.")
        if not np.isfinite(self.T) or self.T < 0:
            raise ValueError(f"T must be non-negative, got {self.T!r}.")


@dataclass(frozen=True)
class DtPolicy:
    """Fixed dt, or a fraction (cfl) of the RK4 limit 2√2/ω_max of the grid."""
    cfl: float = 0.5
    dt:  float | None = None

    def resolve(self, grid: fields.Grid, p: fields.PhysParams) -> float:
        if self.dt is not None:
            return self.dt
        return self.cfl * RK4_STABILITY_LIMIT / fastest_frequency(grid, p)


@dataclass
class RunRecord:
    """One (formulation, N) run of the benchmark."""
    formulation:                 str
    N:                           int
    dt:                          float
    T:                           float
    steps:                       int
    wall_time:                   float         # seconds
    error:                       float | None  # relative max-norm error vs exact propagator; None if blown up
    stable:                      bool          # norm stayed below BLOWUP_FACTOR × initial
    dt_star:                     float | None  # empirical stability threshold; None for zero data
    transforms_per_step:         int
    transform_kind:              str           # "real" | "complex"
    monitor_transforms_per_step: int           # extra transforms spent on the blow-up norm
    real_dof:                    int
    fft_flops_per_step:          float


@dataclass
class BenchReport:
    runs:             list[RunRecord] = field(default_factory=list)
    correspondence:   dict[int, float | None] = field(default_factory=dict)  # N → gap under the bijection
    dt_star_exponent: dict[str, float | None] = field(default_factory=dict)  # formulation → fitted p in dt* ∝ N^p
    rk4_order:        dict[str, float] = field(default_factory=dict)         # formulation → fitted error order


def fastest_frequency(grid: fields.Grid, p: fields.PhysParams) -> float:
    return float(propagators.dispersion_beam(grid.k_max, p))


# ── Right-hand sides ──────────────────────────────────────────────────────────


def _beam_rhs(grid: fields.Grid, p: fields.PhysParams) -> Callable[[np.ndarray], np.ndarray]:
    k4 = grid.k_rfft ** 4
    stiffness = -(p.ratio ** 2)

    def rhs(y: np.ndarray) -> np.ndarray:
        u, v = y
        u_xxxx = sfft.irfft(k4 * sfft.rfft(u), n=grid.N)
        return np.stack((v, stiffness * u_xxxx))

    return rhs


def _schrodinger_rhs(grid: fields.Grid, p: fields.PhysParams) -> Callable[[np.ndarray], np.ndarray]:
    symbol = -1j * p.ratio * grid.k ** 2

    def rhs(psi: np.ndarray) -> np.ndarray:
        return sfft.ifft(symbol * sfft.fft(psi))

    return rhs


def _beam_norm(grid: fields.Grid, p: fields.PhysParams) -> Callable[[np.ndarray], float]:
    """√(‖(b/a)·u''‖² + ‖v‖²): conserved by the exact flow, blind to rigid drift."""
    k2 = grid.k_rfft ** 2

    def norm(y: np.ndarray) -> float:
        u, v = y
        u_xx = sfft.irfft(-k2 * sfft.rfft(u), n=grid.N)
        return float(np.sqrt(np.sum((p.ratio * u_xx) ** 2) + np.sum(v ** 2)))

    return norm


def _rk4_step(rhs: Callable[[np.ndarray], np.ndarray], y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_sizes(T: float, dt: float) -> list[float]:
    """Whole steps of dt up to T, then one exact partial step for the remainder."""
    n_full = int(np.floor(T / dt))
    remainder = T - n_full * dt
    if remainder > (1 - 1e-9) * dt:
        n_full, remainder = n_full + 1, 0.0
    steps = [dt] * n_full
    if remainder > 1e-9 * dt:
        steps.append(remainder)
    return steps


# ── Integration ───────────────────────────────────────────────────────────────


def rk4_integrate(cfg: IntegratorConfig, initial: State) -> State:
    """
    Advance initial data to cfg.T with classical RK4.

    Beam runs take a real BeamState, Schrödinger runs a ComplexField. Raises
    BlowUp as soon as the norm exceeds BLOWUP_FACTOR × its initial value.
    """
    grid, p = cfg.grid, cfg.p
    if cfg.formulation is Formulation.BEAM:
        if not isinstance(initial, propagators.BeamState) or initial.is_complex:
            raise ValueError("the beam formulation integrates a real BeamState.")
        y = np.stack((initial.u.values, initial.v.values))
        rhs, norm = _beam_rhs(grid, p), _beam_norm(grid, p)
    else:
        if not isinstance(initial, fields.ComplexField):
            raise ValueError("the Schrödinger formulation integrates a ComplexField.")
        y = initial.values.copy()
        rhs, norm = _schrodinger_rhs(grid, p), lambda psi: float(np.linalg.norm(psi))
    if initial.grid != grid:
        raise errors.GridMismatch(f"initial data live on {initial.grid}, config expects {grid}")

    norm0 = norm(y)
    t = 0.0
    for step, h in enumerate(step_sizes(cfg.T, cfg.dt), start=1):
        y = _rk4_step(rhs, y, h)
        t += h
        if norm0 > 0:
            growth = norm(y) / norm0
            if not np.isfinite(growth) or growth > BLOWUP_FACTOR:
                logger.debug("%s blew up: step %d, dt %.3e, growth %.3e", cfg.formulation, step, cfg.dt, growth)
                raise errors.BlowUp(step, t, growth)

    if cfg.formulation is Formulation.BEAM:
        return propagators.BeamState(u=fields.RealField(grid, y[0]), v=fields.RealField(grid, y[1]))
    return fields.ComplexField(grid, y)


def operation_counts(formulation: Formulation, grid: fields.Grid) -> dict:
    """Per-step transform counts of the RHS evaluations, measured from the kernels above."""
    formulation = Formulation(formulation)
    if formulation is Formulation.BEAM:
        kind, monitor = "real", 2      # rfft + irfft per RHS; norm needs u''
    else:
        kind, monitor = "complex", 0   # fft + ifft per RHS; norm is direct
    transforms = 2 * _RK4_STAGES
    fft_cost = _FFT_FLOPS[kind] * grid.N * np.log2(grid.N)
    return {
        "transforms_per_step":         transforms,
        "transform_kind":              kind,
        "monitor_transforms_per_step": monitor,
        "real_dof":                    2 * grid.N,
        "fft_flops_per_step":          float((transforms + monitor) * fft_cost),
    }


def convergence_order(xs, errs) -> float:
    """Slope of log(err) against log(x) by least squares."""
    slope, _ = np.polyfit(np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(errs, dtype=float)), 1)
    return float(slope)


# ── Stability and accuracy studies ────────────────────────────────────────────


def _seed_fastest_mode(initial: State) -> State:
    """Add a tiny Nyquist-mode component so the fastest mode is present in the data."""
    grid = initial.grid
    nyquist = (-1.0) ** np.arange(grid.N)
    if isinstance(initial, propagators.BeamState):
        scale = max(fields.max_norm(initial.u), fields.max_norm(initial.v))
        return propagators.BeamState(
            u=fields.RealField(grid, initial.u.values + _SEED_AMPLITUDE * scale * nyquist),
            v=initial.v,
        )
    scale = fields.max_norm(initial)
    return fields.ComplexField(grid, initial.values + _SEED_AMPLITUDE * scale * nyquist)


def stability_threshold(
    formulation: Formulation,
    initial: State,
    p: fields.PhysParams,
    steps: int = 1000,
    rtol: float = 0.05,
) -> float | None:
    """
    Empirical largest stable dt: bisection on the blow-up flag over `steps` steps,
    to relative accuracy rtol. None for zero data (nothing can grow).
    """
    formulation = Formulation(formulation)
    grid = initial.grid
    seeded = _seed_fastest_mode(initial)
    parts = (seeded.u, seeded.v) if isinstance(seeded, propagators.BeamState) else (seeded,)
    if all(fields.max_norm(part) == 0 for part in parts):
        return None

    def blows_up(dt: float) -> float:
        cfg = IntegratorConfig(formulation, dt, steps * dt, grid, p)
        try:
            rk4_integrate(cfg, seeded)
        except errors.BlowUp:
            return 1.0
        return -1.0

    guess = RK4_STABILITY_LIMIT / fastest_frequency(grid, p)
    lo, hi = 0.5 * guess, 2.0 * guess
    for _ in range(20):
        if blows_up(lo) < 0:
            break
        lo *= 0.5
    for _ in range(20):
        if blows_up(hi) > 0:
            break
        hi *= 2.0
    return float(optimize.bisect(blows_up, lo, hi, xtol=1e-3 * rtol * lo, rtol=rtol))


def order_study(
    formulation: Formulation,
    L: float,
    p: fields.PhysParams,
    steps_per_period: tuple[int, ...] = (16, 32, 64, 128),
) -> dict:
    """
    RK4 error on the lowest cosine mode over one period for several dt.

    Runs on the N = 4 grid of the box: at period/16 steps every mode of that
    grid is inside the stability region, which fails for finer grids.

    Returns:
        {"dts": list[float], "errors": list[float], "order": float}
    """
    formulation = Formulation(formulation)
    grid = fields.make_grid(L, _ORDER_GRID_N)
    k1 = 2 * np.pi / L
    period = 2 * np.pi / float(propagators.dispersion_beam(k1, p))
    s0 = propagators.BeamState(
        u=fields.RealField(grid, np.cos(k1 * grid.x)),
        v=fields.RealField(grid, np.zeros(grid.N)),
    )
    initial = s0 if formulation is Formulation.BEAM else duality.wavefunction_from_beam(s0, p)
    exact = _exact(formulation, initial, period, p)

    dts, errs = [], []
    for m in steps_per_period:
        dt = period / m
        approx = rk4_integrate(IntegratorConfig(formulation, dt, period, grid, p), initial)
        dts.append(dt)
        errs.append(_error(approx, exact, p))
    return {"dts": dts, "errors": errs, "order": convergence_order(dts, errs)}


def _exact(formulation: Formulation, initial: State, T: float, p: fields.PhysParams) -> State:
    if formulation is Formulation.BEAM:
        return propagators.propagate_beam(initial, T, p)
    return propagators.propagate_schrodinger(initial, T, p)


def _error(approx: State, exact: State, p: fields.PhysParams) -> float:
    """Relative max-norm error; beam states are compared through ψ = bγ − iav plus u itself."""
    if isinstance(exact, propagators.BeamState):
        return max(
            fields.relative_deviation(approx.u, exact.u),
            fields.relative_deviation(
                duality.wavefunction_from_beam(approx, p), duality.wavefunction_from_beam(exact, p),
            ),
        )
    return fields.relative_deviation(approx, exact)


# ── Benchmark ─────────────────────────────────────────────────────────────────


def benchmark(
    scenario: Callable[[fields.Grid], propagators.BeamState],
    grid_sizes: list[int],
    policy: DtPolicy,
    p: fields.PhysParams,
    L: float,
    T: float,
    stability_steps: int = 1000,
) -> BenchReport:
    """
    Run both formulations on corresponding initial data for every N.

    The beam route starts from the scenario's real (u, v); the Schrödinger route
    from ψ = b·u'' − i·a·v. Runs are sequential so wall times do not overlap.
    """
    if not grid_sizes:
        raise ValueError("grid_sizes must not be empty.")

    report = BenchReport()
    for N in grid_sizes:
        grid = fields.make_grid(L, N)
        s0 = scenario(grid)
        initials = {
            Formulation.BEAM: s0,
            Formulation.SCHRODINGER: duality.wavefunction_from_beam(s0, p),
        }
        dt = policy.resolve(grid, p)
        finals: dict[Formulation, State | None] = {}

        for formulation, initial in initials.items():
            cfg = IntegratorConfig(formulation, dt, T, grid, p)
            exact = _exact(formulation, initial, T, p)
            started = time.perf_counter()
            try:
                final = rk4_integrate(cfg, initial)
                stable = True
            except errors.BlowUp as exc:
                logger.warning("%s run at N=%d, dt=%.3e is unstable: %s", formulation, N, dt, exc)
                final, stable = None, False
            wall_time = time.perf_counter() - started
            finals[formulation] = final

            report.runs.append(RunRecord(
                formulation=str(formulation),
                N=N,
                dt=dt,
                T=T,
                steps=len(step_sizes(T, dt)),
                wall_time=wall_time,
                error=_error(final, exact, p) if final is not None else None,
                stable=stable,
                dt_star=stability_threshold(formulation, initial, p, steps=stability_steps),
                **operation_counts(formulation, grid),
            ))

        beam_final, schrodinger_final = finals[Formulation.BEAM], finals[Formulation.SCHRODINGER]
        report.correspondence[N] = (
            fields.relative_deviation(duality.wavefunction_from_beam(beam_final, p), schrodinger_final)
            if beam_final is not None and schrodinger_final is not None else None
        )

    for formulation in Formulation:
        points = [(r.N, r.dt_star) for r in report.runs
                  if r.formulation == formulation and r.dt_star is not None]
        report.dt_star_exponent[str(formulation)] = (
            convergence_order(*zip(*points)) if len(points) >= 2 else None
        )
        report.rk4_order[str(formulation)] = order_study(formulation, L, p)["order"]
    return report
