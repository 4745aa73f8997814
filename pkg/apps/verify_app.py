"""
Verification application layer: the duality and energetics property suite.

Every property is a check function returning one measured deviation (a max
over its sample times); a property passes when measured ≤ tolerance. Random
cases run once per (seed, N); packet cases run once on their own grid.

+----------------------------+------------+-----------------------------------------------+
| Property                   | Tolerance  | Measured                                      |
+----------------------------+------------+-----------------------------------------------+
| bijection_round_trip       | 1e-15      | ψ → (γ, v) → ψ and (γ, v) → ψ → (γ, v)        |
| evolution_commutation      | 1e-11      | map ∘ beam flow vs Schrödinger flow ∘ map      |
| schrodinger_beam_ivp       | 1e-11      | beam IVP with u̇⁰ = ±(ib/a)Ψ⁰'' vs S± flow     |
| superposition_complex      | 1e-11      | Ψ+ + Ψ− vs beam flow, complex data            |
| conjugate_pair             | 1e-12      | Ψ− vs conj(Ψ+), real data                     |
| real_reconstruction        | 1e-11      | (2·Re Ψ+, −(2b/a)·Im Ψ+'') vs (u, v)          |
| psi_from_psi_plus          | 1e-11      | ψ vs 2b·Ψ+''                                  |
| energy_identity            | 1e-12      | max|ρ − 2λE| / max ρ                          |
| flux_current_identity      | 1e-11      | max|q − 2λQ| / max|q|                         |
| energy_conservation        | 1e-12      | total energy drift over [0, horizon]          |
| probability_conservation   | 1e-12      | ∫ρ drift with λ fixed at t = 0                |
| normalization_invariance   | 1e-12      | λ(t) vs λ(0)                                  |
| residual_proportionality   | 1e-12      | residual_ρ vs 2λ·residual_E                   |
| balance_richardson         | 0.1        | |r(h)/r(h/2) / 4 − 1|, both balances          |
| nonnegativity              | 0          | max(−min E, −min ρ, 0)                        |
| packet_energy_identity     | 1e-12      | energy identity on the spreading packet       |
| packet_norm                | 1e-10      | |∫ρ − 1| on the spreading packet              |
| packet_width               | 1e-3       | measured vs analytic spreading law            |
+----------------------------+------------+-----------------------------------------------+
"""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

import datasource.scenarios as scenarios
import models.duality as duality
import models.energetics as energetics
import models.fields as fields
import models.propagators as propagators

logger = logging.getLogger(__name__)

Mapping = Callable[[duality.StrainState, fields.PhysParams], fields.ComplexField]

_FD_FRACTION = 0.01        # balance-residual step as a fraction of 1/ω of the data band
_PROPORTIONALITY_FRACTION = 1.0  # step of the ρ/E proportionality check, in units of 1/ω of the data band
_RICHARDSON_FACTOR = 4.0   # centered differences are second order
_COMPLEX_SEED_OFFSET = 7919


@dataclass(frozen=True)
class VerifyCase:
    """One (seed, grid) sample of random data, or the packet sample when seed is None."""
    seed:            int | None
    grid:            fields.Grid
    p:               fields.PhysParams
    times:           tuple[float, ...]
    horizon:         tuple[float, ...]  # conservation sample times over [0, T]
    kmax_fraction:   float
    to_wavefunction: Mapping = duality.wavefunction_from_state
    packet:          scenarios.PacketSpec | None = None


@dataclass(frozen=True)
class Property:
    name:     str
    quantity: str
    tol:      float
    check:    Callable[[VerifyCase], float]
    packet:   bool = False   # runs on the packet case instead of random cases


def sign_error_wavefunction(s: duality.StrainState, p: fields.PhysParams) -> fields.ComplexField:
    """ψ = b·γ + i·a·v: the mapping with its sign flipped, for mutation testing."""
    return fields.complex_from_parts(s.grid, p.b * s.gamma.values, p.a * s.v.values)


# ── Shared case data ──────────────────────────────────────────────────────────


def _real_data(case: VerifyCase) -> propagators.BeamState:
    return scenarios.random_band_limited(case.seed, case.kmax_fraction, case.grid, zero_mean_v=True)


def _complex_data(case: VerifyCase) -> propagators.BeamState:
    first = _real_data(case)
    second = scenarios.random_band_limited(case.seed + _COMPLEX_SEED_OFFSET, case.kmax_fraction, case.grid)
    grid = case.grid
    return propagators.BeamState(
        u=fields.complex_from_parts(grid, first.u.values, second.u.values),
        v=fields.complex_from_parts(grid, first.v.values, second.v.values),
    )


def _mapped(case: VerifyCase, s: propagators.BeamState) -> fields.ComplexField:
    return case.to_wavefunction(duality.strain_velocity(s), case.p)


def _band_frequency(case: VerifyCase) -> float:
    cutoff = max(1, int(case.kmax_fraction * case.grid.N // 2))
    return float(propagators.dispersion_beam(2 * np.pi * cutoff / case.grid.L, case.p))


# ── Duality checks ────────────────────────────────────────────────────────────


def check_bijection_round_trip(case: VerifyCase) -> float:
    p = case.p
    psi = scenarios.random_wavefunction(case.seed, case.kmax_fraction, case.grid)
    back = case.to_wavefunction(duality.state_from_wavefunction(psi, p), p)
    strain = duality.strain_velocity(_real_data(case))
    again = duality.state_from_wavefunction(case.to_wavefunction(strain, p), p)
    return max(
        fields.relative_deviation(back, psi),
        fields.relative_deviation(again.gamma, strain.gamma),
        fields.relative_deviation(again.v, strain.v),
    )


def check_evolution_commutation(case: VerifyCase) -> float:
    s0 = _real_data(case)
    psi0 = _mapped(case, s0)
    return max(
        fields.relative_deviation(
            _mapped(case, propagators.propagate_beam(s0, t, case.p)),
            propagators.propagate_schrodinger(psi0, t, case.p),
        )
        for t in case.times
    )


def check_schrodinger_beam_ivp(case: VerifyCase) -> float:
    psi0 = scenarios.random_wavefunction(case.seed, case.kmax_fraction, case.grid)
    worst = 0.0
    for branch in propagators.Branch:
        s0 = duality.beam_ic_from_wavefunction(psi0, branch, case.p)
        for t in case.times:
            worst = max(worst, fields.relative_deviation(
                propagators.propagate_beam(s0, t, case.p).u,
                propagators.propagate_schrodinger(psi0, t, case.p, branch),
            ))
    return worst


def check_superposition_complex(case: VerifyCase) -> float:
    s0 = _complex_data(case)
    pair = duality.split_initial_data(s0, case.p)
    mean = np.mean(s0.u.values)
    return max(
        fields.relative_deviation(
            duality.superpose(duality.evolve_pair(pair, t, case.p)),
            propagators.propagate_beam(s0, t, case.p).u.values - mean,
        )
        for t in case.times
    )


def check_conjugate_pair(case: VerifyCase) -> float:
    pair = duality.split_initial_data(_real_data(case), case.p)
    return max(duality.conjugate_gap(duality.evolve_pair(pair, t, case.p)) for t in (0.0, *case.times))


def check_real_reconstruction(case: VerifyCase) -> float:
    s0 = _real_data(case)
    pair = duality.split_initial_data(s0, case.p)
    mean = np.mean(s0.u.values)
    worst = 0.0
    for t in case.times:
        exact = propagators.propagate_beam(s0, t, case.p)
        rebuilt = duality.real_state_from_psi_plus(duality.evolve_pair(pair, t, case.p).psi_plus, case.p)
        worst = max(
            worst,
            fields.relative_deviation(rebuilt.u, exact.u.values - mean),
            fields.relative_deviation(rebuilt.v, exact.v),
        )
    return worst


def check_psi_from_psi_plus(case: VerifyCase) -> float:
    s0 = _real_data(case)
    pair = duality.split_initial_data(s0, case.p)
    worst = 0.0
    for t in case.times:
        psi = _mapped(case, propagators.propagate_beam(s0, t, case.p))
        psi_plus = duality.evolve_pair(pair, t, case.p).psi_plus
        expected = 2 * case.p.b * fields.spectral_derivative(psi_plus, 2).values
        worst = max(worst, fields.relative_deviation(psi, expected))
    return worst


# ── Energetics checks ─────────────────────────────────────────────────────────


def _energy_identity_gap(strain: duality.StrainState, psi: fields.ComplexField, lam: float, p) -> float:
    rho = energetics.probability_density(psi, lam)
    return energetics.duality_gap(strain, psi, lam, p) / fields.max_norm(rho)


def check_energy_identity(case: VerifyCase) -> float:
    s0 = _real_data(case)
    psi0 = _mapped(case, s0)
    lam = energetics.normalization_constant(psi0)
    return max(
        _energy_identity_gap(
            duality.strain_velocity(propagators.propagate_beam(s0, t, case.p)),
            propagators.propagate_schrodinger(psi0, t, case.p),
            lam,
            case.p,
        )
        for t in (0.0, *case.times)
    )


def check_flux_current_identity(case: VerifyCase) -> float:
    s0 = _real_data(case)
    psi0 = _mapped(case, s0)
    lam = energetics.normalization_constant(psi0)
    worst = 0.0
    for t in (0.0, *case.times):
        strain = duality.strain_velocity(propagators.propagate_beam(s0, t, case.p))
        psi = propagators.propagate_schrodinger(psi0, t, case.p)
        scale = max(
            fields.max_norm(energetics.probability_current(psi, lam, case.p)),
            2 * lam * fields.max_norm(energetics.energy_flux(strain, case.p)),
        )
        worst = max(worst, energetics.flux_current_gap(strain, psi, lam, case.p) / scale)
    return worst


def check_energy_conservation(case: VerifyCase) -> float:
    s0 = _real_data(case)
    e0 = energetics.total_energy(duality.strain_velocity(s0), case.p)
    return max(
        abs(energetics.total_energy(duality.strain_velocity(propagators.propagate_beam(s0, t, case.p)), case.p) - e0) / e0
        for t in case.horizon
    )


def check_probability_conservation(case: VerifyCase) -> float:
    psi0 = _mapped(case, _real_data(case))
    lam = energetics.normalization_constant(psi0)
    return max(
        abs(fields.integrate(energetics.probability_density(propagators.propagate_schrodinger(psi0, t, case.p), lam)) - 1.0)
        for t in case.horizon
    )


def check_normalization_invariance(case: VerifyCase) -> float:
    psi0 = _mapped(case, _real_data(case))
    lam0 = energetics.normalization_constant(psi0)
    return max(
        abs(energetics.normalization_constant(propagators.propagate_schrodinger(psi0, t, case.p)) - lam0) / lam0
        for t in case.horizon
    )


def check_residual_proportionality(case: VerifyCase) -> float:
    s0 = _real_data(case)
    psi0 = _mapped(case, s0)
    lam = energetics.normalization_constant(psi0)
    beam = energetics.beam_trajectory(s0, case.p)
    wave = energetics.schrodinger_trajectory(psi0, case.p)
    dt_fd = _PROPORTIONALITY_FRACTION / _band_frequency(case)
    worst = 0.0
    for t in case.times:
        r_energy = energetics.balance_residual(beam, t, dt_fd, energetics.Balance.ENERGY, case.p)
        r_prob = energetics.balance_residual(wave, t, dt_fd, energetics.Balance.PROBABILITY, case.p, lam=lam)
        flux_x = fields.spectral_derivative(energetics.energy_flux(beam(t), case.p), 1).values
        energy_rate = r_energy.values - flux_x
        scale = 2 * lam * max(fields.max_norm(flux_x), fields.max_norm(energy_rate))
        worst = max(worst, fields.max_norm(r_prob.values - 2 * lam * r_energy.values) / scale)
    return worst


def check_balance_richardson(case: VerifyCase) -> float:
    s0 = _real_data(case)
    psi0 = _mapped(case, s0)
    lam = energetics.normalization_constant(psi0)
    beam = energetics.beam_trajectory(s0, case.p)
    wave = energetics.schrodinger_trajectory(psi0, case.p)
    h = _FD_FRACTION / _band_frequency(case)
    worst = 0.0
    for t in case.times:
        for trajectory, which, kwargs in (
            (beam, energetics.Balance.ENERGY, {}),
            (wave, energetics.Balance.PROBABILITY, {"lam": lam}),
        ):
            coarse = fields.max_norm(energetics.balance_residual(trajectory, t, h, which, case.p, **kwargs))
            fine = fields.max_norm(energetics.balance_residual(trajectory, t, h / 2, which, case.p, **kwargs))
            worst = max(worst, abs(coarse / fine / _RICHARDSON_FACTOR - 1.0))
    return worst


def check_nonnegativity(case: VerifyCase) -> float:
    s0 = _real_data(case)
    psi0 = _mapped(case, s0)
    lam = energetics.normalization_constant(psi0)
    worst = 0.0
    for t in (0.0, *case.times):
        E = energetics.energy_density(duality.strain_velocity(propagators.propagate_beam(s0, t, case.p)), case.p)
        rho = energetics.probability_density(propagators.propagate_schrodinger(psi0, t, case.p), lam)
        worst = max(worst, -float(np.min(E.values)), -float(np.min(rho.values)))
    return worst


# ── Packet checks ─────────────────────────────────────────────────────────────


def _packet(case: VerifyCase) -> fields.ComplexField:
    return scenarios.gaussian_packet(case.packet, case.grid, t_max=max(case.times), p=case.p)


def check_packet_energy_identity(case: VerifyCase) -> float:
    psi0 = _packet(case)
    lam = energetics.normalization_constant(psi0)
    worst = 0.0
    for t in (0.0, *case.times):
        psi = propagators.propagate_schrodinger(psi0, t, case.p)
        strain = duality.state_from_wavefunction(psi, case.p)
        worst = max(worst, _energy_identity_gap(strain, psi, lam, case.p))
    return worst


def check_packet_norm(case: VerifyCase) -> float:
    psi0 = _packet(case)
    lam = energetics.normalization_constant(psi0)
    return max(
        abs(fields.integrate(energetics.probability_density(propagators.propagate_schrodinger(psi0, t, case.p), lam)) - 1.0)
        for t in (0.0, *case.times)
    )


def check_packet_width(case: VerifyCase) -> float:
    psi0 = _packet(case)
    lam = energetics.normalization_constant(psi0)
    worst = 0.0
    for t in case.times:
        rho = energetics.probability_density(propagators.propagate_schrodinger(psi0, t, case.p), lam)
        expected = scenarios.analytic_width(case.packet.s0, t, case.p)
        worst = max(worst, abs(scenarios.packet_width(rho) - expected) / expected)
    return worst


PROPERTIES: tuple[Property, ...] = (
    Property("bijection_round_trip",     "relative max deviation",       1e-15, check_bijection_round_trip),
    Property("evolution_commutation",    "relative max deviation",       1e-11, check_evolution_commutation),
    Property("schrodinger_beam_ivp",     "relative max deviation",       1e-11, check_schrodinger_beam_ivp),
    Property("superposition_complex",    "relative max deviation",       1e-11, check_superposition_complex),
    Property("conjugate_pair",           "relative max deviation",       1e-12, check_conjugate_pair),
    Property("real_reconstruction",      "relative max deviation",       1e-11, check_real_reconstruction),
    Property("psi_from_psi_plus",        "relative max deviation",       1e-11, check_psi_from_psi_plus),
    Property("energy_identity",          "max|rho - 2 lam E| / max rho", 1e-12, check_energy_identity),
    Property("flux_current_identity",    "max|q - 2 lam Q| / max|q|",    1e-11, check_flux_current_identity),
    Property("energy_conservation",      "relative drift",               1e-12, check_energy_conservation),
    Property("probability_conservation", "absolute drift of int rho",    1e-12, check_probability_conservation),
    Property("normalization_invariance", "relative drift of lambda",     1e-12, check_normalization_invariance),
    Property("residual_proportionality", "relative max deviation",       1e-12, check_residual_proportionality),
    Property("balance_richardson",       "|ratio / 4 - 1|",              0.1,   check_balance_richardson),
    Property("nonnegativity",            "max negative part",            0.0,   check_nonnegativity),
    Property("packet_energy_identity",   "max|rho - 2 lam E| / max rho", 1e-12, check_packet_energy_identity, packet=True),
    Property("packet_norm",              "absolute drift of int rho",    1e-10, check_packet_norm, packet=True),
    Property("packet_width",             "relative width deviation",     1e-3,  check_packet_width, packet=True),
)


def _run_case(case: VerifyCase, tol: float | None) -> list[dict]:
    rows = []
    for prop in PROPERTIES:
        if prop.packet != (case.seed is None):
            continue
        measured = float(prop.check(case))
        limit = prop.tol if tol is None else tol
        rows.append({
            "property": prop.name,
            "check":    prop.check.__name__,
            "seed":     case.seed,
            "N":        case.grid.N,
            "quantity": prop.quantity,
            "measured": measured,
            "tol":      limit,
            "passed":   bool(measured <= limit),
        })
    return rows


def run_verification(
    seeds: list[int],
    n_list: list[int],
    L: float,
    p: fields.PhysParams,
    times: list[float],
    horizon: float = 10.0,
    horizon_samples: int = 11,
    kmax_fraction: float = 0.25,
    packet: scenarios.PacketSpec | None = None,
    packet_grid: fields.Grid | None = None,
    packet_times: list[float] | None = None,
    tol: float | None = None,
    workers: int = 1,
    inject_sign_error: bool = False,
) -> dict:
    """
    Runs the property suite over seeded random data and the packet scenario.

    Args:
        seeds, n_list: one random case per (seed, N) on a box of length L
        times: sample times of the evolution properties
        horizon, horizon_samples: conservation checks sample [0, horizon]
        packet, packet_grid, packet_times: the packet case (defaults: s0 = 1
            centered on L = 80, N = 2048, t ∈ {0.5, 1, 2})
        tol: overrides every property tolerance when given
        workers: thread count; rows are sorted regardless
        inject_sign_error: replace ψ = bγ − iav by bγ + iav (mutation test)

    Returns:
        dict with keys:
            rows: one per (property, seed, N), sorted
            failures: the failing rows
            passed: True iff every row passed
    """
    if not seeds:
        raise ValueError("seeds must not be empty.")
    if not n_list:
        raise ValueError("n_list must not be empty.")

    mapping = sign_error_wavefunction if inject_sign_error else duality.wavefunction_from_state
    if inject_sign_error:
        logger.warning("verifying with the sign-flipped wave-function mapping")
    horizon_times = tuple(float(t) for t in np.linspace(0.0, horizon, horizon_samples))

    cases = [
        VerifyCase(seed, fields.make_grid(L, N), p, tuple(times), horizon_times, kmax_fraction, mapping)
        for seed in seeds for N in n_list
    ]
    packet_grid = packet_grid if packet_grid is not None else fields.make_grid(80.0, 2048)
    cases.append(VerifyCase(
        seed=None,
        grid=packet_grid,
        p=p,
        times=tuple(packet_times if packet_times is not None else (0.5, 1.0, 2.0)),
        horizon=horizon_times,
        kmax_fraction=kmax_fraction,
        to_wavefunction=mapping,
        packet=packet if packet is not None else scenarios.PacketSpec(x0=packet_grid.L / 2, s0=1.0, k0=0.0),
    ))

    logger.info("verifying %d properties over %d cases with %d worker(s)", len(PROPERTIES), len(cases), workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(lambda case: _run_case(case, tol), cases))
    else:
        batches = [_run_case(case, tol) for case in cases]

    rows = sorted(
        (row for batch in batches for row in batch),
        key=lambda row: (row["property"], -1 if row["seed"] is None else row["seed"], row["N"]),
    )
    failures = [row for row in rows if not row["passed"]]
    for row in failures:
        logger.info("FAILED %s seed=%s N=%d: %.3e > %.3e", row["property"], row["seed"], row["N"], row["measured"], row["tol"])
    return {"rows": rows, "failures": failures, "passed": not failures}
