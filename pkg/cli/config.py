"""
Run configuration: one YAML file with flat sections, loaded into frozen
dataclasses. Defaults live on the dataclasses; `--show-config` prints the
effective configuration.

    grid:     {L: 6.283185307179586, N: 256}
    physics:  {a: 1.0, b: 1.0}
    scenario: {kind: random, seed: 1, kmax_fraction: 0.25, mode_n: 1, mode_kind: cos, zero_mean_v: true}
    simulate: {times: [0.0, 1.0, 2.0], fields: [u, v, ...], dt_fd: null}
    verify:   {seeds: [1, ..., 20], n_list: [256, 1024], times: [0.1, 1.0, 5.0], tol: null, ...}
    bench:    {n_list: [128, 256, 512, 1024], T: 0.01, cfl: 0.5, dt: null, stability_steps: 1000}
    packet:   {x0: null, s0: 1.0, k0: 0.0, L: 80.0, N: 2048, times: [0.0, 0.5, 1.0, 2.0]}
    output:   {dir: out}
"""

import math
from dataclasses import asdict, dataclass, field, fields as dc_fields, replace
from pathlib import Path

import yaml

import apps.simulate_app as simulate_app
import datasource.scenarios as scenarios


class ConfigError(ValueError):
    """Invalid configuration value; `field` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass(frozen=True)
class GridConfig:
    L: float = 2 * math.pi
    N: int = 256


@dataclass(frozen=True)
class PhysicsConfig:
    a: float = 1.0
    b: float = 1.0


@dataclass(frozen=True)
class ScenarioConfig:
    kind:          str = "random"
    seed:          int = 1
    kmax_fraction: float = 0.25
    mode_n:        int = 1
    mode_kind:     str = "cos"
    zero_mean_v:   bool = True


@dataclass(frozen=True)
class SimulateConfig:
    times:  list[float] = field(default_factory=lambda: [0.0, 1.0, 2.0])
    fields: list[str] = field(default_factory=lambda: list(simulate_app.SNAPSHOT_FIELDS))
    dt_fd:  float | None = None


@dataclass(frozen=True)
class VerifyConfig:
    seeds:           list[int] = field(default_factory=lambda: list(range(1, 21)))
    n_list:          list[int] = field(default_factory=lambda: [256, 1024])
    L:               float = 2 * math.pi
    times:           list[float] = field(default_factory=lambda: [0.1, 1.0, 5.0])
    horizon:         float = 10.0
    horizon_samples: int = 11
    kmax_fraction:   float = 0.25
    tol:             float | None = None
    workers:         int = 1


@dataclass(frozen=True)
class BenchConfig:
    n_list:          list[int] = field(default_factory=lambda: [128, 256, 512, 1024])
    T:               float = 0.01
    cfl:             float = 0.5
    dt:              float | None = None
    stability_steps: int = 1000


@dataclass(frozen=True)
class PacketConfig:
    x0:    float | None = None  # box center when null
    s0:    float = 1.0
    k0:    float = 0.0
    L:     float = 80.0
    N:     int = 2048
    times: list[float] = field(default_factory=lambda: [0.0, 0.5, 1.0, 2.0])


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"


@dataclass(frozen=True)
class RunConfig:
    grid:     GridConfig = field(default_factory=GridConfig)
    physics:  PhysicsConfig = field(default_factory=PhysicsConfig)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    simulate: SimulateConfig = field(default_factory=SimulateConfig)
    verify:   VerifyConfig = field(default_factory=VerifyConfig)
    bench:    BenchConfig = field(default_factory=BenchConfig)
    packet:   PacketConfig = field(default_factory=PacketConfig)
    output:   OutputConfig = field(default_factory=OutputConfig)


def _section(cls, name: str, raw) -> object:
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(name, "section must be a mapping")
    known = {f.name for f in dc_fields(cls)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{name}.{unknown[0]}", f"unknown key (expected one of {sorted(known)})")
    return cls(**raw)


def load_config(path: str | Path | None) -> RunConfig:
    """Reads a YAML file into a RunConfig; a missing path gives the defaults."""
    if path is None:
        return RunConfig()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a mapping of sections")

    sections = [f.name for f in dc_fields(RunConfig)]
    unknown = sorted(set(raw) - set(sections))
    if unknown:
        raise ConfigError(unknown[0], f"unknown section (expected one of {sorted(sections)})")
    defaults = RunConfig()
    return RunConfig(**{
        name: _section(type(getattr(defaults, name)), name, raw.get(name))
        for name in sections
    })


def apply_overrides(cfg: RunConfig, command: str, overrides: dict) -> RunConfig:
    """
    Command-line flags win over file values. Grid and time flags go to the
    section the command reads (packet has its own box).
    """
    o = {k: v for k, v in overrides.items() if v is not None}
    if "a" in o or "b" in o:
        cfg = replace(cfg, physics=replace(cfg.physics, **{k: o[k] for k in ("a", "b") if k in o}))
    if "out" in o:
        cfg = replace(cfg, output=replace(cfg.output, dir=o["out"]))

    if command == "packet":
        packet = cfg.packet
        if "grid_n" in o:
            packet = replace(packet, N=o["grid_n"])
        if "grid_l" in o:
            packet = replace(packet, L=o["grid_l"])
        if "times" in o:
            packet = replace(packet, times=o["times"])
        return replace(cfg, packet=packet)

    grid = cfg.grid
    if "grid_n" in o:
        grid = replace(grid, N=o["grid_n"])
    if "grid_l" in o:
        grid = replace(grid, L=o["grid_l"])
    cfg = replace(cfg, grid=grid)
    if "seed" in o:
        cfg = replace(cfg, scenario=replace(cfg.scenario, seed=o["seed"]))

    if command == "simulate" and "times" in o:
        cfg = replace(cfg, simulate=replace(cfg.simulate, times=o["times"]))
    elif command == "verify":
        verify = cfg.verify
        if "times" in o:
            verify = replace(verify, times=o["times"])
        if "tol" in o:
            verify = replace(verify, tol=o["tol"])
        if "seed" in o:
            verify = replace(verify, seeds=[o["seed"]])
        if "grid_n" in o:
            verify = replace(verify, n_list=[o["grid_n"]])
        if "grid_l" in o:
            verify = replace(verify, L=o["grid_l"])
        cfg = replace(cfg, verify=verify)
    elif command == "bench" and "grid_n" in o:
        cfg = replace(cfg, bench=replace(cfg.bench, n_list=[o["grid_n"]]))
    return cfg


# ── Validation ────────────────────────────────────────────────────────────────


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def _positive(name: str, value) -> None:
    if not _is_number(value) or value <= 0:
        raise ConfigError(name, f"must be a positive number, got {value!r}")


def _grid_size(name: str, value) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or value < 4 or value % 2:
        raise ConfigError(name, f"must be an even integer ≥ 4, got {value!r}")


def _times(name: str, value, allow_empty: bool = False) -> None:
    if not isinstance(value, list) or (not value and not allow_empty):
        raise ConfigError(name, "must be a non-empty list of times")
    for t in value:
        if not _is_number(t):
            raise ConfigError(name, f"contains a non-numeric time {t!r}")


def _kmax_fraction(name: str, value) -> None:
    if not _is_number(value) or not 0 < value <= 0.5:
        raise ConfigError(name, f"must be in (0, 0.5], got {value!r}")


def validate(cfg: RunConfig, command: str) -> RunConfig:
    """Checks every value the command will use before any computation."""
    _positive("a", cfg.physics.a)
    _positive("b", cfg.physics.b)

    if command in ("simulate", "bench"):
        s = cfg.scenario
        if s.kind not in scenarios.SCENARIO_KINDS:
            raise ConfigError("kind", f"must be one of {scenarios.SCENARIO_KINDS}, got {s.kind!r}")
        if not isinstance(s.seed, int) or isinstance(s.seed, bool):
            raise ConfigError("seed", f"must be an integer, got {s.seed!r}")
        _kmax_fraction("kmax_fraction", s.kmax_fraction)
        if not isinstance(s.mode_n, int) or isinstance(s.mode_n, bool):
            raise ConfigError("mode_n", f"must be an integer, got {s.mode_n!r}")
        if s.mode_kind not in ("cos", "sin"):
            raise ConfigError("mode_kind", f"must be 'cos' or 'sin', got {s.mode_kind!r}")
        if not isinstance(s.zero_mean_v, bool):
            raise ConfigError("zero_mean_v", f"must be true or false, got {s.zero_mean_v!r}")

    if command == "simulate":
        _grid_size("N", cfg.grid.N)
        _positive("L", cfg.grid.L)
        _times("times", cfg.simulate.times)
        unknown = [f for f in cfg.simulate.fields if f not in simulate_app.SNAPSHOT_FIELDS]
        if unknown:
            raise ConfigError("fields", f"unknown snapshot fields {unknown}")
        if cfg.simulate.dt_fd is not None:
            _positive("dt_fd", cfg.simulate.dt_fd)
        if cfg.scenario.kind == "packet":
            _validate_packet_shape(cfg.packet)

    elif command == "verify":
        v = cfg.verify
        if not v.seeds or not all(isinstance(s, int) and not isinstance(s, bool) for s in v.seeds):
            raise ConfigError("seeds", "must be a non-empty list of integers")
        if not v.n_list:
            raise ConfigError("n_list", "must be a non-empty list of grid sizes")
        for N in v.n_list:
            _grid_size("n_list", N)
        _positive("L", v.L)
        _times("times", v.times)
        _positive("horizon", v.horizon)
        if not isinstance(v.horizon_samples, int) or v.horizon_samples < 2:
            raise ConfigError("horizon_samples", f"must be an integer ≥ 2, got {v.horizon_samples!r}")
        _kmax_fraction("kmax_fraction", v.kmax_fraction)
        if v.tol is not None and (not _is_number(v.tol) or v.tol < 0):
            raise ConfigError("tol", f"must be a non-negative number, got {v.tol!r}")
        if not isinstance(v.workers, int) or v.workers < 1:
            raise ConfigError("workers", f"must be a positive integer, got {v.workers!r}")
        _validate_packet(cfg.packet, times_field="packet.times")

    elif command == "bench":
        b = cfg.bench
        if cfg.scenario.kind == "packet":
            raise ConfigError("kind", "bench needs real beam data, not the packet scenario")
        if not isinstance(b.n_list, list) or not b.n_list:
            raise ConfigError("n_list", "must be a non-empty list of grid sizes")
        for N in b.n_list:
            _grid_size("n_list", N)
        _positive("L", cfg.grid.L)
        if not _is_number(b.T) or b.T < 0:
            raise ConfigError("T", f"must be a non-negative number, got {b.T!r}")
        _positive("cfl", b.cfl)
        if b.dt is not None:
            _positive("dt", b.dt)
        if not isinstance(b.stability_steps, int) or b.stability_steps < 1:
            raise ConfigError("stability_steps", f"must be a positive integer, got {b.stability_steps!r}")

    elif command == "packet":
        _validate_packet(cfg.packet, times_field="times")
    return cfg


def _validate_packet_shape(pk: PacketConfig) -> None:
    """Center, width and carrier; simulate places the packet on the grid section's box."""
    _positive("s0", pk.s0)
    if pk.x0 is not None and not _is_number(pk.x0):
        raise ConfigError("x0", f"must be a number or null, got {pk.x0!r}")
    if not _is_number(pk.k0):
        raise ConfigError("k0", f"must be a number, got {pk.k0!r}")


def _validate_packet(pk: PacketConfig, times_field: str) -> None:
    _grid_size("N", pk.N)
    _positive("L", pk.L)
    _validate_packet_shape(pk)
    _times(times_field, pk.times)


def packet_spec(pk: PacketConfig, L: float | None = None) -> scenarios.PacketSpec:
    """Packet centered on the box of length L (default: the packet box) unless x0 is set."""
    center = (pk.L if L is None else L) / 2
    return scenarios.PacketSpec(x0=center if pk.x0 is None else pk.x0, s0=pk.s0, k0=pk.k0)


def dump_config(cfg: RunConfig) -> str:
    return yaml.safe_dump(asdict(cfg), sort_keys=False)
