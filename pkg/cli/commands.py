"""
Command-line front end.

    python main.py simulate --config run.yaml --out out/
    python main.py verify --seed 3 --tol 1e-16
    python main.py bench --grid-n 256
    python main.py packet --times 0,1,2

Exit codes: 0 success, 1 property failure, 2 configuration error,
3 numerical precondition failure.
"""

import argparse
import logging
import sys
from pathlib import Path

import apps.bench_app as bench_app
import apps.packet_app as packet_app
import apps.simulate_app as simulate_app
import apps.verify_app as verify_app
import cli.config as config
import cli.writers as writers
import datasource.scenarios as scenarios
import models.errors as errors
import models.fields as fields
import models.timesteppers as timesteppers

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PROPERTY_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_PRECONDITION = 3


def _time_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated times, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="YAML run configuration (defaults apply otherwise)")
    common.add_argument("--out", metavar="DIR", help="output directory (default: out)")
    common.add_argument("--seed", type=int, help="random scenario seed; verify runs only this seed")
    common.add_argument("--grid-n", type=int, dest="grid_n", help="number of grid points N (even, ≥ 4)")
    common.add_argument("--grid-l", type=float, dest="grid_l", help="box length L")
    common.add_argument("--a", type=float, help="physics constant a (> 0)")
    common.add_argument("--b", type=float, help="physics constant b (> 0)")
    common.add_argument("--times", type=_time_list, help="comma-separated sample times")
    common.add_argument("--tol", type=float, help="verify: override every property tolerance")
    common.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--show-config", action="store_true", help="print the effective configuration and exit")
    common.add_argument("--inject-sign-error", action="store_true", help=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="beamwave",
        description="Beam / Schrödinger duality: exact simulation, verification and RK4 benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="propagate a scenario and write diagnostics and snapshots")
    sub.add_parser("verify", parents=[common], help="run the duality and energetics property suite")
    sub.add_parser("bench", parents=[common], help="RK4 cost, accuracy and stability of both formulations")
    sub.add_parser("packet", parents=[common], help="Gaussian packet spreading against the analytic law")
    return parser


# ── Commands ──────────────────────────────────────────────────────────────────


def cmd_simulate(cfg: config.RunConfig, out: Path) -> int:
    grid = fields.make_grid(cfg.grid.L, cfg.grid.N)
    p = fields.PhysParams(cfg.physics.a, cfg.physics.b)
    s = cfg.scenario
    initial = scenarios.initial_data(
        s.kind, grid, p,
        seed=s.seed,
        kmax_fraction=s.kmax_fraction,
        mode_n=s.mode_n,
        mode_kind=s.mode_kind,
        zero_mean_v=s.zero_mean_v,
        packet=config.packet_spec(cfg.packet, L=grid.L) if s.kind == "packet" else None,
        t_max=max(abs(t) for t in cfg.simulate.times),
    )
    result = simulate_app.run_simulation(
        initial, cfg.simulate.times, p, tuple(cfg.simulate.fields), dt_fd=cfg.simulate.dt_fd,
    )
    writers.write_jsonl(out / "records.jsonl", result["rows"])
    for index, snap in enumerate(result["snapshots"]):
        writers.write_table(out / f"snapshot_{index:03d}.csv", snap["columns"])
    print(writers.format_table(result["rows"], ["t", "total_energy", "integral_rho", "duality_gap", "energy_residual"]))
    return EXIT_OK


def cmd_verify(cfg: config.RunConfig, out: Path, inject_sign_error: bool = False) -> int:
    v, pk = cfg.verify, cfg.packet
    result = verify_app.run_verification(
        seeds=v.seeds,
        n_list=v.n_list,
        L=v.L,
        p=fields.PhysParams(cfg.physics.a, cfg.physics.b),
        times=v.times,
        horizon=v.horizon,
        horizon_samples=v.horizon_samples,
        kmax_fraction=v.kmax_fraction,
        packet=config.packet_spec(pk),
        packet_grid=fields.make_grid(pk.L, pk.N),
        packet_times=pk.times,
        tol=v.tol,
        workers=v.workers,
        inject_sign_error=inject_sign_error,
    )
    writers.write_table(out / "verify_report.csv", result["rows"])
    print(writers.format_table(result["rows"], ["property", "check", "seed", "N", "measured", "tol", "passed"]))
    if result["failures"]:
        writers.write_json(out / "verify_failures.json", result["failures"])
        for row in result["failures"]:
            print(
                f"FAIL {row['property']} seed={row['seed']} N={row['N']} "
                f"{row['quantity']} = {row['measured']!r} > {row['tol']!r}",
                file=sys.stderr,
            )
        return EXIT_PROPERTY_FAILURE
    return EXIT_OK


def cmd_bench(cfg: config.RunConfig, out: Path) -> int:
    b, s = cfg.bench, cfg.scenario
    result = bench_app.run_benchmark(
        scenario=s.kind,
        grid_sizes=b.n_list,
        L=cfg.grid.L,
        p=fields.PhysParams(cfg.physics.a, cfg.physics.b),
        T=b.T,
        policy=timesteppers.DtPolicy(cfl=b.cfl, dt=b.dt),
        seed=s.seed,
        kmax_fraction=s.kmax_fraction,
        mode_n=s.mode_n,
        stability_steps=b.stability_steps,
    )
    writers.write_json(out / "bench_report.json", result)
    writers.write_table(out / "bench_summary.csv", result["rows"])
    print(writers.format_table(result["rows"], ["formulation", "N", "dt", "error", "wall_ms", "stable"]))
    return EXIT_OK


def cmd_packet(cfg: config.RunConfig, out: Path) -> int:
    pk = cfg.packet
    result = packet_app.run_packet(
        config.packet_spec(pk),
        fields.make_grid(pk.L, pk.N),
        fields.PhysParams(cfg.physics.a, cfg.physics.b),
        pk.times,
    )
    writers.write_table(out / "packet_widths.csv", result["rows"])
    print(writers.format_table(result["rows"], ["t", "measured_width", "analytic_width", "relative_deviation"]))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    try:
        cfg = config.load_config(args.config)
        cfg = config.apply_overrides(cfg, args.command, {
            "out":    args.out,
            "seed":   args.seed,
            "grid_n": args.grid_n,
            "grid_l": args.grid_l,
            "a":      args.a,
            "b":      args.b,
            "times":  args.times,
            "tol":    args.tol,
        })
        config.validate(cfg, args.command)
    except config.ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    if args.show_config:
        print(config.dump_config(cfg), end="")
        return EXIT_OK

    out = Path(cfg.output.dir)
    logger.info("%s: writing results to %s", args.command, out)
    try:
        if args.command == "simulate":
            return cmd_simulate(cfg, out)
        if args.command == "verify":
            return cmd_verify(cfg, out, inject_sign_error=args.inject_sign_error)
        if args.command == "bench":
            return cmd_bench(cfg, out)
        return cmd_packet(cfg, out)
    except errors.NumericalPreconditionError as exc:
        print(f"numerical precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
