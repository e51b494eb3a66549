"""Command-line front end: rate points, sweeps, optimization, verification.

Configuration comes from built-in defaults, an optional JSON config file
and command-line flags, in that precedence order (flags win). Records go
to stdout or --out as CSV (fixed, versioned column set with metadata in
comment lines) or JSON. All output is byte-deterministic for a fixed
seed: no timestamps, full-precision shortest-round-trip numbers.

Exit codes: 0 success, 1 invalid configuration, 2 every requested result
infeasible under --strict, 3 verification failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass

from . import __version__
from .channel import IntensityConfig, SystemParams
from .models import MODELS, RateResult, run_model
from .montecarlo import (
    BOUND_IDS,
    simulate_forging,
    simulate_honest,
    simulate_repudiation,
    validate_bound,
)
from .optimize import optimize_models
from .security import SecurityBudget

SCHEMA_VERSION = "1"

CSV_COLUMNS = ("model", "distance_km", "N", "a_s", "a_d1", "a_d2", "p_as",
               "p_ad1", "p_z", "L", "n_bits", "R", "p_E", "s_a", "s_v",
               "P_rob", "P_rep", "P_forge", "feasible")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY_FAILED = 3


@dataclass
class RunConfig:
    """Effective configuration of one CLI invocation."""

    alpha: float = 0.2
    eta_d: float = 0.5
    p_dc: float = 1e-7
    e_d: float = 0.03
    r_test: float = 0.055
    epsilon: float = 1e-5
    eps_pe: float = 1e-12
    eps_sf: float = 1e-12
    g_prob: float = 1e-12
    distance_km: float = 100.0
    pulses: float = 1e12
    a_s: float = 0.4
    a_d1: float = 0.05
    a_d2: float = 5e-4
    p_as: float = 1.0 / 3.0
    p_ad1: float = 1.0 / 3.0
    p_z: float = 0.5
    model: str = "smb1"
    optimize: bool = False
    starts: int = 1
    seed: int = 0
    format: str = "csv"

    def system_params(self, distance_km: float | None = None,
                      pulses: float | None = None) -> SystemParams:
        return SystemParams(
            alpha=self.alpha, eta_d=self.eta_d, p_dc=self.p_dc, e_d=self.e_d,
            distance_km=self.distance_km if distance_km is None else distance_km,
            n_pulses=self.pulses if pulses is None else pulses,
            r_test=self.r_test, epsilon=self.epsilon)

    def intensity_config(self) -> IntensityConfig:
        return IntensityConfig.symmetric(a_s=self.a_s, a_d1=self.a_d1,
                                         p_as=self.p_as, p_ad1=self.p_ad1,
                                         p_z=self.p_z, a_d2=self.a_d2)

    def budget(self) -> SecurityBudget:
        return SecurityBudget(epsilon=self.epsilon, eps_pe=self.eps_pe,
                              eps_sf=self.eps_sf, g_prob=self.g_prob)

    def models(self) -> tuple[str, ...]:
        return MODELS if self.model == "all" else (self.model,)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def validate(self) -> None:
        if self.model not in MODELS + ("all",):
            raise ValueError(f"model must be one of {MODELS + ('all',)}, got {self.model!r}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be 'csv' or 'json', got {self.format!r}")
        if self.starts < 1:
            raise ValueError(f"starts must be >= 1, got {self.starts}")
        # constructing the dataclasses runs their range checks
        self.system_params()
        self.intensity_config()
        self.budget()


def _fmt(value) -> str:
    """Shortest round-trip text for numbers; lowercase booleans."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value == int(value) and abs(value) < 1e16:
            return str(int(value))
        return repr(value)
    return str(value)


def record_dict(result: RateResult, fallback_cfg: IntensityConfig) -> dict:
    cfg = result.config if result.config is not None else fallback_cfg
    return {
        "model": result.model,
        "distance_km": result.distance_km,
        "N": result.n_pulses,
        "a_s": cfg.a_s, "a_d1": cfg.a_d1, "a_d2": cfg.a_d2,
        "p_as": cfg.p_as, "p_ad1": cfg.p_ad1, "p_z": cfg.p_z,
        "L": result.length, "n_bits": result.n_bits, "R": result.rate,
        "p_E": result.p_e, "s_a": result.s_a, "s_v": result.s_v,
        "P_rob": result.p_robust, "P_rep": result.p_repudiation,
        "P_forge": result.p_forge, "feasible": result.feasible,
        "N_s": result.block_size, "n_pool": result.n_pool,
        "reason": result.reason,
    }


def render_csv(records: list[dict], seed: int, optimized: bool) -> str:
    lines = [f"# mdiqds csv schema v{SCHEMA_VERSION}",
             f"# engine={__version__} seed={seed} optimized={_fmt(optimized)}",
             ",".join(CSV_COLUMNS)]
    for rec in records:
        lines.append(",".join(_fmt(rec[col]) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def render_json(records: list[dict], seed: int, optimized: bool) -> str:
    doc = {"schema": f"mdiqds-records-v{SCHEMA_VERSION}",
           "engine_version": __version__, "seed": seed,
           "optimized": optimized, "records": records}
    return json.dumps(doc, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


class _Parser(argparse.ArgumentParser):
    """argparse variant that raises instead of exiting with status 2."""

    def error(self, message: str):  # noqa: D102 - argparse hook
        raise ValueError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--dump-config", metavar="PATH",
                   help="write the effective configuration as JSON and continue")
    p.add_argument("--model", choices=MODELS + ("all",))
    p.add_argument("--distance-km", type=float, dest="distance_km")
    p.add_argument("--pulses", type=float)
    p.add_argument("--optimize", action="store_true", default=None)
    p.add_argument("--starts", type=int, help="optimizer multi-start count")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--strict", action="store_true",
                   help="exit 2 when every requested result is infeasible")
    for flag, dest in (("--alpha", "alpha"), ("--eta-d", "eta_d"),
                       ("--p-dc", "p_dc"), ("--e-d", "e_d"),
                       ("--r-test", "r_test"), ("--epsilon", "epsilon"),
                       ("--eps-pe", "eps_pe"), ("--eps-sf", "eps_sf"),
                       ("--g-prob", "g_prob"), ("--a-s", "a_s"),
                       ("--a-d1", "a_d1"), ("--a-d2", "a_d2"),
                       ("--p-as", "p_as"), ("--p-ad1", "p_ad1"),
                       ("--p-z", "p_z")):
        p.add_argument(flag, type=float, dest=dest)


def build_parser() -> _Parser:
    parser = _Parser(prog="mdiqds",
                     description="Finite-size signature rates for MDI quantum "
                                 "digital signatures")
    sub = parser.add_subparsers(dest="command", required=True)

    p_rate = sub.add_parser("rate", help="signature rate at one configuration")
    _add_common(p_rate)

    p_sweep = sub.add_parser("sweep", help="rate table over one axis")
    _add_common(p_sweep)
    p_sweep.add_argument("--axis", choices=("distance", "pulses"), default="distance")
    p_sweep.add_argument("--start", type=float)
    p_sweep.add_argument("--stop", type=float)
    p_sweep.add_argument("--step", type=float)
    p_sweep.add_argument("--values", help="comma-separated axis values (overrides start/stop/step)")

    p_opt = sub.add_parser("optimize", help="optimize parameters at one point")
    _add_common(p_opt)

    p_verify = sub.add_parser("verify", help="Monte Carlo checks of every tail bound")
    p_verify.add_argument("--eps", type=float, default=0.01)
    p_verify.add_argument("--trials", type=int, default=100_000)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--bounds", default="all",
                          help=f"comma list from {', '.join(BOUND_IDS)} or 'all'")
    p_verify.add_argument("--out", help="output path (default stdout)")
    p_verify.add_argument("--self-test-invert", action="store_true",
                          help="invert every comparison; the report must then fail")

    p_sim = sub.add_parser("simulate-protocol",
                           help="messaging-stage Monte Carlo at explicit thresholds")
    p_sim.add_argument("--length", type=int, default=2000)
    p_sim.add_argument("--error-rate", type=float, default=0.02, dest="error_rate")
    p_sim.add_argument("--s-a", type=float, default=0.05, dest="s_a")
    p_sim.add_argument("--s-v", type=float, default=0.15, dest="s_v")
    p_sim.add_argument("--p-e", type=float, default=0.3, dest="p_e")
    p_sim.add_argument("--trials", type=int, default=100_000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", help="output path (default stdout)")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            data = json.load(fh)
    cfg = RunConfig.from_dict(data)
    for field_ in dataclasses.fields(RunConfig):
        value = getattr(args, field_.name, None)
        if value is not None:
            setattr(cfg, field_.name, value)
    cfg.validate()
    return cfg


def _config_vector(cfg: RunConfig) -> tuple[float, ...]:
    return (cfg.a_s, cfg.a_d1, cfg.p_as, cfg.p_ad1, cfg.p_z)


def _point_records(cfg: RunConfig, distance_km: float, pulses: float,
                   warm: tuple[float, ...] | None) -> tuple[list[dict], tuple[float, ...] | None]:
    """Records for all requested models at one axis point."""
    params = cfg.system_params(distance_km=distance_km, pulses=pulses)
    budget = cfg.budget()
    fallback = cfg.intensity_config()
    records = []
    if cfg.optimize:
        results = optimize_models(params, cfg.models(), budget=budget,
                                  seed=cfg.seed, starts=cfg.starts,
                                  a_d2=cfg.a_d2,
                                  initial=warm or _config_vector(cfg))
        for model in cfg.models():
            records.append(record_dict(results[model], fallback))
        feasible = [r for r in results.values() if r.feasible and r.config is not None]
        if feasible:
            best = max(feasible, key=lambda r: r.rate).config
            warm = (best.a_s, best.a_d1, best.p_as, best.p_ad1, best.p_z)
    else:
        for model in cfg.models():
            records.append(record_dict(run_model(model, params, fallback, budget),
                                       fallback))
    return records, warm


def cmd_rate(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    if args.dump_config:
        _emit(json.dumps(cfg.to_dict(), indent=2) + "\n", args.dump_config)
    records, _ = _point_records(cfg, cfg.distance_km, cfg.pulses, None)
    render = render_csv if cfg.format == "csv" else render_json
    _emit(render(records, cfg.seed, cfg.optimize), args.out)
    if args.strict and not any(r["feasible"] for r in records):
        return EXIT_INFEASIBLE
    return EXIT_OK


def _axis_values(args: argparse.Namespace) -> list[float]:
    if args.values:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    else:
        if args.start is None or args.stop is None or args.step is None:
            raise ValueError("sweep needs either --values or --start/--stop/--step")
        if args.step <= 0:
            raise ValueError(f"step must be positive, got {args.step}")
        values = []
        v = args.start
        while v <= args.stop + 1e-9 * max(1.0, abs(args.stop)):
            values.append(v)
            v += args.step
    if not values:
        raise ValueError("sweep range is empty")
    if sorted(values) != values:
        raise ValueError("axis values must be ascending")
    return values


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    if args.dump_config:
        _emit(json.dumps(cfg.to_dict(), indent=2) + "\n", args.dump_config)
    values = _axis_values(args)
    records: list[dict] = []
    warm: tuple[float, ...] | None = None
    for value in values:
        distance = value if args.axis == "distance" else cfg.distance_km
        pulses = value if args.axis == "pulses" else cfg.pulses
        point, warm = _point_records(cfg, distance, pulses, warm)
        records.extend(point)
    render = render_csv if cfg.format == "csv" else render_json
    _emit(render(records, cfg.seed, cfg.optimize), args.out)
    if args.strict and not any(r["feasible"] for r in records):
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    cfg.optimize = True
    if args.dump_config:
        _emit(json.dumps(cfg.to_dict(), indent=2) + "\n", args.dump_config)
    records, _ = _point_records(cfg, cfg.distance_km, cfg.pulses, None)
    render = render_csv if cfg.format == "csv" else render_json
    _emit(render(records, cfg.seed, True), args.out)
    if args.strict and not any(r["feasible"] for r in records):
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.bounds == "all":
        bound_ids = list(BOUND_IDS)
    else:
        bound_ids = [b.strip() for b in args.bounds.split(",") if b.strip()]
        for b in bound_ids:
            if b not in BOUND_IDS:
                raise ValueError(f"unknown bound id {b!r}")
    checks = []
    for bound in bound_ids:
        stats = validate_bound(bound, eps=args.eps, trials=args.trials, seed=args.seed)
        checks.append((f"bound:{bound}", stats.frequency, stats.bound))
    rep = simulate_repudiation(2000, s_a=0.05, s_v=0.15, trials=args.trials,
                               seed=args.seed)
    checks.append(("simulator:repudiation", rep.frequency, rep.bound))
    forge = simulate_forging(200, p_e=0.3, s_v=0.25, trials=args.trials,
                             seed=args.seed)
    checks.append(("simulator:forging", forge.frequency, forge.bound))

    lines = [f"# mdiqds verify v{SCHEMA_VERSION} engine={__version__} "
             f"seed={args.seed} trials={args.trials} eps={_fmt(args.eps)}"]
    failures = 0
    for name, freq, target in checks:
        ok = freq <= target
        if args.self_test_invert:
            ok = not ok
        failures += 0 if ok else 1
        lines.append(f"{'PASS' if ok else 'FAIL'} {name} empirical={_fmt(freq)} "
                     f"target={_fmt(target)}")
    lines.append(f"{'FAIL' if failures else 'PASS'} overall failures={failures}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_VERIFY_FAILED if failures else EXIT_OK


def cmd_simulate_protocol(args: argparse.Namespace) -> int:
    honest = simulate_honest(args.length, args.error_rate, args.s_a,
                             args.trials, args.seed)
    rep = simulate_repudiation(args.length, args.s_a, args.s_v,
                               args.trials, args.seed)
    forge = simulate_forging(args.length, args.p_e, args.s_v,
                             args.trials, args.seed)
    lines = [f"# mdiqds simulate-protocol v{SCHEMA_VERSION} engine={__version__} "
             f"seed={args.seed} trials={args.trials} L={args.length}"]
    for stats in (honest, rep, forge):
        lines.append(f"{stats.label}: frequency={_fmt(stats.frequency)} "
                     f"wilson99={_fmt(stats.wilson99_upper)} bound={_fmt(stats.bound)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "rate": cmd_rate,
            "sweep": cmd_sweep,
            "optimize": cmd_optimize,
            "verify": cmd_verify,
            "simulate-protocol": cmd_simulate_protocol,
        }[args.command]
        return handler(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
