"""Command-line entry point.

Subcommands: info, solve, bench, anneal-sim, qubo-dump. A key=value config
file can predefine any flag; explicit flags win. All randomized commands
echo their seed so a run can be reproduced.

Exit codes: 0 success, 2 parse/validation error, 3 no feasible tour,
4 size-bound violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import annealsim, bench
from .errors import ParseError, SizeLimitError, ValidationError
from .hybrid import HybridConfig, run_hybrid
from .qubo import TuningParams, build_qubo, decode_sample, default_gamma
from .samplers import SamplerConfig, brute_force_tsp, sa_sample, tabu_sample
from .tsplib import Tour, load_instance

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_SIZE = 4

DEFAULT_SEED = 2021


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tspqubo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    info = sub.add_parser("info", help="print instance summaries")
    info.add_argument("--instance", action="append", required=True, help="TSPLIB file path")
    info.set_defaults(func=cmd_info)

    solve = sub.add_parser("solve", help="solve one instance and print the tour")
    solve.add_argument("--instance", required=True, help="TSPLIB file path")
    _add_run_flags(solve)
    solve.set_defaults(func=cmd_solve)

    bench_p = sub.add_parser("bench", help="benchmark registry instances")
    bench_p.add_argument("--instance", action="append", required=True, help="registry instance name (repeatable)")
    bench_p.add_argument("--reps", type=int, default=6, help="repetitions per instance")
    bench_p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    bench_p.add_argument("--no-timing", action="store_true", help="zero the wall_ms column for reproducible bytes")
    bench_p.add_argument("--data-dir", default=None, help="directory holding instance files (default: bundled)")
    _add_run_flags(bench_p)
    bench_p.set_defaults(func=cmd_bench)

    sim = sub.add_parser("anneal-sim", help="sweep anneal times on a small instance")
    sim.add_argument("--instance", required=True, help="TSPLIB file path (at most 10 QUBO variables)")
    sim.add_argument("--anneal-T", dest="anneal_t", default="1,10,100", help="comma-separated anneal times")
    sim.add_argument("--steps", type=int, default=0, help="propagation steps per anneal (0 = auto)")
    sim.add_argument("--gamma", type=float, default=None)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", default=None)
    sim.add_argument("--config", default=None)
    sim.set_defaults(func=cmd_anneal_sim)

    dump = sub.add_parser("qubo-dump", help="export QUBO coefficients as text")
    dump.add_argument("--instance", required=True, help="TSPLIB file path")
    dump.add_argument("--gamma", type=float, default=None)
    dump.add_argument("--seed", type=int, default=None)
    dump.add_argument("--out", default=None)
    dump.add_argument("--config", default=None)
    dump.set_defaults(func=cmd_dump)

    return parser


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--solver", choices=("hybrid", "sa", "tabu", "exact"), default="hybrid")
    parser.add_argument("--gamma", type=float, default=None, help="constraint weight (default N*max(d)/2)")
    parser.add_argument("--seed", type=int, default=None, help=f"master seed (default {DEFAULT_SEED}, echoed)")
    parser.add_argument("--iterations", type=int, default=None, help="hybrid iteration cap")
    parser.add_argument("--num-reads", type=int, default=None, help="reads per sa/tabu invocation")
    parser.add_argument("--subproblem-size", type=int, default=None, help="variables per hybrid subsample")
    parser.add_argument("--out", default=None, help="write output to this path instead of stdout")
    parser.add_argument("--config", default=None, help="key=value file supplying flag defaults")


_CONFIG_COERCERS = {
    "solver": str,
    "gamma": float,
    "seed": int,
    "iterations": int,
    "num_reads": int,
    "subproblem_size": int,
    "reps": int,
    "format": str,
    "steps": int,
    "anneal_t": str,
    "out": str,
    "data_dir": str,
}


def _apply_config_file(args: argparse.Namespace) -> None:
    if getattr(args, "config", None) is None:
        return
    path = Path(args.config)
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"{path}: expected key=value (line {lineno})")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_COERCERS:
            raise ParseError(f"{path}: unknown config key {key!r} (line {lineno})")
        if getattr(args, key, None) is None:
            setattr(args, key, _CONFIG_COERCERS[key](value.strip()))


def _seed_of(args) -> int:
    return args.seed if args.seed is not None else DEFAULT_SEED


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _hybrid_config(args, seed: int) -> HybridConfig:
    config = bench.default_hybrid_config(seed)
    if getattr(args, "iterations", None) is not None:
        config = replace(config, max_iterations=args.iterations)
    if getattr(args, "subproblem_size", None) is not None:
        config = replace(config, subproblem_size=args.subproblem_size)
    if getattr(args, "num_reads", None) is not None:
        config = replace(config, sa=replace(config.sa, num_reads=args.num_reads))
    return config


def _sampler_config(args, seed: int) -> SamplerConfig:
    config = SamplerConfig(seed=seed)
    if getattr(args, "num_reads", None) is not None:
        config = replace(config, num_reads=args.num_reads)
    return config


def cmd_info(args) -> int:
    for path in args.instance:
        instance = load_instance(path)
        off = instance.off_diagonal()
        print(f"name: {instance.name}")
        print(f"kind: {instance.kind.value}")
        print(f"dimension: {instance.dimension}")
        print(f"weight_type: {instance.weight_type}")
        print(f"min_distance: {off.min()}")
        print(f"max_distance: {off.max()}")
    return EXIT_OK


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    seed = _seed_of(args)
    gamma = args.gamma if args.gamma is not None else default_gamma(instance)
    print(f"instance={instance.name} solver={args.solver} gamma={gamma:g} seed={seed}", file=sys.stderr)

    if args.solver == "exact":
        tour = brute_force_tsp(instance)
    else:
        qubo = build_qubo(instance, TuningParams(gamma=gamma))
        if args.solver == "hybrid":
            sample, _ = run_hybrid(qubo, _hybrid_config(args, seed))
            candidates = [sample]
        else:
            config = _sampler_config(args, seed)
            sample_set = sa_sample(qubo, config) if args.solver == "sa" else tabu_sample(qubo, config)
            candidates = list(sample_set.samples)
        tour = None
        for sample in candidates:
            decoded = decode_sample(qubo, sample, instance)
            if isinstance(decoded, Tour):
                tour = decoded
                break
        if tour is None:
            lowest = decode_sample(qubo, candidates[0], instance)
            print("no feasible tour found; best sample violates:", file=sys.stderr)
            for violation in lowest.violations:
                print(f"  {violation}", file=sys.stderr)
            return EXIT_INFEASIBLE

    print("tour:", " ".join(str(c) for c in tour.order))
    print(f"length: {tour.length}")
    entry = bench.REGISTRY.get(instance.name)
    if entry is not None:
        ep = bench.error_percent(tour.length, entry.optimal_length)
        print(f"error_percent: {bench.format_error_percent(ep)}")
    return EXIT_OK


def cmd_bench(args) -> int:
    seed = _seed_of(args)
    print(f"bench solver={args.solver} reps={args.reps} seed={seed}", file=sys.stderr)
    reports = bench.run_benchmark(
        args.instance,
        solver=args.solver,
        repetitions=args.reps,
        seed=seed,
        gamma=args.gamma,
        data_dir=args.data_dir,
        hybrid_config=_hybrid_config(args, seed) if args.solver == "hybrid" else None,
        sampler_config=_sampler_config(args, seed) if args.solver in ("sa", "tabu") else None,
    )
    _emit(args, bench.emit_report(reports, args.format, include_timing=not args.no_timing))
    return EXIT_OK


def cmd_anneal_sim(args) -> int:
    instance = load_instance(args.instance)
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    gamma = args.gamma if args.gamma is not None else default_gamma(instance)
    print(f"anneal-sim instance={instance.name} gamma={gamma:g} seed={seed}", file=sys.stderr)
    qubo = build_qubo(instance, TuningParams(gamma=gamma))
    model = annealsim.qubo_to_ising(qubo)
    try:
        times = [float(t) for t in args.anneal_t.split(",") if t.strip()]
    except ValueError:
        raise ParseError(f"bad --anneal-T value {args.anneal_t!r}; expected comma-separated numbers")
    if not times:
        raise ParseError("--anneal-T needs at least one value")
    lines = ["T,success_probability,norm_error"]
    for total_time in times:
        steps = args.steps if args.steps else annealsim.default_num_steps(model, total_time)
        result = annealsim.evolve(model, annealsim.AnnealSchedule(total_time=total_time, num_steps=steps))
        lines.append(f"{total_time:g},{result.success_probability!r},{result.norm_error!r}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_dump(args) -> int:
    from .qubo import export_coefficients

    instance = load_instance(args.instance)
    gamma = args.gamma if args.gamma is not None else default_gamma(instance)
    print(f"qubo-dump instance={instance.name} gamma={gamma:g}", file=sys.stderr)
    qubo = build_qubo(instance, TuningParams(gamma=gamma))
    _emit(args, export_coefficients(qubo))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_file(args)
        return args.func(args)
    except SizeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
