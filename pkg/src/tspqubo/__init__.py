"""Traveling salesman problems as QUBOs, with classical and simulated-anneal solvers."""

from .bench import BenchmarkReport, error_percent, emit_report, run_benchmark
from .hybrid import HybridConfig, run_hybrid
from .qubo import Qubo, Sample, TuningParams, build_qubo, decode_sample, default_gamma, encode_tour, qubo_energy
from .samplers import SampleSet, SamplerConfig, brute_force_tsp, exact_solve, sa_sample, tabu_sample
from .tsplib import (
    Instance,
    ProblemKind,
    Tour,
    euc2d_distance,
    geo_distance,
    load_instance,
    parse_instance,
    tour_length,
    validate_tour,
)

__all__ = [
    "BenchmarkReport",
    "HybridConfig",
    "Instance",
    "ProblemKind",
    "Qubo",
    "Sample",
    "SampleSet",
    "SamplerConfig",
    "Tour",
    "TuningParams",
    "brute_force_tsp",
    "build_qubo",
    "decode_sample",
    "default_gamma",
    "emit_report",
    "encode_tour",
    "error_percent",
    "euc2d_distance",
    "exact_solve",
    "geo_distance",
    "load_instance",
    "parse_instance",
    "qubo_energy",
    "run_benchmark",
    "run_hybrid",
    "sa_sample",
    "tabu_sample",
    "tour_length",
    "validate_tour",
]
