"""Classical QUBO samplers: simulated annealing, tabu search, and exact oracles.

Every sampler is a pure function of (qubo, config, seed, initial): per-read
random streams are derived from (seed, read), so num_reads-level parallelism
cannot change results.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import SizeLimitError, StructureError, ValidationError
from .qubo import EXACT_ENUMERATION_LIMIT, Qubo, Sample, TuningParams
from .tsplib import Instance, Tour

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    num_reads: int = 100
    sweeps: int = 1000
    beta_range: tuple[float, float] | None = None
    tabu_tenure: int = 20
    tabu_max_steps: int = 20_000
    tabu_timeout: float = math.inf

    def __post_init__(self) -> None:
        if not 10 <= self.num_reads <= 1000:
            raise ValidationError(f"num_reads must be in 10..1000, got {self.num_reads}")
        if self.sweeps < 1:
            raise ValidationError("sweeps must be positive")
        if self.beta_range is not None:
            lo, hi = self.beta_range
            if not (0 < lo < hi):
                raise ValidationError(f"beta_range must be increasing positives, got {self.beta_range}")
        if self.tabu_tenure < 1:
            raise ValidationError("tabu_tenure must be positive")
        if self.tabu_max_steps < 1:
            raise ValidationError("tabu_max_steps must be positive")
        if self.tabu_timeout <= 0:
            raise ValidationError("tabu_timeout must be positive")


@dataclass(frozen=True)
class SampleSet:
    """Samples sorted by ascending energy, ties broken by bit string.

    wall_time is measurement metadata and does not participate in equality.
    """

    samples: tuple[Sample, ...]
    sampler: str
    seed: int
    wall_time: float = field(compare=False, default=0.0)

    @property
    def best(self) -> Sample:
        return self.samples[0]

    @classmethod
    def collect(cls, pairs, sampler: str, seed: int, wall_time: float) -> "SampleSet":
        """Merge (bits, energy) pairs, summing occurrences of repeated bits."""
        merged: dict[tuple[int, ...], list] = {}
        for bits, energy in pairs:
            bits = tuple(int(b) for b in bits)
            entry = merged.setdefault(bits, [float(energy), 0])
            entry[1] += 1
        samples = tuple(
            sorted(
                (Sample(bits=b, energy=e, occurrences=c) for b, (e, c) in merged.items()),
                key=Sample.sort_key,
            )
        )
        return cls(samples=samples, sampler=sampler, seed=seed, wall_time=wall_time)


def sampler_config_from_tuning(params: TuningParams, seed: int) -> SamplerConfig:
    """Map tour-level tuning onto a sampler: one anneal-time unit is one sweep."""
    return SamplerConfig(seed=seed, num_reads=params.num_runs, sweeps=max(1, round(params.anneal_time)))


def default_beta_range(qubo: Qubo) -> tuple[float, float]:
    """Coefficient-aware schedule endpoints that survive large penalty weights."""
    magnitudes = [abs(c) for c in qubo.linear.values()]
    magnitudes += [abs(c) for c in qubo.quadratic.values()]
    if not magnitudes:
        return (0.1, 10.0)
    return (0.1 / max(magnitudes), 10.0 / min(magnitudes))


def _beta_range(qubo: Qubo, config: SamplerConfig) -> tuple[float, float]:
    return config.beta_range if config.beta_range is not None else default_beta_range(qubo)


def sa_sample(qubo: Qubo, config: SamplerConfig) -> SampleSet:
    """num_reads independent single-flip Metropolis anneals over a geometric beta ramp."""
    h, w, offset = qubo.dense()
    beta0, beta1 = _beta_range(qubo, config)
    start = time.perf_counter()
    bits, energies = _kernels.sa_sweep_kernel(
        w, h, offset, config.num_reads, config.sweeps, beta0, beta1, np.uint64(config.seed & _SEED_MASK)
    )
    wall = time.perf_counter() - start
    pairs = [(bits[r], energies[r]) for r in range(config.num_reads)]
    return SampleSet.collect(pairs, sampler="sa", seed=config.seed, wall_time=wall)


def tabu_sample(qubo: Qubo, config: SamplerConfig, initial=None) -> SampleSet:
    """Steepest-descent single-flip tabu search with aspiration.

    Runs for tabu_max_steps or until tabu_timeout expires, whichever comes
    first. The trajectory depends only on (qubo, config, initial), so runs
    that finish their step budget are reproducible across machines.
    """
    h, w, offset = qubo.dense()
    n = qubo.num_vars
    if initial is None:
        x = _kernels.random_bits(n, np.uint64(config.seed & _SEED_MASK), np.uint64(0))
    else:
        x = np.asarray([int(b) for b in initial], dtype=np.int8)
        if x.size != n:
            raise StructureError(f"initial has {x.size} bits, expected {n}")
    g = h + w @ x.astype(np.float64)
    cur_energy = float(_kernels.assignment_energy(w, h, offset, x))
    best_x = x.copy()
    best_energy = cur_energy
    tabu_until = np.zeros(n, dtype=np.int64)
    # A tenure at or above n freezes every variable; clamp so moves stay available.
    tenure = max(1, min(config.tabu_tenure, n - 2)) if n > 2 else 1

    start = time.perf_counter()
    step = 0
    chunk = 2048 if math.isfinite(config.tabu_timeout) else config.tabu_max_steps
    while step < config.tabu_max_steps:
        hi = min(step + chunk, config.tabu_max_steps)
        planned = hi - step
        cur_energy, best_energy, taken = _kernels.tabu_step_kernel(
            w, h, x, g, tabu_until, step, hi, tenure, cur_energy, best_energy, best_x
        )
        step += taken
        if taken < planned:  # no admissible move left
            break
        if time.perf_counter() - start > config.tabu_timeout:
            break
    wall = time.perf_counter() - start
    energy = float(_kernels.assignment_energy(w, h, offset, best_x))
    return SampleSet.collect([(best_x, energy)], sampler="tabu", seed=config.seed, wall_time=wall)


def exact_solve(qubo: Qubo) -> Sample:
    """Global minimum by exhaustive enumeration; ties favor the lexicographically
    smallest bit vector."""
    if qubo.num_vars > EXACT_ENUMERATION_LIMIT:
        raise SizeLimitError(
            f"{qubo.num_vars} variables exceeds the {EXACT_ENUMERATION_LIMIT}-variable enumeration bound"
        )
    h, w, offset = qubo.dense()
    bits, _ = _kernels.exhaustive_min_kernel(w, h, offset)
    energy = float(_kernels.assignment_energy(w, h, offset, bits))
    return Sample(bits=tuple(int(b) for b in bits), energy=energy)


def brute_force_tsp(instance: Instance) -> Tour:
    """Optimal tour by enumerating fixed-start permutations; N is capped at 11."""
    n = instance.dimension
    if n > 11:
        raise SizeLimitError(f"{n} cities exceeds the 11-city enumeration bound")
    d = instance.distances
    best_order = None
    best_length = None
    for rest in itertools.permutations(range(2, n + 1)):
        length = d[0, rest[0] - 1]
        prev = rest[0]
        for city in rest[1:]:
            length += d[prev - 1, city - 1]
            prev = city
        length += d[prev - 1, 0]
        if best_length is None or length < best_length:
            best_length = length
            best_order = rest
    return Tour(order=(1,) + best_order, length=int(best_length))


def random_assignment(num_vars: int, seed: int, stream: int = 0) -> tuple[int, ...]:
    """Uniform random bits from the package's counter-based stream."""
    return tuple(int(b) for b in _kernels.random_bits(num_vars, np.uint64(seed & _SEED_MASK), np.uint64(stream)))
