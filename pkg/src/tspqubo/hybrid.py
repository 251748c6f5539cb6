"""Race-and-merge hybrid workflow.

Each iteration races three branches from the shared incumbent: a tabu
search, a batch of simulated anneals, and a clamp-and-solve pass over the
highest-impact variables. The lowest-energy result (including the prior
incumbent) becomes the new incumbent; the run stops after a patience
window without strict improvement.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .errors import StructureError, ValidationError
from .qubo import EXACT_ENUMERATION_LIMIT, Qubo, Sample, is_feasible
from .samplers import SampleSet, SamplerConfig, default_beta_range, sa_sample, tabu_sample
from .seeding import derive_seed

_SEED_MASK = (1 << 64) - 1

BRANCH_NAMES = ("tabu", "sa", "subsample")


@dataclass(frozen=True)
class HybridConfig:
    seed: int
    max_iterations: int = 100
    convergence_patience: int = 10
    subproblem_size: int = 50
    tabu: SamplerConfig = field(default_factory=lambda: SamplerConfig(seed=0, tabu_max_steps=5000))
    sa: SamplerConfig = field(default_factory=lambda: SamplerConfig(seed=0, num_reads=10, sweeps=300))
    subproblem_sampler: SamplerConfig = field(default_factory=lambda: SamplerConfig(seed=0, num_reads=10, sweeps=300))
    parallel_branches: bool = False

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be at least 1")
        if self.convergence_patience < 1:
            raise ValidationError("convergence_patience must be at least 1")
        if self.subproblem_size < 1:
            raise ValidationError("subproblem_size must be at least 1")


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    branch: str
    energy: float
    feasible: bool


def export_trace(trace) -> str:
    """Line-delimited trace records for plotting: iteration, branch, energy, feasible.

    Each iteration contributes one row per branch plus an ``incumbent`` row
    holding the post-merge best energy.
    """
    lines = ["iteration,branch,energy,feasible"]
    for entry in trace:
        lines.append(f"{entry.iteration},{entry.branch},{entry.energy!r},{int(entry.feasible)}")
    return "\n".join(lines) + "\n"


def select_subproblem(qubo: Qubo, current, k: int) -> tuple[int, ...]:
    """Indices of the k variables with the largest single-flip energy impact.

    Impact of variable i is |energy change from flipping bit i in current|;
    ties resolve to the lower index. Returned sorted ascending.
    """
    if k < 1:
        raise ValidationError("subproblem size must be at least 1")
    n = qubo.num_vars
    x = np.asarray([int(b) for b in current], dtype=np.float64)
    if x.size != n:
        raise StructureError(f"current has {x.size} bits, expected {n}")
    h, w, _ = qubo.dense()
    g = h + w @ x
    impact = np.abs((1.0 - 2.0 * x) * g)
    ranked = np.lexsort((np.arange(n), -impact))
    return tuple(sorted(int(i) for i in ranked[: min(k, n)]))


def solve_subproblem(qubo: Qubo, current, subset, sampler_config: SamplerConfig | None = None) -> tuple[int, ...]:
    """Re-optimize the subset variables with everything else clamped to ``current``.

    The induced sub-QUBO absorbs clamped interactions into its linear terms
    and offset, so its energies equal full-assignment energies. Solved
    exactly up to the enumeration bound, otherwise by simulated annealing;
    the clamped current assignment always competes, so the result never has
    higher energy than ``current``.
    """
    n = qubo.num_vars
    x = np.asarray([int(b) for b in current], dtype=np.int8)
    if x.size != n:
        raise StructureError(f"current has {x.size} bits, expected {n}")
    subset = sorted(set(int(i) for i in subset))
    if not subset:
        raise ValidationError("subset must not be empty")
    if subset[0] < 0 or subset[-1] >= n:
        raise ValidationError(f"subset indices must lie in 0..{n - 1}")

    h, w, offset = qubo.dense()
    sel = np.asarray(subset, dtype=np.int64)
    clamped = np.setdiff1d(np.arange(n), sel, assume_unique=True)
    xc = x[clamped].astype(np.float64)
    sub_w = np.ascontiguousarray(w[np.ix_(sel, sel)])
    sub_h = h[sel] + w[np.ix_(sel, clamped)] @ xc
    sub_offset = offset + float(h[clamped] @ xc) + 0.5 * float(xc @ w[np.ix_(clamped, clamped)] @ xc)

    cur_sub = x[sel].copy()
    cur_energy = float(_kernels.assignment_energy(sub_w, sub_h, sub_offset, cur_sub))

    if len(subset) <= EXACT_ENUMERATION_LIMIT:
        cand, _ = _kernels.exhaustive_min_kernel(sub_w, sub_h, sub_offset)
        cand_energy = float(_kernels.assignment_energy(sub_w, sub_h, sub_offset, cand))
    else:
        cfg = sampler_config if sampler_config is not None else SamplerConfig(seed=0)
        beta0, beta1 = cfg.beta_range if cfg.beta_range is not None else default_beta_range(qubo)
        bits, energies = _kernels.sa_sweep_kernel(
            sub_w, sub_h, sub_offset, cfg.num_reads, cfg.sweeps, beta0, beta1, np.uint64(cfg.seed & _SEED_MASK)
        )
        order = np.lexsort(tuple(bits[:, c] for c in reversed(range(bits.shape[1]))) + (energies,))
        cand = bits[order[0]]
        cand_energy = float(energies[order[0]])

    if (cand_energy, tuple(int(b) for b in cand)) < (cur_energy, tuple(int(b) for b in cur_sub)):
        chosen = cand
    else:
        chosen = cur_sub
    result = x.copy()
    result[sel] = chosen
    return tuple(int(b) for b in result)


def run_hybrid(qubo: Qubo, config: HybridConfig) -> tuple[Sample, tuple[TraceEntry, ...]]:
    """Iterate the three-branch race until convergence or the iteration cap."""
    n = qubo.num_vars
    if n == 0:
        raise StructureError("qubo has no variables")
    h, w, offset = qubo.dense()

    incumbent = _kernels.random_bits(n, np.uint64(derive_seed(config.seed, 0) & _SEED_MASK), np.uint64(0))
    incumbent_energy = float(_kernels.assignment_energy(w, h, offset, incumbent))

    trace: list[TraceEntry] = []
    no_improve = 0
    for iteration in range(1, config.max_iterations + 1):
        seeds = [derive_seed(config.seed, iteration, b) for b in range(len(BRANCH_NAMES))]
        incumbent_tuple = tuple(int(b) for b in incumbent)

        def branch_tabu() -> Sample:
            result = tabu_sample(qubo, replace(config.tabu, seed=seeds[0]), initial=incumbent_tuple)
            return result.best

        def branch_sa() -> Sample:
            return sa_sample(qubo, replace(config.sa, seed=seeds[1])).best

        def branch_subsample() -> Sample:
            subset = select_subproblem(qubo, incumbent_tuple, config.subproblem_size)
            bits = solve_subproblem(
                qubo, incumbent_tuple, subset, sampler_config=replace(config.subproblem_sampler, seed=seeds[2])
            )
            x = np.asarray(bits, dtype=np.int8)
            return Sample(bits=bits, energy=float(_kernels.assignment_energy(w, h, offset, x)))

        branches = (branch_tabu, branch_sa, branch_subsample)
        if config.parallel_branches:
            with ThreadPoolExecutor(max_workers=len(branches)) as pool:
                results = list(pool.map(lambda fn: fn(), branches))
        else:
            results = [fn() for fn in branches]

        for name, sample in zip(BRANCH_NAMES, results):
            trace.append(
                TraceEntry(
                    iteration=iteration,
                    branch=name,
                    energy=sample.energy,
                    feasible=is_feasible(qubo, sample.bits),
                )
            )

        challenger = min(results, key=Sample.sort_key)
        if (challenger.energy, challenger.bits) < (incumbent_energy, incumbent_tuple):
            improved = challenger.energy < incumbent_energy
            incumbent = np.asarray(challenger.bits, dtype=np.int8)
            incumbent_energy = challenger.energy
            no_improve = 0 if improved else no_improve + 1
        else:
            no_improve += 1
        trace.append(
            TraceEntry(
                iteration=iteration,
                branch="incumbent",
                energy=incumbent_energy,
                feasible=is_feasible(qubo, tuple(int(b) for b in incumbent)),
            )
        )
        if no_improve >= config.convergence_patience:
            break

    best = Sample(bits=tuple(int(b) for b in incumbent), energy=incumbent_energy)
    return best, tuple(trace)
