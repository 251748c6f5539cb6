"""QUBO construction for fixed-start tours, sample encode/decode, and energies.

City 1 is pinned to position 1, so an N-city instance uses (N-1)^2 binary
variables x[city, position] over cities 2..N and positions 2..N. On any
assignment that encodes a valid tour the penalty terms vanish and the QUBO
energy equals the tour length exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SizeLimitError, StructureError, ValidationError
from .tsplib import Instance, Tour, validate_tour

EXACT_ENUMERATION_LIMIT = 25


def default_gamma(instance: Instance) -> float:
    """Constraint weight N * max(d) / 2 over off-diagonal distances."""
    return instance.dimension * int(instance.off_diagonal().max()) / 2.0


@dataclass(frozen=True)
class TuningParams:
    """Tunable knobs for building and sampling a tour QUBO.

    chain_strength is accepted and echoed in reports for config
    compatibility but has no effect: nothing is embedded on hardware here.
    """

    gamma: float
    chain_strength: float = 0.0
    num_runs: int = 100
    anneal_time: float = 500.0

    def __post_init__(self) -> None:
        if self.gamma <= 0:
            raise ValidationError(f"gamma must be positive, got {self.gamma}")
        if not 10 <= self.num_runs <= 1000:
            raise ValidationError(f"num_runs must be in 10..1000, got {self.num_runs}")
        if self.chain_strength < 0:
            raise ValidationError("chain_strength must be non-negative")
        if self.anneal_time <= 0:
            raise ValidationError("anneal_time must be positive")


@dataclass(frozen=True)
class Sample:
    """A binary assignment with its energy and an occurrence count."""

    bits: tuple[int, ...]
    energy: float
    occurrences: int = 1

    def sort_key(self) -> tuple[float, tuple[int, ...]]:
        return (self.energy, self.bits)


@dataclass(frozen=True)
class ViolationReport:
    """One-hot groups violated by an assignment that does not encode a tour."""

    violations: tuple[str, ...]


@dataclass(frozen=True)
class Qubo:
    """Upper-triangular QUBO with the (city, position) index scheme attached."""

    num_cities: int
    num_vars: int
    linear: dict[int, float]
    quadratic: dict[tuple[int, int], float]
    offset: float
    _dense: tuple | None = field(default=None, init=False, repr=False, compare=False)

    def var_index(self, city: int, position: int) -> int:
        """Variable index for city and position labels in 2..N."""
        n = self.num_cities
        if not (2 <= city <= n and 2 <= position <= n):
            raise ValidationError(f"city and position must lie in 2..{n}, got ({city}, {position})")
        return (city - 2) * (n - 1) + (position - 2)

    def city_position(self, index: int) -> tuple[int, int]:
        """Inverse of :meth:`var_index`."""
        if not 0 <= index < self.num_vars:
            raise ValidationError(f"variable index {index} outside 0..{self.num_vars - 1}")
        side = self.num_cities - 1
        return index // side + 2, index % side + 2

    def dense(self) -> tuple[np.ndarray, np.ndarray, float]:
        """Linear vector, full symmetric coupling matrix (zero diagonal), offset."""
        if self._dense is None:
            h = np.zeros(self.num_vars, dtype=np.float64)
            for i, c in self.linear.items():
                h[i] = c
            w = np.zeros((self.num_vars, self.num_vars), dtype=np.float64)
            for (i, j), c in self.quadratic.items():
                w[i, j] = c
                w[j, i] = c
            h.setflags(write=False)
            w.setflags(write=False)
            object.__setattr__(self, "_dense", (h, w, float(self.offset)))
        return self._dense


def build_qubo(instance: Instance, params: TuningParams) -> Qubo:
    """Tour objective plus gamma-weighted one-hot penalties for ``instance``."""
    n = instance.dimension
    if n < 3:
        raise SizeLimitError(f"need at least 3 cities, got {n}")
    gamma = float(params.gamma)
    d = instance.distances
    side = n - 1

    linear: dict[int, float] = {}
    quadratic: dict[tuple[int, int], float] = {}
    offset = 0.0

    def idx(city: int, position: int) -> int:
        return (city - 2) * side + (position - 2)

    def add_linear(i: int, c: float) -> None:
        linear[i] = linear.get(i, 0.0) + c

    def add_quadratic(i: int, j: int, c: float) -> None:
        key = (i, j) if i < j else (j, i)
        quadratic[key] = quadratic.get(key, 0.0) + c

    # Tour legs touching the pinned city fold into linear terms.
    for v in range(2, n + 1):
        add_linear(idx(v, 2), float(d[0, v - 1]))
        add_linear(idx(v, n), float(d[v - 1, 0]))
    for m in range(2, n):
        for u in range(2, n + 1):
            for v in range(2, n + 1):
                if u == v:
                    continue
                w = float(d[u - 1, v - 1])
                if w:
                    add_quadratic(idx(u, m), idx(v, m + 1), w)

    # One-hot penalties: each non-fixed city in exactly one position, each
    # non-fixed position holding exactly one city.
    groups = [[idx(k, m) for m in range(2, n + 1)] for k in range(2, n + 1)]
    groups += [[idx(k, m) for k in range(2, n + 1)] for m in range(2, n + 1)]
    for group in groups:
        offset += gamma
        for a, i in enumerate(group):
            add_linear(i, -gamma)
            for j in group[a + 1 :]:
                add_quadratic(i, j, 2.0 * gamma)

    linear = {i: c for i, c in linear.items() if c != 0.0}
    quadratic = {k: c for k, c in quadratic.items() if c != 0.0}
    return Qubo(num_cities=n, num_vars=side * side, linear=linear, quadratic=quadratic, offset=offset)


def qubo_energy(qubo: Qubo, bits) -> float:
    """offset + sum of linear and quadratic terms active in ``bits``."""
    bits = tuple(int(b) for b in bits)
    if len(bits) != qubo.num_vars:
        raise StructureError(f"expected {qubo.num_vars} bits, got {len(bits)}")
    energy = qubo.offset
    for i, c in qubo.linear.items():
        if bits[i]:
            energy += c
    for (i, j), c in qubo.quadratic.items():
        if bits[i] and bits[j]:
            energy += c
    return energy


def encode_tour(qubo: Qubo, tour: Tour | tuple[int, ...]) -> Sample:
    """One-hot encoding of a valid fixed-start tour, with its energy attached."""
    order = tour.order if isinstance(tour, Tour) else tuple(int(c) for c in tour)
    n = qubo.num_cities
    if len(order) != n or sorted(order) != list(range(1, n + 1)) or order[0] != 1:
        raise ValidationError(f"not a fixed-start tour of {n} cities: {order}")
    bits = [0] * qubo.num_vars
    for position, city in enumerate(order[1:], start=2):
        bits[qubo.var_index(city, position)] = 1
    bits = tuple(bits)
    return Sample(bits=bits, energy=qubo_energy(qubo, bits))


def decode_sample(qubo: Qubo, sample: Sample | tuple[int, ...], instance: Instance) -> Tour | ViolationReport:
    """Recover the tour encoded by a sample, or report every violated one-hot group.

    No repair is attempted: near-feasible samples are the caller's problem.
    """
    bits = sample.bits if isinstance(sample, Sample) else tuple(int(b) for b in sample)
    if len(bits) != qubo.num_vars:
        raise StructureError(f"expected {qubo.num_vars} bits, got {len(bits)}")
    n = qubo.num_cities
    violations: list[str] = []
    city_at_position: dict[int, int] = {}
    for m in range(2, n + 1):
        cities = [k for k in range(2, n + 1) if bits[qubo.var_index(k, m)]]
        if len(cities) != 1:
            listed = ", ".join(str(c) for c in cities) or "none"
            violations.append(f"position {m} holds {len(cities)} cities ({listed})")
        else:
            city_at_position[m] = cities[0]
    for k in range(2, n + 1):
        positions = [m for m in range(2, n + 1) if bits[qubo.var_index(k, m)]]
        if len(positions) != 1:
            listed = ", ".join(str(m) for m in positions) or "none"
            violations.append(f"city {k} appears in {len(positions)} positions ({listed})")
    if violations:
        return ViolationReport(violations=tuple(violations))
    order = (1,) + tuple(city_at_position[m] for m in range(2, n + 1))
    return Tour.from_order(instance, order)


def is_feasible(qubo: Qubo, bits) -> bool:
    """True when ``bits`` one-hot encodes a fixed-start tour."""
    n = qubo.num_cities
    bits = tuple(int(b) for b in bits)
    if len(bits) != qubo.num_vars:
        return False
    side = n - 1
    if sum(bits) != side:
        return False
    seen_cities = 0
    seen_positions = 0
    for index, bit in enumerate(bits):
        if not bit:
            continue
        city, position = index // side, index % side
        if seen_cities >> city & 1 or seen_positions >> position & 1:
            return False
        seen_cities |= 1 << city
        seen_positions |= 1 << position
    return True


def export_coefficients(qubo: Qubo) -> str:
    """Plain-text coefficient dump: offset header, then one ``i j coeff`` per line.

    Linear terms appear as ``i i coeff``. Line order is deterministic.
    """
    lines = [f"offset {qubo.offset!r}"]
    for i in sorted(qubo.linear):
        lines.append(f"{i} {i} {qubo.linear[i]!r}")
    for i, j in sorted(qubo.quadratic):
        lines.append(f"{i} {j} {qubo.quadratic[(i, j)]!r}")
    return "\n".join(lines) + "\n"
