"""State-vector simulation of a driver-to-problem interpolating anneal.

The system starts in the uniform superposition (ground state of the
transverse-field driver -sum_i sigma_x^i) and evolves under

    H(t) = (1 - s(t/T)) * H_driver + s(t/T) * H_problem

by piecewise-constant unitary steps. H_problem is the diagonal spin
operator of the QUBO under the x = (1 - s)/2 convention, so its ground
states are exactly the QUBO minimizers. The scalar energy offset only
contributes a global phase and is left out of the propagated operator.

Sized for desk-scale study: at most 10 spins (1024 amplitudes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SizeLimitError, ValidationError
from .qubo import Qubo

MAX_SPINS = 10


@dataclass(frozen=True)
class IsingModel:
    """Spin model with fields h, couplings j (i < j), and a scalar offset.

    Spin +1 corresponds to bit 0 under the fixed x = (1 - s)/2 convention.
    """

    h: tuple[float, ...]
    j: dict[tuple[int, int], float]
    offset: float

    @property
    def num_spins(self) -> int:
        return len(self.h)


def linear_ramp(u: float) -> float:
    return u


@dataclass(frozen=True)
class AnnealSchedule:
    """Total anneal time, step count, and the monotone ramp s(u)."""

    total_time: float
    num_steps: int
    s_of_u: Callable[[float], float] = linear_ramp

    def __post_init__(self) -> None:
        if self.total_time <= 0:
            raise ValidationError("total_time must be positive")
        if self.num_steps < 1:
            raise ValidationError("num_steps must be positive")


@dataclass(frozen=True)
class AnnealResult:
    final_state: np.ndarray
    success_probability: float
    norm_error: float


def qubo_to_ising(qubo: Qubo) -> IsingModel:
    """Energy-preserving change of variables: Ising energy + offset = QUBO energy."""
    n = qubo.num_vars
    if n > MAX_SPINS:
        raise SizeLimitError(f"{n} variables exceeds the {MAX_SPINS}-spin simulation bound")
    h = [0.0] * n
    j: dict[tuple[int, int], float] = {}
    offset = qubo.offset
    for i, c in qubo.linear.items():
        h[i] -= c / 2.0
        offset += c / 2.0
    for (a, b), c in qubo.quadratic.items():
        j[(a, b)] = j.get((a, b), 0.0) + c / 4.0
        h[a] -= c / 4.0
        h[b] -= c / 4.0
        offset += c / 4.0
    j = {k: v for k, v in j.items() if v != 0.0}
    return IsingModel(h=tuple(h), j=j, offset=offset)


def classical_energies(model: IsingModel) -> np.ndarray:
    """Classical energy (offset included) of every basis state.

    Basis index b stores bit i of b as x_i, with variable 0 in the least
    significant position; spins are s_i = 1 - 2 x_i.
    """
    n = model.num_spins
    dim = 1 << n
    indices = np.arange(dim)
    spins = 1.0 - 2.0 * ((indices[:, None] >> np.arange(n)) & 1)
    energies = np.full(dim, model.offset, dtype=np.float64)
    energies += spins @ np.asarray(model.h)
    for (a, b), c in model.j.items():
        energies += c * spins[:, a] * spins[:, b]
    return energies


def driver_matrix(num_spins: int) -> np.ndarray:
    """Dense matrix of the transverse-field driver -sum_i sigma_x^i."""
    dim = 1 << num_spins
    matrix = np.zeros((dim, dim), dtype=np.float64)
    for b in range(dim):
        for i in range(num_spins):
            matrix[b ^ (1 << i), b] -= 1.0
    return matrix


def problem_matrix(model: IsingModel) -> np.ndarray:
    """Dense diagonal problem operator (offset excluded: it is a global phase)."""
    return np.diag(classical_energies(model) - model.offset)


def hamiltonian(model: IsingModel, s: float) -> np.ndarray:
    """The interpolated step Hamiltonian at ramp value s."""
    return (1.0 - s) * driver_matrix(model.num_spins) + s * problem_matrix(model)


def default_num_steps(model: IsingModel, total_time: float) -> int:
    """Step count keeping ||H|| * dt at or below 0.1 for both interpolation ends."""
    problem_scale = sum(abs(v) for v in model.h) + sum(abs(v) for v in model.j.values())
    scale = max(model.num_spins, problem_scale)
    return max(100, math.ceil(10.0 * total_time * scale))


def evolve(model: IsingModel, schedule: AnnealSchedule) -> AnnealResult:
    """Propagate from the uniform superposition and measure ground-state mass.

    Each step applies a unitary split-step propagator for the piecewise
    constant Hamiltonian at the step midpoint, so the state norm is
    conserved to rounding error regardless of step count.
    """
    n = model.num_spins
    if n > MAX_SPINS:
        raise SizeLimitError(f"{n} spins exceeds the {MAX_SPINS}-spin simulation bound")
    _check_schedule(schedule)

    dim = 1 << n
    psi = np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128)
    energies = classical_energies(model)
    diagonal = energies - model.offset
    dt = schedule.total_time / schedule.num_steps
    for step in range(schedule.num_steps):
        s_mid = float(schedule.s_of_u((step + 0.5) / schedule.num_steps))
        half_angle = 0.5 * (1.0 - s_mid) * dt
        psi = _apply_driver_rotation(psi, half_angle, n)
        psi = psi * np.exp(-1j * s_mid * dt * diagonal)
        psi = _apply_driver_rotation(psi, half_angle, n)

    norm_error = abs(float(np.sum(np.abs(psi) ** 2)) - 1.0)
    success = _ground_state_mass(psi, energies)
    return AnnealResult(final_state=psi, success_probability=success, norm_error=norm_error)


def success_probability(result: AnnealResult, model: IsingModel) -> float:
    """Probability mass on the exact classical ground-state manifold."""
    return _ground_state_mass(result.final_state, classical_energies(model))


def _ground_state_mass(psi: np.ndarray, energies: np.ndarray) -> float:
    probabilities = np.abs(psi) ** 2
    minimum = energies.min()
    tolerance = 1e-9 * max(1.0, abs(minimum))
    return float(probabilities[energies <= minimum + tolerance].sum())


def _apply_driver_rotation(psi: np.ndarray, angle: float, num_spins: int) -> np.ndarray:
    """Apply exp(i * angle * sigma_x) on every spin (the -sigma_x driver propagator)."""
    c = math.cos(angle)
    s = 1j * math.sin(angle)
    for i in range(num_spins):
        view = psi.reshape(-1, 2, 1 << i)
        lower = view[:, 0, :].copy()
        upper = view[:, 1, :]
        view[:, 0, :] = c * lower + s * upper
        view[:, 1, :] = s * lower + c * upper
        psi = view.reshape(-1)
    return psi


def _check_schedule(schedule: AnnealSchedule) -> None:
    s = schedule.s_of_u
    if float(s(0.0)) != 0.0 or float(s(1.0)) != 1.0:
        raise ValidationError("schedule must satisfy s(0) = 0 and s(1) = 1")
    grid = np.linspace(0.0, 1.0, max(1001, schedule.num_steps + 1))
    values = np.array([float(s(u)) for u in grid])
    if np.any(np.diff(values) < 0):
        raise ValidationError("schedule s(u) must be non-decreasing")
