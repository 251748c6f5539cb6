"""Numba kernels for the samplers.

All randomness comes from a splitmix64 stream seeded per (seed, stream)
pair, so every read owns its own counter-derived stream and results are
bit-identical no matter how reads are scheduled. Kernels release the GIL;
arrays passed in are never written except for explicit state buffers.
"""

import os

os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

import numpy as np
from numba import njit, prange

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_ONE = np.uint64(1)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / float(1 << 53)


@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(inline="always")
def _stream_state(seed, stream):
    return _mix64(seed ^ ((stream + _ONE) * _GOLDEN))


@njit(inline="always")
def _next_u64(state):
    state = state + _GOLDEN
    return state, _mix64(state)


@njit(inline="always")
def _next_uniform(state):
    state, value = _next_u64(state)
    return state, float(value >> _S11) * _INV53


@njit(cache=True, nogil=True)
def random_bits(n, seed, stream):
    state = _stream_state(np.uint64(seed), np.uint64(stream))
    x = np.empty(n, dtype=np.int8)
    for i in range(n):
        state, value = _next_u64(state)
        x[i] = np.int8(value & _ONE)
    return x


@njit(cache=True, nogil=True)
def assignment_energy(w, h, offset, x):
    """Energy from scratch; the authoritative value stored on samples."""
    energy = offset
    n = x.size
    for i in range(n):
        if x[i]:
            energy += h[i]
            for j in range(i + 1, n):
                if x[j]:
                    energy += w[i, j]
    return energy


@njit(cache=True, nogil=True, parallel=True)
def sa_sweep_kernel(w, h, offset, num_reads, sweeps, beta0, beta1, seed):
    """Independent Metropolis single-flip anneals under a geometric beta ramp."""
    n = h.size
    bits = np.empty((num_reads, n), dtype=np.int8)
    energies = np.empty(num_reads, dtype=np.float64)
    if sweeps > 1:
        ratio = (beta1 / beta0) ** (1.0 / (sweeps - 1))
    else:
        ratio = 1.0
    for r in prange(num_reads):
        state = _stream_state(np.uint64(seed), np.uint64(r))
        x = np.empty(n, dtype=np.int8)
        for i in range(n):
            state, value = _next_u64(state)
            x[i] = np.int8(value & _ONE)
        # Local fields: g[i] is the energy change of setting bit i from 0.
        g = h.copy()
        for i in range(n):
            if x[i]:
                for j in range(n):
                    g[j] += w[j, i]
        beta = beta0
        for _ in range(sweeps):
            for i in range(n):
                delta = (1.0 - 2.0 * x[i]) * g[i]
                accept = delta <= 0.0
                if not accept:
                    state, u = _next_uniform(state)
                    accept = u < np.exp(-beta * delta)
                if accept:
                    if x[i] == 0:
                        x[i] = 1
                        sign = 1.0
                    else:
                        x[i] = 0
                        sign = -1.0
                    for j in range(n):
                        g[j] += sign * w[i, j]
            beta *= ratio
        bits[r] = x
        energies[r] = assignment_energy(w, h, offset, x)
    return bits, energies


@njit(cache=True, nogil=True)
def tabu_step_kernel(w, h, x, g, tabu_until, step_lo, step_hi, tenure, cur_energy, best_energy, best_x):
    """Steepest-descent single-flip tabu steps in [step_lo, step_hi).

    Mutates x, g, tabu_until, and best_x in place. A tabu move is admitted
    only when it would beat the incumbent (aspiration). Returns the updated
    current and best energies plus the number of steps actually taken.
    """
    n = x.size
    taken = 0
    for step in range(step_lo, step_hi):
        best_delta = np.inf
        move = -1
        for i in range(n):
            delta = (1.0 - 2.0 * x[i]) * g[i]
            if step < tabu_until[i] and not (cur_energy + delta < best_energy - 1e-12):
                continue
            if delta < best_delta:
                best_delta = delta
                move = i
        if move < 0:
            break
        if x[move] == 0:
            x[move] = 1
            sign = 1.0
        else:
            x[move] = 0
            sign = -1.0
        for j in range(n):
            g[j] += sign * w[move, j]
        cur_energy += best_delta
        tabu_until[move] = step + 1 + tenure
        taken += 1
        if cur_energy < best_energy:
            best_energy = cur_energy
            for j in range(n):
                best_x[j] = x[j]
    return cur_energy, best_energy, taken


@njit(cache=True, nogil=True)
def exhaustive_min_kernel(w, h, offset):
    """Global minimum over all assignments by a Gray-code walk.

    Ties on exactly equal energy resolve to the lexicographically smallest
    bit vector.
    """
    n = h.size
    x = np.zeros(n, dtype=np.int8)
    g = h.copy()
    energy = offset
    best_energy = energy
    best_x = x.copy()
    total = np.int64(1) << np.int64(n)
    for k in range(1, total):
        kk = k
        flip = 0
        while kk & 1 == 0:
            kk >>= 1
            flip += 1
        delta = (1.0 - 2.0 * x[flip]) * g[flip]
        if x[flip] == 0:
            x[flip] = 1
            sign = 1.0
        else:
            x[flip] = 0
            sign = -1.0
        for j in range(n):
            g[j] += sign * w[flip, j]
        energy += delta
        if energy < best_energy:
            best_energy = energy
            for j in range(n):
                best_x[j] = x[j]
        elif energy == best_energy:
            for j in range(n):
                if x[j] != best_x[j]:
                    if x[j] < best_x[j]:
                        for m in range(n):
                            best_x[m] = x[m]
                    break
    return best_x, best_energy
