#!/usr/bin/env python3
"""Certify the bundled instance fixtures against independently known facts.

Each bundled TSPLIB file is checked with a Held-Karp dynamic program (an
exact oracle that shares no code with the samplers) plus structural
diagnostics of the distance matrix. Run after touching anything under
src/tspqubo/data/.
"""

import sys
import time
from pathlib import Path

import numpy as np
from numba import njit

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from tspqubo.tsplib import ProblemKind, load_instance, tour_length  # noqa: E402

DATA = Path(__file__).resolve().parents[1] / "src" / "tspqubo" / "data"

BURMA14_OPT_TOUR = (1, 2, 14, 3, 4, 5, 6, 12, 7, 13, 8, 11, 9, 10)
ULYSSES16_OPT_TOUR = (1, 8, 4, 2, 3, 16, 10, 9, 11, 5, 15, 6, 7, 12, 13, 14)


@njit(cache=True)
def held_karp(dist):
    """Exact fixed-start tour minimum by subset dynamic programming."""
    n = dist.shape[0]
    m = n - 1
    full = 1 << m
    inf = np.int64(1) << 40
    dp = np.full((full, m), inf, dtype=np.int64)
    for j in range(m):
        dp[1 << j, j] = dist[0, j + 1]
    for mask in range(1, full):
        for j in range(m):
            if not (mask >> j) & 1:
                continue
            cur = dp[mask, j]
            if cur >= inf:
                continue
            for k in range(m):
                if (mask >> k) & 1:
                    continue
                nxt = mask | (1 << k)
                cand = cur + dist[j + 1, k + 1]
                if cand < dp[nxt, k]:
                    dp[nxt, k] = cand
    best = inf
    for j in range(m):
        cand = dp[full - 1, j] + dist[j + 1, 0]
        if cand < best:
            best = cand
    return best


@njit(cache=True)
def count_optimal_tours(dist, optimum):
    """Number of directed fixed-start tours achieving the optimum."""
    n = dist.shape[0]
    m = n - 1
    full = 1 << m
    inf = np.int64(1) << 40
    dp = np.full((full, m), inf, dtype=np.int64)
    cnt = np.zeros((full, m), dtype=np.int64)
    for j in range(m):
        dp[1 << j, j] = dist[0, j + 1]
        cnt[1 << j, j] = 1
    for mask in range(1, full):
        for j in range(m):
            if not (mask >> j) & 1:
                continue
            cur = dp[mask, j]
            if cur >= inf:
                continue
            for k in range(m):
                if (mask >> k) & 1:
                    continue
                nxt = mask | (1 << k)
                cand = cur + dist[j + 1, k + 1]
                if cand < dp[nxt, k]:
                    dp[nxt, k] = cand
                    cnt[nxt, k] = cnt[mask, j]
                elif cand == dp[nxt, k]:
                    cnt[nxt, k] += cnt[mask, j]
    total = np.int64(0)
    for j in range(m):
        if dp[full - 1, j] + dist[j + 1, 0] == optimum:
            total += cnt[full - 1, j]
    return total


def check(label, got, want):
    ok = got == want
    print(f"  {'ok' if ok else 'FAIL'}  {label}: got {got}, want {want}")
    return ok


def main() -> int:
    all_ok = True

    specs = [
        ("burma14.tsp", ProblemKind.SYMMETRIC, 14, 3323),
        ("ulysses16.tsp", ProblemKind.SYMMETRIC, 16, 6859),
        ("gr17.tsp", ProblemKind.SYMMETRIC, 17, 2085),
        ("br17.atsp", ProblemKind.ASYMMETRIC, 17, 39),
        ("ulysses22.tsp", ProblemKind.SYMMETRIC, 22, 7013),
    ]
    for fname, kind, n, optimum in specs:
        print(f"{fname}:")
        inst = load_instance(DATA / fname)
        all_ok &= check("kind", inst.kind, kind)
        all_ok &= check("dimension", inst.dimension, n)
        t0 = time.perf_counter()
        hk = int(held_karp(inst.distances))
        dt = time.perf_counter() - t0
        all_ok &= check(f"Held-Karp optimum ({dt:.1f}s)", hk, optimum)
        off = inst.off_diagonal()
        print(f"       off-diagonal min {off.min()}, max {off.max()}")

    print("burma14 extras:")
    burma = load_instance(DATA / "burma14.tsp")
    all_ok &= check("known optimal tour length", tour_length(burma, BURMA14_OPT_TOUR), 3323)
    off = burma.off_diagonal()
    all_ok &= check("max - min distance", int(off.max() - off.min()), 1242)
    all_ok &= check("directed optimal tour count", int(count_optimal_tours(burma.distances, 3323)), 2)

    print("ulysses16 extras:")
    u16 = load_instance(DATA / "ulysses16.tsp")
    all_ok &= check("known optimal tour length", tour_length(u16, ULYSSES16_OPT_TOUR), 6859)
    all_ok &= check("max distance", int(u16.off_diagonal().max()), 2789)
    all_ok &= check("min distance", int(u16.off_diagonal().min()), 52)

    print("gr17 extras:")
    gr = load_instance(DATA / "gr17.tsp")
    all_ok &= check("max distance", int(gr.off_diagonal().max()), 745)
    all_ok &= check("min distance", int(gr.off_diagonal().min()), 27)

    print("br17 extras:")
    br = load_instance(DATA / "br17.atsp")
    all_ok &= check("max distance", int(br.off_diagonal().max()), 74)
    d = br.distances
    rows_with_zero = all((d[i][np.arange(17) != i] == 0).any() for i in range(17))
    cols_with_zero = all((d[np.arange(17) != j, j] == 0).any() for j in range(17))
    all_ok &= check("every row has a zero", rows_with_zero, True)
    all_ok &= check("every column has a zero", cols_with_zero, True)
    adjacent_identical = 0
    for i in range(16):
        mask = np.ones(17, dtype=bool)
        mask[i] = mask[i + 1] = False
        if np.array_equal(d[i][mask], d[i + 1][mask]):
            adjacent_identical += 1
    all_ok &= check("rows identical to their successor (off diagonal)", adjacent_identical, 5)

    print("ulysses22 extras:")
    u22 = load_instance(DATA / "ulysses22.tsp")
    all_ok &= check("max distance", int(u22.off_diagonal().max()), 2789)
    all_ok &= check("min distance", int(u22.off_diagonal().min()), 14)
    all_ok &= check(
        "first 16 cities match ulysses16",
        bool(np.array_equal(u22.distances[:16, :16], u16.distances)),
        True,
    )

    print("ALL OK" if all_ok else "FAILURES PRESENT")
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
