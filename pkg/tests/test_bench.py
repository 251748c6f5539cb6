import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numba import njit

from conftest import make_instance
from tspqubo import bench
from tspqubo.bench import (
    CSV_COLUMNS,
    REGISTRY,
    RegistryEntry,
    emit_report,
    error_percent,
    format_error_percent,
    instance_available,
    load_registry_instance,
    registry_self_check,
    run_benchmark,
)
from tspqubo.errors import ValidationError
from tspqubo.samplers import SamplerConfig, brute_force_tsp
from tspqubo.tsplib import ProblemKind, tour_length


@njit(cache=True)
def held_karp(dist):
    """Independent exact-optimum oracle for registry certification."""
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


def test_registry_self_check_runs():
    registry_self_check()


def test_registry_tours_evaluate_exactly():
    for name in ("burma14", "ulysses16"):
        entry = REGISTRY[name]
        instance = load_registry_instance(name)
        assert tour_length(instance, entry.optimal_tour) == entry.optimal_length


@pytest.mark.parametrize("name", ["burma14", "ulysses16", "gr17", "br17"])
def test_registry_optimum_certified_by_held_karp(name):
    entry = REGISTRY[name]
    instance = load_registry_instance(name)
    assert int(held_karp(instance.distances)) == entry.optimal_length


def test_registry_ulysses22_certified_by_held_karp(ulysses22):
    # 2^21 x 21 dynamic program; a few seconds, worth it for data integrity
    assert int(held_karp(ulysses22.distances)) == 7013


def test_error_percent_paper_rows():
    assert error_percent(3545, 3323) == pytest.approx(6.68, abs=0.005)
    assert format_error_percent(error_percent(3545, 3323)) == "6.7"
    assert error_percent(2374, 2085) == pytest.approx(13.86, abs=0.005)
    assert format_error_percent(error_percent(2374, 2085)) == "13.9"
    assert format_error_percent(error_percent(1987, 1286)) == "54.5"
    assert error_percent(100, 100) == 0.0


def test_error_percent_domain():
    with pytest.raises(ValidationError):
        error_percent(10, 0)
    with pytest.raises(ValidationError):
        error_percent(10, -5)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10_000), st.integers(0, 500), st.integers(1, 100))
def test_error_percent_strictly_increasing(optimal, above, step):
    lower = error_percent(optimal + above, optimal)
    higher = error_percent(optimal + above + step, optimal)
    assert higher > lower


def test_unknown_instance_rejected():
    with pytest.raises(ValidationError, match="nowhere9"):
        run_benchmark(["nowhere9"], solver="exact", repetitions=1, seed=0)


def test_unknown_solver_rejected():
    with pytest.raises(ValidationError, match="quantum"):
        run_benchmark(["burma14"], solver="quantum", repetitions=1, seed=0)


def test_instance_available():
    assert instance_available("burma14")
    assert not instance_available("ftv33") or load_registry_instance("ftv33").dimension == 34


@pytest.fixture
def toy_registry(tmp_path, monkeypatch, ring4):
    """A 5-city synthetic instance wired into the registry for end-to-end runs."""
    rng = np.random.default_rng(123)
    d = rng.integers(10, 60, size=(5, 5))
    d = np.triu(d, 1)
    d = d + d.T
    inst = make_instance("toy5", d)
    optimum = brute_force_tsp(inst)
    lines = ["NAME: toy5", "TYPE: TSP", "DIMENSION: 5", "EDGE_WEIGHT_TYPE: EXPLICIT", "EDGE_WEIGHT_FORMAT: FULL_MATRIX", "EDGE_WEIGHT_SECTION"]
    for row in inst.distances:
        lines.append(" ".join(str(int(v)) for v in row))
    lines.append("EOF")
    (tmp_path / "toy5.tsp").write_text("\n".join(lines) + "\n")
    entry = RegistryEntry("toy5", optimum.length, ProblemKind.SYMMETRIC, "toy5.tsp")
    monkeypatch.setitem(bench.REGISTRY, "toy5", entry)
    return tmp_path, optimum


def test_exact_solver_reports_zero_error(toy_registry):
    data_dir, _ = toy_registry
    reports = run_benchmark(["toy5"], solver="exact", repetitions=2, seed=5, data_dir=data_dir)
    (report,) = reports
    assert report.error_percent == 0.0
    assert report.feasible_runs == 2
    assert report.best_length == report.optimal_length


def test_hybrid_solver_on_toy_registry(toy_registry):
    data_dir, optimum = toy_registry
    reports = run_benchmark(["toy5"], solver="hybrid", repetitions=2, seed=5, data_dir=data_dir)
    (report,) = reports
    assert report.feasible_runs == 2
    assert report.best_length == optimum.length


def test_sa_and_tabu_solvers_on_toy_registry(toy_registry):
    data_dir, optimum = toy_registry
    for solver in ("sa", "tabu"):
        (report,) = run_benchmark(["toy5"], solver=solver, repetitions=2, seed=5, data_dir=data_dir)
        assert report.feasible_runs >= 1
        assert report.best_length is not None
        assert report.best_length >= optimum.length


def test_infeasible_only_runs_produce_empty_error(ulysses22):
    # one sweep on 441 variables cannot stumble into a permutation
    config = SamplerConfig(seed=0, num_reads=10, sweeps=1)
    reports = run_benchmark(["ulysses22"], solver="sa", repetitions=2, seed=11, sampler_config=config)
    (report,) = reports
    assert report.feasible_runs == 0
    assert report.best_length is None
    assert report.error_percent is None
    csv_text = emit_report(reports, "csv")
    row = csv_text.strip().splitlines()[1].split(",")
    assert row[2] == ""
    assert row[3] == ""


def test_emit_report_empty_rejected():
    with pytest.raises(ValidationError):
        emit_report([], "csv")
    with pytest.raises(ValidationError):
        emit_report([_dummy_report()], "yaml")


def _dummy_report(**overrides):
    base = dict(
        instance="burma14",
        solver="hybrid",
        config_digest="cafecafecafe",
        seed=7,
        optimal_length=3323,
        best_length=3545,
        error_percent=error_percent(3545, 3323),
        feasible_runs=6,
        total_runs=6,
        wall_time=1.25,
    )
    base.update(overrides)
    return bench.BenchmarkReport(**base)


def test_emit_csv_layout():
    text = emit_report([_dummy_report()], "csv")
    lines = text.strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    row = lines[1].split(",")
    assert row[0] == "burma14"
    assert row[1] == "3323"
    assert row[2] == "3545"
    assert row[3] == "6.7"
    assert row[8] == "1250"


def test_emit_table_rounds_error():
    text = emit_report([_dummy_report()], "table")
    assert "6.7" in text
    assert "burma14" in text


def test_emit_json_keeps_raw_double():
    payload = json.loads(emit_report([_dummy_report()], "json"))
    assert payload[0]["error_percent"] == pytest.approx(6.680710201625037)
    assert payload[0]["wall_ms"] == 1250


def test_csv_roundtrip_numeric_fields():
    report = _dummy_report()
    text = emit_report([report], "csv")
    row = text.strip().splitlines()[1].split(",")
    assert int(row[1]) == report.optimal_length
    assert int(row[2]) == report.best_length
    assert float(row[3]) == float(format_error_percent(report.error_percent))
    assert int(row[5]) == report.seed
    assert int(row[6]) == report.feasible_runs
    assert int(row[7]) == report.total_runs


def test_reports_reproducible_without_timing(toy_registry):
    data_dir, _ = toy_registry
    def run():
        reports = run_benchmark(["toy5"], solver="hybrid", repetitions=2, seed=9, data_dir=data_dir)
        return emit_report(reports, "csv", include_timing=False)

    assert run() == run()


def test_ftv33_registered_but_data_optional():
    entry = REGISTRY["ftv33"]
    assert entry.optimal_length == 1286
    assert entry.kind is ProblemKind.ASYMMETRIC
    if not instance_available("ftv33"):
        with pytest.raises(FileNotFoundError, match="ftv33"):
            load_registry_instance("ftv33")
