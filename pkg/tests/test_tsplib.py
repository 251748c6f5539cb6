import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tspqubo.errors import ParseError, StructureError, UnsupportedFeatureError, ValidationError
from tspqubo.tsplib import (
    ProblemKind,
    Tour,
    euc2d_distance,
    geo_distance,
    parse_instance,
    rotate_to_start,
    tour_length,
    validate_tour,
)

BURMA14_OPT = (1, 2, 14, 3, 4, 5, 6, 12, 7, 13, 8, 11, 9, 10)
ULYSSES16_OPT = (1, 8, 4, 2, 3, 16, 10, 9, 11, 5, 15, 6, 7, 12, 13, 14)


def test_parse_burma14(burma14):
    assert burma14.name == "burma14"
    assert burma14.kind is ProblemKind.SYMMETRIC
    assert burma14.dimension == 14
    assert burma14.weight_type == "GEO"
    assert burma14.distances.shape == (14, 14)


def test_parse_br17_asymmetric(br17):
    assert br17.kind is ProblemKind.ASYMMETRIC
    assert br17.dimension == 17
    # diagonal entries are carried verbatim even though they are never used
    assert (np.diag(br17.distances) == 9999).all()
    # zero distances between distinct cities are legal
    off = br17.off_diagonal()
    assert (off == 0).any()
    assert off.min() == 0


def test_parse_full_matrix_of_ones():
    text = "\n".join(
        [
            "NAME: ones3",
            "TYPE: TSP",
            "DIMENSION: 3",
            "EDGE_WEIGHT_TYPE: EXPLICIT",
            "EDGE_WEIGHT_FORMAT: FULL_MATRIX",
            "EDGE_WEIGHT_SECTION",
            "0 1 1",
            "1 0 1",
            "1 1 0",
            "EOF",
        ]
    )
    inst = parse_instance(text)
    off = ~np.eye(3, dtype=bool)
    assert (inst.distances[off] == 1).all()


def test_symmetric_instances_have_symmetric_matrices(burma14, gr17, ulysses22):
    for inst in (burma14, gr17, ulysses22):
        assert np.array_equal(inst.distances, inst.distances.T)


def test_geo_distance_identical_coordinates_is_zero():
    assert geo_distance((16.47, 96.10), (16.47, 96.10)) == 0


def test_geo_burma14_optimal_tour(burma14):
    assert tour_length(burma14, BURMA14_OPT) == 3323


def test_geo_ulysses16_optimal_tour(ulysses16):
    assert tour_length(ulysses16, ULYSSES16_OPT) == 6859


def test_euc2d_examples():
    assert euc2d_distance((0.0, 0.0), (0.0, 0.0)) == 0
    assert euc2d_distance((0.0, 0.0), (3.0, 4.0)) == 5
    # sqrt(2) rounds down to 1
    assert euc2d_distance((0.0, 0.0), (1.0, 1.0)) == 1


def test_tour_length_directed_ring(ring4):
    assert tour_length(ring4, (1, 2, 3, 4)) == 4
    assert tour_length(ring4, (1, 4, 3, 2)) == 40


def test_tour_length_rejects_non_permutation(ring4):
    with pytest.raises(ValidationError):
        tour_length(ring4, (1, 2, 2, 4))


def test_reversal_preserves_length_on_symmetric(ulysses16):
    reverse = (1,) + tuple(reversed(ULYSSES16_OPT[1:]))
    assert tour_length(ulysses16, reverse) == 6859


def test_validate_tour(ring4):
    assert validate_tour(ring4, (1, 2, 3, 4)).valid
    check = validate_tour(ring4, (1, 2, 2, 4))
    assert not check.valid
    assert "duplicate city 2" in check.violation
    check = validate_tour(ring4, (2, 1, 3, 4))
    assert not check.valid
    assert "city 1" in check.violation
    assert not validate_tour(ring4, (1, 2, 3)).valid
    assert not validate_tour(ring4, (1, 2, 3, 9)).valid


def test_tour_from_order_requires_fixed_start(ring4):
    with pytest.raises(ValidationError):
        Tour.from_order(ring4, (2, 3, 4, 1))
    tour = Tour.from_order(ring4, (1, 2, 3, 4))
    assert tour.length == 4


def test_malformed_header_names_line():
    with pytest.raises(ParseError, match="line 2"):
        parse_instance("NAME: x\nGIBBERISH WITHOUT COLON\n")


def test_unknown_keyword_rejected():
    with pytest.raises(ParseError, match="SPECIAL"):
        parse_instance("NAME: x\nSPECIAL: thing\n")


def test_dimension_mismatch_is_structural():
    text = "\n".join(
        [
            "NAME: short",
            "TYPE: TSP",
            "DIMENSION: 3",
            "EDGE_WEIGHT_TYPE: EXPLICIT",
            "EDGE_WEIGHT_FORMAT: FULL_MATRIX",
            "EDGE_WEIGHT_SECTION",
            "0 1 1 1 0 1",
            "EOF",
        ]
    )
    with pytest.raises(StructureError):
        parse_instance(text)


def test_unsupported_weight_type_named():
    text = "NAME: x\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: ATT\nNODE_COORD_SECTION\n1 0 0\n2 1 0\n3 0 1\nEOF\n"
    with pytest.raises(UnsupportedFeatureError, match="ATT"):
        parse_instance(text)


def test_unsupported_section_named():
    text = "NAME: x\nTYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: GEO\nDISPLAY_DATA_SECTION\n"
    with pytest.raises(UnsupportedFeatureError, match="DISPLAY_DATA_SECTION"):
        parse_instance(text)


def test_atsp_with_triangular_format_rejected():
    text = "\n".join(
        [
            "NAME: bad",
            "TYPE: ATSP",
            "DIMENSION: 3",
            "EDGE_WEIGHT_TYPE: EXPLICIT",
            "EDGE_WEIGHT_FORMAT: LOWER_DIAG_ROW",
            "EDGE_WEIGHT_SECTION",
            "0 1 0 1 1 0",
            "EOF",
        ]
    )
    with pytest.raises(UnsupportedFeatureError):
        parse_instance(text)


def _render_explicit(matrix, fmt):
    n = matrix.shape[0]
    if fmt == "FULL_MATRIX":
        values = [matrix[i, j] for i in range(n) for j in range(n)]
    elif fmt == "LOWER_DIAG_ROW":
        values = [matrix[i, j] for i in range(n) for j in range(i + 1)]
    elif fmt == "UPPER_DIAG_ROW":
        values = [matrix[i, j] for i in range(n) for j in range(i, n)]
    elif fmt == "UPPER_ROW":
        values = [matrix[i, j] for i in range(n) for j in range(i + 1, n)]
    else:
        raise AssertionError(fmt)
    body = " ".join(str(int(v)) for v in values)
    return "\n".join(
        [
            "NAME: roundtrip",
            "TYPE: TSP",
            f"DIMENSION: {n}",
            "EDGE_WEIGHT_TYPE: EXPLICIT",
            f"EDGE_WEIGHT_FORMAT: {fmt}",
            "EDGE_WEIGHT_SECTION",
            body,
            "EOF",
        ]
    )


@settings(max_examples=40, deadline=None)
@given(
    st.integers(3, 8).flatmap(
        lambda n: st.lists(st.integers(0, 500), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2)
    ),
    st.sampled_from(["FULL_MATRIX", "LOWER_DIAG_ROW", "UPPER_DIAG_ROW", "UPPER_ROW"]),
)
def test_explicit_format_roundtrip(upper_values, fmt):
    count = len(upper_values)
    n = int((1 + (1 + 8 * count) ** 0.5) / 2)
    matrix = np.zeros((n, n), dtype=np.int64)
    it = iter(upper_values)
    for i in range(n):
        for j in range(i + 1, n):
            matrix[i, j] = matrix[j, i] = next(it)
    parsed = parse_instance(_render_explicit(matrix, fmt))
    assert np.array_equal(parsed.distances, matrix)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(4, 8))
def test_rotation_invariance(seed, n):
    rng = np.random.default_rng(seed)
    from conftest import random_instance

    inst = random_instance(rng, n, symmetric=False)
    order = tuple(rng.permutation(np.arange(1, n + 1)).tolist())
    anchored = rotate_to_start(order)
    assert tour_length(inst, order) == tour_length(inst, anchored)
    assert anchored[0] == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(4, 8))
def test_reversal_invariance_symmetric(seed, n):
    rng = np.random.default_rng(seed)
    from conftest import random_instance

    inst = random_instance(rng, n, symmetric=True)
    order = (1,) + tuple(rng.permutation(np.arange(2, n + 1)).tolist())
    reverse = (1,) + tuple(reversed(order[1:]))
    assert tour_length(inst, order) == tour_length(inst, reverse)
