"""TSPLIB95 parsing, distance functions, and tour arithmetic.

Covers the subset of TSPLIB95 needed here: GEO and EUC_2D coordinate
problems plus EXPLICIT matrices in FULL_MATRIX, LOWER_DIAG_ROW, UPPER_ROW,
and UPPER_DIAG_ROW layouts. Everything else is rejected loudly so that a
silently wrong distance can never leak into a benchmark.

City labels are 1-based at this boundary and in all printed output;
matrices are 0-based internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ParseError, StructureError, UnsupportedFeatureError, ValidationError

# TSPLIB95's reference code uses this truncated value of pi for GEO
# conversions. Using math.pi shifts some distances by one unit and breaks
# the published optimal lengths.
_GEO_PI = 3.141592
_GEO_EARTH_RADIUS_KM = 6378.388

SUPPORTED_WEIGHT_TYPES = ("GEO", "EUC_2D", "EXPLICIT")
SUPPORTED_WEIGHT_FORMATS = ("FULL_MATRIX", "LOWER_DIAG_ROW", "UPPER_ROW", "UPPER_DIAG_ROW")

# Display-only keywords that carry no distance semantics and are safe to skip.
_BENIGN_KEYS = frozenset({"COMMENT", "DISPLAY_DATA_TYPE", "NODE_COORD_TYPE"})
_HEADER_KEYS = frozenset({"NAME", "TYPE", "DIMENSION", "EDGE_WEIGHT_TYPE", "EDGE_WEIGHT_FORMAT"}) | _BENIGN_KEYS
_SECTION_KEYS = frozenset({"NODE_COORD_SECTION", "EDGE_WEIGHT_SECTION"})
_UNSUPPORTED_SECTIONS = frozenset(
    {"DISPLAY_DATA_SECTION", "FIXED_EDGES_SECTION", "DEPOT_SECTION", "DEMAND_SECTION", "TOUR_SECTION"}
)


class ProblemKind(Enum):
    SYMMETRIC = "TSP"
    ASYMMETRIC = "ATSP"


@dataclass(frozen=True)
class Instance:
    """A parsed instance with a fully materialized distance matrix.

    ``distances[i][j]`` is the directed distance from city i+1 to city j+1.
    Diagonal entries are carried verbatim from the source file (br17 stores
    9999 there) but are never used by any computation.
    """

    name: str
    kind: ProblemKind
    dimension: int
    distances: np.ndarray
    weight_type: str

    def __post_init__(self) -> None:
        self.distances.setflags(write=False)

    def distance(self, city_i: int, city_j: int) -> int:
        """Directed distance between 1-based city labels."""
        return int(self.distances[city_i - 1, city_j - 1])

    def off_diagonal(self) -> np.ndarray:
        mask = ~np.eye(self.dimension, dtype=bool)
        return self.distances[mask]


@dataclass(frozen=True)
class Tour:
    """A fixed-start tour: a permutation of 1..N beginning at city 1."""

    order: tuple[int, ...]
    length: int

    @classmethod
    def from_order(cls, instance: Instance, order) -> "Tour":
        order = tuple(int(c) for c in order)
        if order and order[0] != 1:
            raise ValidationError(f"tour must start at city 1, got {order[0]}")
        return cls(order=order, length=tour_length(instance, order))


@dataclass(frozen=True)
class TourCheck:
    valid: bool
    violation: str | None = None


def geo_distance(coord_i: tuple[float, float], coord_j: tuple[float, float]) -> int:
    """TSPLIB95 geographic distance between two DDD.MM latitude/longitude pairs.

    Degrees are truncated toward zero, minutes scaled by 5/3, and the great
    circle arc on a 6378.388 km sphere is truncated to an integer after
    adding 1.0. Identical coordinates map to 0.
    """
    if coord_i == coord_j:
        return 0
    lat_i, lon_i = (_geo_radians(v) for v in coord_i)
    lat_j, lon_j = (_geo_radians(v) for v in coord_j)
    q1 = math.cos(lon_i - lon_j)
    q2 = math.cos(lat_i - lat_j)
    q3 = math.cos(lat_i + lat_j)
    arg = 0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)
    arg = max(-1.0, min(1.0, arg))
    return int(_GEO_EARTH_RADIUS_KM * math.acos(arg) + 1.0)


def _geo_radians(value: float) -> float:
    degrees = math.trunc(value)
    minutes = value - degrees
    return _GEO_PI * (degrees + 5.0 * minutes / 3.0) / 180.0


def euc2d_distance(point_i: tuple[float, float], point_j: tuple[float, float]) -> int:
    """Planar Euclidean distance rounded to the nearest integer."""
    dx = point_i[0] - point_j[0]
    dy = point_i[1] - point_j[1]
    return int(math.sqrt(dx * dx + dy * dy) + 0.5)


_COORD_DISTANCE = {"GEO": geo_distance, "EUC_2D": euc2d_distance}


def tour_length(instance: Instance, order) -> int:
    """Length of the closed tour visiting ``order``, using directed distances."""
    order = tuple(int(c) for c in order)
    n = instance.dimension
    if sorted(order) != list(range(1, n + 1)):
        raise ValidationError(f"order is not a permutation of 1..{n}: {order}")
    d = instance.distances
    total = 0
    for a, b in zip(order, order[1:]):
        total += int(d[a - 1, b - 1])
    total += int(d[order[-1] - 1, order[0] - 1])
    return total


def validate_tour(instance: Instance, order) -> TourCheck:
    """Check that ``order`` is a fixed-start tour; violations are returned, not raised."""
    order = tuple(int(c) for c in order)
    n = instance.dimension
    if len(order) != n:
        return TourCheck(False, f"expected {n} cities, got {len(order)}")
    for c in order:
        if not 1 <= c <= n:
            return TourCheck(False, f"city label {c} outside 1..{n}")
    seen: set[int] = set()
    for c in order:
        if c in seen:
            return TourCheck(False, f"duplicate city {c}")
        seen.add(c)
    if order[0] != 1:
        return TourCheck(False, "city 1 not in position 1")
    return TourCheck(True)


def rotate_to_start(order) -> tuple[int, ...]:
    """Rotate a cyclic order so that city 1 comes first."""
    order = tuple(int(c) for c in order)
    if 1 not in order:
        raise ValidationError("order does not contain city 1")
    k = order.index(1)
    return order[k:] + order[:k]


def parse_instance(text: str) -> Instance:
    """Parse the contents of a TSPLIB95 file into an :class:`Instance`."""
    header: dict[str, str] = {}
    coords: list[tuple[float, float] | None] | None = None
    weights: list[int] | None = None

    lines = text.splitlines()
    pos = 0

    def fail(kind, message, lineno=None):
        where = f" (line {lineno})" if lineno is not None else ""
        raise kind(f"{message}{where}")

    while pos < len(lines):
        lineno = pos + 1
        line = lines[pos].strip()
        pos += 1
        if not line:
            continue
        token = line.rstrip(":").strip().upper()
        if token == "EOF":
            break
        if token in _UNSUPPORTED_SECTIONS:
            fail(UnsupportedFeatureError, f"unsupported section {token}", lineno)
        if token == "NODE_COORD_SECTION":
            coords, pos = _read_coords(lines, pos, header, fail)
            continue
        if token == "EDGE_WEIGHT_SECTION":
            weights, pos = _read_weights(lines, pos, header, fail)
            continue
        key, sep, value = line.partition(":")
        key = key.strip().upper()
        if not sep:
            fail(ParseError, f"expected 'KEY: value' or a section name, got {line!r}", lineno)
        if key not in _HEADER_KEYS:
            fail(ParseError, f"unknown keyword {key}", lineno)
        header[key] = value.strip()

    return _build_instance(header, coords, weights, fail)


def load_instance(path) -> Instance:
    """Read and parse a TSPLIB95 file from disk."""
    return parse_instance(Path(path).read_text())


def _required_dimension(header, fail) -> int:
    raw = header.get("DIMENSION")
    if raw is None:
        fail(StructureError, "DIMENSION must appear before any data section")
    try:
        return int(raw)
    except ValueError:
        fail(ParseError, f"DIMENSION is not an integer: {raw!r}")


def _read_coords(lines, pos, header, fail):
    n = _required_dimension(header, fail)
    coords: list[tuple[float, float] | None] = [None] * n
    read = 0
    while read < n:
        if pos >= len(lines):
            fail(StructureError, f"NODE_COORD_SECTION ended after {read} of {n} entries")
        lineno = pos + 1
        line = lines[pos].strip()
        pos += 1
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            fail(ParseError, f"expected 'index x y', got {line!r}", lineno)
        try:
            idx = int(parts[0])
            x, y = float(parts[1]), float(parts[2])
        except ValueError:
            fail(ParseError, f"non-numeric coordinate entry {line!r}", lineno)
        if not 1 <= idx <= n:
            fail(StructureError, f"node index {idx} outside 1..{n}", lineno)
        if coords[idx - 1] is not None:
            fail(StructureError, f"duplicate node index {idx}", lineno)
        coords[idx - 1] = (x, y)
        read += 1
    return coords, pos


_WEIGHT_COUNTS = {
    "FULL_MATRIX": lambda n: n * n,
    "LOWER_DIAG_ROW": lambda n: n * (n + 1) // 2,
    "UPPER_DIAG_ROW": lambda n: n * (n + 1) // 2,
    "UPPER_ROW": lambda n: n * (n - 1) // 2,
}


def _read_weights(lines, pos, header, fail):
    n = _required_dimension(header, fail)
    fmt = header.get("EDGE_WEIGHT_FORMAT", "").upper()
    if not fmt:
        fail(ParseError, "EDGE_WEIGHT_SECTION requires an EDGE_WEIGHT_FORMAT header")
    if fmt not in SUPPORTED_WEIGHT_FORMATS:
        fail(UnsupportedFeatureError, f"unsupported EDGE_WEIGHT_FORMAT {fmt}")
    needed = _WEIGHT_COUNTS[fmt](n)
    values: list[int] = []
    while len(values) < needed:
        if pos >= len(lines):
            fail(StructureError, f"EDGE_WEIGHT_SECTION has {len(values)} values, expected {needed}")
        lineno = pos + 1
        line = lines[pos].strip()
        pos += 1
        if not line:
            continue
        if line.rstrip(":").strip().upper() in _SECTION_KEYS | _UNSUPPORTED_SECTIONS | {"EOF"}:
            fail(StructureError, f"EDGE_WEIGHT_SECTION has {len(values)} values, expected {needed}", lineno)
        for tok in line.split():
            try:
                values.append(int(tok))
            except ValueError:
                fail(ParseError, f"non-integer matrix entry {tok!r}", lineno)
        if len(values) > needed:
            fail(StructureError, f"EDGE_WEIGHT_SECTION has more than {needed} values", lineno)
    return values, pos


def _build_instance(header, coords, weights, fail) -> Instance:
    name = header.get("NAME")
    if not name:
        fail(ParseError, "missing NAME header")
    raw_type = header.get("TYPE", "").upper()
    try:
        kind = ProblemKind(raw_type)
    except ValueError:
        fail(UnsupportedFeatureError, f"unsupported TYPE {raw_type or '(missing)'}; expected TSP or ATSP")
    n = _required_dimension(header, fail)
    if n < 3:
        fail(StructureError, f"DIMENSION must be at least 3, got {n}")
    weight_type = header.get("EDGE_WEIGHT_TYPE", "").upper()
    if weight_type not in SUPPORTED_WEIGHT_TYPES:
        fail(UnsupportedFeatureError, f"unsupported EDGE_WEIGHT_TYPE {weight_type or '(missing)'}")

    if weight_type in _COORD_DISTANCE:
        if coords is None:
            fail(StructureError, f"{weight_type} instance has no NODE_COORD_SECTION")
        if weights is not None:
            fail(StructureError, f"{weight_type} instance must not carry an EDGE_WEIGHT_SECTION")
        if kind is ProblemKind.ASYMMETRIC:
            fail(StructureError, "coordinate distances are symmetric; TYPE: ATSP is contradictory")
        matrix = _matrix_from_coords(coords, weight_type)
    else:
        if weights is None:
            fail(StructureError, "EXPLICIT instance has no EDGE_WEIGHT_SECTION")
        if coords is not None:
            fail(StructureError, "EXPLICIT instance must not carry a NODE_COORD_SECTION")
        fmt = header["EDGE_WEIGHT_FORMAT"].upper()
        if kind is ProblemKind.ASYMMETRIC and fmt != "FULL_MATRIX":
            fail(UnsupportedFeatureError, f"{fmt} cannot encode an asymmetric instance")
        matrix = _expand_weights(weights, n, fmt)
        if kind is ProblemKind.SYMMETRIC:
            off = ~np.eye(n, dtype=bool)
            if not np.array_equal(matrix.T[off], matrix[off]):
                fail(StructureError, "TYPE: TSP but FULL_MATRIX weights are not symmetric")

    off = ~np.eye(n, dtype=bool)
    if (matrix[off] < 0).any():
        fail(StructureError, "negative off-diagonal distance")

    return Instance(name=name, kind=kind, dimension=n, distances=matrix, weight_type=weight_type)


def _matrix_from_coords(coords, weight_type) -> np.ndarray:
    dist = _COORD_DISTANCE[weight_type]
    n = len(coords)
    matrix = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            matrix[i, j] = matrix[j, i] = dist(coords[i], coords[j])
    return matrix


def _expand_weights(values, n, fmt) -> np.ndarray:
    matrix = np.zeros((n, n), dtype=np.int64)
    it = iter(values)
    if fmt == "FULL_MATRIX":
        for i in range(n):
            for j in range(n):
                matrix[i, j] = next(it)
    elif fmt == "LOWER_DIAG_ROW":
        for i in range(n):
            for j in range(i + 1):
                v = next(it)
                matrix[i, j] = matrix[j, i] = v
    elif fmt == "UPPER_DIAG_ROW":
        for i in range(n):
            for j in range(i, n):
                v = next(it)
                matrix[i, j] = matrix[j, i] = v
    elif fmt == "UPPER_ROW":
        for i in range(n):
            for j in range(i + 1, n):
                v = next(it)
                matrix[i, j] = matrix[j, i] = v
    else:  # pragma: no cover - guarded by the caller
        raise AssertionError(fmt)
    return matrix
