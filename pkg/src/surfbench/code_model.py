"""Rotated surface-code geometry for the bit-flip (X error / Z check) channel.

Conventions, fixed once so that every downstream artifact (shard ranges,
lookup tables, CSV files) is reproducible:

* Data qubits sit on a d x d grid at integer coordinates (row, col) and are
  indexed row-major: ``index = row * d + col``.
* Error patterns and syndromes are plain Python ints (or uint64 numpy
  arrays); bit ``i`` of an error is data qubit ``i`` (LSB = qubit 0), bit
  ``k`` of a syndrome is Z-check ``k``.
* Z-checks live on alternating plaquettes; the weight-2 Z-checks sit on the
  top and bottom boundaries, so X-error chains terminate on the left/right
  boundaries and the logical-Z support is the full first column.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class Classification(enum.Enum):
    """Outcome of applying a correction: what the residual error does."""

    SUCCESS = "success"
    LOGICAL_FAILURE = "logical_failure"
    SYNDROME_NONZERO = "syndrome_nonzero"


@dataclass(eq=False)
class SurfaceCode:
    """Distance-d rotated surface code, materialized for the X-error half.

    Immutable after construction; safe to share across workers.
    """

    distance: int
    num_data: int
    z_checks: tuple[tuple[int, ...], ...]
    parity_matrix: np.ndarray  # (num_checks, num_data) uint8
    logical_z_support: tuple[int, ...]
    data_coords: dict[int, tuple[int, int]]
    check_coords: dict[int, tuple[int, int]]
    boundary_checks: tuple[bool, ...]
    # Derived lookup machinery (built once, reused by the vectorized paths).
    logical_mask: int = 0
    _column_ints: np.ndarray = field(default=None, repr=False)
    _syndrome_tables: np.ndarray = field(default=None, repr=False)

    @property
    def num_checks(self) -> int:
        return len(self.z_checks)

    @property
    def num_syndromes(self) -> int:
        return 1 << self.num_checks

    @property
    def num_errors(self) -> int:
        return 1 << self.num_data


def build_code(distance: int) -> SurfaceCode:
    """Construct the distance-d rotated surface code (Z-check half).

    Rejects even or too-small distances. Construction is deterministic:
    the same distance always yields the identical index assignment.
    """
    if not isinstance(distance, int) or isinstance(distance, bool):
        raise ValueError(f"distance must be an integer, got {distance!r}")
    if distance < 3 or distance % 2 == 0:
        raise ValueError(
            f"distance must be an odd integer >= 3, got {distance}"
        )
    d = distance
    n = d * d

    def qubit(r: int, c: int) -> int:
        return r * d + c

    # Z-plaquette positions (R, C): interior squares plus top/bottom
    # half-plaquettes, on the (R + C) even checkerboard.  Scanned in a
    # fixed row-major order to pin the check indexing.
    checks: list[tuple[int, ...]] = []
    check_coords: dict[int, tuple[int, int]] = {}
    for plaq_row in range(-1, d):
        for plaq_col in range(0, d - 1):
            if (plaq_row + plaq_col) % 2 != 0:
                continue
            rows = [r for r in (plaq_row, plaq_row + 1) if 0 <= r < d]
            if not rows:
                continue
            support = tuple(
                sorted(qubit(r, c) for r in rows for c in (plaq_col, plaq_col + 1))
            )
            check_coords[len(checks)] = (plaq_row, plaq_col)
            checks.append(support)

    num_checks = len(checks)
    assert num_checks == (n - 1) // 2

    parity = np.zeros((num_checks, n), dtype=np.uint8)
    for k, support in enumerate(checks):
        parity[k, list(support)] = 1
    parity.setflags(write=False)

    # Boundary-adjacent checks: support touches the left or right data
    # column, where a single X error flips only one Z-check.
    boundary = tuple(
        any(q % d == 0 or q % d == d - 1 for q in support) for support in checks
    )

    logical = tuple(qubit(r, 0) for r in range(d))
    logical_mask = 0
    for q in logical:
        logical_mask |= 1 << q

    data_coords = {qubit(r, c): (r, c) for r in range(d) for c in range(d)}

    column_ints = np.zeros(n, dtype=np.uint32)
    for k, support in enumerate(checks):
        for q in support:
            column_ints[q] ^= np.uint32(1 << k)
    column_ints.setflags(write=False)

    tables = _build_syndrome_tables(column_ints, n)

    return SurfaceCode(
        distance=d,
        num_data=n,
        z_checks=tuple(checks),
        parity_matrix=parity,
        logical_z_support=logical,
        data_coords=data_coords,
        check_coords=check_coords,
        boundary_checks=boundary,
        logical_mask=logical_mask,
        _column_ints=column_ints,
        _syndrome_tables=tables,
    )


def _build_syndrome_tables(column_ints: np.ndarray, num_data: int) -> np.ndarray:
    """Per-byte XOR lookup tables: syndrome(e) = XOR of tables[b][byte b of e]."""
    nbytes = (num_data + 7) // 8
    tables = np.zeros((nbytes, 256), dtype=np.uint32)
    for b in range(nbytes):
        for v in range(1, 256):
            low = v & -v
            j = 8 * b + low.bit_length() - 1
            contrib = column_ints[j] if j < num_data else np.uint32(0)
            tables[b, v] = tables[b, v & (v - 1)] ^ contrib
    tables.setflags(write=False)
    return tables


def x_stabilizer_generators(code: SurfaceCode) -> list[tuple[int, ...]]:
    """X-check supports (the non-materialized half), built on demand.

    Used by tests to enumerate the X stabilizer group; the decoding path
    never needs them.
    """
    d = code.distance

    def qubit(r: int, c: int) -> int:
        return r * d + c

    gens: list[tuple[int, ...]] = []
    for plaq_row in range(0, d - 1):
        for plaq_col in range(-1, d):
            if (plaq_row + plaq_col) % 2 == 0:
                continue
            cols = [c for c in (plaq_col, plaq_col + 1) if 0 <= c < d]
            if not cols:
                continue
            gens.append(
                tuple(
                    sorted(
                        qubit(r, c)
                        for r in (plaq_row, plaq_row + 1)
                        for c in cols
                    )
                )
            )
    assert len(gens) == (d * d - 1) // 2
    return gens


def _check_error_length(code: SurfaceCode, error: int) -> None:
    if error < 0 or error >= code.num_errors:
        raise ValueError(
            f"error pattern out of range for distance {code.distance}: "
            f"need 0 <= e < 2**{code.num_data}"
        )


def _check_syndrome_length(code: SurfaceCode, syndrome: int) -> None:
    if syndrome < 0 or syndrome >= code.num_syndromes:
        raise ValueError(
            f"syndrome out of range for distance {code.distance}: "
            f"need 0 <= s < 2**{code.num_checks}"
        )


def syndrome_of(code: SurfaceCode, error: int) -> int:
    """Parity-check matrix times error, mod 2, as a syndrome integer."""
    _check_error_length(code, error)
    s = 0
    tables = code._syndrome_tables
    for b in range(tables.shape[0]):
        s ^= int(tables[b, (error >> (8 * b)) & 0xFF])
    return s


def syndromes_of_array(code: SurfaceCode, errors: np.ndarray) -> np.ndarray:
    """Vectorized syndrome computation on a uint64 array of error integers."""
    errors = np.asarray(errors, dtype=np.uint64)
    tables = code._syndrome_tables
    s = tables[0, (errors & np.uint64(0xFF)).astype(np.int64)]
    for b in range(1, tables.shape[0]):
        chunk = ((errors >> np.uint64(8 * b)) & np.uint64(0xFF)).astype(np.int64)
        s = s ^ tables[b, chunk]
    return s


def weight(bits: int | np.ndarray) -> int | np.ndarray:
    """Population count of a bit string (int or uint64 array)."""
    if isinstance(bits, np.ndarray):
        return np.bitwise_count(bits)
    return int(bits).bit_count()


def logical_parity(code: SurfaceCode, pattern: int | np.ndarray):
    """Overlap parity of a pattern with the logical-Z support (0 or 1)."""
    if isinstance(pattern, np.ndarray):
        return (np.bitwise_count(pattern & np.uint64(code.logical_mask)) & 1).astype(
            np.uint8
        )
    return (int(pattern) & code.logical_mask).bit_count() & 1


def classify_residual(code: SurfaceCode, residual: int) -> Classification:
    """Classify a residual error (actual error XOR applied correction)."""
    _check_error_length(code, residual)
    if syndrome_of(code, residual) != 0:
        return Classification.SYNDROME_NONZERO
    if logical_parity(code, residual):
        return Classification.LOGICAL_FAILURE
    return Classification.SUCCESS


def code_to_dict(code: SurfaceCode) -> dict:
    """JSON-ready description: distance, check supports, logical, coords."""
    return {
        "format": "surface-code/1",
        "distance": code.distance,
        "checks": [list(s) for s in code.z_checks],
        "logical": list(code.logical_z_support),
        "coords": [list(code.data_coords[q]) for q in range(code.num_data)],
        "check_coords": [list(code.check_coords[k]) for k in range(code.num_checks)],
        "boundary_checks": [bool(b) for b in code.boundary_checks],
    }


def iter_weight_patterns(num_bits: int, w: int):
    """Yield every weight-w pattern on num_bits bits in ascending order."""
    if w == 0:
        yield 0
        return
    if w > num_bits:
        return
    cur = (1 << w) - 1
    hi = 1 << num_bits
    while cur < hi:
        yield cur
        # Gosper's hack: next integer with the same popcount.
        low = cur & -cur
        ripple = cur + low
        cur = ripple | (((cur ^ ripple) // low) >> 2)


def count_patterns_of_weight(num_bits: int, w: int) -> int:
    return math.comb(num_bits, w)
