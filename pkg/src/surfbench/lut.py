"""Exhaustively built lookup-table decoder: the accuracy oracle.

The table maps every syndrome to a minimum-weight correction.  It is built
by enumerating error patterns in order of increasing weight (ascending
integer value within a weight class); the first pattern hitting a syndrome
becomes its entry, so entries are minimum-weight with the smallest-integer
tie-break.

The ``.lut`` binary format: 8-byte magic, little-endian u16 version and
u16 distance, then one bit-packed correction per syndrome in syndrome
order (ceil(d*d/8) bytes each, little-endian bit order, no compression).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .code_model import (
    SurfaceCode,
    build_code,
    iter_weight_patterns,
    syndrome_of,
    syndromes_of_array,
)
from .decoder_api import DecodeOutcome, DecoderId

LUT_MAGIC = b"SURFBLUT"
LUT_VERSION = 1


class LutError(Exception):
    """Base class for lookup-table persistence problems."""


class LutFormatError(LutError):
    """File does not start with the expected magic bytes."""


class LutVersionError(LutError):
    """File carries an unsupported format version."""


class LutTruncatedError(LutError):
    """File body is shorter than the header promises."""


@dataclass(eq=False)
class LookupTable:
    distance: int
    entries: np.ndarray  # (2**num_checks,) uint64 minimum-weight corrections
    entry_weight_minimal: bool = True

    @property
    def num_entries(self) -> int:
        return self.entries.size

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LookupTable)
            and self.distance == other.distance
            and np.array_equal(self.entries, other.entries)
        )


def build_lut(code: SurfaceCode) -> LookupTable:
    """Enumerate errors by ascending weight until every syndrome is filled."""
    num_syndromes = code.num_syndromes
    entries = np.zeros(num_syndromes, dtype=np.uint64)
    filled = np.zeros(num_syndromes, dtype=bool)
    remaining = num_syndromes
    for w in range(code.num_data + 1):
        block: list[int] = []
        for pattern in iter_weight_patterns(code.num_data, w):
            block.append(pattern)
            if len(block) == 1 << 16:
                remaining -= _fill_entries(code, block, entries, filled)
                block.clear()
                if remaining == 0:
                    break
        if block and remaining:
            remaining -= _fill_entries(code, block, entries, filled)
        if remaining == 0:
            break
    assert remaining == 0, "syndrome map not surjective; parity matrix broken"
    entries.setflags(write=False)
    return LookupTable(code.distance, entries)


def _fill_entries(code: SurfaceCode, block: list[int], entries: np.ndarray,
                  filled: np.ndarray) -> int:
    patterns = np.array(block, dtype=np.uint64)
    syndromes = syndromes_of_array(code, patterns).astype(np.int64)
    # First occurrence within the block wins (np.unique keeps the first).
    uniq, first = np.unique(syndromes, return_index=True)
    new = ~filled[uniq]
    entries[uniq[new]] = patterns[first[new]]
    filled[uniq[new]] = True
    return int(new.sum())


def lut_decode(table: LookupTable, syndrome: int) -> DecodeOutcome:
    if syndrome < 0 or syndrome >= table.num_entries:
        raise ValueError(
            f"syndrome out of range for distance {table.distance}"
        )
    return DecodeOutcome(int(table.entries[syndrome]), True, DecoderId.LUT)


class LutDecoder:
    """Lookup-table decoder behind the shared contract."""

    decoder_id = DecoderId.LUT

    def __init__(self, code: SurfaceCode, config=None,
                 table: LookupTable | None = None):
        self.code = code
        self.config = config
        if table is None:
            table = build_lut(code)
        elif table.distance != code.distance:
            raise ValueError("lookup table distance does not match the code")
        self.table = table

    def decode(self, syndrome: int) -> DecodeOutcome:
        return lut_decode(self.table, syndrome)

    def decode_many(self, syndromes: np.ndarray) -> np.ndarray:
        syndromes = np.asarray(syndromes, dtype=np.uint64)
        return self.table.entries[syndromes.astype(np.int64)]


def save_lut(table: LookupTable, path) -> None:
    """Write the table; round-trips byte-identically."""
    n = table.distance * table.distance
    entry_bytes = (n + 7) // 8
    body = (
        table.entries.astype("<u8")
        .view(np.uint8)
        .reshape(table.num_entries, 8)[:, :entry_bytes]
        .tobytes()
    )
    header = (
        LUT_MAGIC
        + int(LUT_VERSION).to_bytes(2, "little")
        + int(table.distance).to_bytes(2, "little")
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


def load_lut(path) -> LookupTable:
    """Read a table, with distinct errors for bad magic/version/truncation."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 12 or data[:8] != LUT_MAGIC:
        raise LutFormatError(f"{path}: not a lookup-table file (bad magic)")
    version = int.from_bytes(data[8:10], "little")
    if version != LUT_VERSION:
        raise LutVersionError(
            f"{path}: unsupported lookup-table version {version}"
        )
    distance = int.from_bytes(data[10:12], "little")
    if distance < 3 or distance % 2 == 0:
        raise LutFormatError(f"{path}: invalid distance {distance} in header")
    n = distance * distance
    entry_bytes = (n + 7) // 8
    num_entries = 1 << ((n - 1) // 2)
    body = data[12:]
    if len(body) != num_entries * entry_bytes:
        raise LutTruncatedError(
            f"{path}: expected {num_entries * entry_bytes} body bytes, "
            f"got {len(body)}"
        )
    raw = np.frombuffer(body, dtype=np.uint8).reshape(num_entries, entry_bytes)
    padded = np.zeros((num_entries, 8), dtype=np.uint8)
    padded[:, :entry_bytes] = raw
    entries = padded.view("<u8").reshape(num_entries).astype(np.uint64)
    entries.setflags(write=False)
    return LookupTable(distance, entries)


def verify_lut(table: LookupTable) -> None:
    """Cheap structural check: every entry reproduces its syndrome."""
    code = build_code(table.distance)
    got = syndromes_of_array(code, table.entries)
    expected = np.arange(table.num_entries, dtype=np.uint32)
    if not np.array_equal(got, expected):
        raise LutError("lookup table entries are not syndrome-consistent")
