"""Uniform decoder contract shared by the MWPM, BP+OSD, and LUT decoders.

Every decoder is constructed from ``(SurfaceCode, DecoderConfig)``, does all
reusable precomputation up front, and exposes ``decode(syndrome) ->
DecodeOutcome``.  ``decode`` must be deterministic: same syndrome, same
correction, across runs and shard layouts.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from .code_model import SurfaceCode


class DecoderId(enum.Enum):
    MWPM = "mwpm"
    BPOSD = "bposd"
    LUT = "lut"


@dataclass(frozen=True)
class DecoderConfig:
    """Shared decoder knobs; probability strictly inside (0, 1)."""

    error_probability: float = 0.1
    bp_max_iterations: int = 32
    bp_schedule: str = "flooding"
    osd_order: str = "osd0"

    def __post_init__(self):
        if not (0.0 < self.error_probability < 1.0):
            raise ValueError(
                f"error_probability must be in (0, 1), got {self.error_probability}"
            )
        if self.bp_max_iterations < 1:
            raise ValueError("bp_max_iterations must be >= 1")
        if self.bp_schedule != "flooding":
            raise ValueError(f"unsupported bp_schedule: {self.bp_schedule!r}")
        if self.osd_order != "osd0":
            raise ValueError(f"unsupported osd_order: {self.osd_order!r}")

    def to_dict(self) -> dict:
        return {
            "error_probability": self.error_probability,
            "bp_max_iterations": self.bp_max_iterations,
            "bp_schedule": self.bp_schedule,
            "osd_order": self.osd_order,
        }


@dataclass(frozen=True)
class DecodeOutcome:
    """Correction proposed for a syndrome.

    ``converged`` is the BP convergence flag for BPOSD and always True for
    MWPM/LUT.  Whenever it is True the correction must reproduce the input
    syndrome exactly.
    """

    correction: int
    converged: bool
    decoder_id: DecoderId


@runtime_checkable
class Decoder(Protocol):
    code: SurfaceCode
    decoder_id: DecoderId

    def decode(self, syndrome: int) -> DecodeOutcome: ...

    def decode_many(self, syndromes: np.ndarray) -> np.ndarray:
        """Vectorized decode: uint64 corrections for an array of syndromes."""
        ...


def decode(decoder: Decoder, syndrome: int) -> DecodeOutcome:
    """Dispatch a syndrome to any decoder behind the shared contract."""
    return decoder.decode(syndrome)
