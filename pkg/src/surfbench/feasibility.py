"""Per-error timing measurement and exhaustive-run time extrapolation.

A sample of random error bit strings is generated (with syndromes) and
then decoded one at a time by each decoder on a single thread; the three
wall-clock totals are normalized to seconds per million errors.  The
single-core exhaustive projection scales a per-million time by the error
count 2^(d*d); the multi-core projection divides by a core count, by
default the LUMI machine's 362,496.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .code_model import SurfaceCode, syndromes_of_array

LUMI_CORES = 362_496


@dataclass(frozen=True)
class StratumTiming:
    count: int
    seconds_per_million: float | None  # None when the stratum is empty


@dataclass(eq=False)
class TimingProfile:
    """Measured decode rates, overall and split by error-weight stratum."""

    distance: int
    sample_count: int
    seed: int
    t_generate: float  # seconds per 10^6 errors
    t_mwpm: float
    t_bposd: float
    strata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "format": "timing-profile/1",
            "distance": self.distance,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "seconds_per_million": {
                "generate": self.t_generate,
                "mwpm": self.t_mwpm,
                "bposd": self.t_bposd,
            },
            "strata": {
                decoder: {
                    name: {
                        "count": s.count,
                        "seconds_per_million": s.seconds_per_million,
                    }
                    for name, s in by_stratum.items()
                }
                for decoder, by_stratum in self.strata.items()
            },
        }


def measure_rates(code: SurfaceCode, mwpm, bposd, num_samples: int,
                  seed: int) -> TimingProfile:
    """Time generation and per-error decoding over one sampled error set.

    Strictly single-threaded; decoding is timed in separate passes over
    the same materialized buffer so decoder time excludes generation.
    Low/high strata split at weight d/2.  Repeating with the same seed
    processes the identical error set.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    rng = np.random.default_rng(seed)

    start = time.perf_counter()
    errors = rng.integers(0, code.num_errors, size=num_samples, dtype=np.uint64)
    syndromes = syndromes_of_array(code, errors)
    gen_seconds = time.perf_counter() - start

    weights = np.bitwise_count(errors)
    low = weights < code.distance / 2
    strata_indices = {"low": np.flatnonzero(low), "high": np.flatnonzero(~low)}

    per_million = 1e6 / num_samples
    strata: dict = {}
    decoder_seconds: dict = {}
    for name, decoder in (("mwpm", mwpm), ("bposd", bposd)):
        total = 0.0
        strata[name] = {}
        for stratum, indices in strata_indices.items():
            if indices.size == 0:
                strata[name][stratum] = StratumTiming(0, None)
                continue
            start = time.perf_counter()
            for i in indices:
                decoder.decode(int(syndromes[i]))
            elapsed = time.perf_counter() - start
            total += elapsed
            strata[name][stratum] = StratumTiming(
                int(indices.size), elapsed / indices.size * 1e6
            )
        decoder_seconds[name] = total

    return TimingProfile(
        distance=code.distance,
        sample_count=num_samples,
        seed=seed,
        t_generate=gen_seconds * per_million,
        t_mwpm=decoder_seconds["mwpm"] * per_million,
        t_bposd=decoder_seconds["bposd"] * per_million,
        strata=strata,
    )


def extrapolate_single_core(t_per_million: float, distance: int) -> float:
    """Projected single-core seconds to process all 2^(d*d) errors."""
    if t_per_million <= 0:
        raise ValueError("per-million time must be positive")
    if distance < 3 or distance % 2 == 0:
        raise ValueError("distance must be an odd integer >= 3")
    return t_per_million * (2 ** (distance * distance)) / 1e6


def extrapolate_multicore(seconds_single_core: float, n_cores: int) -> float:
    """Worst-case multi-core time: perfect split across n_cores."""
    if n_cores < 1:
        raise ValueError("n_cores must be >= 1")
    return seconds_single_core / n_cores


def feasibility_report(profile: TimingProfile, cores: int = LUMI_CORES,
                       probability: float = 0.1,
                       project_distances=None) -> list[dict]:
    """Rows shaped like the experiment table: one per (distance, decoder).

    ``project_distances`` extrapolates the measured per-error rates to
    other distances' error counts (same-rate approximation).
    """
    distances = [profile.distance] + [
        d for d in (project_distances or []) if d != profile.distance
    ]
    rows = []
    for distance in distances:
        for decoder, t in (("mwpm", profile.t_mwpm), ("bposd", profile.t_bposd)):
            single = extrapolate_single_core(t, distance)
            rows.append({
                "distance": distance,
                "num_errors": 2 ** (distance * distance),
                "decoder": decoder,
                "probability": probability,
                "seconds_per_million": t,
                "seconds_single_core": single,
                "cores": cores,
                "seconds_multicore": extrapolate_multicore(single, cores),
                "measured_distance": profile.distance,
            })
    return rows
