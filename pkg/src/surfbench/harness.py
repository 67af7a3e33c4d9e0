"""Workflow engine: enumerate or sample errors, decode, classify, count.

Every error in a range (or sample) is pushed through both decoders; the
correction is applied and the residual classified.  Because both decoders
are deterministic functions of the syndrome, each distinct syndrome is
decoded once and the per-error work reduces to vectorized table lookups:
an error fails under a decoder iff the overlap parity of ``error XOR
correction(syndrome)`` with the logical support is odd.

Counters are 64-bit and mergeable; any partition of a range into shards
merges to counters bit-identical to the monolithic run.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bposd import BposdDecoder
from .code_model import SurfaceCode, build_code, logical_parity, syndromes_of_array
from .decoder_api import DecoderConfig
from .mwpm import MwpmDecoder

STATS_COLUMNS = ("weight", "total", "mwpm_only_fail", "bposd_only_fail", "both_fail")
FAILURE_CATEGORIES = ("mwpm_only", "bposd_only", "both")
DEFAULT_SAMPLE_CAP = 1000
_BLOCK = 1 << 20


@dataclass(frozen=True)
class FailureRecord:
    error_weight: int
    mwpm_failed: bool
    bposd_failed: bool


@dataclass(eq=False)
class ComparisonStats:
    """Per-weight failure counters for one comparison run (mergeable)."""

    distance: int
    mode: str  # "exhaustive" or "sampled"
    totals: np.ndarray
    mwpm_only_fail: np.ndarray
    bposd_only_fail: np.ndarray
    both_fail: np.ndarray
    meta: dict = field(default_factory=dict)
    fail_samples: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.distance * self.distance
        for arr in (self.totals, self.mwpm_only_fail, self.bposd_only_fail,
                    self.both_fail):
            if arr.shape != (n + 1,):
                raise ValueError("counter arrays must have one row per weight")
        bad = (self.mwpm_only_fail + self.bposd_only_fail + self.both_fail
               > self.totals)
        if bad.any():
            raise ValueError("failure counters exceed totals")

    @property
    def num_errors(self) -> int:
        return int(self.totals.sum())

    def mwpm_failures(self) -> np.ndarray:
        return self.mwpm_only_fail + self.both_fail

    def bposd_failures(self) -> np.ndarray:
        return self.bposd_only_fail + self.both_fail


def empty_stats(distance: int, mode: str = "exhaustive") -> ComparisonStats:
    n = distance * distance
    zeros = lambda: np.zeros(n + 1, dtype=np.int64)  # noqa: E731
    return ComparisonStats(distance, mode, zeros(), zeros(), zeros(), zeros())


def merge_stats(first: ComparisonStats, *rest: ComparisonStats,
                sample_cap: int = DEFAULT_SAMPLE_CAP) -> ComparisonStats:
    """Fieldwise sum of counters; associative and commutative."""
    merged = ComparisonStats(
        first.distance, first.mode,
        first.totals.copy(), first.mwpm_only_fail.copy(),
        first.bposd_only_fail.copy(), first.both_fail.copy(),
        meta=dict(first.meta),
        fail_samples={k: list(v) for k, v in first.fail_samples.items()},
    )
    for other in rest:
        if other.distance != merged.distance:
            raise ValueError("cannot merge stats from different distances")
        if other.mode != merged.mode:
            raise ValueError("cannot merge stats from different modes")
        merged.totals += other.totals
        merged.mwpm_only_fail += other.mwpm_only_fail
        merged.bposd_only_fail += other.bposd_only_fail
        merged.both_fail += other.both_fail
        for key in ("ranges", "seeds", "num_samples"):
            if key in other.meta:
                merged.meta.setdefault(key, [])
                merged.meta[key] = list(merged.meta[key]) + list(other.meta[key])
        for cat, values in other.fail_samples.items():
            bucket = merged.fail_samples.setdefault(cat, [])
            bucket.extend(values[: max(0, sample_cap - len(bucket))])
    return merged


class SyndromeOutcomeTable:
    """Dense per-syndrome decode results for one decoder pair.

    ``mwpm_logical[s]`` / ``bposd_logical[s]`` hold the overlap parity of
    the correction for syndrome ``s`` with the logical support; building
    the table asserts syndrome consistency for every entry, which is what
    makes the residual's syndrome identically zero during the sweep.
    """

    def __init__(self, code: SurfaceCode, mwpm: MwpmDecoder, bposd: BposdDecoder):
        self.code = code
        syndromes = np.arange(code.num_syndromes, dtype=np.uint64)
        self.mwpm_corrections = mwpm.decode_many(syndromes)
        self.bposd_corrections, self.bposd_converged = (
            bposd.decode_many_with_flags(syndromes)
        )
        for corrections in (self.mwpm_corrections, self.bposd_corrections):
            got = syndromes_of_array(code, corrections).astype(np.uint64)
            assert np.array_equal(got, syndromes), (
                "decoder violated syndrome consistency"
            )
        self.mwpm_logical = logical_parity(code, self.mwpm_corrections)
        self.bposd_logical = logical_parity(code, self.bposd_corrections)

    def logical_parities(self, syndromes: np.ndarray):
        idx = syndromes.astype(np.int64)
        return self.mwpm_logical[idx], self.bposd_logical[idx]


class LazySyndromeOutcomeTable:
    """Cache-as-you-go variant for distances whose syndrome space is huge."""

    def __init__(self, code: SurfaceCode, mwpm: MwpmDecoder, bposd: BposdDecoder):
        self.code = code
        self.mwpm = mwpm
        self.bposd = bposd
        self._mwpm_cache: dict[int, int] = {0: 0}
        self._bposd_cache: dict[int, int] = {0: 0}

    def logical_parities(self, syndromes: np.ndarray):
        uniq = np.unique(syndromes)
        missing = np.array(
            [s for s in uniq.tolist() if s not in self._mwpm_cache],
            dtype=np.uint64,
        )
        if missing.size:
            mwpm_corr = self.mwpm.decode_many(missing)
            bposd_corr = self.bposd.decode_many(missing)
            got = syndromes_of_array(self.code, bposd_corr).astype(np.uint64)
            assert np.array_equal(got, missing), (
                "decoder violated syndrome consistency"
            )
            mwpm_par = logical_parity(self.code, mwpm_corr)
            bposd_par = logical_parity(self.code, bposd_corr)
            for s, a, b in zip(missing.tolist(), mwpm_par.tolist(),
                               bposd_par.tolist()):
                self._mwpm_cache[s] = a
                self._bposd_cache[s] = b
        keys = syndromes.tolist()
        mwpm = np.fromiter((self._mwpm_cache[s] for s in keys), dtype=np.uint8,
                           count=len(keys))
        bposd = np.fromiter((self._bposd_cache[s] for s in keys), dtype=np.uint8,
                            count=len(keys))
        return mwpm, bposd


def build_decoders(code: SurfaceCode, config: DecoderConfig | None = None):
    config = config or DecoderConfig()
    return MwpmDecoder(code, config), BposdDecoder(code, config)


def build_outcome_table(code: SurfaceCode, decoders=None,
                        config: DecoderConfig | None = None,
                        dense_limit: int = 1 << 16):
    """Dense table when the syndrome space fits, lazy cache otherwise."""
    if decoders is None:
        decoders = build_decoders(code, config)
    mwpm, bposd = decoders
    if code.num_syndromes <= dense_limit:
        return SyndromeOutcomeTable(code, mwpm, bposd)
    return LazySyndromeOutcomeTable(code, mwpm, bposd)


def _classify_block(code: SurfaceCode, table, errors: np.ndarray, counts,
                    samples: dict, sample_cap: int) -> None:
    weights = np.bitwise_count(errors).astype(np.int64)
    syndromes = syndromes_of_array(code, errors)
    error_par = logical_parity(code, errors)
    mwpm_par, bposd_par = table.logical_parities(syndromes)
    mwpm_fail = error_par ^ mwpm_par
    bposd_fail = error_par ^ bposd_par
    combo = (mwpm_fail + 2 * bposd_fail).astype(np.int64)
    counts += np.bincount(weights * 4 + combo, minlength=counts.size)
    if sample_cap > 0:
        for value, cat in ((1, "mwpm_only"), (2, "bposd_only"), (3, "both")):
            bucket = samples.setdefault(cat, [])
            room = sample_cap - len(bucket)
            if room > 0:
                hits = np.flatnonzero(combo == value)[:room]
                bucket.extend(int(errors[i]) for i in hits)


def _counts_to_stats(distance: int, mode: str, counts: np.ndarray,
                     samples: dict) -> ComparisonStats:
    n = distance * distance
    grid = counts.reshape(n + 1, 4)
    return ComparisonStats(
        distance, mode,
        totals=grid.sum(axis=1),
        mwpm_only_fail=grid[:, 1].copy(),
        bposd_only_fail=grid[:, 2].copy(),
        both_fail=grid[:, 3].copy(),
        fail_samples=samples,
    )


def _sweep_range_worker(args):
    distance, config_dict, lo, hi, sample_cap, parities = args
    code = build_code(distance)
    if parities is not None:
        table = _PrecomputedParities(*parities)
    else:
        config = DecoderConfig(**config_dict)
        table = build_outcome_table(code, config=config)
    counts = np.zeros((code.num_data + 1) * 4, dtype=np.int64)
    samples: dict = {}
    for start in range(lo, hi, _BLOCK):
        errors = np.arange(start, min(start + _BLOCK, hi), dtype=np.uint64)
        _classify_block(code, table, errors, counts, samples, sample_cap)
    return counts, samples


class _PrecomputedParities:
    def __init__(self, mwpm_logical, bposd_logical):
        self.mwpm_logical = mwpm_logical
        self.bposd_logical = bposd_logical

    def logical_parities(self, syndromes):
        idx = syndromes.astype(np.int64)
        return self.mwpm_logical[idx], self.bposd_logical[idx]


def run_exhaustive(code: SurfaceCode, decoders=None, lo: int = 0,
                   hi: int | None = None, *, config: DecoderConfig | None = None,
                   workers: int = 1, sample_cap: int = DEFAULT_SAMPLE_CAP,
                   table=None) -> ComparisonStats:
    """Classify every error integer in [lo, hi) under both decoders.

    The result is independent of how the range is partitioned across
    shards or workers.
    """
    if hi is None:
        hi = code.num_errors
    if not (0 <= lo < hi <= code.num_errors):
        raise ValueError(f"invalid error range [{lo}, {hi})")
    config = config or (decoders[0].config if decoders else DecoderConfig())
    if table is None:
        table = build_outcome_table(code, decoders, config)

    counts = np.zeros((code.num_data + 1) * 4, dtype=np.int64)
    samples: dict = {}
    if workers > 1:
        parities = None
        if isinstance(table, (SyndromeOutcomeTable, _PrecomputedParities)):
            parities = (table.mwpm_logical, table.bposd_logical)
        jobs = [
            (code.distance, config.to_dict(), a, b, sample_cap, parities)
            for a, b in _split_range(lo, hi, workers)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_range_worker, jobs))
        for part_counts, part_samples in results:
            counts += part_counts
            for cat, values in part_samples.items():
                bucket = samples.setdefault(cat, [])
                bucket.extend(values[: max(0, sample_cap - len(bucket))])
    else:
        for start in range(lo, hi, _BLOCK):
            errors = np.arange(start, min(start + _BLOCK, hi), dtype=np.uint64)
            _classify_block(code, table, errors, counts, samples, sample_cap)
    stats = _counts_to_stats(code.distance, "exhaustive", counts, samples)
    stats.meta = {
        "ranges": [[lo, hi]],
        "decoder_config": config.to_dict(),
        "workers": workers,
    }
    return stats


def run_sampled(code: SurfaceCode, decoders=None, num_samples: int = 1,
                seed: int = 0, *, config: DecoderConfig | None = None,
                workers: int = 1, sample_cap: int = DEFAULT_SAMPLE_CAP,
                table=None, fixed_weight: int | None = None) -> ComparisonStats:
    """Classify uniformly sampled error integers; reproducible by seed.

    The sample stream depends only on (seed, num_samples, fixed_weight);
    workers merely partition the materialized array, so worker count never
    changes the result.  ``fixed_weight`` switches to stratified sampling
    of uniformly random patterns of one weight.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    rng = np.random.default_rng(seed)
    if fixed_weight is None:
        errors = rng.integers(0, code.num_errors, size=num_samples,
                              dtype=np.uint64)
    else:
        if not (0 <= fixed_weight <= code.num_data):
            raise ValueError(
                f"fixed_weight must be in [0, {code.num_data}]"
            )
        errors = _sample_fixed_weight(rng, num_samples, code.num_data,
                                      fixed_weight)
    config = config or (decoders[0].config if decoders else DecoderConfig())
    if table is None:
        table = build_outcome_table(code, decoders, config)
    counts = np.zeros((code.num_data + 1) * 4, dtype=np.int64)
    samples: dict = {}
    for start in range(0, num_samples, _BLOCK):
        block = errors[start:start + _BLOCK]
        _classify_block(code, table, block, counts, samples, sample_cap)
    stats = _counts_to_stats(code.distance, "sampled", counts, samples)
    stats.meta = {
        "num_samples": [num_samples],
        "seeds": [seed],
        "decoder_config": config.to_dict(),
        "workers": workers,
    }
    if fixed_weight is not None:
        stats.meta["fixed_weight"] = fixed_weight
    return stats


def _sample_fixed_weight(rng: np.random.Generator, num_samples: int,
                         num_data: int, w: int) -> np.ndarray:
    """Uniformly random weight-w patterns (stratified sampling)."""
    if w == 0:
        return np.zeros(num_samples, dtype=np.uint64)
    out = np.empty(num_samples, dtype=np.uint64)
    block = max(1, _BLOCK // max(1, num_data))
    for lo in range(0, num_samples, block):
        n = min(block, num_samples - lo)
        positions = np.argsort(rng.random((n, num_data)), axis=1)[:, :w]
        out[lo:lo + n] = np.bitwise_or.reduce(
            np.uint64(1) << positions.astype(np.uint64), axis=1
        )
    return out


def _split_range(lo: int, hi: int, parts: int) -> list[tuple[int, int]]:
    span = hi - lo
    parts = min(parts, span)
    edges = [lo + (span * i) // parts for i in range(parts + 1)]
    return [(edges[i], edges[i + 1]) for i in range(parts)
            if edges[i] < edges[i + 1]]


def venn_counts(stats: ComparisonStats) -> dict:
    """Totals of the three exclusive/joint failure sets."""
    return {
        "mwpm_only": int(stats.mwpm_only_fail.sum()),
        "bposd_only": int(stats.bposd_only_fail.sum()),
        "both": int(stats.both_fail.sum()),
    }


def failure_ratio(stats: ComparisonStats, decoder: str) -> np.ndarray:
    """Exclusive-failure ratio per weight, over the scanned error counts.

    For a full-range exhaustive run the denominators equal C(d*d, w)
    exactly.  Sampled stats are refused: the ratios would be estimates.
    """
    if stats.mode != "exhaustive":
        raise ValueError("failure ratios require exhaustive-mode stats")
    if decoder == "mwpm":
        exclusive = stats.mwpm_only_fail
    elif decoder == "bposd":
        exclusive = stats.bposd_only_fail
    else:
        raise ValueError(f"unknown decoder selector: {decoder!r}")
    totals = stats.totals
    out = np.zeros(totals.shape, dtype=np.float64)
    nonzero = totals > 0
    out[nonzero] = exclusive[nonzero] / totals[nonzero]
    return out


def expected_totals(distance: int) -> np.ndarray:
    """Exact per-weight error counts for a full exhaustive run."""
    n = distance * distance
    return np.array([math.comb(n, w) for w in range(n + 1)], dtype=np.int64)


def is_full_exhaustive(stats: ComparisonStats) -> bool:
    return stats.mode == "exhaustive" and np.array_equal(
        stats.totals, expected_totals(stats.distance)
    )


def write_stats_csv(stats: ComparisonStats, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(STATS_COLUMNS)
        for w in range(stats.totals.size):
            writer.writerow([
                w, int(stats.totals[w]), int(stats.mwpm_only_fail[w]),
                int(stats.bposd_only_fail[w]), int(stats.both_fail[w]),
            ])


def read_stats_csv(path, mode: str | None = None) -> ComparisonStats:
    """Read a stats CSV; the exact header doubles as the schema version."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != STATS_COLUMNS:
            raise ValueError(
                f"{path}: unsupported stats schema {header!r}; "
                f"expected {','.join(STATS_COLUMNS)}"
            )
        rows = [[int(x) for x in row] for row in reader if row]
    num_rows = len(rows)
    distance = math.isqrt(num_rows - 1)
    if distance * distance != num_rows - 1 or distance < 3 or distance % 2 == 0:
        raise ValueError(f"{path}: row count {num_rows} matches no distance")
    arr = np.array(rows, dtype=np.int64)
    if not np.array_equal(arr[:, 0], np.arange(num_rows)):
        raise ValueError(f"{path}: weight column must run 0..d*d")
    stats = ComparisonStats(
        distance, "exhaustive", arr[:, 1].copy(), arr[:, 2].copy(),
        arr[:, 3].copy(), arr[:, 4].copy(),
    )
    if mode is not None:
        stats.mode = mode
    elif not is_full_exhaustive(stats):
        # Without a manifest, only a complete enumeration is provably
        # exhaustive; anything else is treated as sampled/partial.
        stats.mode = "sampled"
    return stats


def stats_to_dict(stats: ComparisonStats) -> dict:
    return {
        "format": "comparison-stats/1",
        "distance": stats.distance,
        "mode": stats.mode,
        "meta": stats.meta,
        "venn": venn_counts(stats),
        "weights": list(range(stats.totals.size)),
        "total": stats.totals.tolist(),
        "mwpm_only_fail": stats.mwpm_only_fail.tolist(),
        "bposd_only_fail": stats.bposd_only_fail.tolist(),
        "both_fail": stats.both_fail.tolist(),
        "fail_samples": {k: list(v) for k, v in stats.fail_samples.items()},
    }
