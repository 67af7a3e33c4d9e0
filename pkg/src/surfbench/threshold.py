"""Monte Carlo logical-error-rate estimation and threshold crossing.

Errors are i.i.d. bit flips with probability p on each data qubit; a shot
fails when the decoder's correction leaves a residual that anticommutes
with the logical operator.  The crossing of rate-vs-p curves for
consecutive distances locates the code-capacity threshold.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .code_model import SurfaceCode, build_code, logical_parity, syndromes_of_array
from .decoder_api import DecoderConfig

Z95 = 1.959963984540054  # two-sided 95% normal quantile

_SHOT_BLOCK = 1 << 17


def wilson_interval(failures: int, shots: int, z: float = Z95):
    """Wilson score interval for a binomial proportion."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    phat = failures / shots
    denom = 1.0 + z * z / shots
    center = (phat + z * z / (2 * shots)) / denom
    half = (z / denom) * math.sqrt(
        phat * (1.0 - phat) / shots + z * z / (4.0 * shots * shots)
    )
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class ThresholdPoint:
    distance: int
    p: float
    shots: int
    failures: int
    seed: int
    decoder: str
    workers: int = 1

    @property
    def rate(self) -> float:
        return self.failures / self.shots

    @property
    def interval(self):
        return wilson_interval(self.failures, self.shots)


class DecoderParityCache:
    """Syndrome -> logical parity of the correction, built on demand.

    Dense for small syndrome spaces, dictionary-backed otherwise; shared
    across p-points of a sweep so each distinct syndrome is decoded once.
    """

    def __init__(self, code: SurfaceCode, decoder, dense_limit: int = 1 << 16):
        self.code = code
        self.decoder = decoder
        self._dense = None
        self._cache: dict[int, int] = {0: 0}
        if code.num_syndromes <= dense_limit:
            syndromes = np.arange(code.num_syndromes, dtype=np.uint64)
            corrections = decoder.decode_many(syndromes)
            self._dense = logical_parity(code, corrections)

    def parities(self, syndromes: np.ndarray) -> np.ndarray:
        if self._dense is not None:
            return self._dense[syndromes.astype(np.int64)]
        uniq = np.unique(syndromes)
        missing = np.array(
            [s for s in uniq.tolist() if s not in self._cache], dtype=np.uint64
        )
        if missing.size:
            corrections = self.decoder.decode_many(missing)
            pars = logical_parity(self.code, corrections)
            self._cache.update(zip(missing.tolist(), pars.tolist()))
        keys = syndromes.tolist()
        return np.fromiter((self._cache[s] for s in keys), dtype=np.uint8,
                           count=len(keys))


def sample_bernoulli_errors(num_data: int, p: float, shots: int,
                            rng: np.random.Generator) -> np.ndarray:
    """Pack i.i.d. Bernoulli(p) bits per qubit into uint64 error integers."""
    shifts = np.arange(num_data, dtype=np.uint64)
    out = np.empty(shots, dtype=np.uint64)
    for lo in range(0, shots, _SHOT_BLOCK):
        n = min(_SHOT_BLOCK, shots - lo)
        bits = rng.random((n, num_data)) < p
        out[lo:lo + n] = np.sum(
            bits.astype(np.uint64) << shifts[None, :], axis=1, dtype=np.uint64
        )
    return out


def _count_failures(code: SurfaceCode, cache: DecoderParityCache,
                    errors: np.ndarray) -> int:
    syndromes = syndromes_of_array(code, errors)
    correction_par = cache.parities(syndromes)
    error_par = logical_parity(code, errors)
    return int((error_par ^ correction_par).sum())


def _make_decoder(code: SurfaceCode, name: str, config: DecoderConfig):
    from .bposd import BposdDecoder
    from .mwpm import MwpmDecoder

    if name == "mwpm":
        return MwpmDecoder(code, config)
    if name == "bposd":
        return BposdDecoder(code, config)
    raise ValueError(f"unknown decoder name: {name!r}")


def logical_error_rate(code: SurfaceCode, decoder, p: float, shots: int,
                       seed: int, *, workers: int = 1,
                       cache: DecoderParityCache | None = None,
                       parallel: bool = False) -> ThresholdPoint:
    """Monte Carlo logical failure rate at physical error probability p.

    Shots are partitioned across ``workers`` chunks with seeds derived
    from ``(seed, chunk index)``; the merged count is deterministic for a
    fixed worker count.  ``parallel=True`` runs the chunks in separate
    processes (same result, each with a private decoder).
    """
    if not (0.0 <= p < 1.0):
        raise ValueError("p must be in [0, 1)")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    name = decoder.decoder_id.value
    root = np.random.SeedSequence(seed)
    children = root.spawn(max(1, workers))
    shares = _split_shots(shots, len(children))
    if p == 0.0:
        return ThresholdPoint(code.distance, p, shots, 0, seed, name, workers)
    if parallel and workers > 1:
        config = getattr(decoder, "config", None) or DecoderConfig()
        jobs = [
            (code.distance, name, config.to_dict(), p, share,
             child.entropy, child.spawn_key)
            for child, share in zip(children, shares) if share
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            failures = sum(pool.map(_rate_worker_from_state, jobs))
    else:
        cache = cache or DecoderParityCache(code, decoder)
        failures = 0
        for child, share in zip(children, shares):
            if not share:
                continue
            rng = np.random.default_rng(child)
            for lo in range(0, share, _SHOT_BLOCK):
                n = min(_SHOT_BLOCK, share - lo)
                errors = sample_bernoulli_errors(code.num_data, p, n, rng)
                failures += _count_failures(code, cache, errors)
    return ThresholdPoint(code.distance, p, shots, failures, seed, name, workers)


def _rate_worker_from_state(args):
    distance, decoder_name, config_dict, p, shots, entropy, spawn_key = args
    code = build_code(distance)
    decoder = _make_decoder(code, decoder_name, DecoderConfig(**config_dict))
    cache = DecoderParityCache(code, decoder)
    seq = np.random.SeedSequence(entropy, spawn_key=spawn_key)
    rng = np.random.default_rng(seq)
    failures = 0
    for lo in range(0, shots, _SHOT_BLOCK):
        n = min(_SHOT_BLOCK, shots - lo)
        errors = sample_bernoulli_errors(code.num_data, p, n, rng)
        failures += _count_failures(code, cache, errors)
    return failures


def _split_shots(shots: int, parts: int) -> list[int]:
    base, extra = divmod(shots, parts)
    return [base + (1 if i < extra else 0) for i in range(parts)]


def sweep(code: SurfaceCode, decoder, ps, shots: int, seed: int, *,
          workers: int = 1, cache: DecoderParityCache | None = None):
    """Rate points over a p grid; the cache is shared across points."""
    cache = cache or DecoderParityCache(code, decoder)
    points = []
    for index, p in enumerate(ps):
        points.append(
            logical_error_rate(code, decoder, float(p), shots,
                               seed + index, workers=workers, cache=cache)
        )
    return points


def exact_logical_rate(failure_counts: np.ndarray, num_data: int,
                       p: float) -> float:
    """Exact rate from exhaustive per-weight failure counts."""
    total = 0.0
    for w, count in enumerate(failure_counts):
        if count:
            total += int(count) * (p ** w) * ((1.0 - p) ** (num_data - w))
    return total


@dataclass(frozen=True)
class CrossingResult:
    found: bool
    estimate: float | None
    spread: float
    per_pair: dict

    def __str__(self):
        if not self.found:
            return "no crossing in range"
        return f"crossing at p = {self.estimate:.6f} (spread {self.spread:.6f})"


def find_crossing(points) -> CrossingResult:
    """Locate the rate-curve crossing between consecutive distances.

    ``points`` is an iterable of ThresholdPoint (or of ``(distance, p,
    rate)`` triples).  A sign change of rate(d_big) - rate(d_small) on the
    common grid is linearly interpolated; crossings from each consecutive
    distance pair are averaged.  Returns a no-crossing result rather than
    a fabricated number when no sign change exists.
    """
    curves: dict[int, dict[float, float]] = {}
    for pt in points:
        if isinstance(pt, ThresholdPoint):
            d, p, rate = pt.distance, pt.p, pt.rate
        else:
            d, p, rate = pt
        curves.setdefault(int(d), {})[float(p)] = float(rate)
    distances = sorted(curves)
    if len(distances) < 2:
        raise ValueError("need rate curves for at least two distances")
    per_pair: dict = {}
    for d_small, d_big in zip(distances, distances[1:]):
        common = sorted(set(curves[d_small]) & set(curves[d_big]))
        if len(common) < 2:
            raise ValueError(
                f"distances {d_small} and {d_big} share fewer than two p values"
            )
        diffs = [curves[d_big][p] - curves[d_small][p] for p in common]
        per_pair[(d_small, d_big)] = _first_sign_change(common, diffs)
    found = [p for p in per_pair.values() if p is not None]
    if not found:
        return CrossingResult(False, None, 0.0, per_pair)
    estimate = sum(found) / len(found)
    spread = max(found) - min(found)
    return CrossingResult(True, estimate, spread, per_pair)


def _first_sign_change(ps, diffs):
    for i in range(len(ps)):
        if diffs[i] == 0.0:
            return ps[i]
        if i + 1 < len(ps) and (diffs[i] < 0.0) != (diffs[i + 1] < 0.0):
            span = diffs[i] - diffs[i + 1]
            frac = diffs[i] / span
            return ps[i] + (ps[i + 1] - ps[i]) * frac
    return None
