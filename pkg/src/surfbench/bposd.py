"""Belief propagation on the Tanner graph with OSD-0 post-processing.

Sum-product runs in the log-likelihood domain with a flooding schedule and
messages clamped to +-30.  When BP fails to reach a syndrome-consistent
hard decision within the iteration cap, the posteriors feed an order-0
ordered-statistics solve, which is always syndrome-consistent because the
parity-check matrix has full row rank.

``bp_decode_batch`` runs many syndromes at once; the single-syndrome entry
points are the batch code with one column, so batched and individual
decoding are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .code_model import SurfaceCode, syndromes_of_array
from .decoder_api import DecodeOutcome, DecoderConfig, DecoderId

MESSAGE_CLAMP = 30.0
_ATANH_EPS = 1e-15


@dataclass(eq=False)
class TannerGraph:
    """Static check/variable adjacency plus the channel prior."""

    code: SurfaceCode
    prior_llr: float
    edge_var: np.ndarray       # (E,) variable index per edge, var-major order
    edge_check: np.ndarray     # (E,) check index per edge
    var_starts: np.ndarray     # (n,) segment starts into the edge arrays
    check_edges: np.ndarray    # (m, max_deg) edge index per check, E = pad
    check_slot_valid: np.ndarray  # (m, max_deg) bool

    @property
    def num_edges(self) -> int:
        return self.edge_var.size


def build_tanner_graph(code: SurfaceCode, error_probability: float) -> TannerGraph:
    if not (0.0 < error_probability < 1.0):
        raise ValueError("error probability must be in (0, 1)")
    h = code.parity_matrix
    m, n = h.shape
    # Edges in variable-major order so per-variable sums are reduceat segments.
    pairs = [(v, c) for v in range(n) for c in range(m) if h[c, v]]
    edge_var = np.array([v for v, _ in pairs], dtype=np.int64)
    edge_check = np.array([c for _, c in pairs], dtype=np.int64)
    var_starts = np.searchsorted(edge_var, np.arange(n))
    degrees = h.sum(axis=1).astype(np.int64)
    max_deg = int(degrees.max())
    num_edges = edge_var.size
    check_edges = np.full((m, max_deg), num_edges, dtype=np.int64)
    slot = np.zeros(m, dtype=np.int64)
    for e, c in enumerate(edge_check):
        check_edges[c, slot[c]] = e
        slot[c] += 1
    valid = check_edges < num_edges
    prior = math.log((1.0 - error_probability) / error_probability)
    for arr in (edge_var, edge_check, var_starts, check_edges, valid):
        arr.setflags(write=False)
    return TannerGraph(code, prior, edge_var, edge_check, var_starts,
                       check_edges, valid)


def _pack_columns(bits: np.ndarray) -> np.ndarray:
    """Pack a (n, S) bit array into S uint64 patterns (bit i = row i)."""
    shifts = np.arange(bits.shape[0], dtype=np.uint64)[:, None]
    return np.sum(bits.astype(np.uint64) << shifts, axis=0, dtype=np.uint64)


def bp_decode_batch(graph: TannerGraph, syndromes: np.ndarray, max_iter: int):
    """Flooding sum-product over a batch of syndromes.

    Returns ``(hard, converged, posteriors)``: uint64 hard decisions, the
    per-syndrome convergence flags, and the (n, S) posterior LLRs captured
    at each syndrome's stopping iteration.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    code = graph.code
    m, n = code.num_checks, code.num_data
    syndromes = np.asarray(syndromes, dtype=np.uint64)
    s = syndromes.size
    syn_bits = (
        (syndromes[None, :] >> np.arange(m, dtype=np.uint64)[:, None]) & np.uint64(1)
    ).astype(np.float64)
    sign = 1.0 - 2.0 * syn_bits  # (m, S)

    check_to_var = np.zeros((graph.num_edges, s))
    out_hard = np.zeros(s, dtype=np.uint64)
    out_conv = np.zeros(s, dtype=bool)
    out_post = np.zeros((n, s))
    done = np.zeros(s, dtype=bool)

    for iteration in range(max_iter + 1):
        var_total = np.add.reduceat(check_to_var, graph.var_starts, axis=0)
        posterior = graph.prior_llr + var_total
        hard_bits = posterior < 0
        hard = _pack_columns(hard_bits)
        newly = ~done & (
            syndromes_of_array(code, hard).astype(np.uint64) == syndromes
        )
        if newly.any():
            out_hard[newly] = hard[newly]
            out_conv[newly] = True
            out_post[:, newly] = posterior[:, newly]
            done |= newly
        if done.all() or iteration == max_iter:
            rest = ~done
            if rest.any():
                out_hard[rest] = hard[rest]
                out_post[:, rest] = posterior[:, rest]
            break
        var_to_check = np.clip(
            posterior[graph.edge_var] - check_to_var,
            -MESSAGE_CLAMP, MESSAGE_CLAMP,
        )
        tanh_half = np.tanh(var_to_check / 2.0)
        padded = np.concatenate([tanh_half, np.ones((1, s))], axis=0)
        gathered = padded[graph.check_edges]  # (m, max_deg, S)
        prefix = np.ones_like(gathered)
        suffix = np.ones_like(gathered)
        np.cumprod(gathered[:, :-1], axis=1, out=prefix[:, 1:])
        np.cumprod(gathered[:, :0:-1], axis=1, out=suffix[:, -2::-1])
        loo = np.clip(prefix * suffix, -1.0 + _ATANH_EPS, 1.0 - _ATANH_EPS)
        messages = sign[:, None, :] * (2.0 * np.arctanh(loo))
        np.clip(messages, -MESSAGE_CLAMP, MESSAGE_CLAMP, out=messages)
        check_to_var[graph.check_edges[graph.check_slot_valid]] = (
            messages[graph.check_slot_valid]
        )
    return out_hard, out_conv, out_post


def bp_decode(graph: TannerGraph, syndrome: int, max_iter: int):
    """Single-syndrome sum-product; identical to a one-column batch."""
    _check_syndrome(graph.code, syndrome)
    hard, conv, post = bp_decode_batch(
        graph, np.array([syndrome], dtype=np.uint64), max_iter
    )
    return int(hard[0]), bool(conv[0]), post[:, 0]


def osd_decode(graph: TannerGraph, syndrome: int,
               reliabilities: np.ndarray) -> int:
    """Order-0 ordered-statistics solve of H e = s.

    Columns are ranked by descending error likelihood (ascending posterior
    LLR, ties broken by ascending column index); Gaussian elimination picks
    the first independent columns and the unique solution supported there
    is returned.
    """
    code = graph.code
    _check_syndrome(code, syndrome)
    reliabilities = np.asarray(reliabilities, dtype=np.float64)
    if reliabilities.shape != (code.num_data,):
        raise ValueError("reliabilities must have one entry per data qubit")
    order = np.argsort(reliabilities, kind="stable")
    h = code.parity_matrix[:, order].copy()
    m, n = h.shape
    s_bits = ((syndrome >> np.arange(m)) & 1).astype(np.uint8)
    pivot_cols = []
    row = 0
    for col in range(n):
        hot = np.flatnonzero(h[row:, col])
        if hot.size == 0:
            continue
        piv = row + int(hot[0])
        if piv != row:
            h[[row, piv]] = h[[piv, row]]
            s_bits[[row, piv]] = s_bits[[piv, row]]
        others = np.flatnonzero(h[:, col])
        others = others[others != row]
        if others.size:
            h[others] ^= h[row]
            s_bits[others] ^= s_bits[row]
        pivot_cols.append(col)
        row += 1
        if row == m:
            break
    assert row == m, "parity-check matrix lost full row rank"
    correction = 0
    for r, col in enumerate(pivot_cols):
        if s_bits[r]:
            correction |= 1 << int(order[col])
    return correction


def bposd_decode(graph: TannerGraph, syndrome: int,
                 config: DecoderConfig) -> DecodeOutcome:
    """BP first; on non-convergence fall back to the OSD-0 solve."""
    hard, converged, posteriors = bp_decode(
        graph, syndrome, config.bp_max_iterations
    )
    if converged:
        return DecodeOutcome(hard, True, DecoderId.BPOSD)
    return DecodeOutcome(osd_decode(graph, syndrome, posteriors), False,
                         DecoderId.BPOSD)


def _check_syndrome(code: SurfaceCode, syndrome: int) -> None:
    if syndrome < 0 or syndrome >= code.num_syndromes:
        raise ValueError(f"syndrome out of range for distance {code.distance}")


class BposdDecoder:
    """BP+OSD decoder behind the shared contract."""

    decoder_id = DecoderId.BPOSD

    def __init__(self, code: SurfaceCode, config: DecoderConfig | None = None):
        self.code = code
        self.config = config or DecoderConfig()
        self.graph = build_tanner_graph(code, self.config.error_probability)

    def decode(self, syndrome: int) -> DecodeOutcome:
        return bposd_decode(self.graph, syndrome, self.config)

    def decode_many(self, syndromes: np.ndarray) -> np.ndarray:
        corrections, _ = self.decode_many_with_flags(syndromes)
        return corrections

    def decode_many_with_flags(self, syndromes: np.ndarray):
        """Batched decode; returns (corrections uint64, bp converged bool)."""
        syndromes = np.asarray(syndromes, dtype=np.uint64)
        hard, converged, posteriors = bp_decode_batch(
            self.graph, syndromes, self.config.bp_max_iterations
        )
        corrections = hard.copy()
        for pos in np.flatnonzero(~converged):
            corrections[pos] = osd_decode(
                self.graph, int(syndromes[pos]), posteriors[:, pos]
            )
        return corrections, converged
