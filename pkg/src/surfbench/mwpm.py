"""Exact minimum-weight perfect matching decoder on the detection graph.

Defects (flipped Z-checks) are paired either with each other along
shortest data-qubit chains or with the code boundary; the correction is
the XOR of the canonical chains of a minimum-total-weight pairing.

Two exact engines sit behind the same decode contract:

* a subset dynamic program over defect sets (vectorizable across many
  syndromes that share a defect count), used up to ``dp_max_defects``;
* the blossom algorithm from networkx on the defect+virtual-boundary
  graph for larger defect sets.

Both return minimum-weight pairings; tie-breaking is deterministic
(boundary pairing preferred, then lowest partner index; canonical
chains come from a fixed-order BFS).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .code_model import SurfaceCode, syndromes_of_array
from .decoder_api import DecodeOutcome, DecoderConfig, DecoderId

_INF = np.int32(1 << 29)


@dataclass(eq=False)
class DetectionGraph:
    """All-pairs chain lengths between Z-checks plus boundary chains."""

    code: SurfaceCode
    check_distance: np.ndarray  # (m, m) int32, qubits on a minimal chain
    boundary_distance: np.ndarray  # (m,) int32
    path_mask: np.ndarray  # (m, m) uint64 canonical chain between checks
    boundary_mask: np.ndarray  # (m,) uint64 canonical chain to boundary


def build_detection_graph(code: SurfaceCode) -> DetectionGraph:
    m = code.num_checks

    qubit_checks: list[list[int]] = [[] for _ in range(code.num_data)]
    for k, support in enumerate(code.z_checks):
        for q in support:
            qubit_checks[q].append(k)

    # Check adjacency: one edge per shared data qubit (smallest qubit index
    # is the canonical connector); qubits in a single check connect it to
    # the boundary.
    adj: list[dict[int, int]] = [dict() for _ in range(m)]
    boundary_qubit: dict[int, int] = {}
    for q, ks in enumerate(qubit_checks):
        if len(ks) == 2:
            a, b = ks
            if b not in adj[a] or q < adj[a][b]:
                adj[a][b] = q
                adj[b][a] = q
        elif len(ks) == 1:
            (a,) = ks
            if a not in boundary_qubit or q < boundary_qubit[a]:
                boundary_qubit[a] = q
        else:  # pragma: no cover - geometry guarantees 1 or 2
            raise AssertionError(f"qubit {q} touches {len(ks)} Z-checks")

    neighbors = [sorted(adj[a].items()) for a in range(m)]

    dist = np.full((m, m), _INF, dtype=np.int32)
    mask = np.zeros((m, m), dtype=np.uint64)
    for src in range(m):
        dist[src, src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v, q in neighbors[u]:
                if dist[src, v] >= _INF:
                    dist[src, v] = dist[src, u] + 1
                    mask[src, v] = mask[src, u] ^ np.uint64(1 << q)
                    queue.append(v)
    # Canonical chain for a pair is the one found from the lower index.
    for a in range(m):
        for b in range(a):
            mask[a, b] = mask[b, a]

    bdist = np.full(m, _INF, dtype=np.int32)
    bmask = np.zeros(m, dtype=np.uint64)
    queue = deque()
    for a in sorted(boundary_qubit):
        bdist[a] = 1
        bmask[a] = np.uint64(1 << boundary_qubit[a])
        queue.append(a)
    while queue:
        u = queue.popleft()
        for v, q in neighbors[u]:
            if bdist[v] >= _INF:
                bdist[v] = bdist[u] + 1
                bmask[v] = bmask[u] ^ np.uint64(1 << q)
                queue.append(v)

    assert dist.max() < _INF and bdist.max() < _INF, "detection graph not connected"

    # Every stored chain must flip exactly its endpoints.
    targets = np.uint64(1) << np.arange(m, dtype=np.uint64)
    pair_syndromes = syndromes_of_array(code, mask.reshape(-1)).reshape(m, m)
    expected = (targets[:, None] ^ targets[None, :]).astype(np.uint32)
    expected[np.diag_indices(m)] = 0
    assert np.array_equal(pair_syndromes, expected)
    assert np.array_equal(
        syndromes_of_array(code, bmask), targets.astype(np.uint32)
    )

    dist.setflags(write=False)
    mask.setflags(write=False)
    bdist.setflags(write=False)
    bmask.setflags(write=False)
    return DetectionGraph(code, dist, bdist, mask, bmask)


def _defect_positions(syndromes: np.ndarray, num_checks: int, k: int) -> np.ndarray:
    """(B, k) ascending defect indices for syndromes of defect count k."""
    bits = (
        (syndromes[:, None] >> np.arange(num_checks, dtype=np.uint64)) & np.uint64(1)
    ).astype(np.uint8)
    order = np.argsort(1 - bits, axis=1, kind="stable")
    return order[:, :k].astype(np.int64)


def _match_batch(pair_cost: np.ndarray, boundary_cost: np.ndarray):
    """Minimum-weight pairing DP over defect subsets, batched.

    ``pair_cost``: (B, k, k), ``boundary_cost``: (B, k).  Each defect is
    paired with another defect or with the boundary.  Returns (weights,
    choices): ``choices[:, S]`` records, for the lowest defect in subset S,
    0 for a boundary pairing or 1+j for partner j.
    """
    batch, k = boundary_cost.shape
    nstates = 1 << k
    f = np.full((batch, nstates), _INF, dtype=np.int32)
    f[:, 0] = 0
    choices = np.zeros((batch, nstates), dtype=np.uint8)
    for state in range(1, nstates):
        i = (state & -state).bit_length() - 1
        rest = state ^ (1 << i)
        best = boundary_cost[:, i] + f[:, rest]
        choice = np.zeros(batch, dtype=np.uint8)
        remaining = rest
        while remaining:
            j = (remaining & -remaining).bit_length() - 1
            remaining &= remaining - 1
            cand = pair_cost[:, i, j] + f[:, rest ^ (1 << j)]
            better = cand < best
            if better.any():
                best = np.where(better, cand, best)
                choice = np.where(better, np.uint8(j + 1), choice)
        f[:, state] = best
        choices[:, state] = choice
    return f[:, nstates - 1], choices


def _backtrack(choices_row: np.ndarray, defects_row: np.ndarray,
               graph: DetectionGraph) -> int:
    correction = 0
    state = (1 << len(defects_row)) - 1
    while state:
        i = (state & -state).bit_length() - 1
        c = int(choices_row[state])
        if c == 0:
            correction ^= int(graph.boundary_mask[defects_row[i]])
            state ^= 1 << i
        else:
            j = c - 1
            correction ^= int(graph.path_mask[defects_row[i], defects_row[j]])
            state ^= (1 << i) | (1 << j)
    return correction


def _match_blossom(graph: DetectionGraph, defects: list[int]) -> int:
    """Blossom matching on the defect + virtual-boundary graph."""
    k = len(defects)
    g = nx.Graph()
    for i in range(k):
        for j in range(i + 1, k):
            g.add_edge(i, j, weight=int(graph.check_distance[defects[i], defects[j]]))
        g.add_edge(i, k + i, weight=int(graph.boundary_distance[defects[i]]))
    for i in range(k):
        for j in range(i + 1, k):
            g.add_edge(k + i, k + j, weight=0)
    matching = nx.min_weight_matching(g)
    correction = 0
    for a, b in matching:
        a, b = min(a, b), max(a, b)
        if b < k:
            correction ^= int(graph.path_mask[defects[a], defects[b]])
        elif a < k:
            assert b == k + a
            correction ^= int(graph.boundary_mask[defects[a]])
    return correction


def mwpm_decode_many(graph: DetectionGraph, syndromes: np.ndarray,
                     dp_max_defects: int = 16) -> np.ndarray:
    """Corrections (uint64) for an array of syndrome integers."""
    code = graph.code
    syndromes = np.asarray(syndromes, dtype=np.uint64)
    out = np.zeros(syndromes.shape, dtype=np.uint64)
    counts = np.bitwise_count(syndromes).astype(np.int64)
    for k in np.unique(counts):
        k = int(k)
        if k == 0:
            continue
        idx = np.flatnonzero(counts == k)
        if k > dp_max_defects:
            for pos in idx:
                defects = [
                    b for b in range(code.num_checks)
                    if (int(syndromes[pos]) >> b) & 1
                ]
                out[pos] = _match_blossom(graph, defects)
            continue
        # Chunk so the DP table stays around 64 MB.
        chunk = max(1, (1 << 24) >> k)
        for lo in range(0, idx.size, chunk):
            sel = idx[lo:lo + chunk]
            defects = _defect_positions(syndromes[sel], code.num_checks, k)
            pair_cost = graph.check_distance[defects[:, :, None], defects[:, None, :]]
            boundary_cost = graph.boundary_distance[defects]
            _, choices = _match_batch(pair_cost, boundary_cost)
            for row, pos in enumerate(sel):
                out[pos] = _backtrack(choices[row], defects[row], graph)
    got = syndromes_of_array(code, out)
    assert np.array_equal(got.astype(np.uint64), syndromes), (
        "matching produced a syndrome-inconsistent correction"
    )
    return out


def mwpm_decode(graph: DetectionGraph, syndrome: int,
                dp_max_defects: int = 16) -> DecodeOutcome:
    """Decode one syndrome on a prebuilt detection graph."""
    code = graph.code
    if syndrome < 0 or syndrome >= code.num_syndromes:
        raise ValueError(f"syndrome out of range for distance {code.distance}")
    correction = int(
        mwpm_decode_many(graph, np.array([syndrome], dtype=np.uint64),
                         dp_max_defects)[0]
    )
    return DecodeOutcome(correction, True, DecoderId.MWPM)


class MwpmDecoder:
    """Minimum-weight perfect matching decoder behind the shared contract."""

    decoder_id = DecoderId.MWPM

    def __init__(self, code: SurfaceCode, config: DecoderConfig | None = None,
                 dp_max_defects: int = 16):
        self.code = code
        self.config = config or DecoderConfig()
        self.graph = build_detection_graph(code)
        self.dp_max_defects = dp_max_defects

    def decode(self, syndrome: int) -> DecodeOutcome:
        return mwpm_decode(self.graph, syndrome, self.dp_max_defects)

    def decode_many(self, syndromes: np.ndarray) -> np.ndarray:
        return mwpm_decode_many(self.graph, syndromes, self.dp_max_defects)
