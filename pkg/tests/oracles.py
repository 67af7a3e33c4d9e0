"""Independent reference implementations used only by the tests.

Everything here recomputes results through a different route than the
library (dense GF(2) matrix-vector products, breadth-first search over
check supports, recursive matching enumeration) so library bugs cannot
hide behind shared code.
"""

from __future__ import annotations

from collections import deque

import numpy as np


def gf2_syndrome(parity_matrix: np.ndarray, error: int) -> int:
    """Dense matrix-vector product over GF(2), bit-string output."""
    n = parity_matrix.shape[1]
    bits = np.array([(error >> q) & 1 for q in range(n)], dtype=np.uint8)
    syndrome_bits = parity_matrix.dot(bits) % 2
    return int(sum(int(b) << k for k, b in enumerate(syndrome_bits)))


def gf2_rank(matrix: np.ndarray) -> int:
    work = matrix.copy().astype(np.uint8)
    rank = 0
    rows, cols = work.shape
    for col in range(cols):
        pivot = None
        for row in range(rank, rows):
            if work[row, col]:
                pivot = row
                break
        if pivot is None:
            continue
        work[[rank, pivot]] = work[[pivot, rank]]
        for row in range(rows):
            if row != rank and work[row, col]:
                work[row] ^= work[rank]
        rank += 1
    return rank


def brute_force_min_weights(code) -> dict[int, int]:
    """Minimum error weight per syndrome by scanning every pattern."""
    best: dict[int, int] = {}
    for error in range(code.num_errors):
        syndrome = gf2_syndrome(code.parity_matrix, error)
        w = bin(error).count("1")
        if syndrome not in best or w < best[syndrome]:
            best[syndrome] = w
    return best


def min_weights_by_enumeration(code) -> np.ndarray:
    """Coset minimum weights via ascending-weight first-hit enumeration."""
    from itertools import combinations

    out = np.full(code.num_syndromes, -1, dtype=np.int64)
    remaining = code.num_syndromes
    for w in range(code.num_data + 1):
        for positions in combinations(range(code.num_data), w):
            error = sum(1 << q for q in positions)
            syndrome = gf2_syndrome(code.parity_matrix, error)
            if out[syndrome] < 0:
                out[syndrome] = w
                remaining -= 1
                if remaining == 0:
                    return out
    raise AssertionError("syndrome map is not surjective")


def bfs_check_distances(code):
    """All-pairs chain lengths between checks plus boundary lengths.

    Built straight from the check supports, independently of the
    library's detection-graph construction.
    """
    m = code.num_checks
    qubit_checks = [[] for _ in range(code.num_data)]
    for k, support in enumerate(code.z_checks):
        for q in support:
            qubit_checks[q].append(k)
    neighbors = [set() for _ in range(m)]
    boundary = set()
    for q, ks in enumerate(qubit_checks):
        if len(ks) == 2:
            neighbors[ks[0]].add(ks[1])
            neighbors[ks[1]].add(ks[0])
        elif len(ks) == 1:
            boundary.add(ks[0])
    dist = np.full((m, m), -1, dtype=np.int64)
    for src in range(m):
        dist[src, src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in neighbors[u]:
                if dist[src, v] < 0:
                    dist[src, v] = dist[src, u] + 1
                    queue.append(v)
    bdist = np.full(m, -1, dtype=np.int64)
    queue = deque()
    for c in boundary:
        bdist[c] = 1
        queue.append(c)
    while queue:
        u = queue.popleft()
        for v in neighbors[u]:
            if bdist[v] < 0:
                bdist[v] = bdist[u] + 1
                queue.append(v)
    return dist, bdist


def enumerate_min_matching(pair_cost, boundary_cost) -> int:
    """Exponential-time exact minimum pairing weight (defects + boundary)."""
    k = len(boundary_cost)

    def solve(unmatched: frozenset) -> int:
        if not unmatched:
            return 0
        i = min(unmatched)
        rest = unmatched - {i}
        best = boundary_cost[i] + solve(rest)
        for j in rest:
            cand = pair_cost[i][j] + solve(rest - {j})
            if cand < best:
                best = cand
        return best

    return solve(frozenset(range(k)))


def decode_and_classify_singly(code, decoders, errors):
    """Per-error reference pipeline: decode each error independently.

    Returns per-weight counters (total, mwpm_only, bposd_only, both) the
    slow way, with no syndrome memoization and no vectorization.
    """
    from surfbench.code_model import Classification, classify_residual, syndrome_of

    mwpm, bposd = decoders
    n = code.num_data
    counts = np.zeros((n + 1, 4), dtype=np.int64)
    for error in errors:
        syndrome = syndrome_of(code, error)
        fails = []
        for decoder in (mwpm, bposd):
            outcome = decoder.decode(syndrome)
            cls = classify_residual(code, error ^ outcome.correction)
            assert cls is not Classification.SYNDROME_NONZERO
            fails.append(cls is Classification.LOGICAL_FAILURE)
        combo = int(fails[0]) + 2 * int(fails[1])
        counts[bin(error).count("1"), combo] += 1
    return counts
