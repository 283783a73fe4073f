"""Pure-Python homomorphism counting (fallback for the compiled kernel).

Counts all vertex maps from a small pattern graph into a host graph that
preserve edges (labeled homomorphisms, repeats allowed). The search assigns
pattern vertices one at a time in a connectivity-greedy order and prunes on
every edge back to already-assigned vertices; the final level is counted via
a boolean mask instead of iterated.

`motifcf._homcount` implements the identical algorithm in Cython; both
backends are interchangeable and cross-checked in the test suite.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def plan_order(motif_adj):
    """Greedy vertex order maximizing early back-edges (ties: lowest id).

    Returns (order, backs) where backs[d] lists the positions < d whose
    ordered vertices are motif-adjacent to the vertex at position d.
    """
    m = np.asarray(motif_adj)
    k = m.shape[0]
    degrees = m.sum(axis=1)
    remaining = set(range(k))
    first = max(remaining, key=lambda v: (degrees[v], -v))
    order = [first]
    remaining.discard(first)
    while remaining:
        nxt = max(
            remaining,
            key=lambda v: (sum(m[v, u] for u in order), degrees[v], -v),
        )
        order.append(nxt)
        remaining.discard(nxt)
    backs = []
    for d, v in enumerate(order):
        backs.append([j for j in range(d) if m[v, order[j]]])
    return order, backs


def count_homomorphisms(motif_adj, adj):
    """Number of edge-preserving maps V(motif) -> V(graph)."""
    motif_adj = np.asarray(motif_adj)
    adj = np.asarray(adj)
    k = motif_adj.shape[0]
    n = adj.shape[0]
    if n == 0:
        return 0
    if k == 0:
        return 1
    _, backs = plan_order(motif_adj)
    rows = adj.astype(bool)
    all_nodes = np.ones(n, dtype=bool)
    assigned = np.empty(k, dtype=np.int64)

    def candidates(d):
        mask = all_nodes
        for j in backs[d]:
            mask = mask & rows[assigned[j]]
        return mask

    def recurse(d, mask):
        if d == k - 1:
            return int(mask.sum())
        total = 0
        for v in np.flatnonzero(mask):
            assigned[d] = v
            total += recurse(d + 1, candidates(d + 1))
        return total

    return recurse(0, candidates(0))
