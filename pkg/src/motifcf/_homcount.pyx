# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled homomorphism-counting kernel.

Same algorithm as motifcf._homcount_py (depth-first assignment with
back-edge pruning); the inner loops run without Python overhead.
"""

import numpy as np

cimport numpy as cnp

from motifcf._homcount_py import plan_order

BACKEND = "cython"


cdef long long _search(int d, int k, int n,
                       cnp.uint8_t[:, ::1] adj,
                       int[:, ::1] backs, int[::1] nback,
                       int[::1] assigned) noexcept nogil:
    cdef long long total = 0
    cdef int v, j, ok
    for v in range(n):
        ok = 1
        for j in range(nback[d]):
            if adj[v, assigned[backs[d, j]]] == 0:
                ok = 0
                break
        if ok:
            if d == k - 1:
                total += 1
            else:
                assigned[d] = v
                total += _search(d + 1, k, n, adj, backs, nback, assigned)
    return total


def count_homomorphisms(motif_adj, adj):
    """Number of edge-preserving maps V(motif) -> V(graph)."""
    cdef cnp.uint8_t[:, ::1] a = np.ascontiguousarray(adj, dtype=np.uint8)
    cdef int n = a.shape[0]
    cdef int k = np.asarray(motif_adj).shape[0]
    if n == 0:
        return 0
    if k == 0:
        return 1
    _, back_lists = plan_order(motif_adj)
    backs_arr = np.zeros((k, max(1, k)), dtype=np.int32)
    nback_arr = np.zeros(k, dtype=np.int32)
    for d, lst in enumerate(back_lists):
        nback_arr[d] = len(lst)
        for j, b in enumerate(lst):
            backs_arr[d, j] = b
    cdef int[:, ::1] backs = backs_arr
    cdef int[::1] nback = nback_arr
    cdef int[::1] assigned = np.zeros(k, dtype=np.int32)
    cdef long long total
    with nogil:
        total = _search(0, k, n, a, backs, nback, assigned)
    return int(total)
