"""Step-function graphon estimation, sampling, and motif/context partitioning.

A graphon is held as a K x K symmetric matrix in [0,1]; cell (i, j) is the
edge probability between the i-th and j-th of K equal-width intervals of
[0,1]. Estimation is the plain align-and-average step function: sort nodes
by descending degree (ties by ascending original id), truncate or zero-pad
each aligned adjacency to K x K, take the elementwise mean.

Homomorphism densities are computed by exact brute-force enumeration with a
compiled kernel when available; set MOTIFCF_PURE=1 to force the pure-Python
fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CapabilityError, ConfigError, DatasetError, FormatError
from .graphs import Graph, degree_sequence

if os.environ.get("MOTIFCF_PURE"):
    from . import _homcount_py as _hom
else:
    try:
        from . import _homcount as _hom
    except ImportError:  # extension not built; identical pure fallback
        from . import _homcount_py as _hom

HOMCOUNT_BACKEND = _hom.BACKEND
MAX_MOTIF_NODES = 5  # exact-enumeration bound

GRAPHON_FORMAT = "motifcf.graphon"
GRAPHON_VERSION = 1


@dataclass
class Graphon:
    K: int
    W: np.ndarray

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=np.float64)
        if self.K < 1 or self.W.shape != (self.K, self.K):
            raise ConfigError(f"graphon shape {self.W.shape} inconsistent with K={self.K}")
        if not np.allclose(self.W, self.W.T):
            raise ConfigError("graphon matrix must be symmetric")
        if self.W.min() < 0.0 or self.W.max() > 1.0:
            raise ConfigError("graphon entries must lie in [0,1]")


@dataclass
class MotifContextPartition:
    """Degree-aligned split of a graph into graphon-covered motif positions
    and the contextual remainder."""

    motif_nodes: np.ndarray  # original node ids, alignment order
    context_nodes: np.ndarray  # original node ids, alignment order
    alignment: np.ndarray  # full permutation, rank -> original id


def degree_rank_order(degrees):
    """Stable order by (-degree, id); ``order[rank]`` is the node at that
    rank."""
    degrees = np.asarray(degrees)
    return np.lexsort((np.arange(len(degrees)), -degrees)).astype(np.int64)


def align_nodes(g: Graph):
    """Permutation sorting nodes by descending degree, ties by ascending
    original id. ``perm[rank]`` is the original node id at that rank."""
    if g.n < 1:
        raise ConfigError("align_nodes requires a non-empty graph")
    return degree_rank_order(degree_sequence(g))


def aligned_adjacency(g: Graph):
    perm = align_nodes(g)
    return g.adj[np.ix_(perm, perm)], perm


def estimate_graphon(graphs, K=None):
    """Mean of degree-aligned adjacencies truncated/zero-padded to K x K.

    K defaults to the rounded average node count of the input graphs.
    """
    graphs = list(graphs)
    if not graphs:
        raise ConfigError("estimate_graphon requires at least one graph")
    if K is None:
        K = max(1, int(np.floor(np.mean([g.n for g in graphs]) + 0.5)))
    if K < 1:
        raise ConfigError(f"K must be >= 1, got {K}")
    acc = np.zeros((K, K), dtype=np.float64)
    for g in graphs:  # fixed iteration order keeps the reduction bit-stable
        a, _ = aligned_adjacency(g)
        m = min(K, g.n)
        acc[:m, :m] += a[:m, :m]
    return Graphon(K, acc / len(graphs))


def sample_graph(w: Graphon, n, seed):
    """Sample an n-node graph; node i lives in cell floor(i*K/n)."""
    if n < 1:
        raise ConfigError("sample size must be >= 1")
    rng = np.random.default_rng(seed)
    cells = (np.arange(n) * w.K) // n
    probs = w.W[np.ix_(cells, cells)]
    iu, ju = np.triu_indices(n, k=1)
    draws = rng.random(len(iu))
    adj = np.zeros((n, n), dtype=np.uint8)
    hit = draws < probs[iu, ju]
    adj[iu[hit], ju[hit]] = 1
    adj[ju[hit], iu[hit]] = 1
    return Graph(n, adj)


def binarize(w: Graphon, mode, threshold=0.5, seed=None):
    """0/1 version of the graphon matrix.

    ``threshold``: entry 1 iff W >= t. ``stochastic``: upper triangle
    (diagonal included) sampled Bernoulli(W) once and mirrored.
    """
    if mode == "threshold":
        if not (0.0 <= threshold <= 1.0):
            raise ConfigError(f"threshold {threshold} outside [0,1]")
        return (w.W >= threshold).astype(np.uint8)
    if mode == "stochastic":
        rng = np.random.default_rng(seed)
        iu, ju = np.triu_indices(w.K, k=0)
        out = np.zeros((w.K, w.K), dtype=np.uint8)
        hit = rng.random(len(iu)) < w.W[iu, ju]
        out[iu[hit], ju[hit]] = 1
        out[ju[hit], iu[hit]] = 1
        return out
    raise ConfigError(f"unknown binarize mode {mode!r}")


def homomorphism_count(motif: Graph, g: Graph):
    if motif.n > MAX_MOTIF_NODES:
        raise CapabilityError(
            f"motif has {motif.n} nodes; exact enumeration is bounded at {MAX_MOTIF_NODES}"
        )
    return _hom.count_homomorphisms(
        np.ascontiguousarray(motif.adj, dtype=np.uint8),
        np.ascontiguousarray(g.adj, dtype=np.uint8),
    )


def homomorphism_density(motif: Graph, g: Graph):
    """t(F, G) = hom(F, G) / n^|F| over all (not necessarily injective)
    edge-preserving vertex maps."""
    if g.n < 1:
        raise ConfigError("host graph must be non-empty")
    return homomorphism_count(motif, g) / float(g.n**motif.n)


def partition_motif_context(g: Graph, w: Graphon):
    """First min(K, n) degree-aligned nodes are the motif positions, the
    rest the context (empty when n <= K; callers must handle that)."""
    perm = align_nodes(g)
    m = min(w.K, g.n)
    return MotifContextPartition(
        motif_nodes=perm[:m].copy(), context_nodes=perm[m:].copy(), alignment=perm
    )


def graphon_as_graph(w: Graphon, mode="threshold", threshold=0.5, seed=None):
    """The binarized graphon viewed as a K-node graph (diagonal cleared)."""
    adj = binarize(w, mode, threshold=threshold, seed=seed).copy()
    np.fill_diagonal(adj, 0)
    return Graph(w.K, adj)


def estimate_class_graphons(ds, indices, K=None, groups=None):
    """One graphon per group over the given graph indices.

    ``groups`` defaults to the dataset labels; pass any per-graph assignment
    vector to estimate per cluster instead of per class.
    """
    indices = np.asarray(indices, dtype=np.int64)
    groups = ds.labels if groups is None else np.asarray(groups)
    out = {}
    for gid in sorted(set(groups[indices].tolist())):
        members = indices[groups[indices] == gid]
        out[gid] = estimate_graphon([ds.graphs[i] for i in members], K=K)
    return out


# -- text persistence ----------------------------------------------------------


def save_graphon(w: Graphon, path):
    lines = [f"{GRAPHON_FORMAT} v{GRAPHON_VERSION}", str(w.K)]
    for row in w.W:
        lines.append(" ".join(f"{x:.17g}" for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_graphon(path):
    p = Path(path)
    if not p.exists():
        raise DatasetError(f"missing graphon file: {p}")
    lines = p.read_text().strip().splitlines()
    if not lines or not lines[0].startswith(GRAPHON_FORMAT):
        raise FormatError(f"not a {GRAPHON_FORMAT} file: {p}")
    k = int(lines[1])
    rows = [[float(x) for x in line.split()] for line in lines[2 : 2 + k]]
    return Graphon(k, np.asarray(rows))
