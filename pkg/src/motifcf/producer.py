"""Raw counterfactual production: splice one graph's motif onto another's
context.

The recipe: degree-align both donors, merge them block-diagonally with a few
random cross edges, build a graphon-derived 0/1 mask (keep the motif part of
G, keep the non-graphon part of H, keep the sampled cross edges), take the
elementwise product with the merged adjacency, then restrict the node set to
motif-of-G plus context-of-H. The result carries G's label.

The masking is an elementwise product (logical AND on 0/1 matrices), never a
true XNOR: XNOR would materialize edges wherever mask and adjacency are both
zero, densifying the output nonsensically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DatasetError, FormatError, ProducerError
from .graphs import Graph, degree_sequence, induced_subgraph
from .graphon import Graphon, aligned_adjacency, binarize

RAWSET_FORMAT = "motifcf.raws"
RAWSET_VERSION = 1


@dataclass
class RawCounterfactual:
    """Unrefined splice of G's motif and H's context.

    Node indexing: positions 0..motif_count-1 are G's aligned motif nodes (in
    G's alignment order), the rest H's aligned context nodes. ``adj`` covers
    exactly this restricted node set. ``cross_candidates`` is every
    motif-context pair; ``initial_cross_edges`` the sampled connections
    present in ``adj``.
    """

    n: int
    motif_count: int
    adj: np.ndarray
    initial_cross_edges: list
    provenance: dict  # g_index, h_index, label, seed, self_recombination
    e_con_real: int  # connection-edge count measured on the context donor
    context_entropy_real: float

    @property
    def context_count(self):
        return self.n - self.motif_count

    def cross_candidates(self):
        """All motif x context pairs in restricted indexing."""
        return [
            (i, j)
            for i in range(self.motif_count)
            for j in range(self.motif_count, self.n)
        ]

    def to_graph(self):
        return Graph(self.n, self.adj)


def merge_graphs(G: Graph, H: Graph, eta, seed):
    """Block-diagonal merge of two (already aligned) donors plus ``eta``
    distinct uniformly sampled cross edges.

    Returns (A_p, A_C) where A_C is the n_g x n_h cross block.
    """
    if eta < 0:
        raise ConfigError("eta must be >= 0")
    if eta > G.n * H.n:
        raise ConfigError(f"eta={eta} exceeds the {G.n * H.n} available cross pairs")
    n = G.n + H.n
    a_p = np.zeros((n, n), dtype=np.uint8)
    a_p[: G.n, : G.n] = G.adj
    a_p[G.n :, G.n :] = H.adj
    a_c = np.zeros((G.n, H.n), dtype=np.uint8)
    if eta:
        rng = np.random.default_rng(seed)
        pairs = rng.choice(G.n * H.n, size=eta, replace=False)
        for p in np.sort(pairs):
            i, j = int(p) // H.n, int(p) % H.n
            a_c[i, j] = 1
            a_p[i, G.n + j] = a_p[G.n + j, i] = 1
    return a_p, a_c


def build_mask(Wg: Graphon, Wh: Graphon, A_H_aligned, A_C, dims, binarize_mode="threshold", threshold=0.5, seed=None):
    """Mask matrix [[binarized Wg extended, A_C], [A_C^T, |A_H - binarized
    Wh extended|]] over the merged index space."""
    n_g, n_h = dims
    if Wg.K > n_g or Wh.K > n_h:
        raise ConfigError(
            f"graphon resolution ({Wg.K}, {Wh.K}) exceeds donor sizes ({n_g}, {n_h})"
        )
    if A_H_aligned.shape != (n_h, n_h) or A_C.shape != (n_g, n_h):
        raise ConfigError("mask block dimensions inconsistent with donor sizes")

    def extended(w, size, sub_seed):
        ext = np.zeros((size, size), dtype=np.float64)
        ext[: w.K, : w.K] = w.W
        return binarize(Graphon(size, ext), binarize_mode, threshold=threshold, seed=sub_seed)

    rng = np.random.default_rng(seed) if binarize_mode == "stochastic" else None
    wg_hat = extended(Wg, n_g, rng.integers(1 << 31) if rng is not None else None)
    wh_hat = extended(Wh, n_h, rng.integers(1 << 31) if rng is not None else None)

    n = n_g + n_h
    mask = np.zeros((n, n), dtype=np.uint8)
    mask[:n_g, :n_g] = wg_hat
    mask[:n_g, n_g:] = A_C
    mask[n_g:, :n_g] = A_C.T
    mask[n_g:, n_g:] = np.abs(
        A_H_aligned.astype(np.int16) - wh_hat.astype(np.int16)
    ).astype(np.uint8)
    return mask


def normalized_degree_entropy(degrees):
    """Shannon entropy of the degree distribution normalized by ln(n);
    1 for regular subgraphs, 0 by convention for single nodes or empty
    degree sums."""
    d = np.asarray(degrees, dtype=np.float64)
    n = len(d)
    if n <= 1:
        return 0.0
    total = d.sum()
    if total <= 0:
        return 0.0
    p = d / total
    nz = p > 0
    return float(-(p[nz] * np.log(p[nz])).sum() / np.log(n))


def connection_edge_count(adj_aligned, motif_count):
    """Edges between the first ``motif_count`` aligned nodes and the rest."""
    return int(adj_aligned[:motif_count, motif_count:].sum())


def produce_raw_counterfactual(
    G: Graph,
    H: Graph,
    Wg: Graphon,
    Wh: Graphon,
    eta=2,
    seed=0,
    binarize_mode="threshold",
    threshold=0.5,
    provenance=None,
):
    """End-to-end raw counterfactual from motif donor G and context donor H.

    Requires eta >= 1 so the two parts stay connected. If none of the eta
    sampled cross edges lands between surviving nodes, eta fresh edges are
    resampled uniformly from the surviving candidate pairs.
    """
    if eta < 1:
        raise ConfigError("eta must be >= 1 to keep the output connected")
    if G.n < 1 or H.n < 1:
        raise ProducerError("donors must be non-empty")

    a_g, g_perm = aligned_adjacency(G)
    a_h, h_perm = aligned_adjacency(H)
    m_g = min(Wg.K, G.n)
    m_h = min(Wh.K, H.n)
    c_h = H.n - m_h
    if c_h < 1:
        raise ProducerError(
            f"context donor has no context nodes (n={H.n} <= K={m_h})"
        )

    # donors smaller than the graphon use its top-left block
    wg_eff = Wg if Wg.K <= G.n else Graphon(m_g, Wg.W[:m_g, :m_g].copy())
    wh_eff = Wh if Wh.K <= H.n else Graphon(m_h, Wh.W[:m_h, :m_h].copy())

    rng = np.random.default_rng(seed)
    g_aligned = Graph(G.n, a_g)
    h_aligned = Graph(H.n, a_h)
    a_p, a_c = merge_graphs(g_aligned, h_aligned, eta, rng.integers(1 << 31))
    mask = build_mask(
        wg_eff,
        wh_eff,
        a_h,
        a_c,
        dims=(G.n, H.n),
        binarize_mode=binarize_mode,
        threshold=threshold,
        seed=rng.integers(1 << 31),
    )
    masked = (mask * a_p).astype(np.uint8)

    keep = np.concatenate([np.arange(m_g), G.n + m_h + np.arange(c_h)])
    adj = masked[np.ix_(keep, keep)].copy()
    np.fill_diagonal(adj, 0)

    if adj[:m_g, :m_g].sum() == 0:
        raise ProducerError(
            f"motif donor produced an empty motif (g_index="
            f"{(provenance or {}).get('g_index', '?')}); graphon keeps no motif edges"
        )

    n = m_g + c_h
    cross_block = adj[:m_g, m_g:]
    if cross_block.sum() == 0:
        pairs = rng.choice(m_g * c_h, size=min(eta, m_g * c_h), replace=False)
        for p in np.sort(pairs):
            i, j = int(p) // c_h, m_g + int(p) % c_h
            adj[i, j] = adj[j, i] = 1
    cross_edges = [
        (int(i), int(m_g + j)) for i, j in zip(*np.nonzero(adj[:m_g, m_g:]))
    ]

    # realistic connection count and context entropy are measured on the
    # context donor; cached here so refinement never re-aligns H
    context_sub = induced_subgraph(h_aligned, range(m_h, H.n))
    prov = dict(provenance or {})
    prov.setdefault("g_index", -1)
    prov.setdefault("h_index", -1)
    prov.setdefault("label", -1)
    prov["seed"] = int(seed) if np.isscalar(seed) else list(np.ravel(seed).tolist())
    prov["self_recombination"] = bool(
        prov["g_index"] >= 0 and prov["g_index"] == prov["h_index"]
    )

    return RawCounterfactual(
        n=n,
        motif_count=m_g,
        adj=adj,
        initial_cross_edges=cross_edges,
        provenance=prov,
        e_con_real=connection_edge_count(a_h, m_h),
        context_entropy_real=normalized_degree_entropy(degree_sequence(context_sub)),
    )


def check_edge_decomposition(raw: RawCounterfactual, G: Graph, H: Graph, Wg: Graphon, Wh: Graphon, threshold=0.5):
    """Every edge must be a graphon-kept G-motif edge, a non-graphon H-context
    edge, or a cross candidate. Returns True or raises ProducerError."""
    a_g, _ = aligned_adjacency(G)
    a_h, _ = aligned_adjacency(H)
    m_g = raw.motif_count
    m_h = min(Wh.K, H.n)
    wg_hat = (Wg.W >= threshold).astype(np.uint8)
    for i in range(raw.n):
        for j in range(i + 1, raw.n):
            if not raw.adj[i, j]:
                continue
            if i < m_g and j < m_g:
                if not (a_g[i, j] and wg_hat[i, j]):
                    raise ProducerError(f"motif edge ({i},{j}) not graphon-kept")
            elif i >= m_g and j >= m_g:
                hi, hj = m_h + i - m_g, m_h + j - m_g
                if not a_h[hi, hj]:
                    raise ProducerError(f"context edge ({i},{j}) absent from donor H")
            # cross pairs are always candidates
    return True


def pair_donors(ds, indices, labels, per_graph=1, pairing="same-class", context_ok=None, seed=0):
    """Deterministic (motif donor, context donor) index pairs.

    ``context_ok`` is an optional boolean mask over dataset indices marking
    graphs eligible to donate context (those larger than the graphon).
    """
    if pairing not in ("same-class", "cross-class"):
        raise ConfigError(f"unknown pairing policy {pairing!r}")
    indices = np.asarray(indices)
    pairs = []
    for k, g_idx in enumerate(indices):
        rng = np.random.default_rng([seed, int(g_idx), 17])
        if pairing == "same-class":
            pool = indices[labels[indices] == labels[g_idx]]
        else:
            pool = indices[labels[indices] != labels[g_idx]]
            if len(pool) == 0:
                pool = indices
        if context_ok is not None:
            pool = pool[context_ok[pool]]
        if len(pool) == 0:
            raise ProducerError(
                f"no eligible context donor for graph {int(g_idx)} under {pairing}"
            )
        for _ in range(per_graph):
            pairs.append((int(g_idx), int(rng.choice(pool))))
    return pairs


# -- persistence -----------------------------------------------------------------


def save_raws(raws, path):
    payload = {
        "format": RAWSET_FORMAT,
        "version": RAWSET_VERSION,
        "raws": [
            {
                "n": r.n,
                "motif_count": r.motif_count,
                "edges": [[int(i), int(j)] for i, j in Graph(r.n, r.adj).edge_list()],
                "initial_cross_edges": [[int(i), int(j)] for i, j in r.initial_cross_edges],
                "provenance": r.provenance,
                "e_con_real": int(r.e_con_real),
                "context_entropy_real": float(r.context_entropy_real),
            }
            for r in raws
        ],
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")


def load_raws(path):
    p = Path(path)
    if not p.exists():
        raise DatasetError(f"missing raw-counterfactual file: {p}")
    payload = json.loads(p.read_text())
    if payload.get("format") != RAWSET_FORMAT:
        raise FormatError(f"not a {RAWSET_FORMAT} file: {p}")
    out = []
    for rec in payload["raws"]:
        adj = np.zeros((rec["n"], rec["n"]), dtype=np.uint8)
        for i, j in rec["edges"]:
            adj[i, j] = adj[j, i] = 1
        out.append(
            RawCounterfactual(
                n=rec["n"],
                motif_count=rec["motif_count"],
                adj=adj,
                initial_cross_edges=[tuple(e) for e in rec["initial_cross_edges"]],
                provenance=rec["provenance"],
                e_con_real=rec["e_con_real"],
                context_entropy_real=rec["context_entropy_real"],
            )
        )
    return out


def save_manifest(raws, path):
    """One provenance record per output: donors, seed, class."""
    lines = ["g_index,h_index,label,seed"]
    for r in raws:
        p = r.provenance
        lines.append(f"{p['g_index']},{p['h_index']},{p['label']},{p['seed']}")
    Path(path).write_text("\n".join(lines) + "\n")
