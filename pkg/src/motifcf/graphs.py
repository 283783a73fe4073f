"""Graph and dataset primitives: ingestion, synthesis, persistence.

Graphs are undirected and simple, stored as dense symmetric 0/1 adjacency
matrices with dense 0-based node ids (desk scale, no sparse structures).
Datasets follow the community multi-file edge-list layout on disk and a
single-file versioned JSON schema for internal persistence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DatasetError, FormatError

DATASET_FORMAT = "motifcf.dataset"
DATASET_VERSION = 1
DEFAULT_DEGREE_BUCKETS = 32


@dataclass
class Graph:
    """Undirected simple graph: node count, adjacency, optional features.

    ``adj`` must be symmetric 0/1 with a zero diagonal. ``n = 0`` is the
    empty-graph sentinel produced by ``induced_subgraph`` on an empty node
    set; downstream operations reject or special-case it.
    """

    n: int
    adj: np.ndarray
    node_features: np.ndarray | None = None

    def __post_init__(self):
        self.adj = np.asarray(self.adj, dtype=np.uint8)
        if self.adj.shape != (self.n, self.n):
            raise ConfigError(f"adjacency shape {self.adj.shape} != ({self.n}, {self.n})")
        if self.n and not np.array_equal(self.adj, self.adj.T):
            raise ConfigError("adjacency must be symmetric")
        if self.n and np.any(np.diag(self.adj)):
            raise ConfigError("adjacency diagonal must be zero")
        if np.any(self.adj > 1):
            raise ConfigError("adjacency entries must be 0/1")
        if self.node_features is not None:
            self.node_features = np.asarray(self.node_features, dtype=np.float64)
            if self.node_features.shape[0] != self.n:
                raise ConfigError("node_features row count must equal n")

    @property
    def num_edges(self):
        return int(self.adj.sum()) // 2

    def edge_list(self):
        iu, ju = np.triu_indices(self.n, k=1)
        keep = self.adj[iu, ju] == 1
        return list(zip(iu[keep].tolist(), ju[keep].tolist()))


def graph_from_edges(n, edges):
    adj = np.zeros((n, n), dtype=np.uint8)
    for i, j in edges:
        adj[i, j] = adj[j, i] = 1
    return Graph(n, adj)


def motif_from_spec(spec):
    """Build a small named graph: 'K4', 'C5', 'P3', 'S4', complete bipartite
    'K3,3', or an adjacency given as a nested list."""
    if isinstance(spec, (list, np.ndarray)):
        adj = np.asarray(spec, dtype=np.uint8)
        return Graph(adj.shape[0], adj)
    if spec[0].upper() == "K" and "," in spec:
        a, b = (int(x) for x in spec[1:].split(","))
        return graph_from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])
    kind, size = spec[0].upper(), int(spec[1:])
    if size < 1:
        raise ConfigError(f"motif size must be >= 1: {spec!r}")
    if kind == "K":
        adj = np.ones((size, size), dtype=np.uint8) - np.eye(size, dtype=np.uint8)
        return Graph(size, adj)
    if kind == "C":
        if size < 3:
            raise ConfigError("cycles need >= 3 nodes")
        return graph_from_edges(size, [(i, (i + 1) % size) for i in range(size)])
    if kind == "P":
        return graph_from_edges(size, [(i, i + 1) for i in range(size - 1)])
    if kind == "S":
        # star: node 0 is the center, size counts all nodes
        return graph_from_edges(size, [(0, i) for i in range(1, size)])
    raise ConfigError(f"unknown motif spec {spec!r}")


def degree_sequence(g: Graph):
    """Row sums of the adjacency matrix."""
    return g.adj.sum(axis=1).astype(np.int64)


def induced_subgraph(g: Graph, nodes):
    """Restrict ``g`` to ``nodes``; ids are remapped contiguously preserving
    the input order. An empty node set yields the n=0 sentinel graph."""
    nodes = list(nodes)
    if any(v < 0 or v >= g.n for v in nodes):
        raise ConfigError("induced_subgraph: node id outside graph")
    if not nodes:
        return Graph(0, np.zeros((0, 0), dtype=np.uint8))
    idx = np.asarray(nodes, dtype=np.int64)
    sub = g.adj[np.ix_(idx, idx)]
    feats = g.node_features[idx] if g.node_features is not None else None
    return Graph(len(nodes), sub, feats)


def default_node_features(g: Graph, max_bucket=DEFAULT_DEGREE_BUCKETS):
    """One-hot of degree capped at ``max_bucket - 1`` (for attribute-free
    datasets)."""
    feats = np.zeros((g.n, max_bucket), dtype=np.float64)
    if g.n:
        buckets = np.minimum(degree_sequence(g), max_bucket - 1)
        feats[np.arange(g.n), buckets] = 1.0
    return feats


@dataclass
class Split:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        self.train = np.asarray(self.train, dtype=np.int64)
        self.val = np.asarray(self.val, dtype=np.int64)
        self.test = np.asarray(self.test, dtype=np.int64)

    def check_covers(self, n):
        merged = np.concatenate([self.train, self.val, self.test])
        if len(np.unique(merged)) != len(merged):
            raise ConfigError("split sets overlap")
        if sorted(merged.tolist()) != list(range(n)):
            raise ConfigError("split sets must cover all graph indices")


@dataclass
class LabeledDataset:
    """A list of graphs with class labels, a designated anomaly class, and a
    train/val/test split over graph indices."""

    graphs: list
    labels: np.ndarray
    anomaly_class: int
    split: Split
    name: str = "dataset"
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.graphs) != len(self.labels):
            raise ConfigError("graphs/labels length mismatch")
        self.split.check_covers(len(self.graphs))
        if self.anomaly_class not in self.labels:
            raise ConfigError(f"anomaly class {self.anomaly_class} absent from labels")

    def __len__(self):
        return len(self.graphs)

    def class_ids(self):
        return sorted(set(self.labels.tolist()))

    def indices_of_class(self, label, within=None):
        pool = np.arange(len(self.graphs)) if within is None else np.asarray(within)
        return pool[self.labels[pool] == label]


def _all_train_split(n):
    return Split(np.arange(n), np.array([], dtype=np.int64), np.array([], dtype=np.int64))


# -- community edge-list layout ----------------------------------------------


def load_dataset(root_path, name, anomaly_class=0):
    """Load ``<name>_A.txt`` / ``_graph_indicator.txt`` / ``_graph_labels.txt``
    from ``root_path``.

    1-based file node ids are remapped to contiguous 0-based per-graph ids;
    input adjacency is symmetrized silently; duplicate edges and self-loops
    are dropped (counted in ``extras['dropped_edges']``). Labels are remapped
    to 0-based contiguous class ids in sorted order of the raw values.
    The returned split puts every graph in train; use ``make_split``.
    """
    root = Path(root_path)
    paths = {
        "A": root / f"{name}_A.txt",
        "indicator": root / f"{name}_graph_indicator.txt",
        "labels": root / f"{name}_graph_labels.txt",
    }
    for key, p in paths.items():
        if not p.exists():
            raise DatasetError(f"missing dataset file: {p}")

    node_graph = []  # node position -> graph id (1-based as in file)
    with paths["indicator"].open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                node_graph.append(int(line))
            except ValueError:
                raise FormatError(f"bad graph indicator {line!r}", line=lineno)
    node_graph = np.asarray(node_graph, dtype=np.int64)
    n_nodes = len(node_graph)
    graph_ids = np.unique(node_graph)

    raw_labels = []
    with paths["labels"].open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw_labels.append(int(float(line)))
            except ValueError:
                raise FormatError(f"bad graph label {line!r}", line=lineno)
    if len(raw_labels) != len(graph_ids):
        raise FormatError(
            f"{len(raw_labels)} labels for {len(graph_ids)} graphs in indicator file"
        )

    # per-graph local ids in file order
    local_id = np.zeros(n_nodes, dtype=np.int64)
    counts = {}
    for pos, gid in enumerate(node_graph):
        local_id[pos] = counts.get(gid, 0)
        counts[gid] = counts.get(gid, 0) + 1
    sizes = {gid: counts[gid] for gid in graph_ids.tolist()}
    gid_index = {gid: i for i, gid in enumerate(graph_ids.tolist())}

    adjs = [np.zeros((sizes[gid], sizes[gid]), dtype=np.uint8) for gid in graph_ids.tolist()]
    dropped = 0
    with paths["A"].open() as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise FormatError(f"expected 'u, v' edge pair, got {line!r}", line=lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise FormatError(f"non-integer node id in {line!r}", line=lineno)
            if not (1 <= u <= n_nodes) or not (1 <= v <= n_nodes):
                raise FormatError(
                    f"edge {u} {v} references a node not assigned to any graph",
                    line=lineno,
                )
            gu, gv = node_graph[u - 1], node_graph[v - 1]
            if gu != gv:
                raise FormatError(f"edge {u} {v} crosses graphs {gu} and {gv}", line=lineno)
            if u == v:
                dropped += 1
                continue
            a = adjs[gid_index[gu]]
            lu, lv = local_id[u - 1], local_id[v - 1]
            if a[lu, lv]:
                dropped += 1  # duplicate or reverse direction of a seen edge
            a[lu, lv] = a[lv, lu] = 1

    graphs = [Graph(a.shape[0], a) for a in adjs]
    label_map = {raw: i for i, raw in enumerate(sorted(set(raw_labels)))}
    labels = np.asarray([label_map[r] for r in raw_labels], dtype=np.int64)
    return LabeledDataset(
        graphs,
        labels,
        anomaly_class=anomaly_class,
        split=_all_train_split(len(graphs)),
        name=name,
        extras={"dropped_edges": dropped, "raw_label_map": {str(k): v for k, v in label_map.items()}},
    )


# -- internal single-file persistence ------------------------------------------


def save_dataset(ds: LabeledDataset, path):
    """Serialize to the internal versioned JSON schema (see docs/config.md)."""
    payload = {
        "format": DATASET_FORMAT,
        "version": DATASET_VERSION,
        "name": ds.name,
        "anomaly_class": int(ds.anomaly_class),
        "labels": ds.labels.tolist(),
        "split": {
            "train": ds.split.train.tolist(),
            "val": ds.split.val.tolist(),
            "test": ds.split.test.tolist(),
        },
        "graphs": [
            {"n": g.n, "edges": [[int(i), int(j)] for i, j in g.edge_list()]}
            for g in ds.graphs
        ],
        "extras": ds.extras,
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")


def load_saved_dataset(path):
    p = Path(path)
    if not p.exists():
        raise DatasetError(f"missing dataset file: {p}")
    payload = json.loads(p.read_text())
    if payload.get("format") != DATASET_FORMAT:
        raise FormatError(f"not a {DATASET_FORMAT} file: {p}")
    if payload.get("version") != DATASET_VERSION:
        raise FormatError(f"unsupported dataset version {payload.get('version')}")
    graphs = [graph_from_edges(rec["n"], rec["edges"]) for rec in payload["graphs"]]
    split = Split(**{k: np.asarray(v, dtype=np.int64) for k, v in payload["split"].items()})
    return LabeledDataset(
        graphs,
        np.asarray(payload["labels"], dtype=np.int64),
        anomaly_class=payload["anomaly_class"],
        split=split,
        name=payload.get("name", "dataset"),
        extras=payload.get("extras", {}),
    )


# -- splitting / anomaly designation -------------------------------------------


def make_split(ds: LabeledDataset, ratios=(0.2, 0.4, 0.4), seed=0):
    """Return a copy of ``ds`` with a stratified train/val/test split.

    Stratification keeps every class present in every part whenever class
    counts allow, which matters once the anomaly class is downsampled.
    """
    if len(ratios) != 3 or abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"split ratios must be 3 values summing to 1: {ratios}")
    rng = np.random.default_rng(seed)
    parts = [[], [], []]
    for label in ds.class_ids():
        idx = ds.indices_of_class(label)
        idx = idx[rng.permutation(len(idx))]
        n = len(idx)
        n_train = max(1, int(round(ratios[0] * n))) if n >= 3 else max(1, n - 2)
        n_val = max(1, int(round(ratios[1] * n))) if n - n_train >= 2 else max(0, n - n_train - 1)
        n_train = min(n_train, n)
        n_val = min(n_val, n - n_train)
        parts[0].extend(idx[:n_train].tolist())
        parts[1].extend(idx[n_train : n_train + n_val].tolist())
        parts[2].extend(idx[n_train + n_val :].tolist())
    split = Split(*(np.sort(np.asarray(p, dtype=np.int64)) for p in parts))
    return LabeledDataset(
        ds.graphs, ds.labels, ds.anomaly_class, split, name=ds.name, extras=dict(ds.extras)
    )


def downsample_anomaly(ds: LabeledDataset, anomaly_class, keep_fraction, seed=0):
    """Keep a fraction of the designated class, relabel it 0 and the rest 1.

    Mirrors the usual benchmark protocol for turning a classification set
    into an anomaly-detection set. Extras carry the per-graph source indices.
    """
    if not (0.0 < keep_fraction <= 1.0):
        raise ConfigError(f"keep_fraction must be in (0, 1]: {keep_fraction}")
    if anomaly_class not in ds.labels:
        raise ConfigError(f"class {anomaly_class} not present")
    rng = np.random.default_rng(seed)
    anom_idx = np.flatnonzero(ds.labels == anomaly_class)
    keep_n = max(1, int(round(keep_fraction * len(anom_idx))))
    kept_anom = np.sort(rng.permutation(anom_idx)[:keep_n])
    keep_mask = ds.labels != anomaly_class
    keep_mask[kept_anom] = True
    kept = np.flatnonzero(keep_mask)
    graphs = [ds.graphs[i] for i in kept]
    labels = np.where(ds.labels[kept] == anomaly_class, 0, 1)
    extras = dict(ds.extras)
    extras["source_indices"] = kept.tolist()
    return LabeledDataset(
        graphs,
        labels,
        anomaly_class=0,
        split=_all_train_split(len(graphs)),
        name=ds.name,
        extras=extras,
    )


# -- synthetic ground-truth data ------------------------------------------------


@dataclass
class PlantedClass:
    motif: Graph
    context_range: tuple  # inclusive (lo, hi) context node counts
    context_p: float


@dataclass
class PlantedMotifConfig:
    classes: list  # of PlantedClass
    graphs_per_class: int
    cross_edge_count: int = 2
    seed: int = 0

    def __post_init__(self):
        if not self.classes:
            raise ConfigError("at least one planted class required")
        for c in self.classes:
            lo, hi = c.context_range
            if lo > hi or lo < 1:
                raise ConfigError(f"empty context range {c.context_range}")
            if not (0.0 <= c.context_p <= 1.0):
                raise ConfigError(f"context edge probability {c.context_p} outside [0,1]")
            if self.cross_edge_count > c.motif.n * lo:
                raise ConfigError("cross_edge_count exceeds available motif-context pairs")
        if self.graphs_per_class < 1:
            raise ConfigError("graphs_per_class must be >= 1")


def generate_planted_motif_dataset(cfg: PlantedMotifConfig):
    """Each graph = class motif + Erdos-Renyi context + exactly
    ``cross_edge_count`` random motif-context edges.

    Deterministic per seed; ground-truth roles are kept in
    ``extras['planted_motif_nodes']`` and the class motifs in
    ``extras['planted_class_motifs']``.
    """
    graphs, labels, roles = [], [], []
    for ci, cls in enumerate(cfg.classes):
        m = cls.motif.n
        lo, hi = cls.context_range
        for gi in range(cfg.graphs_per_class):
            rng = np.random.default_rng([cfg.seed, ci, gi])
            ctx_n = int(rng.integers(lo, hi + 1))
            n = m + ctx_n
            adj = np.zeros((n, n), dtype=np.uint8)
            adj[:m, :m] = cls.motif.adj
            iu, ju = np.triu_indices(ctx_n, k=1)
            draw = rng.random(len(iu)) < cls.context_p
            adj[m + iu[draw], m + ju[draw]] = 1
            adj[m + ju[draw], m + iu[draw]] = 1
            pairs = rng.choice(m * ctx_n, size=cfg.cross_edge_count, replace=False)
            for p in np.sort(pairs):
                i, j = int(p) // ctx_n, m + int(p) % ctx_n
                adj[i, j] = adj[j, i] = 1
            graphs.append(Graph(n, adj))
            labels.append(ci)
            roles.append(list(range(m)))
    return LabeledDataset(
        graphs,
        np.asarray(labels, dtype=np.int64),
        anomaly_class=0,
        split=_all_train_split(len(graphs)),
        name="planted",
        extras={
            "planted_motif_nodes": roles,
            "planted_class_motifs": [c.motif.adj.tolist() for c in cfg.classes],
        },
    )
