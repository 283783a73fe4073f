"""Counterfactual quality scores and detection metrics.

The four quality scores concretize one-line descriptions from the anomaly-
detection literature; the exact formulas below are this package's
operationalization (documented in the README), so absolute values are only
comparable within this implementation:

* Realism  - squared MMD between structural feature vectors of the real and
  counterfactual sets (Gaussian kernel, median-heuristic bandwidth, biased
  V-statistic so identical sets score exactly 0), scaled x100. Lower is
  better.
* Proximity - mean Euclidean feature distance between each counterfactual
  and its motif donor. Lower is better.
* Validity - fraction of counterfactuals a reference classifier assigns to
  the motif donor's class.
* Sparsity - mean relative edge symmetric difference against the motif
  donor under the producer's node correspondence. Lower is better.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MetricsError
from .graphs import Graph, degree_sequence

FEATURE_BUCKETS = 16
NODE_CAP = 600  # desk-scale bound used to normalize node counts


def clustering_coefficients(g: Graph):
    """Per-node local clustering coefficient (0 when degree < 2)."""
    a = g.adj.astype(np.int64)
    deg = a.sum(axis=1)
    triangles = np.diag(a @ a @ a) / 2
    pairs = deg * (deg - 1) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        cc = np.where(pairs > 0, triangles / np.maximum(pairs, 1), 0.0)
    return cc


def graph_feature_vector(g: Graph, buckets=FEATURE_BUCKETS, node_cap=NODE_CAP):
    """Deterministic structural fingerprint: normalized degree histogram,
    edge density, mean clustering coefficient, normalized node count."""
    if g.n < 1:
        raise MetricsError("feature vector undefined for the empty graph")
    hist = np.zeros(buckets)
    for d in degree_sequence(g):
        hist[min(int(d), buckets - 1)] += 1
    hist /= g.n
    density = 2.0 * g.num_edges / (g.n * (g.n - 1)) if g.n > 1 else 0.0
    clustering = float(clustering_coefficients(g).mean())
    return np.concatenate([hist, [density, clustering, g.n / node_cap]])


def feature_distance(fv_a, fv_b):
    return float(np.linalg.norm(np.asarray(fv_a) - np.asarray(fv_b)))


# -- realism ---------------------------------------------------------------------


def _median_bandwidth(x):
    """Median pairwise distance over the pooled sample; 1.0 fallback when
    all points coincide."""
    diffs = x[:, None, :] - x[None, :, :]
    dists = np.sqrt((diffs**2).sum(axis=2))
    iu = np.triu_indices(len(x), k=1)
    vals = dists[iu]
    med = float(np.median(vals)) if len(vals) else 0.0
    return med if med > 0 else 1.0


def realism_score(real_set, cf_set):
    """Squared MMD x100 between the two sets' feature vectors.

    Uses the biased V-statistic (means over all kernel pairs, diagonal
    included): no singleton guard is needed and identical sets score exactly
    0, which the unbiased estimator does not guarantee.
    """
    if not real_set or not cf_set:
        raise MetricsError("realism_score needs two non-empty graph sets")
    x = np.array([graph_feature_vector(g) for g in real_set])
    y = np.array([graph_feature_vector(g) for g in cf_set])
    bw = _median_bandwidth(np.vstack([x, y]))

    def kmean(a, b):
        d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
        return float(np.exp(-d2 / (2.0 * bw**2)).mean())

    mmd2 = kmean(x, x) + kmean(y, y) - 2.0 * kmean(x, y)
    return 100.0 * max(0.0, mmd2)


# -- proximity / sparsity -----------------------------------------------------------


def proximity_score(pairs):
    """Mean feature distance between each counterfactual and its source
    (the motif donor)."""
    if not pairs:
        raise MetricsError("proximity_score needs at least one pair")
    return float(
        np.mean(
            [
                feature_distance(graph_feature_vector(cf), graph_feature_vector(src))
                for cf, src in pairs
            ]
        )
    )


def sparsity_score(pairs, motif_counts=None):
    """Mean |E_cf symmetric-difference E_source| / max(1, |E_source|).

    Node correspondence comes from the producer: the first
    ``motif_counts[i]`` counterfactual nodes map onto the source's leading
    aligned nodes; all other counterfactual nodes are counterfactual-only and
    their edges count as additions. Refuses to guess when ``motif_counts``
    is missing.
    """
    if not pairs:
        raise MetricsError("sparsity_score needs at least one pair")
    if motif_counts is None:
        raise MetricsError(
            "sparsity_score requires the producer's node correspondence (motif_counts)"
        )
    scores = []
    for (cf, src), m in zip(pairs, motif_counts):
        if m > cf.n or m > src.n:
            raise MetricsError("motif_count exceeds a graph's node count")
        cf_edges = set()
        for i, j in cf.edge_list():
            # counterfactual-only nodes are mapped past the source ids
            ii = i if i < m else src.n + (i - m)
            jj = j if j < m else src.n + (j - m)
            cf_edges.add((min(ii, jj), max(ii, jj)))
        src_edges = set(src.edge_list())
        diff = len(cf_edges ^ src_edges)
        scores.append(diff / max(1, len(src_edges)))
    return float(np.mean(scores))


# -- validity -----------------------------------------------------------------------


def validity_score(cf_set, ref_classifier, predict_fn):
    """Fraction of counterfactuals predicted as their intended (motif-donor)
    label by a classifier trained on real data only."""
    if not cf_set:
        raise MetricsError("validity_score needs at least one counterfactual")
    if not getattr(ref_classifier, "trained", False):
        raise MetricsError("reference classifier must be trained")
    hits = sum(
        1 for g, intended in cf_set if predict_fn(ref_classifier, g)[1] == intended
    )
    return hits / len(cf_set)


# -- detection ------------------------------------------------------------------------


@dataclass
class DetectionMetrics:
    precision: float
    recall: float
    f1: float
    degenerate: bool  # a zero denominator was hit somewhere

    def as_tuple(self):
        return (self.precision, self.recall, self.f1)


def detection_metrics(predicted, actual, positive_class):
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape:
        raise MetricsError("predicted/actual length mismatch")
    tp = int(np.sum((predicted == positive_class) & (actual == positive_class)))
    fp = int(np.sum((predicted == positive_class) & (actual != positive_class)))
    fn = int(np.sum((predicted != positive_class) & (actual == positive_class)))
    degenerate = False
    if tp + fp == 0:
        precision, degenerate = 0.0, True
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        recall, degenerate = 0.0, True
    else:
        recall = tp / (tp + fn)
    if precision + recall == 0:
        f1, degenerate = 0.0, True
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return DetectionMetrics(precision, recall, f1, degenerate)
