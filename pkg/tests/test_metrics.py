import numpy as np
import pytest

from motifcf import graphs as gl
from motifcf import metrics as mt
from motifcf.errors import MetricsError


def er_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n), dtype=np.uint8)
    iu, ju = np.triu_indices(n, k=1)
    hit = rng.random(len(iu)) < p
    adj[iu[hit], ju[hit]] = adj[ju[hit], iu[hit]] = 1
    return gl.Graph(n, adj)


# -- features ----------------------------------------------------------------


def test_feature_vector_k3():
    fv = mt.graph_feature_vector(gl.motif_from_spec("K3"))
    assert fv[mt.FEATURE_BUCKETS] == 1.0  # density
    assert fv[mt.FEATURE_BUCKETS + 1] == 1.0  # clustering


def test_feature_vector_empty_graph():
    g = gl.Graph(5, np.zeros((5, 5), dtype=np.uint8))
    fv = mt.graph_feature_vector(g)
    assert fv[0] == 1.0 and fv[1 : mt.FEATURE_BUCKETS].sum() == 0.0
    assert fv[mt.FEATURE_BUCKETS] == 0.0


def test_feature_vector_c5_clustering_zero():
    # direct triangle counting: C5 has none
    fv = mt.graph_feature_vector(gl.motif_from_spec("C5"))
    assert fv[mt.FEATURE_BUCKETS + 1] == 0.0


def test_feature_distance_density_only():
    # vectors identical except a 0.5 density gap -> distance 0.5
    a = np.zeros(19)
    b = a.copy()
    b[mt.FEATURE_BUCKETS] = 0.5
    assert mt.feature_distance(a, b) == pytest.approx(0.5)


# -- realism ------------------------------------------------------------------


def test_realism_identical_sets_zero():
    s = [er_graph(10, 0.3, i) for i in range(8)]
    assert mt.realism_score(s, list(s)) == pytest.approx(0.0, abs=1e-9)


def test_realism_shuffle_invariant():
    s = [er_graph(10, 0.3, i) for i in range(8)]
    assert mt.realism_score(s, s[::-1]) == pytest.approx(0.0, abs=1e-9)


def test_realism_symmetric():
    a = [er_graph(10, 0.2, i) for i in range(8)]
    b = [er_graph(10, 0.6, 100 + i) for i in range(8)]
    assert mt.realism_score(a, b) == pytest.approx(mt.realism_score(b, a))


def test_realism_separates_distributions():
    base = [er_graph(12, 0.2, [1, i]) for i in range(50)]
    same = [er_graph(12, 0.2, [2, i]) for i in range(50)]
    far = [er_graph(12, 0.8, [3, i]) for i in range(50)]
    near_score = mt.realism_score(base, same)
    far_score = mt.realism_score(base, far)
    assert far_score >= 10 * near_score


def test_realism_singletons_work():
    a, b = er_graph(8, 0.3, 1), er_graph(8, 0.7, 2)
    assert mt.realism_score([a], [a]) == pytest.approx(0.0, abs=1e-9)
    assert mt.realism_score([a], [b]) > 0.0


# -- proximity ------------------------------------------------------------------


def test_proximity_zero_for_identical_pairs():
    g = er_graph(9, 0.4, 3)
    assert mt.proximity_score([(g, g), (g, g)]) == 0.0
    k3 = gl.motif_from_spec("K3")
    assert mt.proximity_score([(k3, k3)]) == 0.0


def test_proximity_positive_when_different():
    assert mt.proximity_score([(gl.motif_from_spec("K4"), gl.motif_from_spec("C4"))]) > 0.0


# -- sparsity -------------------------------------------------------------------


def test_sparsity_identical_zero():
    g = er_graph(8, 0.4, 5)
    assert mt.sparsity_score([(g, g)], motif_counts=[g.n]) == 0.0


def test_sparsity_two_added_edges():
    src = gl.graph_from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4), (2, 5), (0, 3), (1, 3)])
    assert src.num_edges == 10
    cf_adj = src.adj.copy()
    for i, j in ((0, 2), (2, 4)):
        cf_adj[i, j] = cf_adj[j, i] = 1
    cf = gl.Graph(6, cf_adj)
    assert mt.sparsity_score([(cf, src)], motif_counts=[6]) == pytest.approx(0.2)


def test_sparsity_disjoint_equal_sized_sets():
    # 10 edges each, disjoint -> symmetric difference 20 -> score 2.0
    src = gl.graph_from_edges(10, [(i, i + 1) for i in range(9)] + [(0, 9)])
    cf = gl.graph_from_edges(10, [(i, (i + 2) % 10) for i in range(10)])
    assert mt.sparsity_score([(cf, src)], motif_counts=[10]) == pytest.approx(2.0)


def test_sparsity_counterfactual_only_nodes_count_as_additions():
    src = gl.motif_from_spec("K3")
    # counterfactual: source triangle + one extra node wired to node 0
    cf = gl.graph_from_edges(4, [(0, 1), (1, 2), (0, 2), (0, 3)])
    assert mt.sparsity_score([(cf, src)], motif_counts=[3]) == pytest.approx(1 / 3)


def test_sparsity_refuses_without_correspondence():
    g = er_graph(5, 0.5, 1)
    with pytest.raises(MetricsError, match="correspondence"):
        mt.sparsity_score([(g, g)])


# -- validity -------------------------------------------------------------------


class StubModel:
    def __init__(self, answer, trained=True):
        self.answer = answer
        self.trained = trained


def stub_predict(model, g):
    return (0.9, model.answer if model.answer is not None else g.n % 2)


def test_validity_all_correct():
    cf = [(gl.motif_from_spec("K3"), 1), (gl.motif_from_spec("K4"), 1)]
    assert mt.validity_score(cf, StubModel(1), stub_predict) == 1.0


def test_validity_degenerate_classifier_on_balanced_labels():
    cf = [(gl.motif_from_spec("K3"), 0), (gl.motif_from_spec("K4"), 1)]
    assert mt.validity_score(cf, StubModel(0), stub_predict) == 0.5


def test_validity_untrained_rejected():
    with pytest.raises(MetricsError, match="trained"):
        mt.validity_score([(gl.motif_from_spec("K3"), 1)], StubModel(1, trained=False), stub_predict)


# -- detection ------------------------------------------------------------------


def test_detection_perfect():
    m = mt.detection_metrics([1, 0, 1], [1, 0, 1], positive_class=1)
    assert m.as_tuple() == (1.0, 1.0, 1.0) and not m.degenerate


def test_detection_all_positive_half_right():
    m = mt.detection_metrics([1, 1, 1, 1], [1, 1, 0, 0], positive_class=1)
    assert m.precision == pytest.approx(0.5)
    assert m.recall == pytest.approx(1.0)
    assert m.f1 == pytest.approx(2 / 3)


def test_detection_zero_denominator_flagged():
    m = mt.detection_metrics([0, 0], [0, 0], positive_class=1)
    assert m.as_tuple() == (0.0, 0.0, 0.0) and m.degenerate


def test_detection_length_mismatch():
    with pytest.raises(MetricsError):
        mt.detection_metrics([1], [1, 0], positive_class=1)
