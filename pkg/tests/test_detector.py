import numpy as np
import pytest

from motifcf import detector as dt
from motifcf import graphs as gl
from motifcf.errors import ConfigError


def dense_vs_sparse_pairs(n_each=10, seed=0):
    """Trivially separable families: near-complete graphs labeled 0, near-empty
    labeled 1."""
    rng = np.random.default_rng(seed)
    pairs = []
    for i in range(n_each):
        n = int(rng.integers(6, 9))
        dense = np.ones((n, n), dtype=np.uint8) - np.eye(n, dtype=np.uint8)
        pairs.append((gl.Graph(n, dense), 0))
        sparse = np.zeros((n, n), dtype=np.uint8)
        sparse[0, 1] = sparse[1, 0] = 1
        pairs.append((gl.Graph(n, sparse), 1))
    return pairs


def test_untrained_probability_half():
    cfg = dt.ClassifierConfig(steps=1, seed=0)
    model = dt.init_classifier(cfg)
    for g in (gl.motif_from_spec("K4"), gl.motif_from_spec("C5")):
        p, label = dt.predict(model, g)
        assert p == pytest.approx(0.5)
        assert label == 1  # boundary rule: p >= 0.5 -> 1


def test_training_reduces_bce_on_separable_data():
    pairs = dense_vs_sparse_pairs()
    cfg = dt.ClassifierConfig(steps=200, batch_size=8, seed=1)
    model, trace = dt.train_classifier(pairs, cfg)
    assert trace[-1]["train_bce"] < 0.1
    assert model.trained


def test_training_deterministic():
    pairs = dense_vs_sparse_pairs()
    cfg = dt.ClassifierConfig(steps=30, seed=5)
    m1, t1 = dt.train_classifier(pairs, cfg)
    m2, t2 = dt.train_classifier(pairs, cfg)
    assert t1 == t2
    for a, b in zip(m1.params.all_arrays(), m2.params.all_arrays()):
        assert np.array_equal(a, b)


def test_single_class_training_rejected():
    pairs = [(gl.motif_from_spec("K3"), 1), (gl.motif_from_spec("K4"), 1)]
    with pytest.raises(ConfigError, match="both classes"):
        dt.train_classifier(pairs, dt.ClassifierConfig(steps=5))


def test_predict_permutation_invariant():
    pairs = dense_vs_sparse_pairs(n_each=4)
    model, _ = dt.train_classifier(pairs, dt.ClassifierConfig(steps=40, seed=2))
    rng = np.random.default_rng(3)
    g = gl.graph_from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (0, 6), (1, 4)])
    p0, _ = dt.predict(model, g)
    for _ in range(3):
        perm = rng.permutation(7)
        pg = gl.Graph(7, g.adj[np.ix_(perm, perm)])
        p, _ = dt.predict(model, pg)
        assert p == pytest.approx(p0, abs=1e-10)


def test_validation_selects_best_epoch():
    pairs = dense_vs_sparse_pairs()
    val = dense_vs_sparse_pairs(n_each=5, seed=9)
    cfg = dt.ClassifierConfig(steps=120, batch_size=8, seed=4, val_every=10)
    model, trace = dt.train_classifier(pairs, cfg, val_pairs=val)
    f1s = [r["val_f1"] for r in trace if "val_f1" in r]
    final = dt.evaluate_on(model, [g for g, _ in val], [l for _, l in val], positive_class=0)
    assert final.f1 == pytest.approx(max(f1s))


def test_classifier_checkpoint_round_trip(tmp_path):
    pairs = dense_vs_sparse_pairs(n_each=4)
    model, _ = dt.train_classifier(pairs, dt.ClassifierConfig(steps=30, seed=6))
    dt.save_classifier(model, tmp_path / "clf.txt")
    back = dt.load_classifier(tmp_path / "clf.txt")
    g = pairs[0][0]
    assert dt.predict(back, g) == dt.predict(model, g)
    # byte-identical re-serialization
    dt.save_classifier(back, tmp_path / "clf2.txt")
    assert (tmp_path / "clf.txt").read_bytes() == (tmp_path / "clf2.txt").read_bytes()
