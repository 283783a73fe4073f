import json

import numpy as np
import pytest

from motifcf import graphs as gl
from motifcf.errors import ConfigError, DatasetError, FormatError


def write_tu(tmp_path, name, edges, indicator, labels):
    (tmp_path / f"{name}_A.txt").write_text("".join(f"{u}, {v}\n" for u, v in edges))
    (tmp_path / f"{name}_graph_indicator.txt").write_text("".join(f"{g}\n" for g in indicator))
    (tmp_path / f"{name}_graph_labels.txt").write_text("".join(f"{l}\n" for l in labels))


def test_load_smallest_valid_file(tmp_path):
    # graph 1 = triangle, graph 2 = single edge
    write_tu(
        tmp_path,
        "tiny",
        edges=[(1, 2), (2, 3), (1, 3), (4, 5)],
        indicator=[1, 1, 1, 2, 2],
        labels=[1, 2],
    )
    ds = gl.load_dataset(tmp_path, "tiny")
    assert len(ds) == 2
    k3, k2 = ds.graphs
    assert k3.n == 3 and k3.num_edges == 3
    assert k2.n == 2 and k2.num_edges == 1
    assert ds.labels.tolist() == [0, 1]


def test_load_missing_file_names_it(tmp_path):
    with pytest.raises(DatasetError, match="tiny_A.txt"):
        gl.load_dataset(tmp_path, "tiny")


def test_load_unknown_node_reports_line(tmp_path):
    write_tu(tmp_path, "bad", edges=[(1, 2), (7, 9)], indicator=[1, 1], labels=[1])
    with pytest.raises(FormatError, match="line 2"):
        gl.load_dataset(tmp_path, "bad")


def test_load_drops_duplicates_and_self_loops(tmp_path):
    write_tu(
        tmp_path,
        "dup",
        edges=[(1, 2), (2, 1), (1, 1), (2, 3)],
        indicator=[1, 1, 1],
        labels=[0],
    )
    ds = gl.load_dataset(tmp_path, "dup")
    assert ds.graphs[0].num_edges == 2
    assert ds.extras["dropped_edges"] == 2


def test_save_load_round_trip(tmp_path):
    cfg = gl.PlantedMotifConfig(
        classes=[
            gl.PlantedClass(gl.motif_from_spec("K3"), (5, 7), 0.3),
            gl.PlantedClass(gl.motif_from_spec("C4"), (5, 7), 0.3),
        ],
        graphs_per_class=6,
        cross_edge_count=2,
        seed=11,
    )
    ds = gl.make_split(gl.generate_planted_motif_dataset(cfg), seed=3)
    path = tmp_path / "ds.json"
    gl.save_dataset(ds, path)
    back = gl.load_saved_dataset(path)
    assert len(back) == len(ds)
    for a, b in zip(ds.graphs, back.graphs):
        assert np.array_equal(a.adj, b.adj)
    assert np.array_equal(ds.labels, back.labels)
    for part in ("train", "val", "test"):
        assert np.array_equal(getattr(ds.split, part), getattr(back.split, part))
    # second serialization is byte-identical
    gl.save_dataset(back, tmp_path / "ds2.json")
    assert (tmp_path / "ds.json").read_bytes() == (tmp_path / "ds2.json").read_bytes()


def test_induced_subgraph_cases():
    k4 = gl.motif_from_spec("K4")
    sub = gl.induced_subgraph(k4, [0, 1, 2])
    assert np.array_equal(sub.adj, gl.motif_from_spec("K3").adj)

    path4 = gl.motif_from_spec("P4")
    iso = gl.induced_subgraph(path4, [0, 3])
    assert iso.num_edges == 0 and iso.n == 2

    c5 = gl.motif_from_spec("C5")
    p = gl.induced_subgraph(c5, [0, 1, 2])
    # manual adjacency restriction: edges 0-1 and 1-2 survive
    expect = np.zeros((3, 3), dtype=np.uint8)
    expect[0, 1] = expect[1, 0] = expect[1, 2] = expect[2, 1] = 1
    assert np.array_equal(p.adj, expect)

    empty = gl.induced_subgraph(c5, [])
    assert empty.n == 0

    full = gl.induced_subgraph(c5, range(5))
    assert np.array_equal(full.adj, c5.adj)


def test_degree_sequences():
    assert gl.degree_sequence(gl.motif_from_spec("K3")).tolist() == [2, 2, 2]
    assert gl.degree_sequence(gl.motif_from_spec("S4")).tolist() == [3, 1, 1, 1]
    assert gl.degree_sequence(gl.motif_from_spec("C5")).tolist() == [2] * 5


def test_planted_dataset_determinism(tmp_path):
    cfg = dict(
        classes=[gl.PlantedClass(gl.motif_from_spec("K3"), (5, 5), 0.3)],
        graphs_per_class=10,
        cross_edge_count=2,
        seed=7,
    )
    a = gl.generate_planted_motif_dataset(gl.PlantedMotifConfig(**cfg))
    b = gl.generate_planted_motif_dataset(gl.PlantedMotifConfig(**cfg))
    gl.save_dataset(a, tmp_path / "a.json")
    gl.save_dataset(b, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert len(a) == 10


def test_planted_graphs_contain_motif():
    from motifcf.graphon import homomorphism_density

    cfg = gl.PlantedMotifConfig(
        classes=[gl.PlantedClass(gl.motif_from_spec("K3"), (5, 5), 0.3)],
        graphs_per_class=10,
        seed=7,
    )
    ds = gl.generate_planted_motif_dataset(cfg)
    k3 = gl.motif_from_spec("K3")
    for g in ds.graphs:
        assert homomorphism_density(k3, g) > 0


def test_planted_empty_context_range_rejected():
    with pytest.raises(ConfigError, match="context range"):
        gl.PlantedMotifConfig(
            classes=[gl.PlantedClass(gl.motif_from_spec("K3"), (6, 5), 0.3)],
            graphs_per_class=1,
        )


def _degree_histogram(g, buckets=8):
    hist = np.zeros(buckets)
    for d in gl.degree_sequence(g):
        hist[min(d, buckets - 1)] += 1
    return hist / max(1, g.n)


def test_reference_classifier_separates_k4_vs_c4():
    # oracle: nearest-centroid on degree histograms of the ground-truth motif
    cfg = gl.PlantedMotifConfig(
        classes=[
            gl.PlantedClass(gl.motif_from_spec("K4"), (8, 12), 0.2),
            gl.PlantedClass(gl.motif_from_spec("C4"), (8, 12), 0.2),
        ],
        graphs_per_class=50,
        cross_edge_count=2,
        seed=5,
    )
    ds = gl.generate_planted_motif_dataset(cfg)
    feats = np.array(
        [
            _degree_histogram(gl.induced_subgraph(g, roles))
            for g, roles in zip(ds.graphs, ds.extras["planted_motif_nodes"])
        ]
    )
    train = np.concatenate([np.arange(0, 25), np.arange(50, 75)])
    test = np.setdiff1d(np.arange(100), train)
    centroids = {
        c: feats[train][ds.labels[train] == c].mean(axis=0) for c in (0, 1)
    }
    pred = np.array(
        [
            min(centroids, key=lambda c: np.linalg.norm(f - centroids[c]))
            for f in feats[test]
        ]
    )
    actual = ds.labels[test]
    tp = int(np.sum((pred == 0) & (actual == 0)))
    fp = int(np.sum((pred == 0) & (actual != 0)))
    fn = int(np.sum((pred != 0) & (actual == 0)))
    f1 = 2 * tp / (2 * tp + fp + fn)
    assert f1 >= 0.95


def test_make_split_stratified_and_covering():
    cfg = gl.PlantedMotifConfig(
        classes=[
            gl.PlantedClass(gl.motif_from_spec("K3"), (5, 5), 0.3),
            gl.PlantedClass(gl.motif_from_spec("C4"), (5, 5), 0.3),
        ],
        graphs_per_class=20,
        seed=1,
    )
    ds = gl.make_split(gl.generate_planted_motif_dataset(cfg), ratios=(0.2, 0.4, 0.4), seed=9)
    for part in (ds.split.train, ds.split.val, ds.split.test):
        assert len(set(ds.labels[part].tolist())) == 2  # both classes present
    ds.split.check_covers(len(ds))


def test_downsample_relabels_and_keeps_fraction():
    cfg = gl.PlantedMotifConfig(
        classes=[
            gl.PlantedClass(gl.motif_from_spec("K3"), (5, 5), 0.3),
            gl.PlantedClass(gl.motif_from_spec("C4"), (5, 5), 0.3),
        ],
        graphs_per_class=20,
        seed=1,
    )
    ds = gl.generate_planted_motif_dataset(cfg)
    down = gl.downsample_anomaly(ds, anomaly_class=0, keep_fraction=0.25, seed=4)
    assert int(np.sum(down.labels == 0)) == 5
    assert int(np.sum(down.labels == 1)) == 20
    assert down.anomaly_class == 0


def test_default_node_features_one_hot():
    s4 = gl.motif_from_spec("S4")
    feats = gl.default_node_features(s4, max_bucket=8)
    assert feats.shape == (4, 8)
    assert feats[0, 3] == 1.0 and feats.sum() == 4.0


def test_graph_validation_rejects_bad_adjacency():
    with pytest.raises(ConfigError):
        gl.Graph(2, np.array([[0, 1], [0, 0]]))  # asymmetric
    with pytest.raises(ConfigError):
        gl.Graph(2, np.array([[1, 0], [0, 0]]))  # diagonal
