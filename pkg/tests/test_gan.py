import numpy as np
import pytest

from motifcf import autodiff as ad
from motifcf import gan
from motifcf import graphs as gl
from motifcf.errors import ConfigError
from motifcf.producer import RawCounterfactual, normalized_degree_entropy


def small_raw(cross_edges=((0, 4),)):
    """Motif triangle (0-2) + context path (3-4-5) + given cross edges."""
    n = 6
    adj = np.zeros((n, n), dtype=np.uint8)
    for i, j in ((0, 1), (1, 2), (0, 2), (3, 4), (4, 5)) + tuple(cross_edges):
        adj[i, j] = adj[j, i] = 1
    return RawCounterfactual(
        n=n,
        motif_count=3,
        adj=adj,
        initial_cross_edges=list(cross_edges),
        provenance={"g_index": 0, "h_index": 1, "label": 0},
        e_con_real=2,
        context_entropy_real=normalized_degree_entropy([1, 2, 1]),
    )


# -- initialization ---------------------------------------------------------------


def test_init_scaffold_edges_get_logit_one():
    state = gan.init_edge_logits(small_raw(), gamma=0.5, lambda_g=0.8)
    assert state.logits[0, 1] == 1.0 and state.logits[3, 4] == 1.0


def test_init_gamma_zero_candidates_zero():
    state = gan.init_edge_logits(small_raw(), gamma=0.0, lambda_g=0.8)
    assert np.all(state.logits[:3, 3:] == 0.0)


def test_init_formula_value():
    # gamma*lambda_g*E_con*S/|C| = 0.75*0.8*10*0.5/20 = 0.15
    raw = small_raw()
    n_candidates = raw.motif_count * raw.context_count  # 9 pairs here
    sim = np.full((raw.n, raw.n), 0.5)
    state = gan.init_edge_logits(raw, gamma=0.75, lambda_g=0.8, e_con_real=10, similarity=sim)
    expect = 0.75 * 0.8 * 10 * 0.5 / n_candidates
    assert state.logits[0, 5] == pytest.approx(expect)
    # and the spec's literal arithmetic with |C|=20
    assert 0.75 * 0.8 * 10 * 0.5 / 20 == pytest.approx(0.15)


def test_init_frozen_pairs_zero_and_diag_untrainable():
    state = gan.init_edge_logits(small_raw(), gamma=0.75, lambda_g=0.8)
    assert state.logits[1, 2] == 1.0
    assert not state.trainable[0, 0]
    # motif non-edges are frozen (no edge invention inside parts)
    assert state.logits[3, 5] == 0.0 and not state.trainable[3, 5]


# -- relaxation --------------------------------------------------------------------


def test_relax_sigma_zero_is_half():
    state = gan.init_edge_logits(small_raw(), gamma=0.75, lambda_g=0.8, tau_g=0.5)
    noise = np.full((6, 6), 1.0)
    noise[0, 1] = noise[1, 0] = state.logits[0, 1]  # W - X = 0
    p = gan.relax_tensor(ad.Tensor(state.logits), noise, state.tau_g, state.trainable)
    assert p.value[0, 1] == pytest.approx(0.5)


def test_relax_saturates_at_paper_temperature():
    state = gan.init_edge_logits(small_raw(), gamma=0.75, lambda_g=0.8, tau_g=1e-4)
    noise = np.full((6, 6), state.logits[0, 1] - 0.01)  # W - X = +0.01
    p = gan.relax_tensor(ad.Tensor(state.logits), noise, 1e-4, state.trainable)
    assert abs(p.value[0, 1] - 1.0) < 1e-10


def test_relax_frozen_pairs_exactly_zero():
    state = gan.init_edge_logits(small_raw(), gamma=0.75, lambda_g=0.8)
    for seed in range(5):
        p = gan.relax_edges(state, seed)
        assert np.all(p[~state.trainable] == 0.0)
        assert np.array_equal(p, p.T)
        assert p.min() >= 0.0 and p.max() <= 1.0


# -- losses ------------------------------------------------------------------------


def test_motif_loss_zero_on_passthrough():
    from motifcf.graphon import estimate_graphon

    k4 = gl.motif_from_spec("K4")
    w_rel = estimate_graphon([k4, k4], K=4).W
    p_tensors = [ad.Tensor(k4.adj.astype(float)), ad.Tensor(k4.adj.astype(float))]
    loss = gan.motif_consistency_loss(p_tensors, w_rel, 4)
    assert loss.item() == 0.0


def test_motif_loss_direct_formula():
    p = ad.Tensor(np.full((2, 2), 0.5))
    loss = gan.motif_consistency_loss([p], np.zeros((2, 2)), 2)
    assert loss.item() == pytest.approx(1.0)  # 4 cells * 0.25


def test_degree_entropy_examples():
    assert normalized_degree_entropy([2, 2, 2]) == pytest.approx(1.0)
    assert normalized_degree_entropy([7]) == 0.0
    assert normalized_degree_entropy([1, 2, 1]) == pytest.approx(0.9464, abs=1e-4)
    # tensor version agrees with the numeric one
    t = gan.degree_entropy_tensor(ad.Tensor(np.array([1.0, 2.0, 1.0])), 3)
    assert t.item() == pytest.approx(normalized_degree_entropy([1, 2, 1]))


def test_contextual_loss_zero_when_equal():
    raw = small_raw()
    p = ad.Tensor(raw.adj.astype(float))
    loss = gan.contextual_loss([p], [3], [raw.context_entropy_real])
    assert loss.item() == pytest.approx(0.0, abs=1e-12)


def test_contextual_loss_entropy_gap():
    p = ad.Tensor(np.zeros((4, 4)))  # context block all zero -> E_gen = 0
    loss = gan.contextual_loss([p], [2], [1.0 - 0.9464])
    assert loss.item() == pytest.approx(0.0536, abs=1e-4)


def test_connection_loss_zero_at_target():
    # P sums to exactly lambda_g * E_con over the cross block
    p_val = np.zeros((4, 4))
    p_val[0, 2] = p_val[0, 3] = 1.0  # unordered cross mass = 2.0
    loss = gan.connection_loss([ad.Tensor(p_val)], [2], 0.5, [4])
    assert loss.item() == 0.0


def test_connection_loss_two_item_example():
    # lambda=0.5, E_con = 4 and 6 (targets 2, 3), P_gen = 3 and 3 -> 0.5
    a = np.zeros((4, 4))
    a[0, 2] = a[0, 3] = a[1, 2] = 1.0
    b = np.zeros((4, 4))
    b[0, 2] = b[0, 3] = b[1, 3] = 1.0
    loss = gan.connection_loss([ad.Tensor(a), ad.Tensor(b)], [2, 2], 0.5, [4, 6])
    assert loss.item() == pytest.approx(0.5)


def test_regularization_loss_examples():
    def t(x):
        return ad.Tensor(float(x))

    assert gan.regularization_loss(t(0.2), t(0.3), t(0.5), 1, 1, 1).item() == pytest.approx(1.0)
    assert gan.regularization_loss(t(1), t(1), t(1), 1.0, 0.9, 0.6).item() == pytest.approx(2.5)
    assert gan.regularization_loss(t(0), t(0), t(0), 1.0, 0.9, 0.6).item() == 0.0
    with pytest.raises(ConfigError):
        gan.regularization_loss(t(1), t(1), t(1), -1.0, 0.9, 0.6)


# -- discriminator ------------------------------------------------------------------


def test_encoder_zero_adjacency_transforms_own_features():
    disc = gan.init_discriminator(2, hidden_dim=5, seed=3)
    n = 4
    feats = np.random.default_rng(0).normal(size=(n, 2))
    z = gan.encode_graph(ad.Tensor(np.zeros((n, n))), ad.Tensor(feats), disc)
    h = feats
    for w, b in disc.gnn_layers:
        h = np.maximum(h @ w + b, 0.0)
    assert np.allclose(z.value, h)
    assert z.value.shape == (n, 5)


def test_encoder_permutation_equivariance():
    rng = np.random.default_rng(5)
    disc = gan.init_discriminator(2, hidden_dim=6, seed=1)
    adj = (rng.random((7, 7)) > 0.6).astype(float)
    adj = np.triu(adj, 1)
    adj = adj + adj.T
    feats = rng.normal(size=(7, 2))
    perm = rng.permutation(7)
    z = gan.encode_graph(ad.Tensor(adj), ad.Tensor(feats), disc).value
    zp = gan.encode_graph(
        ad.Tensor(adj[np.ix_(perm, perm)]), ad.Tensor(feats[perm]), disc
    ).value
    assert np.allclose(zp, z[perm], atol=1e-10)


def test_graph_representation_examples():
    z = ad.Tensor(np.array([[1.0, 3.0], [5.0, -1.0]]))
    rep = gan.graph_representation(z).value
    assert np.allclose(rep, [3.0, 1.0, 5.0, 3.0])
    single = ad.Tensor(np.array([[2.0, 7.0]]))
    assert np.allclose(gan.graph_representation(single).value, [2.0, 7.0, 2.0, 7.0])


def test_discriminator_zero_head_probability_half():
    disc = gan.init_discriminator(2, hidden_dim=4, seed=0, zero_head=True)
    rep = ad.Tensor(np.random.default_rng(1).normal(size=8))
    assert gan.discriminator_prob(rep, disc).item() == pytest.approx(0.5)


def test_discriminator_large_bias_saturates():
    disc = gan.init_discriminator(2, hidden_dim=4, seed=0, zero_head=True)
    disc.mlp_layers[-1] = (disc.mlp_layers[-1][0], np.array([50.0]))
    rep = ad.Tensor(np.zeros(8))
    assert gan.discriminator_prob(rep, disc).item() > 1.0 - 1e-12


def test_bce_examples():
    assert gan.discriminator_loss(ad.Tensor(0.5), 1).item() == pytest.approx(np.log(2))
    assert gan.discriminator_loss(ad.Tensor(0.9), 0).item() == pytest.approx(-np.log(0.1))
    # clamp keeps the loss finite at saturation
    assert np.isfinite(gan.discriminator_loss(ad.Tensor(1.0), 0).item())


def test_generator_loss_examples():
    zero = ad.Tensor(0.0)
    assert gan.generator_loss(ad.Tensor(1.0 - 1e-9), zero).item() == pytest.approx(0.0, abs=1e-6)
    assert gan.generator_loss(ad.Tensor(0.5), zero).item() == pytest.approx(np.log(2))
    # printed form (default reg_sign=-1): -ln(0.5) - 0.2
    assert gan.generator_loss(ad.Tensor(0.5), ad.Tensor(0.2)).item() == pytest.approx(0.4931, abs=1e-4)
    # training default flips the sign
    assert gan.generator_loss(ad.Tensor(0.5), ad.Tensor(0.2), reg_sign=1).item() == pytest.approx(
        np.log(2) + 0.2
    )


def test_adam_minimizes_quadratic():
    x = np.array([5.0, -3.0])
    opt = gan.Adam([x], lr=0.1)
    for _ in range(500):
        opt.step([2.0 * x])
    assert np.abs(x).max() < 1e-3


# -- training loop -----------------------------------------------------------------


def tiny_training_setup(n_raws=3, seed=0):
    rng = np.random.default_rng(seed)
    raws = [small_raw(cross_edges=((0, 4),)) for _ in range(n_raws)]
    reals = []
    for i in range(4):
        adj = np.zeros((6, 6), dtype=np.uint8)
        for a, b in ((0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (int(rng.integers(3)), 3 + int(rng.integers(3)))):
            if a != b:
                adj[a, b] = adj[b, a] = 1
        reals.append(gl.Graph(6, adj))
    return raws, reals


def test_train_one_step_deterministic():
    raws, reals = tiny_training_setup()
    cfg = gan.TrainConfig(steps=1, batch_size=2, seed=42)
    out1 = gan.train_gan(raws, reals, cfg)
    raws2, reals2 = tiny_training_setup()
    out2 = gan.train_gan(raws2, reals2, cfg)
    assert out1[1] == out2[1]  # identical traces
    for g1, g2 in zip(out1[0], out2[0]):
        assert np.array_equal(g1.adj, g2.adj)


def test_train_refined_edges_within_support():
    raws, reals = tiny_training_setup()
    cfg = gan.TrainConfig(steps=30, batch_size=3, seed=7)
    refined, trace, model = gan.train_gan(raws, reals, cfg)
    for g, state in zip(refined, model.states):
        outside = g.adj.astype(bool) & ~state.trainable
        assert not outside.any()
        assert np.array_equal(g.adj, g.adj.T)
    for row in trace:
        for col in gan.TRACE_COLUMNS:
            assert col in row
            assert np.isfinite(row[col])


def test_trace_csv_round_trip(tmp_path):
    raws, reals = tiny_training_setup()
    cfg = gan.TrainConfig(steps=2, batch_size=2, seed=1)
    _, trace, _ = gan.train_gan(raws, reals, cfg)
    gan.write_trace(trace, tmp_path / "trace.csv")
    lines = (tmp_path / "trace.csv").read_text().strip().splitlines()
    assert lines[0] == ",".join(gan.TRACE_COLUMNS)
    assert len(lines) == 3


def test_gradcheck_suite_passes():
    from motifcf.gradcheck import run_suite

    results = run_suite(seed=1, points=3)
    assert all(r.ok for r in results)
