"""Adversarial refinement of raw counterfactuals.

A generator holds one learnable edge-logit matrix per raw counterfactual;
relaxed edge probabilities P = sigmoid((logits - X)/tau) with fresh uniform
noise X per step keep edge decisions differentiable while tau drives them
toward 0/1. Three structural losses steer the generator: a graphon
consistency loss on the motif (squared cell-wise distance between batch and
reference step functions), a contextual loss on normalized degree entropy,
and a connection loss targeting ``lambda_g`` times the realistic
connection-edge count. A small GCN discriminator with mean||max pooling and
an MLP head supplies the adversarial term; generator and discriminator two
alternate under Adam.

Pairs outside the scaffold edge set and the cross-candidate set are frozen
at zero: the generator can drop or reweight structure, never invent edges
elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .errors import ConfigError, NumericalError
from .graphs import Graph
from .graphon import estimate_graphon
from .producer import RawCounterfactual

BCE_EPS = 1e-7


# -- generator state -----------------------------------------------------------


@dataclass
class GeneratorState:
    """Learnable symmetric edge logits over one raw counterfactual.

    ``trainable`` marks scaffold edges plus cross candidates; logits are
    exactly zero (and never updated) elsewhere.
    """

    logits: np.ndarray
    trainable: np.ndarray  # bool mask, symmetric, zero diagonal
    tau_g: float
    lambda_g: float
    scaffold: RawCounterfactual

    def __post_init__(self):
        if not (0.0 < self.tau_g <= 1.0):
            raise ConfigError(f"tau_g must be in (0,1]: {self.tau_g}")
        if not np.array_equal(self.logits, self.logits.T):
            raise ConfigError("edge logits must be symmetric")
        if np.any(self.logits[~self.trainable] != 0.0):
            raise ConfigError("frozen logit entries must be zero")


def node_similarity(raw: RawCounterfactual):
    """Structural proxy similarity 1/(1 + |deg_i - deg_j|) on the scaffold.

    Datasets here carry no node attributes; swap in embedding cosine
    similarity through ``init_edge_logits(similarity=...)`` when they do.
    """
    deg = raw.adj.sum(axis=1).astype(np.float64)
    return 1.0 / (1.0 + np.abs(deg[:, None] - deg[None, :]))


def init_edge_logits(raw: RawCounterfactual, gamma, lambda_g, e_con_real=None, tau_g=1e-4, similarity=None):
    """Warm-start logits: 1 on scaffold motif/context edges, a similarity-
    scaled fraction gamma*lambda_g*|E_con|/|C| on cross candidates, 0
    elsewhere."""
    if not (0.0 <= gamma <= 1.0):
        raise ConfigError(f"gamma must be in [0,1]: {gamma}")
    if e_con_real is None:
        e_con_real = raw.e_con_real
    if e_con_real < 0:
        raise ConfigError("e_con_real must be >= 0")
    m, n = raw.motif_count, raw.n
    n_candidates = m * (n - m)
    if n_candidates == 0:
        raise ConfigError("raw counterfactual has no cross candidates")

    sim = node_similarity(raw) if similarity is None else np.asarray(similarity, dtype=np.float64)
    logits = np.zeros((n, n), dtype=np.float64)
    trainable = np.zeros((n, n), dtype=bool)

    internal = raw.adj.astype(bool).copy()
    internal[:m, m:] = False
    internal[m:, :m] = False
    logits[internal] = 1.0
    trainable |= internal

    cross = np.zeros((n, n), dtype=bool)
    cross[:m, m:] = True
    cross[m:, :m] = True
    logits[cross] = gamma * lambda_g * e_con_real * sim[cross] / n_candidates
    trainable |= cross

    np.fill_diagonal(trainable, False)
    np.fill_diagonal(logits, 0.0)
    return GeneratorState(
        logits=logits, trainable=trainable, tau_g=tau_g, lambda_g=lambda_g, scaffold=raw
    )


def sample_edge_noise(n, rng):
    """Symmetric uniform(0,1) noise over the upper triangle."""
    x = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    vals = rng.random(len(iu))
    x[iu, ju] = vals
    x[ju, iu] = vals
    return x


def relax_tensor(logits_t, noise, tau_g, trainable):
    """Differentiable relaxed adjacency: sigmoid((W - X)/tau) on trainable
    pairs, exactly 0 elsewhere."""
    z = (ad.symmetrize(logits_t) - ad.Tensor(noise)) * (1.0 / tau_g)
    return ad.sigmoid(z) * ad.Tensor(trainable.astype(np.float64))


def relax_edges(state: GeneratorState, seed):
    """Numeric relaxed matrix for a fresh noise draw (no gradient tape)."""
    rng = np.random.default_rng(seed)
    noise = sample_edge_noise(state.logits.shape[0], rng)
    t = relax_tensor(ad.Tensor(state.logits), noise, state.tau_g, state.trainable)
    return t.value


# -- tailored losses -----------------------------------------------------------


def motif_consistency_loss(p_tensors, w_real, K):
    """Squared cell-wise distance between the batch step function of the
    relaxed matrices and the reference one.

    Matrices arrive in frozen scaffold order (already degree-aligned at
    production time); each contributes its zero-padded/truncated top-K block.
    """
    if not p_tensors:
        raise ConfigError("empty generated batch")
    w_real = np.asarray(w_real, dtype=np.float64)
    if w_real.shape != (K, K):
        raise ConfigError(f"reference graphon shape {w_real.shape} != K={K}")
    acc = None
    for p in p_tensors:
        n = p.shape[0]
        blk = ad.slice2d(p, min(n, K), min(n, K))
        if n < K:
            blk = ad.pad_to(blk, (K, K))
        acc = blk if acc is None else acc + blk
    w_gen = acc * (1.0 / len(p_tensors))
    return ad.tsum(ad.square(w_gen - ad.Tensor(w_real)))


def degree_entropy_tensor(degrees, n_nodes):
    """Differentiable normalized degree entropy; 0 by convention for a
    single node or an all-zero degree vector."""
    if n_nodes <= 1:
        return ad.Tensor(0.0)
    total = ad.tsum(degrees)
    if total.value <= 0.0:
        return ad.Tensor(0.0)
    p = degrees / total
    return ad.tsum(ad.xlogx(p)) * (-1.0 / np.log(n_nodes))


def contextual_loss(p_tensors, motif_counts, real_entropies):
    """Sum over the batch of |E_gen - E_rel| on contextual subgraphs.

    Generated degrees are row sums of the relaxed matrix restricted to the
    context block, so gradients flow into the context logits.
    """
    if len(p_tensors) != len(motif_counts) or len(p_tensors) != len(real_entropies):
        raise ConfigError("batch lists must have equal length")
    total = ad.Tensor(0.0)
    for p, m, e_rel in zip(p_tensors, motif_counts, real_entropies):
        n = p.shape[0]
        ctx = ad.block2d(p, m, n, m, n)
        e_gen = degree_entropy_tensor(ad.tsum(ctx, axis=1), n - m)
        total = total + ad.absolute(e_gen - ad.Tensor(float(e_rel)))
    return total


def connection_loss(p_tensors, motif_counts, lambda_g, e_con_reals):
    """Mean |lambda_g*|E_con| - sum of P over cross candidates| across the
    batch; candidate pairs counted once (unordered)."""
    if not p_tensors:
        raise ConfigError("empty generated batch")
    total = ad.Tensor(0.0)
    for p, m, e_con in zip(p_tensors, motif_counts, e_con_reals):
        n = p.shape[0]
        p_gen = ad.tsum(ad.block2d(p, 0, m, m, n))
        total = total + ad.absolute(ad.Tensor(lambda_g * float(e_con)) - p_gen)
    return total * (1.0 / len(p_tensors))


def regularization_loss(l_motif, l_context, l_con, lambda1, lambda2, lambda3):
    if min(lambda1, lambda2, lambda3) < 0:
        raise ConfigError("loss weights must be >= 0")
    return l_motif * lambda1 + l_context * lambda2 + l_con * lambda3


# -- discriminator ---------------------------------------------------------------


@dataclass
class DiscriminatorParams:
    gnn_layers: list  # [(weight, bias), ...]
    mlp_layers: list  # [(weight, bias), ...], final layer outputs 1 logit
    hidden_dim: int

    def all_arrays(self):
        out = []
        for w, b in self.gnn_layers + self.mlp_layers:
            out.extend([w, b])
        return out


def init_discriminator(in_dim, hidden_dim=32, gnn_layers=2, mlp_layers=2, seed=0, zero_head=False):
    """Glorot-ish random init; ``zero_head`` zeroes the final MLP layer so an
    untrained model outputs probability exactly 0.5."""
    if mlp_layers < 1:
        raise ConfigError("MLP needs at least one layer")
    rng = np.random.default_rng(seed)

    def layer(d_in, d_out):
        scale = np.sqrt(2.0 / (d_in + d_out))
        return rng.normal(0.0, scale, size=(d_in, d_out)), np.zeros(d_out)

    gnn = []
    d = in_dim
    for _ in range(gnn_layers):
        gnn.append(layer(d, hidden_dim))
        d = hidden_dim
    mlp = []
    d = 2 * hidden_dim  # mean || max pooling
    for i in range(mlp_layers - 1):
        mlp.append(layer(d, hidden_dim))
        d = hidden_dim
    final = layer(d, 1)
    if zero_head:
        final = (np.zeros_like(final[0]), np.zeros_like(final[1]))
    mlp.append(final)
    return DiscriminatorParams(gnn_layers=gnn, mlp_layers=mlp, hidden_dim=hidden_dim)


def gan_node_features(adj_t, n):
    """Differentiable per-node features for the discriminator: a constant
    channel and the normalized (possibly fractional) degree."""
    ones = ad.Tensor(np.ones((n, 1)))
    deg = ad.reshape(ad.tsum(adj_t, axis=1), (n, 1)) * (1.0 / max(1, n - 1))
    return ad.concat(ones, deg, axis=1)


def encode_graph(adj_t, features_t, params, param_tensors=None):
    """Two-layer GCN on a (possibly weighted) adjacency.

    Z^{l+1} = relu(Ahat Z^l W^l + b^l) with Ahat the symmetrically
    normalized adjacency-plus-self-loops; gradients flow through the
    adjacency as well as the weights.
    """
    n = adj_t.shape[0]
    s = adj_t + ad.Tensor(np.eye(n))
    d_inv_sqrt = ad.reshape(ad.power(ad.tsum(s, axis=1), -0.5), (n, 1))
    a_hat = s * d_inv_sqrt * d_inv_sqrt.T
    z = features_t
    tensors = param_tensors["gnn"] if param_tensors else [
        (ad.Tensor(w), ad.Tensor(b)) for w, b in params.gnn_layers
    ]
    for w_t, b_t in tensors:
        z = ad.relu(a_hat @ z @ w_t + b_t)
    return z


def graph_representation(z_t):
    """Mean pooling concatenated with max pooling over nodes."""
    n = z_t.shape[0]
    return ad.concat(ad.tsum(z_t, axis=0) * (1.0 / n), ad.max_over_rows(z_t))


def discriminator_prob(rep_t, params, param_tensors=None):
    """MLP head with relu hidden layers and a sigmoid output in (0,1)."""
    tensors = param_tensors["mlp"] if param_tensors else [
        (ad.Tensor(w), ad.Tensor(b)) for w, b in params.mlp_layers
    ]
    h = ad.reshape(rep_t, (1, rep_t.shape[0]))
    for w_t, b_t in tensors[:-1]:
        h = ad.relu(h @ w_t + b_t)
    w_t, b_t = tensors[-1]
    logit = h @ w_t + b_t
    return ad.reshape(ad.sigmoid(logit), ())


def discriminator_loss(p_t, label):
    """Binary cross-entropy with probability clamped to [eps, 1-eps]."""
    p = ad.clip(p_t, BCE_EPS, 1.0 - BCE_EPS)
    if label == 1:
        return -ad.log(p)
    return -ad.log(1.0 - p)


def generator_loss(p_gen_t, l_reg_t, reg_sign=-1):
    """Adversarial generator objective -log(p) + reg_sign * L_reg.

    The default reg_sign=-1 reproduces the printed combination (subtracting
    the regularizer); training uses the config's ``reg_sign`` (+1 by
    default) since minimizing a negated regularizer would push the
    structural losses up.
    """
    p = ad.clip(p_gen_t, BCE_EPS, 1.0 - BCE_EPS)
    l_reg_t = l_reg_t if isinstance(l_reg_t, ad.Tensor) else ad.Tensor(float(l_reg_t))
    return -ad.log(p) + l_reg_t * float(reg_sign)


def discriminate(adj_value_or_tensor, params, param_tensors=None):
    """Full discriminator forward from a (weighted) adjacency."""
    t = (
        adj_value_or_tensor
        if isinstance(adj_value_or_tensor, ad.Tensor)
        else ad.Tensor(np.asarray(adj_value_or_tensor, dtype=np.float64))
    )
    feats = gan_node_features(t, t.shape[0])
    z = encode_graph(t, feats, params, param_tensors)
    return discriminator_prob(graph_representation(z), params, param_tensors)


# -- optimizer -------------------------------------------------------------------


class Adam:
    """Adaptive-moment gradient descent over a list of parameter arrays."""

    def __init__(self, params, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr = lr
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads):
        self.t += 1
        b1c = 1.0 - self.beta1**self.t
        b2c = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            if g is None:
                continue
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)


# -- training loop -----------------------------------------------------------------


@dataclass
class TrainConfig:
    steps: int = 500
    gen_steps_per_iter: int = 1
    disc_steps_per_iter: int = 1
    learning_rate: float = 0.001
    batch_size: int = 8
    lambda1: float = 1.0
    lambda2: float = 0.9
    lambda3: float = 0.6
    gamma: float = 0.75
    lambda_g: float = 0.8
    tau_g: float = 1e-4
    reg_sign: int = 1
    frozen_noise: bool = False
    motif_k: int | None = None  # None -> rounded mean size of the real graphs
    hidden_dim: int = 32
    mlp_layers: int = 2
    gnn_layers: int = 2
    seed: int = 0

    def __post_init__(self):
        for name in ("steps", "gen_steps_per_iter", "disc_steps_per_iter", "batch_size"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if min(self.lambda1, self.lambda2, self.lambda3) < 0:
            raise ConfigError("loss weights must be >= 0")
        if self.reg_sign not in (1, -1):
            raise ConfigError("reg_sign must be +1 or -1")


@dataclass
class GanModel:
    states: list
    discriminator: DiscriminatorParams
    motif_k: int
    w_real: np.ndarray


TRACE_COLUMNS = ("step", "l_gen", "l_dis", "l_motif", "l_context", "l_con", "p_real_mean", "p_gen_mean")


def _require_finite(value, step, component):
    if not np.all(np.isfinite(value)):
        raise NumericalError(f"non-finite {component} at step {step}")


def train_gan(raws, real_graphs, cfg: TrainConfig):
    """Alternating adversarial refinement.

    Returns (refined graphs, trace rows, model). One generator step then one
    discriminator step per iteration (configurable); the discriminator sees
    the relaxed matrices detached from the generator parameters; discrete
    extraction happens only once at the end, by thresholding a seeded relaxed
    draw at 0.5.
    """
    if not raws or not real_graphs:
        raise ConfigError("both raw counterfactuals and real graphs are required")
    rng = np.random.default_rng(cfg.seed)
    states = [
        init_edge_logits(r, cfg.gamma, cfg.lambda_g, tau_g=cfg.tau_g) for r in raws
    ]
    motif_k = cfg.motif_k or max(1, int(np.floor(np.mean([g.n for g in real_graphs]) + 0.5)))
    w_real = estimate_graphon(real_graphs, K=motif_k).W

    disc = init_discriminator(
        in_dim=2,
        hidden_dim=cfg.hidden_dim,
        gnn_layers=cfg.gnn_layers,
        mlp_layers=cfg.mlp_layers,
        seed=rng.integers(1 << 31),
    )
    gen_opts = [Adam([s.logits], lr=cfg.learning_rate) for s in states]
    disc_opt = Adam(disc.all_arrays(), lr=cfg.learning_rate)

    frozen_noise = (
        [sample_edge_noise(s.logits.shape[0], rng) for s in states]
        if cfg.frozen_noise
        else None
    )

    def noise_for(i):
        if frozen_noise is not None:
            return frozen_noise[i]
        return sample_edge_noise(states[i].logits.shape[0], rng)

    def pick(pool_size):
        size = min(cfg.batch_size, pool_size)
        return rng.choice(pool_size, size=size, replace=False)

    trace = []
    for step in range(cfg.steps):
        row = {"step": step}

        # generator step(s)
        for _ in range(cfg.gen_steps_per_iter):
            batch = pick(len(states))
            leaves = {int(i): ad.Tensor(states[i].logits, requires_grad=True) for i in batch}
            p_list, motif_counts, e_cons, e_rels = [], [], [], []
            for i in batch:
                s = states[int(i)]
                p_list.append(relax_tensor(leaves[int(i)], noise_for(int(i)), s.tau_g, s.trainable))
                motif_counts.append(s.scaffold.motif_count)
                e_cons.append(s.scaffold.e_con_real)
                e_rels.append(s.scaffold.context_entropy_real)
            l_motif = motif_consistency_loss(p_list, w_real, motif_k)
            l_context = contextual_loss(p_list, motif_counts, e_rels)
            l_con = connection_loss(p_list, motif_counts, cfg.lambda_g, e_cons)
            l_reg = regularization_loss(l_motif, l_context, l_con, cfg.lambda1, cfg.lambda2, cfg.lambda3)
            adv = None
            for p in p_list:
                term = -ad.log(ad.clip(discriminate(p, disc), BCE_EPS, 1.0 - BCE_EPS))
                adv = term if adv is None else adv + term
            adv = adv * (1.0 / len(p_list))
            l_gen = adv + l_reg * float(cfg.reg_sign)
            for name, t in (("l_motif", l_motif), ("l_context", l_context), ("l_con", l_con), ("l_gen", l_gen)):
                _require_finite(t.value, step, name)
            l_gen.backward()
            for i in batch:
                g = leaves[int(i)].grad
                if g is None:
                    continue
                _require_finite(g, step, "generator gradient")
                gen_opts[int(i)].step([g])
                s = states[int(i)]
                s.logits[~s.trainable] = 0.0  # keep frozen pairs pinned
            row.update(
                l_motif=float(l_motif.value),
                l_context=float(l_context.value),
                l_con=float(l_con.value),
                l_gen=float(l_gen.value),
            )

        # discriminator step(s)
        for _ in range(cfg.disc_steps_per_iter):
            param_tensors = {
                "gnn": [(ad.Tensor(w, requires_grad=True), ad.Tensor(b, requires_grad=True)) for w, b in disc.gnn_layers],
                "mlp": [(ad.Tensor(w, requires_grad=True), ad.Tensor(b, requires_grad=True)) for w, b in disc.mlp_layers],
            }
            leaf_list = [t for pair in param_tensors["gnn"] + param_tensors["mlp"] for t in pair]
            real_batch = pick(len(real_graphs))
            gen_batch = pick(len(states))
            loss = None
            p_reals, p_gens = [], []
            for i in real_batch:
                p = discriminate(real_graphs[int(i)].adj, disc, param_tensors)
                p_reals.append(float(p.value))
                term = discriminator_loss(p, 1)
                loss = term if loss is None else loss + term
            for i in gen_batch:
                s = states[int(i)]
                # relaxed values detached from generator parameters
                detached = relax_tensor(ad.Tensor(s.logits), noise_for(int(i)), s.tau_g, s.trainable)
                p = discriminate(detached, disc, param_tensors)
                p_gens.append(float(p.value))
                loss = loss + discriminator_loss(p, 0)
            loss = loss * (1.0 / (len(real_batch) + len(gen_batch)))
            _require_finite(loss.value, step, "l_dis")
            loss.backward()
            grads = [t.grad if t.grad is not None else np.zeros_like(t.value) for t in leaf_list]
            for g in grads:
                _require_finite(g, step, "discriminator gradient")
            disc_opt.step(grads)
            row.update(
                l_dis=float(loss.value),
                p_real_mean=float(np.mean(p_reals)),
                p_gen_mean=float(np.mean(p_gens)),
            )

        trace.append(row)

    refined = extract_refined(states, seed=rng.integers(1 << 31))
    return refined, trace, GanModel(states=states, discriminator=disc, motif_k=motif_k, w_real=w_real)


def extract_refined(states, seed):
    """Discrete refined graphs: threshold one seeded relaxed draw at 0.5 on
    trainable pairs (equivalently, keep pair (i,j) iff noise < clamped
    logit)."""
    rng = np.random.default_rng(seed)
    out = []
    for s in states:
        p = relax_edges(s, rng.integers(1 << 31))
        adj = (p >= 0.5).astype(np.uint8)
        adj[~s.trainable] = 0
        np.fill_diagonal(adj, 0)
        out.append(Graph(s.logits.shape[0], adj))
    return out


def write_trace(trace, path):
    lines = [",".join(TRACE_COLUMNS)]
    for row in trace:
        lines.append(",".join(_fmt(row.get(c)) for c in TRACE_COLUMNS))
    from pathlib import Path

    Path(path).write_text("\n".join(lines) + "\n")


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


# -- gradcheck surface -------------------------------------------------------------


def _random_state_setup(rng, tau=0.7):
    """A small synthetic scaffold with both internal edges and candidates."""
    n, m = 6, 3
    adj = np.zeros((n, n), dtype=np.uint8)
    # motif triangle, context path (two edges, so its degree entropy
    # actually varies with the logits), one cross edge
    for i, j in ((0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (0, 4)):
        adj[i, j] = adj[j, i] = 1
    raw = RawCounterfactual(
        n=n,
        motif_count=m,
        adj=adj,
        initial_cross_edges=[(0, 4)],
        provenance={"g_index": 0, "h_index": 1, "label": 0},
        e_con_real=3,
        context_entropy_real=0.5,
    )
    state = init_edge_logits(raw, gamma=0.75, lambda_g=0.8, tau_g=tau)
    noise = sample_edge_noise(n, rng)
    start = np.where(state.trainable, rng.normal(0.4, 0.3, size=(n, n)), 0.0)
    start = np.triu(start, 1)
    start = start + start.T
    return state, noise, start


def gradcheck_cases():
    """(name, factory) pairs; each factory yields (build_fn, x0) where
    build_fn maps a leaf Tensor to the scalar loss under test."""
    tau = 0.7  # well-conditioned relaxation for finite differences

    def motif_case(rng):
        state, noise, x0 = _random_state_setup(rng, tau)
        k = 4
        w_real = np.clip(rng.random((k, k)), 0, 1)
        w_real = 0.5 * (w_real + w_real.T)

        def build(leaf):
            p = relax_tensor(leaf, noise, tau, state.trainable)
            return motif_consistency_loss([p], w_real, k)

        return build, x0

    def context_case(rng):
        state, noise, x0 = _random_state_setup(rng, tau)
        # keep the |.| argument away from its kink
        target = 0.1

        def build(leaf):
            p = relax_tensor(leaf, noise, tau, state.trainable)
            return contextual_loss([p], [state.scaffold.motif_count], [target])

        return build, x0

    def connection_case(rng):
        state, noise, x0 = _random_state_setup(rng, tau)

        def build(leaf):
            p = relax_tensor(leaf, noise, tau, state.trainable)
            return connection_loss([p], [state.scaffold.motif_count], 0.8, [7])

        return build, x0

    def entropy_case(rng):
        d0 = rng.random(6) + 0.2

        def build(leaf):
            return degree_entropy_tensor(leaf, 6)

        return build, d0

    def encoder_adj_case(rng):
        n = 5
        disc = init_discriminator(2, hidden_dim=6, seed=int(rng.integers(1 << 30)))
        sym = rng.random((n, n))
        sym = 0.5 * (sym + sym.T)
        np.fill_diagonal(sym, 0.0)

        def build(leaf):
            t = ad.symmetrize(leaf)
            feats = gan_node_features(t, n)
            z = encode_graph(t, feats, disc)
            return ad.tsum(ad.square(z))

        return build, sym

    def encoder_weight_case(rng):
        n = 5
        disc = init_discriminator(2, hidden_dim=6, seed=int(rng.integers(1 << 30)))
        adj = (rng.random((n, n)) > 0.5).astype(float)
        adj = np.triu(adj, 1)
        adj = adj + adj.T

        def build(leaf):
            tensors = {
                "gnn": [(leaf, ad.Tensor(disc.gnn_layers[0][1]))]
                + [(ad.Tensor(w), ad.Tensor(b)) for w, b in disc.gnn_layers[1:]],
                "mlp": [(ad.Tensor(w), ad.Tensor(b)) for w, b in disc.mlp_layers],
            }
            t = ad.Tensor(adj)
            z = encode_graph(t, gan_node_features(t, n), disc, tensors)
            return ad.tsum(ad.square(z))

        return build, disc.gnn_layers[0][0].copy()

    def pooling_mlp_bce_case(rng):
        disc = init_discriminator(2, hidden_dim=4, seed=int(rng.integers(1 << 30)))
        z0 = rng.normal(0.0, 2.0, size=(5, 4))

        def build(leaf):
            rep = graph_representation(leaf)
            p = discriminator_prob(rep, disc)
            return discriminator_loss(p, 1)

        return build, z0

    def mlp_weight_case(rng):
        disc = init_discriminator(2, hidden_dim=4, seed=int(rng.integers(1 << 30)))
        rep = rng.normal(size=8)

        def build(leaf):
            tensors = {
                "gnn": [],
                "mlp": [(leaf, ad.Tensor(disc.mlp_layers[0][1]))]
                + [(ad.Tensor(w), ad.Tensor(b)) for w, b in disc.mlp_layers[1:]],
            }
            p = discriminator_prob(ad.Tensor(rep), disc, tensors)
            return discriminator_loss(p, 0)

        return build, disc.mlp_layers[0][0].copy()

    def generator_chain_case(rng):
        state, noise, x0 = _random_state_setup(rng, tau)
        k = 4
        w_real = np.full((k, k), 0.4)
        disc = init_discriminator(2, hidden_dim=6, seed=int(rng.integers(1 << 30)))

        def build(leaf):
            p = relax_tensor(leaf, noise, tau, state.trainable)
            l_m = motif_consistency_loss([p], w_real, k)
            l_cx = contextual_loss([p], [state.scaffold.motif_count], [0.1])
            l_cn = connection_loss([p], [state.scaffold.motif_count], 0.8, [7])
            l_reg = regularization_loss(l_m, l_cx, l_cn, 1.0, 0.9, 0.6)
            return generator_loss(discriminate(p, disc), l_reg, reg_sign=1)

        return build, x0

    return [
        ("motif_consistency_loss", motif_case),
        ("contextual_loss", context_case),
        ("connection_loss", connection_case),
        ("degree_entropy", entropy_case),
        ("encoder_wrt_adjacency", encoder_adj_case),
        ("encoder_wrt_weights", encoder_weight_case),
        ("pooling_mlp_bce", pooling_mlp_bce_case),
        ("mlp_wrt_weights", mlp_weight_case),
        ("generator_chain", generator_chain_case),
    ]
