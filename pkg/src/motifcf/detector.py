"""Graph-level anomaly classifier.

Same architecture family as the refinement discriminator (GCN encoder,
mean||max pooling, sigmoid MLP head), trained with binary cross-entropy on
normal=1 / anomalous=0 labels over degree-one-hot node features. Epoch
selection is on validation F1 of the anomaly class; the decision threshold
stays fixed at 0.5.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from . import gan
from .checkpoint import load_arrays, save_arrays
from .errors import ConfigError, NumericalError
from .graphs import DEFAULT_DEGREE_BUCKETS, default_node_features
from .metrics import detection_metrics


@dataclass
class ClassifierConfig:
    steps: int = 300
    learning_rate: float = 0.001
    batch_size: int = 8
    hidden_dim: int = 32
    gnn_layers: int = 2
    mlp_layers: int = 2
    max_degree_bucket: int = DEFAULT_DEGREE_BUCKETS
    val_every: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.steps < 1 or self.batch_size < 1 or self.val_every < 1:
            raise ConfigError("steps, batch_size and val_every must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")


@dataclass
class ClassifierModel:
    params: gan.DiscriminatorParams
    max_degree_bucket: int
    trained: bool = False


def init_classifier(cfg: ClassifierConfig):
    params = gan.init_discriminator(
        in_dim=cfg.max_degree_bucket,
        hidden_dim=cfg.hidden_dim,
        gnn_layers=cfg.gnn_layers,
        mlp_layers=cfg.mlp_layers,
        seed=cfg.seed,
        zero_head=True,  # untrained model outputs probability exactly 0.5
    )
    return ClassifierModel(params=params, max_degree_bucket=cfg.max_degree_bucket)


def _forward(model: ClassifierModel, g, param_tensors=None):
    feats = default_node_features(g, model.max_degree_bucket)
    adj_t = ad.Tensor(g.adj.astype(np.float64))
    z = gan.encode_graph(adj_t, ad.Tensor(feats), model.params, param_tensors)
    return gan.discriminator_prob(gan.graph_representation(z), model.params, param_tensors)


def predict(model: ClassifierModel, g):
    """Probability of the normal class and the 0.5-threshold label
    (boundary probability 0.5 maps to label 1)."""
    p = float(_forward(model, g).value)
    return p, int(p >= 0.5)


def train_classifier(train_pairs, cfg: ClassifierConfig, val_pairs=None):
    """Minimize BCE on (graph, {0,1}) pairs with Adam.

    When a validation set is given, the parameters with the best validation
    F1 (anomaly class 0 positive) are restored at the end. Returns
    (model, trace); trace rows carry step, train BCE, and the last
    validation F1.
    """
    labels = {int(l) for _, l in train_pairs}
    if labels != {0, 1}:
        raise ConfigError(f"training set must contain both classes, got {sorted(labels)}")
    model = init_classifier(cfg)
    rng = np.random.default_rng(cfg.seed)
    opt = gan.Adam(model.params.all_arrays(), lr=cfg.learning_rate)

    def val_scores():
        if not val_pairs:
            return None
        probs = [predict(model, g)[0] for g, _ in val_pairs]
        actual = [l for _, l in val_pairs]
        preds = [int(p >= 0.5) for p in probs]
        f1 = detection_metrics(preds, actual, positive_class=0).f1
        eps = 1e-7
        bce = -float(
            np.mean(
                [
                    l * np.log(max(p, eps)) + (1 - l) * np.log(max(1 - p, eps))
                    for p, l in zip(probs, actual)
                ]
            )
        )
        return f1, bce

    best_key, best_params = None, None
    trace = []
    order = rng.permutation(len(train_pairs))
    cursor = 0
    for step in range(cfg.steps):
        take = []
        for _ in range(min(cfg.batch_size, len(train_pairs))):
            if cursor == len(order):
                order = rng.permutation(len(train_pairs))
                cursor = 0
            take.append(int(order[cursor]))
            cursor += 1
        param_tensors = {
            "gnn": [(ad.Tensor(w, requires_grad=True), ad.Tensor(b, requires_grad=True)) for w, b in model.params.gnn_layers],
            "mlp": [(ad.Tensor(w, requires_grad=True), ad.Tensor(b, requires_grad=True)) for w, b in model.params.mlp_layers],
        }
        leaves = [t for pair in param_tensors["gnn"] + param_tensors["mlp"] for t in pair]
        loss = None
        for i in take:
            g, label = train_pairs[i]
            p = _forward(model, g, param_tensors)
            term = gan.discriminator_loss(p, int(label))
            loss = term if loss is None else loss + term
        loss = loss * (1.0 / len(take))
        if not np.isfinite(loss.value):
            raise NumericalError(f"non-finite classifier loss at step {step}")
        loss.backward()
        opt.step([t.grad if t.grad is not None else np.zeros_like(t.value) for t in leaves])

        row = {"step": step, "train_bce": float(loss.value)}
        if val_pairs and (step % cfg.val_every == 0 or step == cfg.steps - 1):
            model.trained = True
            f1, bce = val_scores()
            row["val_f1"] = f1
            # ties on F1 go to the more confident (lower val BCE) snapshot
            key = (f1, -bce)
            if best_key is None or key > best_key:
                best_key = key
                best_params = [a.copy() for a in model.params.all_arrays()]
        trace.append(row)

    if best_params is not None:
        for current, snapshot in zip(model.params.all_arrays(), best_params):
            current[...] = snapshot
    model.trained = True
    return model, trace


def evaluate_on(model: ClassifierModel, graphs, labels, positive_class=0):
    preds = [predict(model, g)[1] for g in graphs]
    return detection_metrics(preds, labels, positive_class=positive_class)


# -- persistence -----------------------------------------------------------------


def save_classifier(model: ClassifierModel, path):
    arrays = {"meta_bucket": np.array([[float(model.max_degree_bucket)]])}
    for i, (w, b) in enumerate(model.params.gnn_layers):
        arrays[f"gnn{i}_w"] = w
        arrays[f"gnn{i}_b"] = b
    for i, (w, b) in enumerate(model.params.mlp_layers):
        arrays[f"mlp{i}_w"] = w
        arrays[f"mlp{i}_b"] = b
    save_arrays(arrays, path)


def load_classifier(path):
    arrays = load_arrays(path)
    bucket = int(arrays.pop("meta_bucket")[0][0])
    gnn, mlp = [], []
    i = 0
    while f"gnn{i}_w" in arrays:
        gnn.append((arrays[f"gnn{i}_w"], np.ravel(arrays[f"gnn{i}_b"])))
        i += 1
    i = 0
    while f"mlp{i}_w" in arrays:
        mlp.append((arrays[f"mlp{i}_w"], np.ravel(arrays[f"mlp{i}_b"])))
        i += 1
    params = gan.DiscriminatorParams(gnn_layers=gnn, mlp_layers=mlp, hidden_dim=gnn[0][0].shape[1])
    return ClassifierModel(params=params, max_degree_bucket=bucket, trained=True)
