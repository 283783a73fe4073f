"""End-to-end orchestration: data -> graphons -> raw counterfactuals ->
adversarial refinement -> augmented classifier -> metrics report.

Every stage draws its randomness from a stream derived from (master seed,
stage name, item index), so stages rerun identically in isolation. Test-
split graphs never reach graphon estimation, production, refinement, or
classifier training; the guard is structural (stage inputs are index arrays
checked against the train split).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import gan
from .detector import ClassifierConfig, evaluate_on, predict, save_classifier, train_classifier
from .errors import ConfigError, DatasetError, MotifcfError
from .graphon import aligned_adjacency, estimate_class_graphons
from .graphs import (
    Graph,
    LabeledDataset,
    PlantedClass,
    PlantedMotifConfig,
    downsample_anomaly,
    generate_planted_motif_dataset,
    load_dataset,
    load_saved_dataset,
    make_split,
    motif_from_spec,
    save_dataset,
)
from .metrics import realism_score, proximity_score, sparsity_score, validity_score
from .producer import pair_donors, produce_raw_counterfactual, save_manifest, save_raws


def stage_seed(master, stage, index=0):
    """Deterministic per-stage RNG seed: hash of (seed, stage, index)."""
    digest = hashlib.sha256(f"{master}:{stage}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class SynthSpec:
    classes: list  # [{"motif": "K4", "context": [9, 12], "p": 0.15}, ...]
    graphs_per_class: int = 50
    cross_edges: int = 2

    def to_planted(self, seed):
        classes = [
            PlantedClass(
                motif_from_spec(c["motif"]),
                tuple(c["context"]),
                float(c["p"]),
            )
            for c in self.classes
        ]
        return PlantedMotifConfig(
            classes=classes,
            graphs_per_class=self.graphs_per_class,
            cross_edge_count=self.cross_edges,
            seed=seed,
        )


@dataclass
class PipelineConfig:
    dataset_path: str | None = None  # internal JSON dataset
    tu_root: str | None = None  # community edge-list layout
    tu_name: str | None = None
    synth: SynthSpec | None = None
    anomaly_class: int = 0
    downsample_fraction: float = 1.0
    split_ratios: tuple = (0.2, 0.4, 0.4)
    graphon_k: int | None = None
    eta: int = 2
    pairing: str = "same-class"
    per_graph: int = 1
    binarize_mode: str = "threshold"
    binarize_threshold: float = 0.5
    gan: gan.TrainConfig = field(default_factory=gan.TrainConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    augment: bool = True
    gan_scope: str = "per-class"  # or "normal-only"
    seed: int = 0

    def __post_init__(self):
        sources = [self.dataset_path, self.tu_name, self.synth]
        if sum(s is not None for s in sources) != 1:
            raise ConfigError("exactly one of dataset_path, tu_name, synth must be set")
        if not (0.0 < self.downsample_fraction <= 1.0):
            raise ConfigError("downsample_fraction must be in (0, 1]")
        if self.gan_scope not in ("per-class", "normal-only"):
            raise ConfigError(f"unknown gan_scope {self.gan_scope!r}")
        for p in (self.dataset_path, self.tu_root):
            if p is not None and not Path(p).exists():
                raise ConfigError(f"referenced path does not exist: {p}")


class StageError(MotifcfError):
    def __init__(self, stage, cause):
        super().__init__(f"pipeline stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


def _assert_train_only(indices, split, stage):
    extra = set(np.asarray(indices).tolist()) - set(split.train.tolist())
    if extra:
        raise StageError(stage, f"non-train graphs {sorted(extra)} leaked in")


def _flush(out_dir, name, writer):
    if out_dir is None:
        return
    try:
        writer(Path(out_dir) / name)
    except OSError:
        pass  # partial artifacts are best effort


def run_pipeline(cfg: PipelineConfig, out_dir=None):
    """Run every stage and return (report dict, artifacts dict).

    Artifacts hold in-memory intermediates for tests and debugging; files
    are also flushed under ``out_dir`` when given (even on stage failure,
    whatever exists so far is written first).
    """
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    art = {}
    stage = "load"
    try:
        ds = _load_stage(cfg)
        art["dataset_full"] = ds

        stage = "downsample"
        ds = downsample_anomaly(
            ds, cfg.anomaly_class, cfg.downsample_fraction, seed=stage_seed(cfg.seed, stage)
        )

        stage = "split"
        ds = make_split(ds, ratios=cfg.split_ratios, seed=stage_seed(cfg.seed, stage))
        art["dataset"] = ds
        _flush(out_dir, "dataset.json", lambda p: save_dataset(ds, p))
        train_idx = ds.split.train

        stage = "graphon"
        _assert_train_only(train_idx, ds.split, stage)
        graphons = estimate_class_graphons(ds, train_idx, K=cfg.graphon_k)
        art["graphons"] = graphons

        raws, refined, refined_labels, traces = [], [], [], {}
        if cfg.augment:
            stage = "produce"
            _assert_train_only(train_idx, ds.split, stage)
            raws = _produce_stage(cfg, ds, train_idx, graphons)
            art["raws"] = raws
            _flush(out_dir, "raws.json", lambda p: save_raws(raws, p))
            _flush(out_dir, "raws_manifest.csv", lambda p: save_manifest(raws, p))

            stage = "refine"
            refined, refined_labels, traces = _refine_stage(cfg, ds, train_idx, raws)
            art["refined"] = refined
            art["refined_labels"] = refined_labels
            art["traces"] = traces
            for label, trace in traces.items():
                _flush(out_dir, f"gan_trace_class{label}.csv", lambda p, t=trace: gan.write_trace(t, p))

        stage = "train-classifier"
        _assert_train_only(train_idx, ds.split, stage)
        train_pairs = [(ds.graphs[i], int(ds.labels[i])) for i in train_idx]
        val_pairs = [(ds.graphs[i], int(ds.labels[i])) for i in ds.split.val]
        # the main classifier always uses the same seed stream so paired
        # augmentation-on/off runs differ only in their training data
        main_cfg = _with_seed(cfg.classifier, stage_seed(cfg.seed, "classifier"))
        if cfg.augment and refined:
            aug_pairs = train_pairs + list(zip(refined, refined_labels))
            model, clf_trace = train_classifier(aug_pairs, main_cfg, val_pairs=val_pairs)
            ref_cfg = _with_seed(cfg.classifier, stage_seed(cfg.seed, "ref-classifier"))
            ref_model, _ = train_classifier(train_pairs, ref_cfg, val_pairs=val_pairs)
        else:
            model, clf_trace = train_classifier(train_pairs, main_cfg, val_pairs=val_pairs)
            ref_model = model
        art["model"] = model
        art["ref_model"] = ref_model
        _flush(out_dir, "classifier.txt", lambda p: save_classifier(model, p))

        stage = "evaluate"
        test_idx = ds.split.test
        detection = evaluate_on(
            model,
            [ds.graphs[i] for i in test_idx],
            ds.labels[test_idx],
            positive_class=0,
        )
        quality = quality_raw = None
        if cfg.augment and raws:
            quality = _quality_stage(cfg, ds, raws, refined, refined_labels, ref_model)
            raw_graphs = [r.to_graph() for r in raws]
            quality_raw = _quality_stage(cfg, ds, raws, raw_graphs, refined_labels, ref_model)
        art["detection"] = detection

        stage = "report"
        report = _build_report(cfg, ds, detection, quality, quality_raw, len(refined))
        art["report"] = report
        if out_dir is not None:
            write_report(report, Path(out_dir))
        return report, art
    except MotifcfError as exc:
        if isinstance(exc, StageError):
            raise
        raise StageError(stage, exc) from exc


def _load_stage(cfg: PipelineConfig):
    if cfg.synth is not None:
        planted = cfg.synth.to_planted(seed=stage_seed(cfg.seed, "synth"))
        return generate_planted_motif_dataset(planted)
    if cfg.dataset_path is not None:
        return load_saved_dataset(cfg.dataset_path)
    if cfg.tu_root is None:
        raise DatasetError("tu_name given without tu_root")
    return load_dataset(cfg.tu_root, cfg.tu_name, anomaly_class=cfg.anomaly_class)


def _with_seed(clf_cfg: ClassifierConfig, seed):
    cfg = ClassifierConfig(**asdict(clf_cfg))
    cfg.seed = seed
    return cfg


def _produce_stage(cfg, ds, train_idx, graphons):
    context_ok = np.zeros(len(ds), dtype=bool)
    for i in train_idx:
        k = graphons[int(ds.labels[i])].K
        context_ok[i] = ds.graphs[i].n > k
    pairs = pair_donors(
        ds,
        train_idx,
        ds.labels,
        per_graph=cfg.per_graph,
        pairing=cfg.pairing,
        context_ok=context_ok,
        seed=stage_seed(cfg.seed, "pair"),
    )
    raws = []
    for k, (gi, hi) in enumerate(pairs):
        raws.append(
            produce_raw_counterfactual(
                ds.graphs[gi],
                ds.graphs[hi],
                graphons[int(ds.labels[gi])],
                graphons[int(ds.labels[hi])],
                eta=cfg.eta,
                seed=stage_seed(cfg.seed, "produce", k),
                binarize_mode=cfg.binarize_mode,
                threshold=cfg.binarize_threshold,
                provenance={"g_index": gi, "h_index": hi, "label": int(ds.labels[gi])},
            )
        )
    return raws


def _refine_stage(cfg, ds, train_idx, raws):
    """One GAN per class (or one on normal graphs only), sharing the
    architecture and config."""
    refined, refined_labels, traces = [], [], {}
    if cfg.gan_scope == "normal-only":
        groups = {1: [r for r in raws if r.provenance["label"] == 1]}
        leftover = [r for r in raws if r.provenance["label"] != 1]
    else:
        groups = {}
        for r in raws:
            groups.setdefault(int(r.provenance["label"]), []).append(r)
        leftover = []
    for label in sorted(groups):
        group = groups[label]
        if not group:
            continue
        reals = [ds.graphs[i] for i in train_idx if int(ds.labels[i]) == label]
        gcfg = gan.TrainConfig(**{**asdict(cfg.gan), "seed": stage_seed(cfg.seed, "gan", label)})
        out, trace, _ = gan.train_gan(group, reals, gcfg)
        refined.extend(out)
        refined_labels.extend([label] * len(out))
        traces[label] = trace
    # raws outside the refined scope pass through unrefined
    for r in leftover:
        refined.append(r.to_graph())
        refined_labels.append(int(r.provenance["label"]))
    return refined, refined_labels, traces


def _quality_stage(cfg, ds, raws, cf_graphs, cf_labels, ref_model):
    train_graphs = [ds.graphs[i] for i in ds.split.train]
    sources = []
    for r in raws:
        a_g, _ = aligned_adjacency(ds.graphs[r.provenance["g_index"]])
        sources.append(Graph(a_g.shape[0], a_g))
    pairs = list(zip(cf_graphs, sources))
    motif_counts = [r.motif_count for r in raws]
    return {
        "realism": realism_score(train_graphs, cf_graphs),
        "proximity": proximity_score(pairs),
        "validity": validity_score(list(zip(cf_graphs, cf_labels)), ref_model, predict),
        "sparsity": sparsity_score(pairs, motif_counts=motif_counts),
    }


def config_hash(cfg: PipelineConfig):
    blob = json.dumps(_config_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _config_dict(cfg: PipelineConfig):
    d = asdict(cfg)
    d["split_ratios"] = list(cfg.split_ratios)
    return d


def _build_report(cfg, ds, detection, quality, quality_raw, n_refined):
    return {
        "dataset": ds.name,
        "seed": cfg.seed,
        "config_hash": config_hash(cfg),
        "augmentation": cfg.augment,
        "counts": {
            "graphs": len(ds),
            "train": int(len(ds.split.train)),
            "val": int(len(ds.split.val)),
            "test": int(len(ds.split.test)),
            "refined": n_refined,
        },
        "detection": {
            "precision": detection.precision,
            "recall": detection.recall,
            "f1": detection.f1,
            "degenerate": detection.degenerate,
        },
        "quality": quality,
        "quality_raw": quality_raw,
    }


def write_report(report, out_dir):
    """Report JSON (stable key order), run-ledger CSV row, readable summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(report, sort_keys=True, indent=2) + "\n"
    )
    ledger = out_dir / "runs_ledger.csv"
    header = "dataset,seed,config_hash,augmentation,precision,recall,f1,realism,proximity,validity,sparsity"
    q = report["quality"] or {}
    row = ",".join(
        str(x)
        for x in (
            report["dataset"],
            report["seed"],
            report["config_hash"],
            report["augmentation"],
            report["detection"]["precision"],
            report["detection"]["recall"],
            report["detection"]["f1"],
            q.get("realism", ""),
            q.get("proximity", ""),
            q.get("validity", ""),
            q.get("sparsity", ""),
        )
    )
    if ledger.exists():
        ledger.write_text(ledger.read_text() + row + "\n")
    else:
        ledger.write_text(header + "\n" + row + "\n")
    lines = [
        f"dataset: {report['dataset']}",
        f"seed: {report['seed']}",
        f"config: {report['config_hash']}",
        f"augmentation: {'on' if report['augmentation'] else 'off'}",
        "counts: "
        + " ".join(f"{k}={v}" for k, v in report["counts"].items()),
        "detection: "
        + " ".join(f"{k}={v:.4f}" for k, v in report["detection"].items() if k != "degenerate"),
    ]
    if report["quality"]:
        lines.append(
            "quality: " + " ".join(f"{k}={v:.4f}" for k, v in report["quality"].items())
        )
        lines.append(
            "quality_raw: "
            + " ".join(f"{k}={v:.4f}" for k, v in report["quality_raw"].items())
        )
    (out_dir / "summary.txt").write_text("\n".join(lines) + "\n")
