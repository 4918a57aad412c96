"""Losses, the training loop, and evaluation reports.

Location training scores every candidate pair of a selection example and
applies a binary cross-entropy reweighted per example by the negative to
positive count ratio. Type training runs cross-entropy over the
example's positive pairs against its mate-type label. One example is one
optimizer step; validation tracks the mean hit ratio over the task's
k-range and the best epoch's parameters are retained.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..brep.model import MATE_TYPE_INDEX, Part
from ..errors import BrepmateError
from ..forge.examples import SelectionExample
from ..graph import add_meta_paths, build_graph, normalize_pair
from ..model import CandidateArrays, ModelConfig, PairBatch, SbgcnModel, build_pair_batch, candidate_arrays
from ..nn import adam_step
from ..nn import autodiff as ad
from ..nn.autodiff import Value
from .metrics import RankingResult, hit_at_k, mean_hit_over_range, ndcg_star, rank_candidates

LOCATION_K_MAX = 10
TYPE_K_MAX = 8


@dataclass
class TrainRunConfig:
    task: str                    # "location" | "type"
    model: ModelConfig
    epochs: int
    seed: int = 0
    lr: float = 0.001
    betas: tuple = (0.9, 0.999)
    batch_size: int = 1          # selection examples per optimizer step

    def __post_init__(self):
        if self.task not in ("location", "type"):
            raise ValueError(f"unknown task {self.task!r}")
        if self.epochs <= 0 or self.batch_size <= 0:
            raise ValueError("epochs and batch_size must be positive")
        if self.model.head != self.task:
            raise ValueError(f"model head {self.model.head!r} does not match task {self.task!r}")


def location_loss(logits: Value, positives, num_candidates: int) -> Value:
    """Positive-class reweighted BCE: w = negatives/positives per example."""
    positives = list(positives)
    if not positives:
        raise BrepmateError("location loss requires at least one positive candidate")
    targets = np.zeros(num_candidates)
    targets[positives] = 1.0
    n_pos = len(positives)
    n_neg = num_candidates - n_pos
    w = n_neg / n_pos if n_neg > 0 else 1.0
    weights = np.where(targets > 0, w, 1.0)
    return ad.weighted_bce_with_logits(logits, targets, weights)


def type_loss(logits: Value, mate_type: str) -> Value:
    if mate_type not in MATE_TYPE_INDEX:
        raise BrepmateError(f"unknown mate type {mate_type!r}")
    n = logits.data.shape[0]
    labels = np.full(n, MATE_TYPE_INDEX[mate_type], dtype=int)
    return ad.softmax_cross_entropy(logits, labels)


@dataclass
class PreparedExample:
    """Normalized graphs fused into a pair batch plus candidate gathers."""

    example: SelectionExample
    batch: PairBatch
    cand: CandidateArrays          # all candidates (location scoring)
    cand_positive: CandidateArrays  # positive pairs only (type task)
    label_index: int


def prepare_examples(examples: list[SelectionExample], parts: dict[str, Part],
                     feature_set: str = "all") -> list[PreparedExample]:
    graph_cache: dict[tuple, PairBatch] = {}
    prepared = []
    for ex in examples:
        key = (ex.part_a, ex.part_b)
        if key not in graph_cache:
            na, nb, _ = normalize_pair(parts[ex.part_a], parts[ex.part_b])
            ga = add_meta_paths(build_graph(na))
            gb = add_meta_paths(build_graph(nb))
            graph_cache[key] = build_pair_batch(ga, gb, feature_set)
        batch = graph_cache[key]
        cand = candidate_arrays(batch, ex.candidates)
        pos_pairs = [ex.candidates[i] for i in ex.positives]
        prepared.append(PreparedExample(
            example=ex, batch=batch,
            cand=cand, cand_positive=candidate_arrays(batch, pos_pairs),
            label_index=MATE_TYPE_INDEX[ex.mate_type],
        ))
    return prepared


def _example_loss(model: SbgcnModel, prep: PreparedExample, task: str, training: bool) -> Value:
    emb = model.encode_pair(prep.batch, training=training)
    if task == "location":
        logits = model.head_logits(emb, prep.cand)
        return location_loss(logits, prep.example.positives, len(prep.cand))
    logits = model.head_logits(emb, prep.cand_positive)
    return type_loss(logits, prep.example.mate_type)


def location_rankings(model: SbgcnModel, prepared: list[PreparedExample]) -> list[RankingResult]:
    out = []
    for prep in prepared:
        emb = model.encode_pair(prep.batch, training=False)
        scores = model.head_logits(emb, prep.cand).data.reshape(-1)
        out.append(rank_candidates(scores, prep.example.positives))
    return out


def type_rankings(model: SbgcnModel, prepared: list[PreparedExample]) -> list[RankingResult]:
    """Type ranking evaluated at the example's first positive pair."""
    out = []
    for prep in prepared:
        emb = model.encode_pair(prep.batch, training=False)
        first = candidate_arrays(prep.batch, [prep.example.candidates[prep.example.positives[0]]])
        logits = model.head_logits(emb, first).data.reshape(-1)
        out.append(rank_candidates(logits, [prep.label_index]))
    return out


def type_probabilities(model: SbgcnModel, prep: PreparedExample) -> np.ndarray:
    emb = model.encode_pair(prep.batch, training=False)
    first = candidate_arrays(prep.batch, [prep.example.candidates[prep.example.positives[0]]])
    logits = model.head_logits(emb, first).data.reshape(-1)
    z = logits - logits.max()
    p = np.exp(z)
    return p / p.sum()


def validation_metric(model: SbgcnModel, prepared: list[PreparedExample], task: str) -> float:
    if not prepared:
        return 0.0
    if task == "location":
        return mean_hit_over_range(location_rankings(model, prepared), LOCATION_K_MAX)
    return mean_hit_over_range(type_rankings(model, prepared), TYPE_K_MAX)


@dataclass
class TrainResult:
    model: SbgcnModel
    history: list = field(default_factory=list)
    best_epoch: int = -1
    best_metric: float = -1.0


def train(config: TrainRunConfig, train_prepared: list[PreparedExample],
          val_prepared: list[PreparedExample], log=None) -> TrainResult:
    if not train_prepared:
        raise BrepmateError("no training examples")
    model = SbgcnModel.init(config.model, seed=config.seed)
    model.store.metadata["task"] = config.task
    rng = np.random.default_rng(config.seed)
    result = TrainResult(model=model)
    best_store = None
    for epoch in range(config.epochs):
        order = rng.permutation(len(train_prepared))
        losses = []
        for start in range(0, len(order), config.batch_size):
            chunk = order[start:start + config.batch_size]
            for j in chunk:
                loss = _example_loss(model, train_prepared[j], config.task, training=True)
                loss.backward(seed=np.asarray(1.0 / len(chunk)))
                losses.append(float(loss.data))
            adam_step(model.store, lr=config.lr, beta1=config.betas[0], beta2=config.betas[1])
        val_metric = validation_metric(model, val_prepared, config.task)
        entry = {"epoch": epoch, "train_loss": float(np.mean(losses)), "val_metric": val_metric}
        result.history.append(entry)
        if log:
            log(f"epoch {epoch}: loss={entry['train_loss']:.4f} val={val_metric:.4f}")
        # ties prefer the later epoch (train loss keeps improving after the
        # lenient hit-ratio validation metric saturates)
        if val_metric >= result.best_metric:
            result.best_metric = val_metric
            result.best_epoch = epoch
            best_store = model.store.copy()
    if best_store is not None:
        best_store.metadata["best_epoch"] = result.best_epoch
        best_store.metadata["history"] = result.history
        result.model = SbgcnModel(config.model, best_store, model.dtype)
    return result


def evaluate(model: SbgcnModel, prepared: list[PreparedExample], task: str, split: str) -> dict:
    """Metrics report for one split: hit@k over the task's k-range, the
    inverse-log-rank score, and accuracy at the 6-suggestion UI cutoff."""
    if not prepared:
        raise BrepmateError(f"no examples in split {split!r}")
    k_max = LOCATION_K_MAX if task == "location" else TYPE_K_MAX
    rankings = location_rankings(model, prepared) if task == "location" else type_rankings(model, prepared)
    report = {
        "task": task,
        "split": split,
        "examples": len(prepared),
        "hit_at_k": {str(k): hit_at_k(rankings, k) for k in range(1, k_max + 1)},
        "ndcg_star": ndcg_star(rankings),
        "config_hash": model.config.hash(),
    }
    if task == "location":
        report["accuracy_at_6"] = hit_at_k(rankings, 6)
    return report


def history_to_json(history: list) -> str:
    return json.dumps(history, sort_keys=True)
