"""The tiered BREP graph network and its siamese mate classifier.

A shared input MLP lifts per-node features to a common width, then
residual max-relative graph convolutions run up the boundary tiers
(vertex to edge, edge to loop, loop to face), across face-face
meta-relations for k inner layers, and back down the transposed
relations. Each MCF is featurized from the embeddings of its origin and
orientation entities, a one-hot of its origin type, and a meanpooled
global part feature; the two sides' features are concatenated and scored
or classified by an output MLP. The "plain" variant skips every
convolution and uses the shared-MLP embeddings alone.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .brep.model import McfRef
from .graph import FEATURE_DIM, KIND_ONLY_DIM, StructuredBrepGraph, TIER_ORDER
from .mcf import ORIGIN_TYPES, ORIGIN_TYPE_INDEX
from .nn import ParamStore, Value
from .nn import autodiff as ad

HIDDEN = 64
MCF_FEATURE_DIM = HIDDEN + HIDDEN + len(ORIGIN_TYPES) + HIDDEN  # 199
PAIR_FEATURE_DIM = 2 * MCF_FEATURE_DIM

VARIANTS = ("plain", "sbgcn")
FEATURE_SETS = ("fn_type_only", "all")
HEADS = ("location", "type")

_CONV_LAYERS_UP = (("up_ve", "vertex", "edge"), ("up_el", "edge", "loop"), ("up_lf", "loop", "face"))
_CONV_LAYERS_DOWN = (("down_fl", "face", "loop"), ("down_le", "loop", "edge"), ("down_ev", "edge", "vertex"))


@dataclass(frozen=True)
class ModelConfig:
    hidden: int = HIDDEN
    inner_layers: int = 6
    feature_set: str = "all"
    variant: str = "sbgcn"
    head: str = "location"

    def __post_init__(self):
        if self.hidden < 1 or self.inner_layers < 0:
            raise ValueError("hidden must be >= 1 and inner_layers >= 0")
        if self.feature_set not in FEATURE_SETS:
            raise ValueError(f"feature_set must be one of {FEATURE_SETS}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.head not in HEADS:
            raise ValueError(f"head must be one of {HEADS}")

    @property
    def input_dim(self) -> int:
        return KIND_ONLY_DIM if self.feature_set == "fn_type_only" else FEATURE_DIM

    @property
    def head_dim(self) -> int:
        return 1 if self.head == "location" else 8

    def to_dict(self) -> dict:
        return {
            "hidden": self.hidden,
            "inner_layers": self.inner_layers,
            "feature_set": self.feature_set,
            "variant": self.variant,
            "head": self.head,
        }

    @staticmethod
    def from_dict(d: dict) -> "ModelConfig":
        return ModelConfig(**d)

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class RelationPlan:
    """One relation set prepared for segment-max aggregation: message rows
    sorted by destination node, plus per-destination group extents."""

    src: np.ndarray
    dst: np.ndarray
    starts: np.ndarray
    counts: np.ndarray
    num_dst: int


def _make_plan(pairs: np.ndarray, num_dst: int) -> RelationPlan:
    pairs = np.asarray(pairs, dtype=int).reshape(-1, 2)
    if pairs.shape[0]:
        order = np.lexsort((pairs[:, 0], pairs[:, 1]))
        src = pairs[order, 0]
        dst = pairs[order, 1]
    else:
        src = np.zeros(0, dtype=int)
        dst = np.zeros(0, dtype=int)
    counts = np.bincount(dst, minlength=num_dst) if num_dst else np.zeros(0, dtype=int)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]]) if num_dst else np.zeros(0, dtype=int)
    return RelationPlan(src, dst, starts, counts, num_dst)


@dataclass
class PairBatch:
    """Two graphs fused into one disjoint-union batch.

    Tier matrices stack part a's rows above part b's; batch-norm
    statistics therefore span all nodes of the step.
    """

    features: dict                 # tier -> (n, input_dim)
    tier_counts: dict              # tier -> total rows
    tier_offsets: dict             # tier -> offset in the all-node matrix
    part_tier_counts: list         # [ {tier: n}, {tier: n} ]
    plans: dict                    # relation name -> RelationPlan
    part_node_indices: list        # [array, array] global node rows per part
    index_maps: list = field(default_factory=list)  # per part: id -> (tier, local)


def build_pair_batch(graph_a: StructuredBrepGraph, graph_b: StructuredBrepGraph,
                     feature_set: str = "all") -> PairBatch:
    width = KIND_ONLY_DIM if feature_set == "fn_type_only" else FEATURE_DIM
    graphs = (graph_a, graph_b)
    features = {}
    tier_counts = {}
    part_tier_counts = [dict(), dict()]
    for tier in TIER_ORDER:
        mats = []
        for p, g in enumerate(graphs):
            m = g.features[tier][:, :width]
            part_tier_counts[p][tier] = m.shape[0]
            mats.append(m)
        features[tier] = np.vstack(mats)
        tier_counts[tier] = features[tier].shape[0]

    tier_offsets = {}
    off = 0
    for tier in TIER_ORDER:
        tier_offsets[tier] = off
        off += tier_counts[tier]

    def stacked(pair_getter, src_tier, dst_tier):
        rows = []
        for p, g in enumerate(graphs):
            pairs = pair_getter(g)
            if pairs is None or len(pairs) == 0:
                continue
            src_off = part_tier_counts[0][src_tier] if p else 0
            dst_off = part_tier_counts[0][dst_tier] if p else 0
            shifted = np.asarray(pairs, dtype=int) + np.array([src_off, dst_off])
            rows.append(shifted)
        return np.vstack(rows) if rows else np.zeros((0, 2), dtype=int)

    ve = stacked(lambda g: g.ve, "vertex", "edge")
    el = stacked(lambda g: g.el, "edge", "loop")
    lf = stacked(lambda g: g.lf, "loop", "face")
    ff = stacked(lambda g: g.ff, "face", "face")
    ff_sym = np.vstack([ff, ff[:, ::-1]]) if ff.shape[0] else ff

    plans = {
        "up_ve": _make_plan(ve, tier_counts["edge"]),
        "up_el": _make_plan(el, tier_counts["loop"]),
        "up_lf": _make_plan(lf, tier_counts["face"]),
        "inner": _make_plan(ff_sym, tier_counts["face"]),
        "down_fl": _make_plan(lf[:, ::-1], tier_counts["loop"]),
        "down_le": _make_plan(el[:, ::-1], tier_counts["edge"]),
        "down_ev": _make_plan(ve[:, ::-1], tier_counts["vertex"]),
    }

    part_node_indices = []
    for p in range(2):
        idx = []
        for tier in TIER_ORDER:
            base = tier_offsets[tier] + (part_tier_counts[0][tier] if p else 0)
            idx.extend(range(base, base + part_tier_counts[p][tier]))
        part_node_indices.append(np.asarray(idx, dtype=int))

    index_maps = []
    for g in graphs:
        m = {}
        for tier in TIER_ORDER:
            for i, eid in enumerate(g.ids[tier]):
                m[eid] = (tier, i)
        index_maps.append(m)

    return PairBatch(features=features, tier_counts=tier_counts, tier_offsets=tier_offsets,
                     part_tier_counts=part_tier_counts, plans=plans,
                     part_node_indices=part_node_indices, index_maps=index_maps)


def global_node_index(batch: PairBatch, part: int, entity_id: str) -> int:
    tier, local = batch.index_maps[part][entity_id]
    return batch.tier_offsets[tier] + (batch.part_tier_counts[0][tier] if part else 0) + local


@dataclass
class CandidateArrays:
    """Vectorized per-candidate gather indices and origin-type one-hots."""

    origin_a: np.ndarray
    orient_a: np.ndarray
    onehot_a: np.ndarray
    origin_b: np.ndarray
    orient_b: np.ndarray
    onehot_b: np.ndarray

    def __len__(self):
        return len(self.origin_a)


def candidate_arrays(batch: PairBatch, pairs: list[tuple[McfRef, McfRef]]) -> CandidateArrays:
    n = len(pairs)
    origin = [np.zeros(n, dtype=int), np.zeros(n, dtype=int)]
    orient = [np.zeros(n, dtype=int), np.zeros(n, dtype=int)]
    onehot = [np.zeros((n, len(ORIGIN_TYPES))), np.zeros((n, len(ORIGIN_TYPES)))]
    for k, (ra, rb) in enumerate(pairs):
        for side, ref in enumerate((ra, rb)):
            origin[side][k] = global_node_index(batch, side, ref.origin_ref)
            orient[side][k] = global_node_index(batch, side, ref.orient_ref)
            onehot[side][k, ORIGIN_TYPE_INDEX[ref.origin_type]] = 1.0
    return CandidateArrays(origin[0], orient[0], onehot[0], origin[1], orient[1], onehot[1])


@dataclass
class Embeddings:
    """Forward-pass outputs: the fused node matrix, per-part global
    features, and the watched input leaves (for Jacobian probes)."""

    nodes: Value
    part_globals: list
    input_leaves: dict
    batch: PairBatch


class SbgcnModel:
    """Parameter container plus forward passes; siamese by construction
    (one parameter set encodes both parts)."""

    def __init__(self, config: ModelConfig, store: ParamStore, dtype=np.float32):
        self.config = config
        self.store = store
        self.dtype = dtype

    # -- initialization ----------------------------------------------------

    @staticmethod
    def init(config: ModelConfig, seed: int = 0, dtype=np.float32) -> "SbgcnModel":
        rng = np.random.default_rng(seed)
        store = ParamStore()

        def linear(name, fan_in, fan_out):
            scale = np.sqrt(2.0 / fan_in)
            store.add_param(f"{name}.w", (rng.standard_normal((fan_in, fan_out)) * scale).astype(dtype))
            store.add_param(f"{name}.b", np.zeros((1, fan_out), dtype=dtype))

        def bn(name, width):
            store.add_param(f"{name}.gamma", np.ones((1, width), dtype=dtype))
            store.add_param(f"{name}.beta", np.zeros((1, width), dtype=dtype))
            store.add_buffer(f"{name}.mean", np.zeros(width, dtype=np.float64))
            store.add_buffer(f"{name}.var", np.ones(width, dtype=np.float64))

        h = config.hidden
        linear("input", config.input_dim, h)
        bn("input.bn", h)
        for name in SbgcnModel._conv_layer_names(config):
            linear(f"conv.{name}", 2 * h, h)
            bn(f"conv.{name}.bn", h)
        linear("head.l1", 2 * MCF_FEATURE_DIM, h)
        linear("head.l2", h, config.head_dim)
        store.metadata = {"config": config.to_dict(), "config_hash": config.hash(), "seed": seed}
        return SbgcnModel(config, store, dtype)

    @staticmethod
    def _conv_layer_names(config: ModelConfig):
        if config.variant == "plain":
            return []
        names = [n for n, _, _ in _CONV_LAYERS_UP]
        names += [f"inner{i}" for i in range(config.inner_layers)]
        names += [n for n, _, _ in _CONV_LAYERS_DOWN]
        return names

    def parameter_count(self) -> int:
        return self.store.parameter_count()

    # -- forward -----------------------------------------------------------

    def _p(self, name: str) -> Value:
        return self.store.params[name]

    def _mlp_block(self, x: Value, name: str, training: bool) -> Value:
        z = ad.add(ad.matmul(x, self._p(f"{name}.w")), self._p(f"{name}.b"))
        bn_name = f"{name}.bn"
        z = ad.batchnorm(z, self._p(f"{bn_name}.gamma"), self._p(f"{bn_name}.beta"),
                         self.store.buffers[f"{bn_name}.mean"], self.store.buffers[f"{bn_name}.var"],
                         training=training)
        return ad.relu(z)

    def _conv(self, h_src: Value, h_dst: Value, plan: RelationPlan, name: str, training: bool) -> Value:
        # a layer whose relation set is empty is a no-op; nodes with empty
        # neighborhoods inside a nonempty set still get the zero-aggregate update
        if plan.num_dst == 0 or plan.src.size == 0:
            return h_dst
        diffs = ad.sub(ad.take_rows(h_src, plan.src), ad.take_rows(h_dst, plan.dst))
        agg = ad.segment_max(diffs, plan.starts, plan.counts, plan.num_dst)
        update = self._mlp_block(ad.concat_cols([h_dst, agg]), f"conv.{name}", training)
        return ad.add(h_dst, update)

    def encode_pair(self, batch: PairBatch, training: bool = False,
                    watch_inputs: bool = False) -> Embeddings:
        leaves = {}
        for tier in TIER_ORDER:
            leaves[tier] = Value(batch.features[tier].astype(self.dtype),
                                 requires_grad=watch_inputs, op=f"features:{tier}")
        stacked = ad.concat_rows([leaves[t] for t in TIER_ORDER])
        h_all = self._mlp_block(stacked, "input", training)

        hs = {}
        off = 0
        for tier in TIER_ORDER:
            n = batch.tier_counts[tier]
            hs[tier] = ad.take_rows(h_all, np.arange(off, off + n))
            off += n

        if self.config.variant == "sbgcn":
            for name, src, dst in _CONV_LAYERS_UP:
                hs[dst] = self._conv(hs[src], hs[dst], batch.plans[name], name, training)
            for i in range(self.config.inner_layers):
                hs["face"] = self._conv(hs["face"], hs["face"], batch.plans["inner"], f"inner{i}", training)
            for name, src, dst in _CONV_LAYERS_DOWN:
                hs[dst] = self._conv(hs[src], hs[dst], batch.plans[name], name, training)

        nodes = ad.concat_rows([hs[t] for t in TIER_ORDER])
        part_globals = [ad.mean_rows(ad.take_rows(nodes, idx)) for idx in batch.part_node_indices]
        return Embeddings(nodes=nodes, part_globals=part_globals, input_leaves=leaves, batch=batch)


    def mcf_features(self, emb: Embeddings, cand: CandidateArrays, side: int) -> Value:
        n = len(cand)
        origin_idx = cand.origin_a if side == 0 else cand.origin_b
        orient_idx = cand.orient_a if side == 0 else cand.orient_b
        onehot = cand.onehot_a if side == 0 else cand.onehot_b
        return ad.concat_cols([
            ad.take_rows(emb.nodes, origin_idx),
            ad.take_rows(emb.nodes, orient_idx),
            ad.constant(onehot.astype(self.dtype)),
            ad.tile_rows(emb.part_globals[side], n),
        ])

    def head_logits(self, emb: Embeddings, cand: CandidateArrays) -> Value:
        """Logits for every candidate pair: (n, 1) location or (n, 8) type."""
        pair = ad.concat_cols([self.mcf_features(emb, cand, 0), self.mcf_features(emb, cand, 1)])
        hidden = ad.relu(ad.add(ad.matmul(pair, self._p("head.l1.w")), self._p("head.l1.b")))
        return ad.add(ad.matmul(hidden, self._p("head.l2.w")), self._p("head.l2.b"))

    def score_pairs(self, batch: PairBatch, pairs: list, training: bool = False) -> np.ndarray:
        """Convenience inference path: raw logits as a numpy array."""
        emb = self.encode_pair(batch, training=training)
        logits = self.head_logits(emb, candidate_arrays(batch, pairs))
        return logits.data.copy()
