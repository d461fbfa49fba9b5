"""Joint embedding training over the four graph relations.

Full-batch: each epoch walks every positive edge, draws that relation's
negative count, and feeds (anchor, positive, negatives) index batches to
the pair-gradient kernel. Ad anchors are encoder outputs, so their
gradient flows on into the encoder's backward pass. Adam steps once per
epoch; early stopping watches held-out-edge loss with fixed negatives.
"""

from __future__ import annotations

import math

import numpy as np

from adlens._core import accumulate_pair_grads
from adlens.errors import DataError
from adlens.graph import AdGraph, RELATIONS, RELATION_ENDPOINTS
from adlens.embed.encoders import create_encoder
from adlens.embed.model import NODE_KIND_ORDER, EmbeddingModel, TrainConfig
from adlens.embed.wordvec import WordVectors

EdgeSets = dict[str, list[tuple[int, int]]]
NegativeSets = dict[str, np.ndarray]


def pair_loss(o: np.ndarray, mp: np.ndarray, mn: np.ndarray) -> float:
    """-log sigmoid(o.mp - o.mn), in overflow-safe softplus form."""
    z = float(np.dot(o, mp) - np.dot(o, mn))
    if z >= 0.0:
        return math.log1p(math.exp(-z))
    return -z + math.log1p(math.exp(z))


def init_model(graph: AdGraph, config: TrainConfig, word_vectors: WordVectors) -> EmbeddingModel:
    """Fresh model: node tables uniform in +-0.5/dim, encoder per its own rule."""
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0]))
    bound = 0.5 / config.dim
    node_tables = {
        kind: rng.uniform(-bound, bound, size=(graph.population(kind), config.dim))
        for kind in NODE_KIND_ORDER
    }
    encoder = create_encoder(
        config.encoder_kind, config.dim, config.encoder_hidden, word_vectors, rng
    )
    return EmbeddingModel(
        config=config,
        node_tables=node_tables,
        encoder=encoder,
        word_vectors=word_vectors,
        entity_names=graph.entity_names,
        lex_words=graph.lex_words,
    )


def draw_negatives(
    graph: AdGraph,
    edges: EdgeSets,
    config: TrainConfig,
    rng: np.random.Generator,
) -> NegativeSets:
    """One (M, K) negative-index matrix per relation, -1 padding short rows."""
    out: NegativeSets = {}
    for rel in RELATIONS:
        rel_edges = edges.get(rel, [])
        k = config.negatives[rel]
        neg = np.full((len(rel_edges), k), -1, dtype=np.int64)
        for row, (src, _) in enumerate(rel_edges):
            drawn = graph.sample_negative_indices(rel, src, k, rng)
            neg[row, : drawn.size] = drawn
        out[rel] = neg
    return out


def epoch_loss(
    graph: AdGraph,
    model: EmbeddingModel,
    config: TrainConfig,
    rng: np.random.Generator | None = None,
    edges: EdgeSets | None = None,
    negatives: NegativeSets | None = None,
) -> tuple[float, dict[str, np.ndarray], int]:
    """One full pass: mean per-term loss, gradients of the summed objective.

    Negatives come from `negatives` when given (validation path), else they
    are drawn from `rng`. Returns (mean_loss, grads, n_terms); grads covers
    every trainable array, zero-filled where nothing contributed.
    """
    if edges is None:
        edges = graph.edges
    if negatives is None:
        if rng is None:
            raise ValueError("need an rng when negatives are not fixed")
        negatives = draw_negatives(graph, edges, config, rng)

    model.encoder.prepare(graph.ad_tokens)
    ad_emb = np.ascontiguousarray(model.encoder.forward())
    d_ad = np.zeros_like(ad_emb)
    tables = model.node_tables
    d_tables = {kind: np.zeros_like(tables[kind]) for kind in NODE_KIND_ORDER}

    def bank(kind: str) -> tuple[np.ndarray, np.ndarray]:
        if kind == "ad":
            return ad_emb, d_ad
        return tables[kind], d_tables[kind]

    loss_sum = 0.0
    n_terms = 0
    for rel in RELATIONS:
        rel_edges = edges.get(rel, [])
        if not rel_edges:
            continue
        edge_arr = np.asarray(rel_edges, dtype=np.int64).reshape(len(rel_edges), 2)
        src_kind, tgt_kind = RELATION_ENDPOINTS[rel]
        anchor, d_anchor = bank(src_kind)
        target, d_target = bank(tgt_kind)
        rel_loss, rel_terms = accumulate_pair_grads(
            anchor,
            target,
            np.ascontiguousarray(edge_arr[:, 0]),
            np.ascontiguousarray(edge_arr[:, 1]),
            np.ascontiguousarray(negatives[rel]),
            float(config.lambdas.get(rel, 1.0)),
            d_anchor,
            d_target,
        )
        loss_sum += rel_loss
        n_terms += rel_terms

    grads = {f"node/{kind}": d_tables[kind] for kind in NODE_KIND_ORDER}
    enc_grads = model.encoder.backward(d_ad)
    for name in sorted(enc_grads):
        grads[f"enc/{name}"] = enc_grads[name]
    mean_loss = loss_sum / n_terms if n_terms else 0.0
    return mean_loss, grads, n_terms


class Adam:
    """Standard bias-corrected Adam, one step per epoch, in-place updates."""

    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        for name in sorted(params):
            g = grads[name]
            if name not in self._m:
                self._m[name] = np.zeros_like(g)
                self._v[name] = np.zeros_like(g)
            m, v = self._m[name], self._v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            m_hat = m / (1.0 - self.beta1**self.t)
            v_hat = v / (1.0 - self.beta2**self.t)
            params[name] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def train(graph: AdGraph, config: TrainConfig, word_vectors: WordVectors) -> EmbeddingModel:
    """Train to convergence or max_epochs; returns the best-validation model.

    Deterministic for a given config.seed: initialization, the validation
    split, its fixed negatives, and every epoch's negative draws each use
    their own child seed of config.seed. When the split yields no
    validation edges (tiny graphs), training loss drives the stopping rule
    instead.
    """
    if all(len(graph.edges[rel]) == 0 for rel in RELATIONS):
        raise DataError("graph has no edges in any relation")
    model = init_model(graph, config, word_vectors)
    if config.max_epochs == 0:
        model.history = {"train_loss": [], "val_loss": [], "best_epoch": 0, "epochs_run": 0}
        return model

    seed_root = np.random.SeedSequence([config.seed, 1])
    split_seed, val_neg_seed, train_neg_seed = seed_root.spawn(3)
    train_edges, val_edges = graph.split_validation(config.val_fraction, seed=split_seed)
    n_val = sum(len(v) for v in val_edges.values())
    val_negatives = (
        draw_negatives(graph, val_edges, config, np.random.default_rng(val_neg_seed))
        if n_val
        else None
    )

    def validation_loss() -> float | None:
        if val_negatives is None:
            return None
        loss, _, _ = epoch_loss(graph, model, config, edges=val_edges, negatives=val_negatives)
        return loss

    params = model.trainable_params()
    optimizer = Adam(lr=config.lr)
    train_rng = np.random.default_rng(train_neg_seed)

    baseline = validation_loss()
    best_score = baseline if baseline is not None else math.inf
    best_epoch = 0
    best_snapshot = {name: arr.copy() for name, arr in params.items()}
    since_best = 0
    train_hist: list[float] = []
    val_hist: list[float] = []
    epochs_run = 0

    for epoch in range(1, config.max_epochs + 1):
        loss, grads, _ = epoch_loss(graph, model, config, rng=train_rng, edges=train_edges)
        optimizer.step(params, grads)
        train_hist.append(loss)
        val = validation_loss()
        score = val if val is not None else loss
        if val is not None:
            val_hist.append(val)
        epochs_run = epoch
        if score < best_score:
            best_score = score
            best_epoch = epoch
            best_snapshot = {name: arr.copy() for name, arr in params.items()}
            since_best = 0
        else:
            since_best += 1
        if since_best >= config.patience:
            break

    for name, arr in params.items():
        arr[...] = best_snapshot[name]
    model.history = {
        "train_loss": train_hist,
        "val_loss": val_hist,
        "best_epoch": best_epoch,
        "epochs_run": epochs_run,
    }
    return model
