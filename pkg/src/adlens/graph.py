"""Heterogeneous ad/entity/label graph with negative sampling and splits.

Four typed edge sets tie the node populations together:
  R1 entity -> stance     (explicit entities)
  R2 ad -> stance         (weakly labeled ads)
  R3 ad -> lexicon word   (lexicon matches in the ad text)
  R4 lexicon word -> issue

Stance and issue populations are fixed; ads, entities, and matched words
come from the corpus. Unlabeled ads still get nodes: the encoder embeds
them and inference classifies them afterwards.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from adlens.errors import DanglingReferenceError, DataError, SamplingError
from adlens.labels import ISSUES, STANCES, ISSUE_INDEX, STANCE_INDEX
from adlens.textproc import TokenSeq, tokenize

RELATIONS = ("R1", "R2", "R3", "R4")
RELATION_ENDPOINTS = {
    "R1": ("entity", "stance"),
    "R2": ("ad", "stance"),
    "R3": ("ad", "lexword"),
    "R4": ("lexword", "issue"),
}


@dataclass(frozen=True)
class NodeId:
    kind: str  # ad | entity | stance | issue | lexword
    index: int

    def __post_init__(self):
        if self.kind not in ("ad", "entity", "stance", "issue", "lexword"):
            raise ValueError(f"unknown node kind {self.kind!r}")
        if self.index < 0:
            raise ValueError(f"negative node index {self.index}")


class AdGraph:
    """Immutable after construction; build via build_graph() or load()."""

    def __init__(
        self,
        ad_ids: list[str],
        ad_tokens: list[TokenSeq],
        entity_names: list[str],
        lex_words: list[str],
        edges: dict[str, list[tuple[int, int]]],
    ):
        if len(ad_ids) != len(ad_tokens):
            raise ValueError("ad_ids and ad_tokens must align")
        self.ad_ids = list(ad_ids)
        self.ad_tokens = [list(tokens) for tokens in ad_tokens]
        self.entity_names = list(entity_names)
        self.lex_words = list(lex_words)
        self.ad_index = {ad_id: i for i, ad_id in enumerate(self.ad_ids)}
        self.entity_index = {name: i for i, name in enumerate(self.entity_names)}
        self.word_index = {word: i for i, word in enumerate(self.lex_words)}
        self.edges = {rel: sorted(edges.get(rel, [])) for rel in RELATIONS}
        self._positives: dict[tuple[str, int], np.ndarray] = {}
        for rel in RELATIONS:
            self._validate_relation(rel)
            targets: dict[int, set[int]] = {}
            for src, tgt in self.edges[rel]:
                targets.setdefault(src, set()).add(tgt)
            for src, tgts in targets.items():
                self._positives[(rel, src)] = np.array(sorted(tgts), dtype=np.int64)

    def population(self, kind: str) -> int:
        return {
            "ad": len(self.ad_ids),
            "entity": len(self.entity_names),
            "stance": len(STANCES),
            "issue": len(ISSUES),
            "lexword": len(self.lex_words),
        }[kind]

    def _validate_relation(self, rel: str) -> None:
        src_kind, tgt_kind = RELATION_ENDPOINTS[rel]
        n_src, n_tgt = self.population(src_kind), self.population(tgt_kind)
        for src, tgt in self.edges[rel]:
            if not (0 <= src < n_src and 0 <= tgt < n_tgt):
                raise DanglingReferenceError(
                    f"{rel} edge ({src}, {tgt}) outside {src_kind}/{tgt_kind} populations"
                )

    def edge_array(self, rel: str) -> np.ndarray:
        """Edges of a relation as an (M, 2) int64 array (may be empty)."""
        edges = self.edges[rel]
        if not edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(edges, dtype=np.int64)

    def positive_targets(self, rel: str, source_index: int) -> np.ndarray:
        return self._positives.get((rel, source_index), np.empty(0, dtype=np.int64))

    def negative_sample(
        self,
        source: NodeId,
        relation: str,
        count: int,
        rng: np.random.Generator,
    ) -> list[NodeId]:
        """Uniform negatives of the relation's target kind.

        Excludes every positive of the source node; samples without
        replacement, shrinking to the pool size when the pool is small.
        """
        src_kind, tgt_kind = RELATION_ENDPOINTS[relation]
        if source.kind != src_kind:
            raise ValueError(f"{relation} sources are {src_kind!r}, got {source.kind!r}")
        indices = self.sample_negative_indices(relation, source.index, count, rng)
        return [NodeId(tgt_kind, int(i)) for i in indices]

    def sample_negative_indices(
        self, relation: str, source_index: int, count: int, rng: np.random.Generator
    ) -> np.ndarray:
        tgt_kind = RELATION_ENDPOINTS[relation][1]
        n_tgt = self.population(tgt_kind)
        mask = np.ones(n_tgt, dtype=bool)
        mask[self.positive_targets(relation, source_index)] = False
        pool = np.flatnonzero(mask)
        if pool.size == 0:
            raise SamplingError(
                f"no negative candidates for {relation} source {source_index}"
            )
        take = min(count, pool.size)
        return rng.choice(pool, size=take, replace=False)

    def split_validation(
        self, fraction: float = 0.1, seed: int = 0
    ) -> tuple[dict[str, list[tuple[int, int]]], dict[str, list[tuple[int, int]]]]:
        """Per-relation stratified split into (train, validation) edge sets.

        floor(fraction * |edges|) validation edges per relation; an edge may
        leave training only while both its endpoints keep >= 1 training edge
        in that relation, so single-edge nodes always stay in train.
        """
        if not 0.0 < fraction < 1.0:
            raise ValueError(f"fraction must be in (0, 1), got {fraction}")
        rng = np.random.default_rng(seed)
        train: dict[str, list[tuple[int, int]]] = {}
        val: dict[str, list[tuple[int, int]]] = {}
        for rel in RELATIONS:
            edges = self.edges[rel]
            quota = int(fraction * len(edges))
            src_deg: dict[int, int] = {}
            tgt_deg: dict[int, int] = {}
            for src, tgt in edges:
                src_deg[src] = src_deg.get(src, 0) + 1
                tgt_deg[tgt] = tgt_deg.get(tgt, 0) + 1
            chosen: set[int] = set()
            for pos in rng.permutation(len(edges)):
                if len(chosen) >= quota:
                    break
                src, tgt = edges[pos]
                if src_deg[src] >= 2 and tgt_deg[tgt] >= 2:
                    chosen.add(int(pos))
                    src_deg[src] -= 1
                    tgt_deg[tgt] -= 1
            train[rel] = [e for i, e in enumerate(edges) if i not in chosen]
            val[rel] = [edges[i] for i in sorted(chosen)]
        return train, val

    def stats(self) -> dict:
        return {
            "nodes": {kind: self.population(kind) for kind in
                      ("ad", "entity", "stance", "issue", "lexword")},
            "edges": {rel: len(self.edges[rel]) for rel in RELATIONS},
        }

    def save(self, path: str | Path) -> None:
        payload = {
            "ad_ids": self.ad_ids,
            "ad_tokens": self.ad_tokens,
            "entity_names": self.entity_names,
            "lex_words": self.lex_words,
            "stances": list(STANCES),
            "issues": list(ISSUES),
            "edges": {rel: [list(e) for e in self.edges[rel]] for rel in RELATIONS},
        }
        Path(path).write_text(json.dumps(payload), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "AdGraph":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
            return cls(
                ad_ids=[str(a) for a in raw["ad_ids"]],
                ad_tokens=[list(t) for t in raw["ad_tokens"]],
                entity_names=[str(e) for e in raw["entity_names"]],
                lex_words=[str(w) for w in raw["lex_words"]],
                edges={
                    rel: [(int(s), int(t)) for s, t in raw["edges"].get(rel, [])]
                    for rel in RELATIONS
                },
            )
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise DataError(f"cannot load graph from {path}: {exc}") from exc


def build_graph(
    corpus,
    entity_stances: Mapping[str, object],
    ad_stances: Mapping[str, frozenset[str]],
    lexicon_matches: Mapping[str, set[tuple[str, str]]],
) -> AdGraph:
    """Assemble the four-relation graph from corpus + weak labels + matches.

    Every deduped ad gets a node even with no labels or matches. Lexicon
    words appear only when they match at least one ad, and each must map
    to exactly one issue.
    """
    ad_ids = [ad.id for ad in corpus.ads]
    ad_tokens = [tokenize(ad.text) for ad in corpus.ads]
    ad_index = {ad_id: i for i, ad_id in enumerate(ad_ids)}
    entity_names = sorted({ad.funding_entity for ad in corpus.ads})
    entity_index = {name: i for i, name in enumerate(entity_names)}

    word_issue: dict[str, str] = {}
    for ad_id, matches in lexicon_matches.items():
        if ad_id not in ad_index:
            raise DanglingReferenceError(f"lexicon match for unknown ad {ad_id!r}")
        for word, issue in matches:
            if issue not in ISSUE_INDEX:
                raise DanglingReferenceError(f"unknown issue {issue!r} for word {word!r}")
            known = word_issue.get(word)
            if known is None:
                word_issue[word] = issue
            elif known != issue:
                raise DataError(f"word {word!r} mapped to both {known!r} and {issue!r}")
    lex_words = sorted(word_issue)
    word_index = {word: i for i, word in enumerate(lex_words)}

    edges: dict[str, list[tuple[int, int]]] = {rel: [] for rel in RELATIONS}
    for name in sorted(entity_stances):
        if name not in entity_index:
            raise DanglingReferenceError(f"stance for unknown entity {name!r}")
        stance = entity_stances[name]
        edges["R1"].append((entity_index[name], STANCE_INDEX[stance.label]))
    for ad_id in sorted(ad_stances):
        if ad_id not in ad_index:
            raise DanglingReferenceError(f"stance labels for unknown ad {ad_id!r}")
        for label in sorted(ad_stances[ad_id]):
            if label not in STANCE_INDEX:
                raise DanglingReferenceError(f"unknown stance label {label!r}")
            edges["R2"].append((ad_index[ad_id], STANCE_INDEX[label]))
    for ad_id in sorted(lexicon_matches):
        for word, _ in sorted(lexicon_matches[ad_id]):
            edges["R3"].append((ad_index[ad_id], word_index[word]))
    for word in lex_words:
        edges["R4"].append((word_index[word], ISSUE_INDEX[word_issue[word]]))

    return AdGraph(
        ad_ids=ad_ids,
        ad_tokens=ad_tokens,
        entity_names=entity_names,
        lex_words=lex_words,
        edges=edges,
    )
