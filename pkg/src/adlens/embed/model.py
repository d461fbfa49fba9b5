"""Training configuration and the serialized embedding model.

Model file layout (versioned, little-endian):
  bytes 0..7    magic "ADLENSM1"
  bytes 8..11   uint32 version
  bytes 12..19  uint64 manifest length in bytes
  manifest      UTF-8 JSON: dims, node name lists, per-array offsets, and a
                per-node offset map ("<kind>/<index>" -> byte offset)
  arrays        float32 arrays back to back, in manifest order
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from adlens.errors import DataError
from adlens.embed.encoders import (
    ENCODER_KINDS,
    MEAN_POOL,
    RECURRENT,
    BiLstmEncoder,
    MeanPoolEncoder,
)
from adlens.embed.wordvec import WordVectors
from adlens.graph import NodeId, RELATIONS
from adlens.labels import ISSUES, STANCES
from adlens.textproc import TokenSeq

_MAGIC = b"ADLENSM1"
_VERSION = 1

DEFAULT_NEGATIVES = {"R1": 2, "R2": 2, "R3": 5, "R4": 5}


@dataclass
class TrainConfig:
    dim: int = 300
    encoder_hidden: int = 150
    negatives: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_NEGATIVES))
    lambdas: dict[str, float] = field(default_factory=lambda: {r: 1.0 for r in RELATIONS})
    lr: float = 0.001
    max_epochs: int = 100
    patience: int = 10
    seed: int = 0
    encoder_kind: str = MEAN_POOL
    val_fraction: float = 0.1

    def __post_init__(self):
        if self.encoder_kind not in ENCODER_KINDS:
            raise ValueError(f"unknown encoder kind {self.encoder_kind!r}")
        if self.encoder_kind == RECURRENT and self.dim != 2 * self.encoder_hidden:
            raise ValueError(
                f"recurrent encoder needs dim == 2*encoder_hidden "
                f"({self.dim} != 2*{self.encoder_hidden})"
            )
        if self.dim < 1 or self.encoder_hidden < 1:
            raise ValueError("dim and encoder_hidden must be positive")
        for rel in RELATIONS:
            if self.negatives.get(rel, 0) < 1:
                raise ValueError(f"negative count for {rel} must be >= 1")
        if self.max_epochs < 0 or self.patience < 1:
            raise ValueError("max_epochs must be >= 0 and patience >= 1")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in (0, 1)")

    def with_overrides(self, **kwargs) -> "TrainConfig":
        return replace(self, **kwargs)


NODE_KIND_ORDER = ("entity", "stance", "issue", "lexword")


class EmbeddingModel:
    """Free node embeddings + encoder + frozen word vectors, one space."""

    def __init__(
        self,
        config: TrainConfig,
        node_tables: dict[str, np.ndarray],
        encoder,
        word_vectors: WordVectors,
        entity_names: list[str],
        lex_words: list[str],
        history: dict | None = None,
    ):
        self.config = config
        self.node_tables = node_tables
        self.encoder = encoder
        self.word_vectors = word_vectors
        self.entity_names = list(entity_names)
        self.lex_words = list(lex_words)
        self.history = history or {}
        expected = {
            "entity": len(entity_names),
            "stance": len(STANCES),
            "issue": len(ISSUES),
            "lexword": len(lex_words),
        }
        for kind, n in expected.items():
            table = node_tables[kind]
            if table.shape != (n, config.dim):
                raise ValueError(f"{kind} table has shape {table.shape}, want ({n}, {config.dim})")
            if not np.all(np.isfinite(table)):
                raise ValueError(f"{kind} table contains non-finite values")

    @property
    def dim(self) -> int:
        return self.config.dim

    def node_vector(self, node: NodeId) -> np.ndarray:
        if node.kind == "ad":
            raise ValueError("ad nodes are encoded, not stored; use encode_tokens")
        return self.node_tables[node.kind][node.index]

    def encode_tokens(self, tokens: TokenSeq) -> np.ndarray:
        return self.encoder.encode_tokens(tokens)

    def trainable_params(self) -> dict[str, np.ndarray]:
        """Flat name -> array view of everything the optimizer updates."""
        params = {f"node/{kind}": self.node_tables[kind] for kind in NODE_KIND_ORDER}
        for name in sorted(self.encoder.params):
            params[f"enc/{name}"] = self.encoder.params[name]
        return params

    def save(self, path: str | Path) -> None:
        arrays: list[tuple[str, np.ndarray]] = []
        for kind in NODE_KIND_ORDER:
            arrays.append((f"node/{kind}", self.node_tables[kind]))
        for name in sorted(self.encoder.params):
            arrays.append((f"enc/{name}", self.encoder.params[name]))
        arrays.append(("wordvec/matrix", self.word_vectors.matrix))

        manifest_arrays = []
        node_offsets: dict[str, int] = {}
        offset = 0
        for name, arr in arrays:
            manifest_arrays.append({"name": name, "shape": list(arr.shape), "offset": offset})
            if name.startswith("node/"):
                kind = name.split("/", 1)[1]
                row_bytes = arr.shape[1] * 4
                for i in range(arr.shape[0]):
                    node_offsets[f"{kind}/{i}"] = offset + i * row_bytes
            offset += int(arr.size) * 4

        manifest = {
            "dim": self.config.dim,
            "encoder_kind": self.config.encoder_kind,
            "encoder_hidden": self.config.encoder_hidden,
            "populations": {kind: self.node_tables[kind].shape[0] for kind in NODE_KIND_ORDER},
            "entity_names": self.entity_names,
            "lex_words": self.lex_words,
            "stances": list(STANCES),
            "issues": list(ISSUES),
            "wordvec_vocab": self.word_vectors.vocab,
            "arrays": manifest_arrays,
            "nodes": node_offsets,
            "history": self.history,
        }
        blob = json.dumps(manifest, sort_keys=True).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<I", _VERSION))
            fh.write(struct.pack("<Q", len(blob)))
            fh.write(blob)
            for _, arr in arrays:
                fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingModel":
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise DataError(f"cannot read model from {path}: {exc}") from exc
        if raw[: len(_MAGIC)] != _MAGIC:
            raise DataError(f"{path}: not an adlens model file")
        pos = len(_MAGIC)
        (version,) = struct.unpack_from("<I", raw, pos)
        pos += 4
        if version != _VERSION:
            raise DataError(f"{path}: unsupported model version {version}")
        (manifest_len,) = struct.unpack_from("<Q", raw, pos)
        pos += 8
        try:
            manifest = json.loads(raw[pos : pos + manifest_len].decode("utf-8"))
        except ValueError as exc:
            raise DataError(f"{path}: bad manifest: {exc}") from exc
        data_start = pos + manifest_len

        def read_array(entry: dict) -> np.ndarray:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            start = data_start + entry["offset"]
            arr = np.frombuffer(raw, dtype="<f4", count=count, offset=start)
            return arr.reshape(shape).astype(np.float64)

        by_name = {entry["name"]: read_array(entry) for entry in manifest["arrays"]}
        word_vectors = WordVectors(manifest["wordvec_vocab"], by_name["wordvec/matrix"])
        config = TrainConfig(
            dim=int(manifest["dim"]),
            encoder_hidden=int(manifest["encoder_hidden"]),
            encoder_kind=manifest["encoder_kind"],
        )
        enc_params = {
            name.split("/", 1)[1]: by_name[name]
            for name in by_name
            if name.startswith("enc/")
        }
        if config.encoder_kind == MEAN_POOL:
            encoder = MeanPoolEncoder(enc_params, word_vectors)
        else:
            encoder = BiLstmEncoder(enc_params, word_vectors)
        node_tables = {kind: by_name[f"node/{kind}"] for kind in NODE_KIND_ORDER}
        return cls(
            config=config,
            node_tables=node_tables,
            encoder=encoder,
            word_vectors=word_vectors,
            entity_names=manifest["entity_names"],
            lex_words=manifest["lex_words"],
            history=manifest.get("history", {}),
        )
