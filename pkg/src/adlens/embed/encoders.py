"""Ad sequence encoders with hand-written backward passes.

Two kinds:
  mean-pool               e = W . mean_t(x_t)           (fast default)
  recurrent-bidirectional e = mean_t [h_fwd_t ; h_bwd_t] over an LSTM pair

Input word vectors are frozen; only encoder parameters receive gradients.
Empty token sequences encode to the zero vector and produce no gradient.
"""

from __future__ import annotations

import numpy as np

from adlens.embed.wordvec import WordVectors
from adlens.textproc import TokenSeq

MEAN_POOL = "mean-pool"
RECURRENT = "recurrent-bidirectional"
ENCODER_KINDS = (MEAN_POOL, RECURRENT)


def _uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class MeanPoolEncoder:
    """Trainable linear map of the mean input vector."""

    kind = MEAN_POOL

    def __init__(self, params: dict[str, np.ndarray], word_vectors: WordVectors):
        self.params = params  # {"W": (dim, wdim)}
        self.word_vectors = word_vectors
        self._xbar: np.ndarray | None = None

    @classmethod
    def create(cls, dim: int, word_vectors: WordVectors, rng: np.random.Generator):
        wdim = word_vectors.dim
        return cls({"W": _uniform(rng, (dim, wdim), wdim)}, word_vectors)

    @property
    def dim(self) -> int:
        return self.params["W"].shape[0]

    def prepare(self, token_seqs: list[TokenSeq]) -> None:
        # Mean input vectors never change during training: compute once.
        self._xbar = np.stack([self.word_vectors.mean_vector(t) for t in token_seqs])

    def forward(self) -> np.ndarray:
        if self._xbar is None:
            raise RuntimeError("call prepare() before forward()")
        return self._xbar @ self.params["W"].T

    def backward(self, d_embeddings: np.ndarray) -> dict[str, np.ndarray]:
        assert self._xbar is not None
        return {"W": d_embeddings.T @ self._xbar}

    def encode_tokens(self, tokens: TokenSeq) -> np.ndarray:
        if not tokens:
            return np.zeros(self.dim)
        return self.params["W"] @ self.word_vectors.mean_vector(tokens)


def _lstm_forward(x: np.ndarray, W: np.ndarray, U: np.ndarray, b: np.ndarray):
    """One-direction LSTM over x (T, wdim); returns hidden states and cache."""
    T = x.shape[0]
    H = U.shape[1]
    pre = x @ W.T + b  # (T, 4H), input contribution
    hs = np.zeros((T, H))
    cache = {
        "i": np.zeros((T, H)),
        "f": np.zeros((T, H)),
        "g": np.zeros((T, H)),
        "o": np.zeros((T, H)),
        "c": np.zeros((T, H)),
    }
    h = np.zeros(H)
    c = np.zeros(H)
    for t in range(T):
        z = pre[t] + U @ h
        i = _sigmoid(z[:H])
        f = _sigmoid(z[H : 2 * H])
        g = np.tanh(z[2 * H : 3 * H])
        o = _sigmoid(z[3 * H :])
        c = f * c + i * g
        h = o * np.tanh(c)
        hs[t] = h
        cache["i"][t], cache["f"][t], cache["g"][t] = i, f, g
        cache["o"][t], cache["c"][t] = o, c
    return hs, cache


def _lstm_backward(
    dhs: np.ndarray,
    hs: np.ndarray,
    cache: dict[str, np.ndarray],
    x: np.ndarray,
    U: np.ndarray,
    dW: np.ndarray,
    dU: np.ndarray,
    db: np.ndarray,
) -> None:
    """Backprop through time; accumulates into dW/dU/db (input grads unused)."""
    T, H = dhs.shape
    dh_next = np.zeros(H)
    dc_next = np.zeros(H)
    for t in range(T - 1, -1, -1):
        i, f, g, o, c = (cache[k][t] for k in ("i", "f", "g", "o", "c"))
        c_prev = cache["c"][t - 1] if t > 0 else np.zeros(H)
        h_prev = hs[t - 1] if t > 0 else np.zeros(H)
        tc = np.tanh(c)
        dh = dhs[t] + dh_next
        dc = dc_next + dh * o * (1.0 - tc * tc)
        dz = np.concatenate(
            [
                dc * g * i * (1.0 - i),
                dc * c_prev * f * (1.0 - f),
                dc * i * (1.0 - g * g),
                dh * tc * o * (1.0 - o),
            ]
        )
        dW += np.outer(dz, x[t])
        dU += np.outer(dz, h_prev)
        db += dz
        dh_next = U.T @ dz
        dc_next = dc * f


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class BiLstmEncoder:
    """Single-layer bidirectional LSTM; per-timestep concat, mean over time."""

    kind = RECURRENT
    _PARAM_ORDER = ("Wf", "Uf", "bf", "Wb", "Ub", "bb")

    def __init__(self, params: dict[str, np.ndarray], word_vectors: WordVectors):
        self.params = params
        self.word_vectors = word_vectors
        self.hidden = params["Uf"].shape[1]
        self._inputs: list[np.ndarray] | None = None
        self._cache: list | None = None

    @classmethod
    def create(cls, hidden: int, word_vectors: WordVectors, rng: np.random.Generator):
        wdim = word_vectors.dim
        params = {}
        for prefix in ("f", "b"):
            params["W" + prefix] = _uniform(rng, (4 * hidden, wdim), wdim)
            params["U" + prefix] = _uniform(rng, (4 * hidden, hidden), hidden)
            params["b" + prefix] = np.zeros(4 * hidden)
        return cls(params, word_vectors)

    @property
    def dim(self) -> int:
        return 2 * self.hidden

    def prepare(self, token_seqs: list[TokenSeq]) -> None:
        self._inputs = [self.word_vectors.rows(t) for t in token_seqs]

    def forward(self) -> np.ndarray:
        if self._inputs is None:
            raise RuntimeError("call prepare() before forward()")
        out = np.zeros((len(self._inputs), self.dim))
        self._cache = []
        for idx, x in enumerate(self._inputs):
            if x.shape[0] == 0:
                self._cache.append(None)
                continue
            hs_f, cache_f = _lstm_forward(x, self.params["Wf"], self.params["Uf"], self.params["bf"])
            hs_b_rev, cache_b = _lstm_forward(
                x[::-1], self.params["Wb"], self.params["Ub"], self.params["bb"]
            )
            self._cache.append((hs_f, cache_f, hs_b_rev, cache_b))
            out[idx, : self.hidden] = hs_f.mean(axis=0)
            out[idx, self.hidden :] = hs_b_rev[::-1].mean(axis=0)
        return out

    def backward(self, d_embeddings: np.ndarray) -> dict[str, np.ndarray]:
        if self._cache is None or self._inputs is None:
            raise RuntimeError("forward() must run before backward()")
        grads = {name: np.zeros_like(self.params[name]) for name in self._PARAM_ORDER}
        H = self.hidden
        for idx, entry in enumerate(self._cache):
            if entry is None:
                continue
            x = self._inputs[idx]
            T = x.shape[0]
            hs_f, cache_f, hs_b_rev, cache_b = entry
            d_ad = d_embeddings[idx]
            if not d_ad.any():
                continue
            dhs_f = np.tile(d_ad[:H] / T, (T, 1))
            # Backward-direction states were produced on the reversed input;
            # the time-mean makes the per-position gradient uniform anyway.
            dhs_b = np.tile(d_ad[H:] / T, (T, 1))
            _lstm_backward(
                dhs_f, hs_f, cache_f, x, self.params["Uf"],
                grads["Wf"], grads["Uf"], grads["bf"],
            )
            _lstm_backward(
                dhs_b, hs_b_rev, cache_b, x[::-1], self.params["Ub"],
                grads["Wb"], grads["Ub"], grads["bb"],
            )
        return grads

    def encode_tokens(self, tokens: TokenSeq) -> np.ndarray:
        if not tokens:
            return np.zeros(self.dim)
        x = self.word_vectors.rows(tokens)
        hs_f, _ = _lstm_forward(x, self.params["Wf"], self.params["Uf"], self.params["bf"])
        hs_b_rev, _ = _lstm_forward(x[::-1], self.params["Wb"], self.params["Ub"], self.params["bb"])
        return np.concatenate([hs_f.mean(axis=0), hs_b_rev[::-1].mean(axis=0)])


def create_encoder(
    kind: str, dim: int, hidden: int, word_vectors: WordVectors, rng: np.random.Generator
):
    if kind == MEAN_POOL:
        return MeanPoolEncoder.create(dim, word_vectors, rng)
    if kind == RECURRENT:
        if dim != 2 * hidden:
            raise ValueError(f"recurrent encoder needs dim == 2*hidden, got {dim} vs {hidden}")
        return BiLstmEncoder.create(hidden, word_vectors, rng)
    raise ValueError(f"unknown encoder kind {kind!r}")
