"""Pure-numpy pair-loss kernel, the fallback for the compiled extension.

Semantics are identical to _pairgrad.pyx: per (edge, negative) term
  z    = o . (mp - mn)
  loss = -log sigmoid(z)            (stable softplus form)
  dz   = -sigmoid(-z)
with weighted gradients accumulated into d_anchor/d_target in place.
"""

from __future__ import annotations

import numpy as np


def accumulate_pair_grads(
    anchor: np.ndarray,
    target: np.ndarray,
    anchor_idx: np.ndarray,
    pos_idx: np.ndarray,
    neg_idx: np.ndarray,
    weight: float,
    d_anchor: np.ndarray,
    d_target: np.ndarray,
) -> tuple[float, int]:
    """Accumulate loss and gradients for a batch of (anchor, pos, negs) rows.

    neg_idx is (M, K) with -1 marking unused slots. Returns the
    weight-scaled loss sum and the number of (edge, negative) terms.
    """
    if anchor_idx.size == 0:
        return 0.0, 0
    flat_m, flat_k = np.nonzero(neg_idx >= 0)
    if flat_m.size == 0:
        return 0.0, 0
    n_rows = neg_idx[flat_m, flat_k]
    a_rows = anchor_idx[flat_m]
    p_rows = pos_idx[flat_m]
    o = anchor[a_rows]
    diff = target[p_rows] - target[n_rows]
    z = np.einsum("td,td->t", o, diff)

    e = np.exp(-np.abs(z))
    log1p_e = np.log1p(e)
    loss = np.where(z >= 0.0, log1p_e, -z + log1p_e)
    sig_neg = np.where(z >= 0.0, e / (1.0 + e), 1.0 / (1.0 + e))  # sigmoid(-z)
    coef = -weight * sig_neg

    np.add.at(d_anchor, a_rows, coef[:, None] * diff)
    np.add.at(d_target, p_rows, coef[:, None] * o)
    np.add.at(d_target, n_rows, -coef[:, None] * o)
    return weight * float(loss.sum()), int(z.size)
