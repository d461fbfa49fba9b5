# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pair-loss kernel: the hot inner loop of embedding training.

Must stay semantically identical to pairgrad_py.accumulate_pair_grads;
tests/test_kernels.py checks the two backends against each other.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log1p

cnp.import_array()


def accumulate_pair_grads(
    double[:, ::1] anchor,
    double[:, ::1] target,
    cnp.int64_t[::1] anchor_idx,
    cnp.int64_t[::1] pos_idx,
    cnp.int64_t[:, ::1] neg_idx,
    double weight,
    double[:, ::1] d_anchor,
    double[:, ::1] d_target,
):
    """Accumulate loss and gradients for a batch of (anchor, pos, negs) rows.

    neg_idx is (M, K) with -1 marking unused slots. Returns the
    weight-scaled loss sum and the number of (edge, negative) terms.
    """
    cdef Py_ssize_t m_count = neg_idx.shape[0]
    cdef Py_ssize_t k_count = neg_idx.shape[1]
    cdef Py_ssize_t dim = anchor.shape[1]
    cdef Py_ssize_t m, k, d
    cdef cnp.int64_t a, p, n
    cdef double z, e, loss_sum, sig_neg, coef, od, diff
    cdef long n_terms = 0

    if anchor_idx.shape[0] == 0:
        return 0.0, 0

    loss_sum = 0.0
    for m in range(m_count):
        a = anchor_idx[m]
        p = pos_idx[m]
        for k in range(k_count):
            n = neg_idx[m, k]
            if n < 0:
                continue
            z = 0.0
            for d in range(dim):
                z += anchor[a, d] * (target[p, d] - target[n, d])
            if z >= 0.0:
                e = exp(-z)
                loss_sum += weight * log1p(e)
                sig_neg = e / (1.0 + e)
            else:
                e = exp(z)
                loss_sum += weight * (-z + log1p(e))
                sig_neg = 1.0 / (1.0 + e)
            coef = -weight * sig_neg
            for d in range(dim):
                od = anchor[a, d]
                diff = target[p, d] - target[n, d]
                d_anchor[a, d] += coef * diff
                d_target[p, d] += coef * od
                d_target[n, d] -= coef * od
            n_terms += 1
    return loss_sum, n_terms
