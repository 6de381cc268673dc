"""Numba-jitted iteration kernels (default backend).

Scalar loops over the graph CSR, compiled with cache=True so repeat
processes skip compilation. Semantics match kernels_numpy exactly; see
that module for the in-place contract.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"


@njit(cache=True)
def _solve_node(inv_mats, xty, b_row, m, out_row):
    q = out_row.shape[0]
    for r in range(q):
        acc = 0.0
        for c in range(q):
            acc += inv_mats[m, r, c] * (xty[m, c] - b_row[c])
        out_row[r] = acc


@njit(cache=True)
def classical_step(theta, dual, own_state, neighbor_copy, indptr, indices, rev_slot,
                   inv_mats, xty, alpha, b_out):
    m_count, q = theta.shape
    theta_prev = theta.copy()
    for m in range(m_count):
        d = indptr[m + 1] - indptr[m]
        for c in range(q):
            s = d * theta_prev[m, c]
            for j in range(indptr[m], indptr[m + 1]):
                s += theta_prev[indices[j], c]
            b_out[m, c] = dual[m, c] - alpha * s
        _solve_node(inv_mats, xty, b_out[m], m, theta[m])
    for m in range(m_count):
        d = indptr[m + 1] - indptr[m]
        for c in range(q):
            s = d * theta[m, c]
            for j in range(indptr[m], indptr[m + 1]):
                s -= theta[indices[j], c]
            dual[m, c] += alpha * s
    for m in range(m_count):
        for c in range(q):
            own_state[m, c] = theta[m, c]
    for j in range(indices.shape[0]):
        src = indices[j]
        for c in range(q):
            neighbor_copy[j, c] = theta[src, c]


@njit(cache=True)
def censoring_step(theta, dual, own_state, neighbor_copy, indptr, indices, rev_slot,
                   inv_mats, xty, alpha, threshold,
                   diffs_out, transmit_out, b_init_out):
    m_count, q = theta.shape
    for m in range(m_count):
        d = indptr[m + 1] - indptr[m]
        for c in range(q):
            s = d * own_state[m, c]
            for j in range(indptr[m], indptr[m + 1]):
                s += neighbor_copy[j, c]
            b_init_out[m, c] = dual[m, c] - alpha * s
        _solve_node(inv_mats, xty, b_init_out[m], m, theta[m])
        acc = 0.0
        for c in range(q):
            dlt = theta[m, c] - own_state[m, c]
            acc += dlt * dlt
        diffs_out[m] = np.sqrt(acc)
        transmit_out[m] = diffs_out[m] >= threshold
    for m in range(m_count):
        if not transmit_out[m]:
            continue
        for c in range(q):
            own_state[m, c] = theta[m, c]
        for j in range(indptr[m], indptr[m + 1]):
            jr = rev_slot[j]
            for c in range(q):
                neighbor_copy[jr, c] = theta[m, c]
    for m in range(m_count):
        d = indptr[m + 1] - indptr[m]
        for c in range(q):
            s = d * own_state[m, c]
            for j in range(indptr[m], indptr[m + 1]):
                s -= neighbor_copy[j, c]
            dual[m, c] += alpha * s


@njit(cache=True)
def ordered_step(theta, dual, own_state, neighbor_copy, indptr, indices, rev_slot,
                 inv_mats, xty, alpha, threshold, force_all,
                 theta_tilde_out, diffs_out, transmit_out, order_out,
                 b_init_out, b_final_out):
    m_count, q = theta.shape
    for m in range(m_count):
        d = indptr[m + 1] - indptr[m]
        for c in range(q):
            s = d * own_state[m, c]
            for j in range(indptr[m], indptr[m + 1]):
                s += neighbor_copy[j, c]
            b_init_out[m, c] = dual[m, c] - alpha * s
        _solve_node(inv_mats, xty, b_init_out[m], m, theta_tilde_out[m])
        acc = 0.0
        for c in range(q):
            dlt = theta_tilde_out[m, c] - own_state[m, c]
            acc += dlt * dlt
        diffs_out[m] = np.sqrt(acc)
        if force_all:
            transmit_out[m] = True
        else:
            transmit_out[m] = diffs_out[m] >= threshold
    # largest change first; mergesort keeps node-id order on ties
    order = np.argsort(-diffs_out, kind="mergesort")
    for i in range(m_count):
        order_out[i] = order[i]
    for i in range(m_count):
        m = order[i]
        if not transmit_out[m]:
            for c in range(q):
                theta[m, c] = theta_tilde_out[m, c]
                b_final_out[m, c] = b_init_out[m, c]
            continue
        d = indptr[m + 1] - indptr[m]
        for c in range(q):
            s = d * theta_tilde_out[m, c]
            for j in range(indptr[m], indptr[m + 1]):
                s += neighbor_copy[j, c]
            b_final_out[m, c] = dual[m, c] - alpha * s
        _solve_node(inv_mats, xty, b_final_out[m], m, theta[m])
        for c in range(q):
            own_state[m, c] = theta[m, c]
        for j in range(indptr[m], indptr[m + 1]):
            jr = rev_slot[j]
            for c in range(q):
                neighbor_copy[jr, c] = theta[m, c]
    for m in range(m_count):
        d = indptr[m + 1] - indptr[m]
        for c in range(q):
            s = d * own_state[m, c]
            for j in range(indptr[m], indptr[m + 1]):
                s -= neighbor_copy[j, c]
            dual[m, c] += alpha * s
