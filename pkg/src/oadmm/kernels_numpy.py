"""Vectorized pure-numpy iteration kernels (fallback backend).

Same in-place contract as kernels_numba: each *_step advances theta,
dual, own_state and neighbor_copy by one iteration and fills the
caller-allocated diagnostic arrays. neighbor_copy is slot-aligned with
the graph CSR: slot j holds its owner's stored value of node indices[j].
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def _segment_sum(values: np.ndarray, indptr: np.ndarray) -> np.ndarray:
    """Row sums of CSR segments; empty segments (isolated nodes) give 0."""
    m_count = indptr.shape[0] - 1
    out = np.zeros((m_count, values.shape[1]))
    starts = indptr[:-1]
    nonempty = starts < indptr[1:]
    if nonempty.any():
        out[nonempty] = np.add.reduceat(values, starts[nonempty], axis=0)
    return out


def _solve_all(inv_mats: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    return np.einsum("mrc,mc->mr", inv_mats, rhs)


def classical_step(theta, dual, own_state, neighbor_copy, indptr, indices, rev_slot,
                   inv_mats, xty, alpha, b_out):
    """One synchronous iteration: all nodes solve from last iteration's
    primals, all broadcast, then dual ascent on the fresh primals."""
    degrees = (indptr[1:] - indptr[:-1]).astype(np.float64)[:, None]
    theta_prev = theta.copy()
    nbr = _segment_sum(theta_prev[indices], indptr)
    b_out[:] = dual - alpha * (degrees * theta_prev + nbr)
    theta[:] = _solve_all(inv_mats, xty - b_out)
    nbr_new = _segment_sum(theta[indices], indptr)
    dual += alpha * (degrees * theta - nbr_new)
    own_state[:] = theta
    neighbor_copy[:] = theta[indices]


def censoring_step(theta, dual, own_state, neighbor_copy, indptr, indices, rev_slot,
                   inv_mats, xty, alpha, threshold,
                   diffs_out, transmit_out, b_init_out):
    """One censoring iteration: simultaneous state-variable solves, a norm
    gate on who broadcasts, then dual ascent on the state variables."""
    degrees = (indptr[1:] - indptr[:-1]).astype(np.float64)[:, None]
    nbr = _segment_sum(neighbor_copy, indptr)
    b_init_out[:] = dual - alpha * (degrees * own_state + nbr)
    theta[:] = _solve_all(inv_mats, xty - b_init_out)
    delta = theta - own_state
    diffs_out[:] = np.sqrt(np.einsum("mc,mc->m", delta, delta))
    transmit_out[:] = diffs_out >= threshold
    senders = np.flatnonzero(transmit_out)
    own_state[senders] = theta[senders]
    fresh = transmit_out[indices]
    neighbor_copy[fresh] = theta[indices[fresh]]
    nbr_new = _segment_sum(neighbor_copy, indptr)
    dual += alpha * (degrees * own_state - nbr_new)


def ordered_step(theta, dual, own_state, neighbor_copy, indptr, indices, rev_slot,
                 inv_mats, xty, alpha, threshold, force_all,
                 theta_tilde_out, diffs_out, transmit_out, order_out,
                 b_init_out, b_final_out):
    """One ordered iteration: initial solves, informativeness ordering,
    sequential broadcast walk with mid-iteration re-solves, dual ascent."""
    degrees_i = indptr[1:] - indptr[:-1]
    degrees = degrees_i.astype(np.float64)[:, None]
    nbr = _segment_sum(neighbor_copy, indptr)
    b_init_out[:] = dual - alpha * (degrees * own_state + nbr)
    theta_tilde_out[:] = _solve_all(inv_mats, xty - b_init_out)
    delta = theta_tilde_out - own_state
    diffs_out[:] = np.sqrt(np.einsum("mc,mc->m", delta, delta))
    if force_all:
        transmit_out[:] = True
    else:
        transmit_out[:] = diffs_out >= threshold
    # largest change first; mergesort keeps node-id order on ties
    order = np.argsort(-diffs_out, kind="mergesort")
    order_out[:] = order
    theta[:] = theta_tilde_out
    b_final_out[:] = b_init_out
    for m in order:
        if not transmit_out[m]:
            continue
        lo, hi = indptr[m], indptr[m + 1]
        s = degrees_i[m] * theta_tilde_out[m] + neighbor_copy[lo:hi].sum(axis=0)
        b = dual[m] - alpha * s
        b_final_out[m] = b
        fresh = inv_mats[m] @ (xty[m] - b)
        theta[m] = fresh
        own_state[m] = fresh
        neighbor_copy[rev_slot[lo:hi]] = fresh
    nbr_new = _segment_sum(neighbor_copy, indptr)
    dual += alpha * (degrees * own_state - nbr_new)
