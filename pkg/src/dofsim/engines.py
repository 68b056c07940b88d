"""Vectorized per-trial DoF engines.

Each engine consumes link presence for a batch of realizations and returns
the delivered-message count of every trial. Arrays are laid out as
``(K, trials)`` so that a scan over users touches contiguous rows. ``D[u]``
and ``C[u]`` hold the links ``(u+1, u+1)`` and ``(u+1, u)`` (0-based user
``u``), with any deactivation already applied.

The engines reproduce the reference implementations in :mod:`partition`,
:mod:`scheduler` and :mod:`oracles` exactly; the test suite checks this
trial by trial.
"""
from __future__ import annotations

import numpy as np

from .oracles import _identity_segment


def _prev(X):
    out = np.zeros_like(X)
    out[1:] = X[:-1]
    return out


def _next(X):
    out = np.zeros_like(X)
    out[:-1] = X[1:]
    return out


def zf_batch(D: np.ndarray, C: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Greedy zero-forcing DoF for every trial.

    Parameters
    ----------
    D, C : ndarray of bool, shape (K, trials)
    masks : ndarray of bool, shape (K, 4)
        Membership of transmitters ``u-2, u-1, u, u+1`` in each transmit set.

    Returns
    -------
    ndarray of int64, shape (trials,)
    """
    K, n = D.shape
    m = masks[:, :, None]
    enabled = (m[:, 1] & C) | (m[:, 2] & D)

    # topology reduction, one column of the window at a time
    k0 = m[:, 2] & D
    km1 = m[:, 1] & C
    kp1 = m[:, 3] & k0 & _next(C) & _next(D) & _next(enabled)
    km2 = m[:, 0] & km1 & _prev(C) & _prev(D) & _prev(enabled)

    carries = k0 | _next(km1) | _prev(kp1)
    carries[:-2] |= km2[2:]
    bridge = D & _next(C) & carries
    join = _prev(bridge) & enabled & _prev(enabled)
    prev_fwd = _prev(kp1) & join

    z = np.zeros(n, dtype=bool)
    p_m1, p_0, p_p1 = z, z, z
    q_m1, q_0, q_p1 = z, z, z
    total = np.zeros(n, dtype=np.int64)
    for u in range(K):
        j = join[u]
        p_m1, p_0, p_p1 = p_m1 & j, p_0 & j, p_p1 & j
        q_m1, q_0, q_p1 = q_m1 & j, q_0 & j, q_p1 & j
        fwd = prev_fwd[u]
        q_free = ~q_0 & ~q_m1

        # deliver through the previous transmitter
        first = km1[u] & ~p_0
        alone = first & ~p_m1
        helped = first & p_m1 & km2[u] & q_free
        swap = ~first & km2[u] & fwd & q_free
        c_m1 = alone | helped | swap
        p_p1 = p_p1 | swap
        p_0 = p_0 | swap

        # deliver through the own transmitter
        second = k0[u] & ~c_m1 & ~q_p1
        direct = second & ~p_0
        assisted = second & p_0 & fwd
        c_0 = direct | assisted
        p_p1 = p_p1 | assisted

        total += c_m1 | c_0
        q_m1, q_0, q_p1 = p_m1, p_0, p_p1
        p_m1, p_0, p_p1 = c_m1, c_0, z
    return total


def tdma_batch(D: np.ndarray, C: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Optimal single-transmitter DoF for every trial.

    Parameters
    ----------
    offsets : ndarray of int, shape (K,)
        Transmitter of message ``u`` minus ``u``; values other than ``-1``
        and ``0`` can never serve their receiver.
    """
    K, n = D.shape
    own = (offsets == 0)[:, None]
    back = (offsets == -1)[:, None]
    usable = (own & D) | (back & C)
    clash = (_prev(own) & C) | (back & _prev(D))

    on = np.full(n, -1, dtype=np.int64)
    off = np.zeros(n, dtype=np.int64)
    for u in range(K):
        stay = np.where(~clash[u] & (on >= 0), on + 1, -1)
        new_on = np.where(usable[u], np.maximum(off + 1, stay), -1)
        off = np.maximum(on, off)
        on = new_on
    return np.maximum(on, off)


def lemma_batch(D: np.ndarray, C: np.ndarray, which: int) -> np.ndarray:
    """DoF of the explicit cell-association schemes for every trial."""
    K, n = D.shape
    pad = lambda X: np.concatenate([np.zeros((1, n), bool), X, np.zeros((2, n), bool)])
    Dp, Cp = pad(D), pad(C)
    size = {1: 1, 2: 3, 3: 4}[which]
    full = size * (K // size) if size > 1 else 0
    total = np.zeros(n, dtype=np.int64)
    for k in range(0, full, size):
        if which == 2:
            x, y, z = k + 1, k + 2, k + 3
            total += Dp[x].astype(np.int64) + Cp[z]
            total += Cp[y] & ~Dp[x] & (~Dp[y] | ~Cp[z])
        else:
            w, x, y, z = k + 1, k + 2, k + 3, k + 4
            swap = (~Dp[w] | ~Cp[x]) & Dp[x] & Cp[y] & Dp[y] & Cp[z]
            plain = (
                Cp[y].astype(np.int64)
                + (Dp[x] & ~Cp[y] & (~Cp[x] | ~Dp[w]))
                + (Cp[z] & (~Dp[y] | ~Cp[y]))
            )
            total += Dp[w] + np.where(swap, 2, plain)
    if full < K:
        for t in range(n):
            total[t] += _identity_segment(Dp[:, t], Cp[:, t], full + 1, K)
    return total
