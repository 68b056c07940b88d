"""Independent ground truth: exhaustive zero-forcing search, optimal TDMA,
explicit cell-association schemes and converse certificates.

Zero-forcing feasibility decomposes over messages. Fix the set ``D`` of
served users. Message ``j`` has its own beam ``v_j`` supported on ``T_j``,
and the conditions on ``v_j`` (zero at every other served receiver, nonzero
at receiver ``j``) involve no other beam. So ``D`` is feasible iff each
``j`` in ``D`` is feasible alone, i.e. iff the row of receiver ``j``
restricted to ``T_j`` is not in the span of the rows of the other served
receivers. Ranks are computed exactly over the integers.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .assignment import (
    MessageAssignment,
    StrategyError,
    UnsupportedCooperationError,
    expand_ternary,
)
from .network import ChannelCoefficients, NetworkRealization, connected
from .partition import AtomicSubnetwork

MAX_BRUTE_FORCE_USERS = 12
MAX_TDMA_BRUTE_FORCE_USERS = 16

#: Ternary strings of the three cell-association schemes, keyed by scheme number.
LEMMA_STRINGS = {1: (1,), 2: (2, 1, 0), 3: (1, 2, 1, 0)}


def exact_rank(rows) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    m = [list(map(int, r)) for r in rows if any(r)]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        pivot = next((k for k in range(rank, len(m)) if m[k][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank]
        for k in range(rank + 1, len(m)):
            f = m[k][col]
            if f:
                m[k] = [p[col] * x - f * y for x, y in zip(m[k], p)]
        rank += 1
    return rank


def _max_zf(n: int, sets, gain) -> int:
    """Largest zero-forcing-feasible set of users ``1..n``.

    ``gain(rx, tx)`` returns the integer gain of a link (0 when absent).
    """
    masks = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(1 << n, dtype=bool)
    for j in range(1, n + 1):
        T = sets[j - 1]
        own = [gain(j, t) for t in T]
        hearers = sorted(
            {r for t in T for r in (t, t + 1) if r != j and 1 <= r <= n and gain(r, t)}
        )
        table = np.zeros(1 << len(hearers), dtype=bool)
        for code in range(1 << len(hearers)):
            others = [[gain(r, t) for t in T] for k, r in enumerate(hearers) if code >> k & 1]
            table[code] = exact_rank(others + [own]) > exact_rank(others)
        idx = np.zeros_like(masks)
        for k, r in enumerate(hearers):
            idx |= ((masks >> (r - 1)) & 1) << k
        served = ((masks >> (j - 1)) & 1).astype(bool)
        ok &= ~served | table[idx]
    return int(np.bitwise_count(masks[ok]).max())


def brute_force_zf(sub: AtomicSubnetwork, gains=None, seed: int = 0) -> int:
    """Optimal zero-forcing DoF of an atomic subnetwork by exhaustive search.

    Parameters
    ----------
    sub : AtomicSubnetwork
    gains : dict, ChannelCoefficients or None
        Local link gains, global coefficients, or ``None`` to draw generic
        gains from ``seed``.

    Raises
    ------
    ValueError
        If the block has more than 12 users.
    """
    if sub.N > MAX_BRUTE_FORCE_USERS:
        raise ValueError(f"brute force limited to N <= {MAX_BRUTE_FORCE_USERS}, got {sub.N}")
    if gains is None:
        gains = sub.random_gains(seed)
    elif isinstance(gains, ChannelCoefficients):
        gains = sub.local_gains(gains)
    return _max_zf(sub.N, sub.local_sets, lambda r, t: gains.get((r, t), 0))


def brute_force_zf_network(r: NetworkRealization, a: MessageAssignment, c: ChannelCoefficients) -> int:
    """Optimal zero-forcing DoF of a whole (small) network, no decomposition."""
    if a.K > MAX_BRUTE_FORCE_USERS:
        raise ValueError(f"brute force limited to K <= {MAX_BRUTE_FORCE_USERS}, got {a.K}")
    return _max_zf(a.K, a.transmit_sets, c)


# ---------------------------------------------------------------------------
# Cell association

def _single_transmitters(a: MessageAssignment) -> list:
    if any(len(s) != 1 for s in a.transmit_sets):
        raise UnsupportedCooperationError("TDMA oracle needs exactly one transmitter per message")
    return [s[0] for s in a.transmit_sets]


def tdma_optimal(r: NetworkRealization, a: MessageAssignment) -> int:
    """Maximum number of messages servable when each sits at one transmitter.

    A message can only be served from a transmitter reaching its receiver,
    i.e. ``i - 1`` or ``i``, so two served users conflict only when they are
    adjacent. The optimum is then a maximum independent set on a path,
    solved by a two-state recursion over users.
    """
    tx = _single_transmitters(a)
    best_on, best_off = -1, 0
    for i in range(1, a.K + 1):
        t = tx[i - 1]
        usable = connected(r, i, t)
        on = -1
        if usable:
            on = best_off + 1
            if i > 1 and best_on >= 0:
                s = tx[i - 2]
                clash = connected(r, i, s) or connected(r, i - 1, t)
                if not clash:
                    on = max(on, best_on + 1)
        best_on, best_off = on, max(best_on, best_off)
    return max(best_on, best_off)


def tdma_brute_force(r: NetworkRealization, a: MessageAssignment) -> int:
    """Same quantity as :func:`tdma_optimal` by enumerating all user subsets."""
    if a.K > MAX_TDMA_BRUTE_FORCE_USERS:
        raise ValueError(f"brute force limited to K <= {MAX_TDMA_BRUTE_FORCE_USERS}")
    tx = _single_transmitters(a)
    K = a.K
    masks = np.arange(1 << K, dtype=np.int64)
    ok = np.ones(1 << K, dtype=bool)
    for i in range(1, K + 1):
        served = ((masks >> (i - 1)) & 1).astype(bool)
        if not connected(r, i, tx[i - 1]):
            ok &= ~served
            continue
        others = 0
        for j in range(1, K + 1):
            if j != i and connected(r, i, tx[j - 1]):
                others |= 1 << (j - 1)
        ok &= ~served | ((masks & others) == 0)
    return int(np.bitwise_count(masks[ok]).max())


def _identity_segment(D, C, lo: int, hi: int) -> int:
    """Odd-priority rule with the parity swap, users ``lo..hi`` at their own transmitter.

    ``D[i]``/``C[i]`` are the links ``(i, i)`` and ``(i, i-1)`` (1-based,
    padded so that out-of-range indices read as absent).
    """
    served = set()
    for i in range(lo, hi + 1):
        if not D[i]:
            continue
        if i % 2 == 1:
            served.add(i)
        else:
            left_clear = i == lo or not D[i - 1] or not C[i]
            right_clear = i == hi or not C[i + 1] or not D[i + 1]
            if left_clear and right_clear:
                served.add(i)
    # blocks of consecutive usable users chained by cross links
    i = lo
    while i <= hi:
        if not D[i]:
            i += 1
            continue
        j = i
        while j + 1 <= hi and D[j + 1] and C[j + 1]:
            j += 1
        if (j - i) % 2 == 0 and i % 2 == 0 and j > i:
            served -= set(range(i + 1, j, 2))
            served |= set(range(i, j + 1, 2))
        i = j + 1
    return len(served)


def lemma2_4_scheme_dof(r: NetworkRealization, a: MessageAssignment, which: int) -> int:
    """DoF of the explicit scheme attached to one of the three periodic strategies.

    Parameters
    ----------
    which : {1, 2, 3}
        1: string (1), odd users first with a parity swap on odd-length
        blocks that start at an even user; 2: string (2,1,0); 3: string
        (1,2,1,0) with its four-user swap.
    """
    if which not in LEMMA_STRINGS:
        raise ValueError(f"which must be 1, 2 or 3, got {which!r}")
    S = LEMMA_STRINGS[which]
    if a.K < len(S) or a.transmit_sets != expand_ternary(S, a.K).transmit_sets:
        raise StrategyError(f"assignment does not follow the string {S}")
    K, n = a.K, len(S)
    D = np.zeros(K + 3, dtype=bool)
    C = np.zeros(K + 3, dtype=bool)
    D[1 : K + 1] = r.direct()
    C[1 : K + 1] = r.cross()

    full = n * (K // n) if n > 1 else 0
    total = 0
    for k in range(0, full, n):
        u = [k + m for m in range(1, n + 1)]
        if which == 2:
            x, y, z = u
            total += bool(D[x]) + bool(C[z])
            total += bool(C[y] and not D[x] and (not D[y] or not C[z]))
        else:
            w, x, y, z = u
            swap = (not D[w] or not C[x]) and D[x] and C[y] and D[y] and C[z]
            if swap:
                total += bool(D[w]) + 2
            else:
                total += bool(D[w]) + bool(C[y])
                total += bool(D[x] and not C[y] and (not C[x] or not D[w]))
                total += bool(C[z] and (not D[y] or not C[y]))
    if full < K:
        total += _identity_segment(D, C, full + 1, K)
    return total


# ---------------------------------------------------------------------------
# Converse certificates

@dataclass(frozen=True)
class ConverseCertificate:
    """Receiver set ``A`` and the order in which unknown signals are recovered.

    Attributes
    ----------
    A : frozenset
        Local receivers whose outputs (plus the signals they pin down) are used.
    known : frozenset
        Member transmitters whose signal depends only on messages of ``A``.
    steps : tuple of (int, int)
        ``(tx, rx)``: transmit signal ``tx`` solved from the output of ``rx``.
    """

    A: frozenset
    known: frozenset
    steps: tuple

    @property
    def bound(self) -> int:
        return len(self.A)


def _determined_by(sub: AtomicSubnetwork, A) -> frozenset:
    return frozenset(
        t
        for t in sub.local_txs
        if all(i in A for i in range(1, sub.N + 1) if t in sub.T(i))
    )


def certificate_for(sub: AtomicSubnetwork, A) -> ConverseCertificate:
    """Greedy recovery order for a candidate set ``A`` (may be incomplete)."""
    A = frozenset(A)
    members = set(sub.local_txs)
    known = set(_determined_by(sub, A))
    steps = []
    progress = True
    while progress:
        progress = False
        for rx in sorted(A):
            unknown = [t for t in (rx - 1, rx) if t in members and t not in known]
            if len(unknown) == 1:
                known.add(unknown[0])
                steps.append((unknown[0], rx))
                progress = True
    return ConverseCertificate(A, _determined_by(sub, A), tuple(steps))


def verify_certificate(cert: ConverseCertificate, sub: AtomicSubnetwork) -> bool:
    """Replay a certificate; true iff every member transmit signal is recovered."""
    members = set(sub.local_txs)
    if not cert.A <= set(range(1, sub.N + 1)):
        return False
    known = set(_determined_by(sub, cert.A))
    for tx, rx in cert.steps:
        if rx not in cert.A or tx in known or tx not in (rx - 1, rx) or tx not in members:
            return False
        if any(t in members and t not in known for t in (rx - 1, rx) if t != tx):
            return False
        known.add(tx)
    return members <= known


def converse_set_n5(sub: AtomicSubnetwork) -> frozenset:
    """Receiver set chosen by the case analysis for five-user blocks."""
    if sub.N != 5:
        raise ValueError(f"converse case analysis needs N = 5, got {sub.N}")
    T = {i: set(sub.T(i)) for i in range(1, 6)}
    tx0, tx5 = sub.tx0_in, sub.txN_in
    if tx0 and not tx5:
        if 3 not in T[5]:
            if 0 not in T[1]:
                A = {2, 3, 4}
            elif 3 not in T[3]:
                A = {1, 2, 4}
            elif T[2] == {1, 2}:
                A = {1, 3, 4}
            else:
                A = {1, 2, 4, 5}
        elif 3 not in T[4]:
            if 0 not in T[1]:
                A = {2, 3, 5}
            elif 3 not in T[3]:
                A = {1, 2, 5}
            elif T[2] == {1, 2}:
                A = {1, 3, 5}
            else:
                A = {1, 2, 4, 5}
        else:
            A = {1, 2, 4, 5}
    elif tx5 and not tx0:
        if 2 not in T[1]:
            if 5 not in T[5]:
                A = {2, 3, 4}
            elif 2 not in T[3]:
                A = {2, 4, 5}
            elif T[4] == {3, 4}:
                A = {2, 3, 5}
            else:
                A = {1, 2, 4, 5}
        elif 2 not in T[2]:
            if 5 not in T[5]:
                A = {1, 3, 4}
            elif 2 not in T[3]:
                A = {1, 4, 5}
            elif T[4] == {3, 4}:
                A = {1, 3, 5}
            else:
                A = {1, 2, 4, 5}
        else:
            A = {1, 2, 4, 5}
    elif tx0 and tx5:
        A = {1, 2, 4, 5}
    else:
        if 2 not in T[1]:
            A = {2, 3, 4}
        elif 2 not in T[2]:
            A = {1, 3, 4}
        elif 3 not in T[4]:
            A = {2, 3, 5}
        elif 3 not in T[5]:
            A = {2, 3, 4}
        else:
            A = {1, 2, 4, 5}
    return frozenset(A)


def converse_bound_n5(sub: AtomicSubnetwork) -> ConverseCertificate:
    """Converse certificate for a five-user block."""
    return certificate_for(sub, converse_set_n5(sub))


def smallest_certificate(sub: AtomicSubnetwork):
    """Smallest receiver set with a complete recovery order (exhaustive)."""
    users = range(1, sub.N + 1)
    for size in range(0, sub.N + 1):
        for A in combinations(users, size):
            cert = certificate_for(sub, A)
            if verify_certificate(cert, sub):
                return cert
    return None
