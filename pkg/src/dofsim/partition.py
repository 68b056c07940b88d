"""Decomposition of a realization into non-interfering atomic subnetworks.

Local indexing inside a subnetwork of ``N`` users starting at global user
``first``: local receiver ``k`` is global receiver ``first - 1 + k`` and local
transmitter ``k`` is global transmitter ``first - 1 + k``. Local transmitter 0
is therefore the global transmitter preceding the first user; it belongs to
the subnetwork only when it carries a message of user 1 or 2.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .assignment import MessageAssignment, topology_reduce
from .network import ChannelCoefficients, NetworkRealization, connected

_WINDOW = (-2, -1, 0, 1)


@dataclass(frozen=True)
class AtomicSubnetwork:
    """Contiguous block of users that can be scheduled in isolation.

    Parameters
    ----------
    first : int
        Global index of local user 1.
    local_sets : tuple of tuple of int
        Local transmit sets ``T_1 .. T_N``.

    Notes
    -----
    Every link from a member transmitter to a member receiver is present, so
    the block is fully described by ``local_sets``.
    """

    first: int
    local_sets: tuple

    def __post_init__(self):
        sets = tuple(tuple(sorted(set(int(t) for t in s))) for s in self.local_sets)
        object.__setattr__(self, "local_sets", sets)
        N = len(sets)
        if N == 0:
            raise ValueError("a subnetwork needs at least one user")
        for i, s in enumerate(sets, start=1):
            if not s:
                raise ValueError(f"local T_{i} is empty")
            if any(t - i not in _WINDOW or not 0 <= t <= N for t in s):
                raise ValueError(f"local T_{i}={s} leaves the window or the block")
            if len(s) == 2 and s[1] != s[0] + 1:
                raise ValueError(f"local T_{i}={s} is not consecutive")

    @property
    def N(self) -> int:
        return len(self.local_sets)

    @property
    def last(self) -> int:
        return self.first + self.N - 1

    @property
    def user_range(self) -> range:
        return range(self.first, self.first + self.N)

    @property
    def tx0_in(self) -> bool:
        return any(0 in s for s in self.local_sets)

    @property
    def txN_in(self) -> bool:
        return any(self.N in s for s in self.local_sets)

    @property
    def local_txs(self) -> range:
        return range(0 if self.tx0_in else 1, self.N + 1 if self.txN_in else self.N)

    @property
    def tx_span(self) -> tuple:
        """First and last global transmitter of the block."""
        txs = self.local_txs
        return (self.first - 1 + txs[0], self.first - 1 + txs[-1])

    def T(self, i: int) -> tuple:
        return self.local_sets[i - 1]

    def carries(self, t: int) -> bool:
        return any(t in s for s in self.local_sets)

    def is_atomic(self) -> bool:
        """Every inner transmitter carries a message of the block."""
        return all(self.carries(t) for t in range(1, self.N))

    def local_links(self) -> list:
        """Local links ``(rx, tx)`` between member transmitters and receivers."""
        return [(r, t) for t in self.local_txs for r in (t, t + 1) if 1 <= r <= self.N]

    def local_gains(self, c: ChannelCoefficients) -> dict:
        """Restrict global gains to the block's local links."""
        off = self.first - 1
        return {(r, t): c(r + off, t + off) for r, t in self.local_links()}

    def random_gains(self, seed: int) -> dict:
        """Generic integer gains on the local links, for standalone blocks."""
        rng = np.random.default_rng(seed)
        links = self.local_links()
        vals = rng.integers(1, 2**31, size=len(links))
        return {lk: int(v) for lk, v in zip(links, vals)}

    def mirror(self) -> "AtomicSubnetwork":
        """Block with receiver ``k`` mapped to ``N + 1 - k`` and transmitter ``t`` to ``N - t``."""
        N = self.N
        sets = [tuple(N - t for t in self.local_sets[N - i]) for i in range(1, N + 1)]
        return AtomicSubnetwork(self.first, tuple(sets))

    def describe(self) -> str:
        a, b = self.tx_span
        return f"users={self.first}..{self.last} txs={a}..{b}"


class Partition(NamedTuple):
    subnetworks: list
    inactive: list

    def describe(self) -> str:
        return "\n".join(s.describe() for s in self.subnetworks)


def partition_atomic(r: NetworkRealization, a: MessageAssignment) -> Partition:
    """Split a realization into atomic subnetworks.

    The assignment is topology-reduced first. Walking the receivers in
    ascending order, user ``t + 1`` stays in the block of user ``t`` only if
    both are enabled and transmitter ``t`` bridges them: it reaches receivers
    ``t`` and ``t + 1`` and carries at least one surviving message. This
    merges the link-run, receiver and transmitter scans into a single pass.

    Returns
    -------
    Partition
        Blocks in ascending order and the sorted list of users whose message
        cannot reach its receiver.
    """
    ra = topology_reduce(a, r)
    K = a.K
    enabled = [bool(ra.T(i)) for i in range(1, K + 1)]
    carried = np.zeros(K + 2, dtype=bool)
    for s in ra.transmit_sets:
        carried[list(s)] = True

    subnets, inactive = [], []
    start = None
    for i in range(1, K + 2):
        if i <= K and not enabled[i - 1]:
            inactive.append(i)
        joins = (
            start is not None
            and i <= K
            and enabled[i - 1]
            and carried[i - 1]
            and connected(r, i - 1, i - 1)
            and connected(r, i, i - 1)
        )
        if joins:
            continue
        if start is not None:
            off = start - 1
            local = tuple(tuple(t - off for t in ra.T(u)) for u in range(start, i))
            subnets.append(AtomicSubnetwork(start, local))
        start = i if i <= K and enabled[i - 1] else None
    return Partition(subnets, inactive)


def verify_partition(subnets, r: NetworkRealization, a: MessageAssignment) -> bool:
    """Check a proposed partition against the definitions directly.

    True iff the blocks are ordered and disjoint, cover exactly the enabled
    users, carry the reduced transmit sets, have all member links present,
    cannot be split further, and no transmitter carrying a message of one
    block reaches an enabled receiver of another.
    """
    if isinstance(subnets, Partition):
        subnets = subnets.subnetworks
    ra = topology_reduce(a, r)
    K = a.K
    enabled = {i for i in range(1, K + 1) if ra.T(i)}
    owner = {}
    prev_last = 0
    for idx, sub in enumerate(subnets):
        if sub.first <= prev_last or sub.last > K:
            return False
        prev_last = sub.last
        off = sub.first - 1
        for k, u in enumerate(sub.user_range, start=1):
            owner[u] = idx
            if tuple(t - off for t in ra.T(u)) != sub.T(k):
                return False
    if set(owner) != enabled:
        return False

    # messages carried by each transmitter, as user indices
    load = {t: [] for t in range(1, K + 1)}
    for x in enabled:
        for t in ra.T(x):
            load[t].append(x)

    def hears(t):
        return [y for y in (t, t + 1) if y in enabled and connected(r, y, t)]

    # no interference across blocks
    for t in range(1, K + 1):
        for x in load[t]:
            if any(owner[y] != owner[x] for y in hears(t)):
                return False

    for sub in subnets:
        off = sub.first - 1
        users = set(sub.user_range)
        lo, hi = sub.tx_span
        for t in range(lo, hi + 1):
            mine = [x for x in load.get(t, []) if x in users]
            reaches = [y for y in (t, t + 1) if y in users and connected(r, y, t)]
            if reaches and not mine:
                return False
            if mine and any(not connected(r, y, t) for y in (t, t + 1) if y in users):
                return False
        if not sub.is_atomic():
            return False
        # a block is atomic only if every internal cut is crossed by interference
        for m in range(sub.first, sub.last):
            crossed = any(
                (x <= m) != (y <= m)
                for t in range(lo, hi + 1)
                for x in load.get(t, [])
                if x in users
                for y in hears(t)
                if y in users
            )
            if not crossed:
                return False
        if any(t + off < 1 or t + off > K for t in sub.local_txs):
            return False
    return True
