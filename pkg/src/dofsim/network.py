"""Linear (Wyner) network topology, erasure realizations and channel coefficients.

Transmitter ``t`` can only reach receivers ``t`` and ``t + 1``, so a K-user
network has exactly ``2K - 1`` potential links. Links are stored in a flat
array in scan order ``(1,1), (2,1), (2,2), (3,2), ...``::

    index(i, i)     = 2 (i - 1)
    index(i, i - 1) = 2 i - 3

All indices in the public API are 1-based, matching the usual notation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

COEFF_HIGH = 2**31


def _as_seed_sequence(seed, *spawn_key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in spawn_key))


def child_seed(seed: int, *key: int) -> int:
    """Derive a 64-bit seed from ``seed`` and an integer key path.

    Distinct key paths give statistically independent streams.
    """
    state = _as_seed_sequence(seed, *key).generate_state(2, dtype=np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


@dataclass(frozen=True)
class NetworkTopology:
    """K-user linear network.

    Parameters
    ----------
    K : int
        Number of transmitter/receiver pairs.
    last_tx_deactivated : bool
        If true, every link leaving transmitter ``K`` is treated as absent.
    """

    K: int
    last_tx_deactivated: bool = False

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 1:
            raise ValueError(f"K must be a positive integer, got {self.K!r}")

    @property
    def n_links(self) -> int:
        return 2 * self.K - 1

    def links(self):
        """Potential links ``(rx, tx)`` in flat-index order."""
        out = [(1, 1)]
        for i in range(2, self.K + 1):
            out += [(i, i - 1), (i, i)]
        return out


def link_index(rx: int, tx: int, K: Optional[int] = None) -> int:
    """Flat index of link ``(rx, tx)``.

    Raises
    ------
    IndexError
        If the pair is not a potential link of the linear network.
    """
    if K is not None and not 1 <= rx <= K:
        raise IndexError(f"receiver {rx} outside 1..{K}")
    if tx == rx and rx >= 1:
        return 2 * (rx - 1)
    if tx == rx - 1 and rx >= 2:
        return 2 * rx - 3
    raise IndexError(f"({rx}, {tx}) is not a link of the linear network")


class NetworkRealization:
    """One erasure pattern over the ``2K - 1`` potential links.

    Parameters
    ----------
    topology : NetworkTopology
    present : array_like of bool, shape (2K - 1,)
        ``True`` where the link survived erasure.
    """

    __slots__ = ("topology", "present")

    def __init__(self, topology: NetworkTopology, present):
        arr = np.array(present, dtype=bool).reshape(-1)
        if arr.shape[0] != topology.n_links:
            raise ValueError(
                f"expected {topology.n_links} link bits for K={topology.K}, got {arr.shape[0]}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "topology", topology)
        object.__setattr__(self, "present", arr)

    def __setattr__(self, name, value):
        raise AttributeError("NetworkRealization is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, NetworkRealization)
            and self.topology == other.topology
            and np.array_equal(self.present, other.present)
        )

    def __hash__(self):
        return hash((self.topology, self.present.tobytes()))

    def __repr__(self):
        bits = "".join("1" if b else "0" for b in self.present)
        return f"NetworkRealization(K={self.K}, present={bits})"

    @property
    def K(self) -> int:
        return self.topology.K

    @classmethod
    def full(cls, topology: NetworkTopology) -> "NetworkRealization":
        return cls(topology, np.ones(topology.n_links, dtype=bool))

    @classmethod
    def from_links(cls, topology: NetworkTopology, links) -> "NetworkRealization":
        """Realization in which exactly ``links`` (pairs ``(rx, tx)``) are present."""
        present = np.zeros(topology.n_links, dtype=bool)
        for rx, tx in links:
            present[link_index(rx, tx, topology.K)] = True
        return cls(topology, present)

    def direct(self) -> np.ndarray:
        """Effective presence of links ``(i, i)``, shape (K,), deactivation applied."""
        d = self.present[0::2].copy()
        if self.topology.last_tx_deactivated:
            d[-1] = False
        return d

    def cross(self) -> np.ndarray:
        """Presence of links ``(i, i - 1)``, shape (K,), with entry 0 always false."""
        c = np.zeros(self.K, dtype=bool)
        c[1:] = self.present[1::2]
        return c


def link_present(r: NetworkRealization, rx: int, tx: int) -> bool:
    """Whether link ``(rx, tx)`` carries signal in realization ``r``."""
    idx = link_index(rx, tx, r.K)
    if r.topology.last_tx_deactivated and tx == r.K:
        return False
    return bool(r.present[idx])


def connected(r: NetworkRealization, rx: int, tx: int) -> bool:
    """Like :func:`link_present` but false (not an error) for non-links."""
    if not (1 <= rx <= r.K and 1 <= tx <= r.K and tx in (rx - 1, rx)):
        return False
    return link_present(r, rx, tx)


def sample_realization(topology: NetworkTopology, p: float, seed: int) -> NetworkRealization:
    """Erase each potential link independently with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    rng = np.random.default_rng(_as_seed_sequence(seed))
    return NetworkRealization(topology, rng.random(topology.n_links) >= p)


def sample_link_batch(K: int, p: float, trials: int, seed: int):
    """Draw ``trials`` realizations at once.

    Returns
    -------
    direct, cross : ndarray of bool, shape (trials, K)
        Raw presence of links ``(i, i)`` and ``(i, i - 1)``; ``cross[:, 0]`` is
        false. No deactivation is applied here.
    """
    rng = np.random.default_rng(_as_seed_sequence(seed))
    present = rng.random((trials, 2 * K - 1)) >= p
    direct = present[:, 0::2]
    cross = np.zeros((trials, K), dtype=bool)
    cross[:, 1:] = present[:, 1::2]
    return np.ascontiguousarray(direct), cross


class ChannelCoefficients:
    """Exact integer channel gains attached to a realization.

    Absent (or deactivated) links hold exactly 0; every other link holds an
    integer drawn uniformly from ``[1, 2**31)``.
    """

    __slots__ = ("realization", "values")

    def __init__(self, realization: NetworkRealization, values):
        vals = tuple(int(v) for v in values)
        if len(vals) != realization.topology.n_links:
            raise ValueError("one coefficient per potential link is required")
        for (rx, tx), v in zip(realization.topology.links(), vals):
            if link_present(realization, rx, tx) != (v != 0):
                raise ValueError(f"coefficient of link ({rx}, {tx}) inconsistent with presence")
        object.__setattr__(self, "realization", realization)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("ChannelCoefficients is immutable")

    def __call__(self, rx: int, tx: int) -> int:
        """Gain of link ``(rx, tx)``; 0 for absent links and non-links."""
        if not connected(self.realization, rx, tx):
            return 0
        return self.values[link_index(rx, tx)]


def sample_coefficients(r: NetworkRealization, seed: int) -> ChannelCoefficients:
    """Draw generic integer gains for every effectively present link."""
    rng = np.random.default_rng(_as_seed_sequence(seed))
    raw = rng.integers(1, COEFF_HIGH, size=r.topology.n_links, dtype=np.int64)
    vals = [
        int(v) if link_present(r, rx, tx) else 0
        for (rx, tx), v in zip(r.topology.links(), raw)
    ]
    return ChannelCoefficients(r, vals)
