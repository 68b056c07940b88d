"""Message assignments: which transmitters know which message.

Covers the periodic cell-association strategies encoded by ternary strings,
the two fixed cooperative assignments with transmit sets of size two, the
fraction-parameterized family used in simulations, explicit assignments, and
realization-dependent topology reduction.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .network import NetworkRealization, connected

#: Offsets of a transmitter relative to its message index, in mask column order.
OFFSETS = (-2, -1, 0, 1)


class StrategyError(ValueError):
    """Raised for malformed or inconsistent strategy descriptions."""


class UnsupportedCooperationError(ValueError):
    """Raised when an operation only supports small cooperation orders."""


@dataclass(frozen=True)
class MessageAssignment:
    """Transmit sets ``T_1 .. T_K``.

    Parameters
    ----------
    K : int
        Number of users.
    transmit_sets : tuple of tuple of int
        Sorted transmitter indices per message. Empty sets are allowed only
        in topology-reduced assignments.
    strategy : str
        Human-readable label of the generating rule.
    """

    K: int
    transmit_sets: tuple
    strategy: str = "explicit"

    def __post_init__(self):
        sets = tuple(tuple(sorted(set(int(t) for t in s))) for s in self.transmit_sets)
        if len(sets) != self.K:
            raise StrategyError(f"sets: expected {self.K} transmit sets, got {len(sets)}")
        for i, s in enumerate(sets, start=1):
            for t in s:
                if not 1 <= t <= self.K:
                    raise StrategyError(f"sets: transmitter {t} of T_{i} outside 1..{self.K}")
        object.__setattr__(self, "transmit_sets", sets)

    @property
    def M(self) -> int:
        """Cooperation order ``max_i |T_i|``."""
        return max((len(s) for s in self.transmit_sets), default=0)

    def T(self, i: int) -> tuple:
        return self.transmit_sets[i - 1]

    def require_nonempty(self) -> "MessageAssignment":
        for i, s in enumerate(self.transmit_sets, start=1):
            if not s:
                raise StrategyError(f"sets: T_{i} is empty")
        return self

    def window_masks(self) -> np.ndarray:
        """Membership of ``i + o`` in ``T_i`` for ``o`` in :data:`OFFSETS`.

        Returns
        -------
        ndarray of bool, shape (K, 4)

        Raises
        ------
        UnsupportedCooperationError
            If some transmit set leaves the window ``{i-2, .., i+1}``.
        """
        masks = np.zeros((self.K, 4), dtype=bool)
        for i, s in enumerate(self.transmit_sets, start=1):
            for t in s:
                o = t - i
                if o not in OFFSETS:
                    raise UnsupportedCooperationError(
                        f"T_{i} contains transmitter {t}, outside {{i-2..i+1}}"
                    )
                masks[i - 1, OFFSETS.index(o)] = True
        return masks


# ---------------------------------------------------------------------------
# Cell association (one transmitter per message)

def validate_ternary(S: Sequence[int]) -> tuple:
    """Check that ``S`` is a usable ternary string and return it as a tuple.

    Accepted strings are all-ones, or strings ending in 0 with exactly one 2
    and ones elsewhere.
    """
    S = tuple(int(x) for x in S)
    if not S:
        raise StrategyError("s: empty string")
    if any(x not in (0, 1, 2) for x in S):
        raise StrategyError(f"s: entries must be 0, 1 or 2, got {list(S)}")
    if sum(S) != len(S):
        raise StrategyError(f"s: entries must sum to the length {len(S)}, got {sum(S)}")
    if all(x == 1 for x in S):
        return S
    if S[-1] != 0 or S.count(2) != 1 or S.count(0) != 1:
        raise StrategyError(f"s: {list(S)} is not of the form (1..1,2,1..1,0)")
    return S


def reconstruct_from_counts(counts: Sequence[int]) -> tuple:
    """Rebuild single-transmitter sets from per-transmitter message counts.

    Blocks end at transmitters carrying nothing. Inside a block that ends at
    ``x`` and holds its only doubly loaded transmitter at ``y``, message
    ``i`` sits at ``i`` for ``i <= y`` and at ``i - 1`` for ``y < i <= x``.
    A trailing block of ones maps every message to its own transmitter.
    """
    counts = [int(c) for c in counts]
    sets = []
    start = 1
    K = len(counts)
    for x in range(1, K + 1):
        if counts[x - 1] != 0:
            continue
        block = counts[start - 1 : x]
        twos = [start + k for k, c in enumerate(block) if c == 2]
        if len(twos) != 1 or any(c not in (1, 2) for c in block[:-1]):
            raise StrategyError(f"counts: block {start}..{x} is not reconstructible")
        y = twos[0]
        sets += [(i,) if i <= y else (i - 1,) for i in range(start, x + 1)]
        start = x + 1
    tail = counts[start - 1 :]
    if any(c != 1 for c in tail):
        raise StrategyError(f"counts: trailing block from {start} must be all ones")
    sets += [(i,) for i in range(start, K + 1)]
    return tuple(sets)


def ternary_counts(S: Sequence[int], K: int) -> tuple:
    """Tile ``S`` over the first ``n * floor(K / n)`` transmitters, pad with ones."""
    S = validate_ternary(S)
    n = len(S)
    full = n * (K // n)
    return tuple(S[(j - 1) % n] if j <= full else 1 for j in range(1, K + 1))


def expand_ternary(S: Sequence[int], K: int) -> MessageAssignment:
    """Cell-association assignment generated by the periodic string ``S``."""
    S = validate_ternary(S)
    if K < len(S):
        raise StrategyError(f"K: must be at least len(s)={len(S)}, got {K}")
    sets = reconstruct_from_counts(ternary_counts(S, K))
    return MessageAssignment(K, sets, "ternary:" + "".join(map(str, S)))


def counts_from_sets(a: MessageAssignment) -> tuple:
    """Number of messages known at each transmitter."""
    counts = [0] * a.K
    for s in a.transmit_sets:
        for t in s:
            counts[t - 1] += 1
    return tuple(counts)


# ---------------------------------------------------------------------------
# Cooperative assignments (two transmitters per message)

def _clip(K: int, sets) -> tuple:
    return tuple(tuple(t for t in s if 1 <= t <= K) for s in sets)


def theorem4_assignment(K: int) -> MessageAssignment:
    """Period-5 assignment tuned for small erasure probabilities."""
    sets = []
    for i in range(1, K + 1):
        r = i % 5
        if r in (2, 4):
            sets.append((i - 1, i))
        elif r == 0:
            sets.append((i - 2, i - 1))
        else:
            sets.append((i, i + 1))
    return MessageAssignment(K, _clip(K, sets), "theorem4")


def theorem5_assignment(K: int) -> MessageAssignment:
    """Each message at both transmitters that can reach its receiver."""
    return MessageAssignment(K, _clip(K, [(i - 1, i) for i in range(1, K + 1)]), "theorem5")


def _as_fraction(f) -> Fraction:
    if isinstance(f, float):
        return Fraction(repr(f))
    return Fraction(f)


def fraction_assignment(f, K: int) -> MessageAssignment:
    """Simulation family in which roughly ``f * K`` messages are sent forward.

    A forward message ``T_i = {i, i+1}`` can be cancelled at receiver
    ``i + 1``; the rest use ``{i-1, i}`` for coverage. Rules are applied in
    order and the first match wins. The index 0 of ``T_1 = {0, 1}`` has no
    transmitter behind it and is dropped.
    """
    f = _as_fraction(f)
    if not 0 <= f <= 1:
        raise StrategyError(f"f: must lie in [0, 1], got {f}")
    if K < 3:
        raise StrategyError(f"K: fraction strategy needs K >= 3, got {K}")
    fK = f * K

    spaced = set()
    upper = min(math.floor(fK - 2), math.floor(Fraction(K, 2) - 1))
    if upper >= 1:
        step = max(2, math.floor(K / (fK - 1)))
        spaced = {1 + n * step for n in range(1, upper + 1)}
    paired = {2 * n for n in range(1, math.ceil((f - Fraction(1, 2)) * K))}

    sets = []
    for i in range(1, K + 1):
        if i == 1:
            sets.append((1, 2) if fK > 1 else (0, 1))
        elif i == K:
            sets.append((K - 2, K - 1))
        elif i in spaced or i in paired:
            sets.append((i, i + 1))
        else:
            sets.append((i - 1, i))
    return MessageAssignment(K, _clip(K, sets), f"fraction:{f}")


# ---------------------------------------------------------------------------
# Topology reduction

def _reduced_set(r: NetworkRealization, i: int, T: tuple, enabled) -> tuple:
    marked = {t for t in T if (t == i or t == i - 1) and connected(r, i, t)}
    if not marked:
        return ()

    def linked(x, y):
        # two transmitters are adjacent in G_i if they reach a common enabled receiver
        common = {x, x + 1} & {y, y + 1}
        return any(rx in enabled and connected(r, rx, x) and connected(r, rx, y) for rx in common)

    keep, frontier = set(marked), list(marked)
    while frontier:
        x = frontier.pop()
        for y in T:
            if y not in keep and linked(x, y):
                keep.add(y)
                frontier.append(y)
    return tuple(sorted(keep))


def enabled_users(a: MessageAssignment, r: NetworkRealization) -> set:
    """Users whose message reaches its receiver from some carrying transmitter."""
    return {i for i in range(1, a.K + 1) if any(connected(r, i, t) for t in a.T(i))}


def topology_reduce(a: MessageAssignment, r: NetworkRealization) -> MessageAssignment:
    """Drop users and transmit-set entries that cannot help in realization ``r``.

    A user is removed when no transmitter carrying its message reaches its
    receiver. In the remaining sets, an entry survives only if it is linked
    (through transmitters sharing an enabled receiver) to a transmitter that
    reaches the message's own receiver.
    """
    if a.K != r.K:
        raise ValueError("assignment and realization disagree on K")
    enabled = enabled_users(a, r)
    sets = tuple(
        _reduced_set(r, i, a.T(i), enabled) if i in enabled else ()
        for i in range(1, a.K + 1)
    )
    return MessageAssignment(a.K, sets, a.strategy)


# ---------------------------------------------------------------------------
# Strategy descriptors

@dataclass(frozen=True)
class Strategy:
    """Recipe that builds a :class:`MessageAssignment` for any K.

    Parameters
    ----------
    kind : {"ternary", "theorem4", "theorem5", "fraction", "explicit"}
    s : tuple of int, optional
        Ternary string (``kind == "ternary"``).
    f : Fraction, optional
        Forward fraction (``kind == "fraction"``).
    sets : tuple, optional
        Explicit transmit sets (``kind == "explicit"``).
    """

    kind: str
    s: tuple = ()
    f: Fraction = Fraction(0)
    sets: tuple = field(default=())

    def assignment(self, K: int) -> MessageAssignment:
        if self.kind == "ternary":
            return expand_ternary(self.s, K)
        if self.kind == "theorem4":
            return theorem4_assignment(K)
        if self.kind == "theorem5":
            return theorem5_assignment(K)
        if self.kind == "fraction":
            return fraction_assignment(self.f, K)
        if len(self.sets) != K:
            raise StrategyError(f"sets: explicit strategy has {len(self.sets)} sets but K={K}")
        return MessageAssignment(K, self.sets, "explicit").require_nonempty()

    @property
    def M(self) -> int:
        if self.kind == "ternary":
            return 1
        if self.kind == "explicit":
            return max((len(set(s)) for s in self.sets), default=0)
        return 2

    def describe(self) -> str:
        if self.kind == "ternary":
            return "ternary:" + "".join(map(str, self.s))
        if self.kind == "fraction":
            return f"fraction:{self.f}"
        if self.kind == "explicit":
            return "explicit:" + json.dumps([list(s) for s in self.sets], separators=(",", ":"))
        return self.kind

    def to_json(self) -> dict:
        if self.kind == "ternary":
            return {"type": "ternary", "s": list(self.s)}
        if self.kind == "fraction":
            return {"type": "fraction", "f": str(self.f)}
        if self.kind == "explicit":
            return {"type": "explicit", "sets": [list(s) for s in self.sets]}
        return {"type": self.kind}


def parse_strategy(desc) -> Strategy:
    """Build a :class:`Strategy` from a JSON string or an already-decoded dict.

    Raises
    ------
    StrategyError
        Message starts with the name of the offending field.
    """
    if isinstance(desc, str):
        try:
            desc = json.loads(desc)
        except json.JSONDecodeError as exc:
            raise StrategyError(f"strategy: not valid JSON ({exc.msg})") from None
    if not isinstance(desc, dict):
        raise StrategyError("strategy: expected a JSON object")
    kind = desc.get("type")
    if kind not in ("ternary", "theorem4", "theorem5", "fraction", "explicit"):
        raise StrategyError(f"type: unknown strategy type {kind!r}")
    if kind == "ternary":
        s = desc.get("s")
        if not isinstance(s, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in s):
            raise StrategyError("s: expected a list of integers")
        return Strategy("ternary", s=validate_ternary(s))
    if kind == "fraction":
        raw = desc.get("f")
        if isinstance(raw, bool) or not isinstance(raw, (int, float, str)):
            raise StrategyError("f: expected a number")
        try:
            f = _as_fraction(raw)
        except (ValueError, ZeroDivisionError):
            raise StrategyError(f"f: cannot parse {raw!r}") from None
        if not 0 <= f <= 1:
            raise StrategyError(f"f: must lie in [0, 1], got {raw}")
        return Strategy("fraction", f=f)
    if kind == "explicit":
        sets = desc.get("sets")
        if not isinstance(sets, list) or not all(
            isinstance(s, list) and s and all(isinstance(t, int) and not isinstance(t, bool) for t in s)
            for s in sets
        ):
            raise StrategyError("sets: expected a list of nonempty integer lists")
        return Strategy("explicit", sets=tuple(tuple(s) for s in sets))
    return Strategy(kind)
