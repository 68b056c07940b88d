"""Greedy zero-forcing scheduler for atomic subnetworks.

For every message ``W_i`` of a block the scheduler sets flags ``b[i, j]``
(``j`` in ``{i-2, .., i+1}``) meaning "transmitter ``j`` sends a beam of
``W_i``". A message is delivered through its data beam on transmitter
``i - 1`` or ``i``; an optional second beam on ``i - 2`` or ``i + 1`` cancels
its interference at receiver ``i - 1`` or ``i + 1``. Messages are visited in
ascending order and decisions are never revisited.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .assignment import MessageAssignment, UnsupportedCooperationError
from .network import NetworkRealization
from .partition import AtomicSubnetwork, partition_atomic


@dataclass(frozen=True)
class Schedule:
    """Delivery decisions for one atomic subnetwork.

    Attributes
    ----------
    subnetwork : AtomicSubnetwork
    b : tuple of frozenset
        ``b[i - 1]`` holds the local transmitters that send a beam of ``W_i``.
    """

    subnetwork: AtomicSubnetwork
    b: tuple

    @property
    def N(self) -> int:
        return self.subnetwork.N

    def flag(self, i: int, j: int) -> bool:
        return 1 <= i <= self.N and j in self.b[i - 1]

    def data_tx(self, i: int):
        """Transmitter carrying the data beam of ``W_i``, or ``None``."""
        for j in (i - 1, i):
            if self.flag(i, j):
                return j
        return None

    def cancel_tx(self, i: int):
        """Transmitter carrying the cancellation beam of ``W_i``, or ``None``."""
        for j in (i - 2, i + 1):
            if self.flag(i, j):
                return j
        return None

    @property
    def delivered(self) -> frozenset:
        return frozenset(i for i in range(1, self.N + 1) if self.data_tx(i) is not None)

    @property
    def dof(self) -> int:
        return len(self.delivered)

    def describe(self) -> str:
        """One line per message: ``b[i]: j1 j2`` or ``b[i]: -``."""
        lines = []
        for i in range(1, self.N + 1):
            cols = " ".join(str(j) for j in sorted(self.b[i - 1])) or "-"
            lines.append(f"b[{i}]: {cols}")
        return "\n".join(lines)


def schedule_atomic(sub: AtomicSubnetwork) -> Schedule:
    """Run the greedy decision pass on an atomic subnetwork.

    Only message availability is consulted; inside an atomic subnetwork every
    link between member transmitters and receivers is present, and the link
    from transmitter 0 to receiver 1 exists exactly when transmitter 0 is a
    member.
    """
    N = sub.N
    T = [()] + [set(s) for s in sub.local_sets]
    b = [set() for _ in range(N + 1)]

    def avail(i, j):
        return 1 <= i <= N and j in T[i]

    def on(i, j):
        return 1 <= i <= N and j in b[i]

    h10 = sub.tx0_in

    # first message: prefer transmitter 0
    if h10 and avail(1, 0):
        b[1].add(0)
    else:
        b[1].add(1)

    if N >= 2:
        if avail(2, 1) and not on(1, 1):
            if avail(2, 0) and h10:
                b[2] |= {1, 0}
        elif avail(2, 0) and h10 and avail(1, 2):
            b[2] |= {1, 0}
            b[1] |= {2, 1}
        # transmitter 2 is still worth trying when the branches above did not deliver W_2
        if avail(2, 2) and not on(2, 1):
            if not on(1, 1):
                b[2].add(2)
            elif avail(1, 2):
                b[2].add(2)
                b[1].add(2)

    for i in range(3, N + 1):
        if avail(i, i - 1) and not on(i - 1, i - 1):
            if not on(i - 1, i - 2):
                b[i].add(i - 1)
            elif avail(i, i - 2) and not on(i - 2, i - 2) and not on(i - 2, i - 3):
                b[i] |= {i - 1, i - 2}
        elif (
            avail(i, i - 2)
            and avail(i - 1, i)
            and not on(i - 2, i - 3)
            and not on(i - 2, i - 2)
        ):
            # joint swap: all four flags or none
            b[i] |= {i - 1, i - 2}
            b[i - 1] |= {i, i - 1}
        if avail(i, i) and not on(i, i - 1) and not on(i - 2, i - 1):
            if not on(i - 1, i - 1):
                b[i].add(i)
            elif avail(i - 1, i):
                b[i].add(i)
                b[i - 1].add(i)

    return Schedule(sub, tuple(frozenset(s) for s in b[1:]))


# ---------------------------------------------------------------------------
# Beam construction

@dataclass(frozen=True)
class BeamPlan:
    """Transmit signals as exact linear combinations of message symbols.

    Attributes
    ----------
    schedule : Schedule
    gains : dict
        Local link gains ``(rx, tx) -> int``.
    signals : dict
        ``tx -> tuple of (message, Fraction)``.
    """

    schedule: Schedule
    gains: dict
    signals: dict

    def coefficient(self, tx: int, message: int) -> Fraction:
        return sum((c for m, c in self.signals.get(tx, ()) if m == message), Fraction(0))

    def received(self, rx: int) -> dict:
        """Net coefficient of every message symbol at local receiver ``rx``."""
        net = {}
        for tx in (rx - 1, rx):
            h = self.gains.get((rx, tx), 0)
            if not h:
                continue
            for m, c in self.signals.get(tx, ()):
                net[m] = net.get(m, Fraction(0)) + h * c
        return net

    def verify(self) -> bool:
        """Every delivered message arrives clean and with nonzero gain."""
        delivered = self.schedule.delivered
        for rx in delivered:
            net = self.received(rx)
            if net.get(rx, 0) == 0:
                return False
            if any(c != 0 for m, c in net.items() if m != rx):
                return False
        return True


def build_beams(s: Schedule, gains) -> BeamPlan:
    """Compose the transmit signals of a schedule.

    Parameters
    ----------
    s : Schedule
    gains : dict or ChannelCoefficients
        Local link gains, or global coefficients of the realization the
        subnetwork came from.
    """
    if not isinstance(gains, dict):
        gains = s.subnetwork.local_gains(gains)
    H = gains.get
    signals = {t: [] for t in s.subnetwork.local_txs}

    for i in range(1, s.N + 1):
        j = s.data_tx(i)
        if j is None:
            continue
        signals.setdefault(j, []).append((i, Fraction(1)))
        k = s.cancel_tx(i)
        if k is None:
            continue
        if k == i + 1:
            # cancel at receiver i + 1 the copy sent by transmitter i
            num, den = H((i + 1, i), 0), H((i + 1, i + 1), 0)
        else:
            # cancel at receiver i - 1 the copy sent by transmitter i - 1
            num, den = H((i - 1, i - 1), 0), H((i - 1, i - 2), 0)
        assert den != 0, f"cancellation of W_{i} through an absent link"
        signals.setdefault(k, []).append((i, -Fraction(num, den)))

    frozen = {t: tuple(v) for t, v in signals.items()}
    return BeamPlan(s, dict(gains), frozen)


def zf_dof(r: NetworkRealization, a: MessageAssignment) -> int:
    """Zero-forcing DoF of a realization: sum of greedy DoF over atomic blocks.

    Raises
    ------
    UnsupportedCooperationError
        If some transmit set has more than two transmitters.
    """
    if a.M > 2:
        raise UnsupportedCooperationError(f"cooperation order {a.M} > 2 is not supported")
    a.window_masks()
    return sum(schedule_atomic(sub).dof for sub in partition_atomic(r, a).subnetworks)
