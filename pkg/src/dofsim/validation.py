"""Enumeration and random generation of atomic subnetworks, and the
scheduler-versus-oracle checks built on them.

A two-transmitter assignment gives message ``i`` one of the pairs
``{i-2, i-1}``, ``{i-1, i}`` or ``{i, i+1}``. After topology reduction, the
local sets of an atomic block are these pairs intersected with the member
transmitters; sets shrink to one element only at the block boundary. This
is the class enumerated here. The ``mixed`` class also allows single
transmitters anywhere.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .oracles import brute_force_zf, converse_bound_n5, verify_certificate
from .partition import AtomicSubnetwork
from .scheduler import build_beams, schedule_atomic

BOUNDARY_CASES = ((False, False), (False, True), (True, False), (True, True))


def _pairs(i):
    return [(i - 2, i - 1), (i - 1, i), (i, i + 1)]


def _singles_and_pairs(i):
    return [(i - 1,), (i,)] + _pairs(i)


def _members(N, tx0, txN):
    return set(range(1, N)) | ({0} if tx0 else set()) | ({N} if txN else set())


def _build(sets, tx0, txN):
    try:
        sub = AtomicSubnetwork(1, sets)
    except ValueError:
        return None
    if sub.tx0_in != tx0 or sub.txN_in != txN or not sub.is_atomic():
        return None
    return sub


def enumerate_atomic(N: int, tx0: bool, txN: bool, mixed: bool = False):
    """Every atomic block of size ``N`` with the given boundary membership."""
    members = _members(N, tx0, txN)
    choices = _singles_and_pairs if mixed else _pairs
    seen = set()
    for combo in itertools.product(*[choices(i) for i in range(1, N + 1)]):
        sets = tuple(tuple(t for t in s if t in members) for s in combo)
        if sets in seen:
            continue
        seen.add(sets)
        sub = _build(sets, tx0, txN)
        if sub is not None:
            yield sub


def random_atomic(rng: np.random.Generator, N: int, tx0: bool, txN: bool, mixed: bool = False):
    """Uniform draw (by rejection) from the blocks of :func:`enumerate_atomic`."""
    members = _members(N, tx0, txN)
    choices = _singles_and_pairs if mixed else _pairs
    while True:
        sets = []
        for i in range(1, N + 1):
            opts = choices(i)
            s = opts[rng.integers(len(opts))]
            sets.append(tuple(t for t in s if t in members))
        sub = _build(tuple(sets), tx0, txN)
        if sub is not None:
            return sub


@dataclass
class CheckCell:
    """Outcome of one (N, class, boundary) cell of a validation run."""

    N: int
    klass: str
    tx0: bool
    txN: bool
    count: int = 0
    failures: int = 0
    first_failure: str = ""

    def fail(self, text: str):
        self.failures += 1
        if not self.first_failure:
            self.first_failure = text


@dataclass
class CheckReport:
    cells: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.failures == 0 for c in self.cells)

    @property
    def total(self) -> int:
        return sum(c.count for c in self.cells)

    def lines(self) -> list:
        out = []
        for c in self.cells:
            status = "PASS" if c.failures == 0 else "FAIL"
            out.append(
                f"{status} N={c.N} class={c.klass} tx0={'in' if c.tx0 else 'out'} "
                f"txN={'in' if c.txN else 'out'} instances={c.count} failures={c.failures}"
            )
        first = next((c.first_failure for c in self.cells if c.first_failure), "")
        if first:
            out.append("first counterexample:")
            out.append(first)
        return out


def _explain(sub, sched, bf, extra=""):
    return (
        f"local sets={list(sub.local_sets)} tx0_in={sub.tx0_in} txN_in={sub.txN_in}\n"
        f"greedy dof={sched.dof} brute force={bf}{extra}\n{sched.describe()}"
    )


def check_instance(sub: AtomicSubnetwork, seed: int, converse: bool):
    """Compare greedy, brute force, beams and (N=5) the converse; return error text or ''."""
    sched = schedule_atomic(sub)
    bf = brute_force_zf(sub, seed=seed)
    if sched.dof != bf:
        return _explain(sub, sched, bf)
    if not build_beams(sched, sub.random_gains(seed + 1)).verify():
        return _explain(sub, sched, bf, " (beam verification failed)")
    if converse and sub.N == 5:
        cert = converse_bound_n5(sub)
        if not verify_certificate(cert, sub) or cert.bound != bf:
            return _explain(sub, sched, bf, f" converse A={sorted(cert.A)}")
    return ""


def sandwich_check(max_n: int = 5, mixed: bool = False, seed: int = 0) -> CheckReport:
    """Exhaustive greedy/brute-force/converse comparison for ``N <= max_n``."""
    report = CheckReport()
    klass = "mixed" if mixed else "pairs"
    for N in range(1, max_n + 1):
        for tx0, txN in BOUNDARY_CASES:
            cell = CheckCell(N, klass, tx0, txN)
            for k, sub in enumerate(enumerate_atomic(N, tx0, txN, mixed)):
                cell.count += 1
                err = check_instance(sub, seed + k, converse=not mixed)
                if err:
                    cell.fail(err)
            report.cells.append(cell)
    return report


def random_check(count: int, max_n: int = 10, seed: int = 0, mixed: bool = False) -> CheckReport:
    """Greedy versus brute force on ``count`` random blocks with ``N <= max_n``."""
    rng = np.random.default_rng(seed)
    klass = "mixed" if mixed else "pairs"
    cells = {}
    for k in range(count):
        N = int(rng.integers(1, max_n + 1))
        tx0, txN = BOUNDARY_CASES[int(rng.integers(4))]
        if N == 1 and not (tx0 or txN):
            tx0 = True
        sub = random_atomic(rng, N, tx0, txN, mixed)
        cell = cells.setdefault((N, tx0, txN), CheckCell(N, klass, tx0, txN))
        cell.count += 1
        err = check_instance(sub, int(rng.integers(2**31)), converse=False)
        if err:
            cell.fail(err)
    return CheckReport([cells[k] for k in sorted(cells)])
