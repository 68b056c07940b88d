"""Monte Carlo estimation of the average per-user DoF.

Trials are generated in fixed blocks of :data:`BLOCK` realizations. Block
``b`` of a run with master seed ``s`` draws its links from
``child_seed(s, b)``, so results do not depend on how blocks are spread
over worker processes. Simulations deactivate the last transmitter.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import engines
from .assignment import MessageAssignment, Strategy, StrategyError, parse_strategy
from .formulas import tau_m1
from .network import (
    NetworkRealization,
    NetworkTopology,
    child_seed,
    sample_coefficients,
    sample_link_batch,
)
from .oracles import LEMMA_STRINGS
from .partition import partition_atomic
from .scheduler import build_beams, schedule_atomic

BLOCK = 1000
ENGINES = ("zf", "tdma", "lemma-scheme")
#: Two cells are tied when their means differ by at most this many combined standard errors.
TIE_Z = 3.0
CSV_FIELDS = ("p", "f", "K", "trials", "mean", "stderr", "seed")


class EngineMismatchError(RuntimeError):
    """Raised in debug mode when the batch engine and the reference disagree."""


@dataclass(frozen=True)
class DofEstimate:
    """Monte Carlo estimate of the per-user DoF of one strategy at one ``p``."""

    mean: float
    stderr: float
    trials: int
    K: int
    p: float
    strategy: str
    seed: int
    engine: str = "zf"
    f: Optional[Fraction] = None

    def row(self) -> dict:
        return {
            "p": repr(float(self.p)),
            "f": "" if self.f is None else str(self.f),
            "K": self.K,
            "trials": self.trials,
            "mean": repr(self.mean),
            "stderr": repr(self.stderr),
            "seed": self.seed,
        }


def _strategy(strategy) -> Strategy:
    if isinstance(strategy, Strategy):
        return strategy
    return parse_strategy(strategy)


def check_engine(strategy: Strategy, engine: str) -> None:
    """Reject engine/strategy combinations that cannot be evaluated."""
    if engine not in ENGINES:
        raise ValueError(f"engine: unknown engine {engine!r}, expected one of {ENGINES}")
    if engine == "tdma" and strategy.M != 1:
        raise StrategyError(f"engine: tdma needs one transmitter per message, strategy has M={strategy.M}")
    if engine == "lemma-scheme" and (
        strategy.kind != "ternary" or strategy.s not in LEMMA_STRINGS.values()
    ):
        raise StrategyError("engine: lemma-scheme needs ternary string (1), (2,1,0) or (1,2,1,0)")
    if engine == "zf" and strategy.M > 2:
        raise StrategyError(f"engine: zf supports M <= 2, strategy has M={strategy.M}")


def simulation_topology(K: int) -> NetworkTopology:
    return NetworkTopology(K, last_tx_deactivated=True)


def _block_links(K, p, seed, b, size):
    direct, cross = sample_link_batch(K, p, size, child_seed(seed, b))
    direct[:, K - 1] = False
    return direct, cross


def trial_realization(K: int, p: float, seed: int, trial: int) -> NetworkRealization:
    """Realization used by ``trial`` of a run; matches the batch engines exactly."""
    b, row = divmod(trial, BLOCK)
    size = BLOCK
    rng_direct, rng_cross = sample_link_batch(K, p, size, child_seed(seed, b))
    present = np.empty(2 * K - 1, dtype=bool)
    present[0::2] = rng_direct[row]
    present[1::2] = rng_cross[row, 1:]
    return NetworkRealization(simulation_topology(K), present)


def _run_block(args):
    strategy, a, K, p, seed, b, size, engine = args
    direct, cross = _block_links(K, p, seed, b, BLOCK)
    D = np.ascontiguousarray(direct[:size].T)
    C = np.ascontiguousarray(cross[:size].T)
    if engine == "zf":
        return engines.zf_batch(D, C, a.window_masks())
    if engine == "tdma":
        offsets = np.array([s[0] - i for i, s in enumerate(a.transmit_sets, start=1)])
        return engines.tdma_batch(D, C, offsets)
    which = next(k for k, v in LEMMA_STRINGS.items() if v == strategy.s)
    return engines.lemma_batch(D, C, which)


def trial_dof(strategy, K: int, p: float, trials: int, seed: int, engine: str = "zf",
              workers: int = 1) -> np.ndarray:
    """Delivered-message count of every trial, in trial order."""
    strategy = _strategy(strategy)
    check_engine(strategy, engine)
    if trials < 1:
        raise ValueError(f"trials: must be positive, got {trials}")
    if not 0 <= p <= 1:
        raise ValueError(f"p: must lie in [0, 1], got {p}")
    a = strategy.assignment(K)
    jobs = []
    for b in range(math.ceil(trials / BLOCK)):
        size = min(BLOCK, trials - b * BLOCK)
        jobs.append((strategy, a, K, p, seed, b, size, engine))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, jobs))
    else:
        parts = [_run_block(j) for j in jobs]
    return np.concatenate(parts)


def reference_dof(a: MessageAssignment, r: NetworkRealization, coeff_seed: Optional[int] = None) -> int:
    """Per-realization DoF through the readable path, optionally checking beams."""
    total = 0
    coeffs = None if coeff_seed is None else sample_coefficients(r, coeff_seed)
    for sub in partition_atomic(r, a).subnetworks:
        sched = schedule_atomic(sub)
        if coeffs is not None and not build_beams(sched, coeffs).verify():
            raise EngineMismatchError(f"beam verification failed on {sub.describe()}")
        total += sched.dof
    return total


def estimate(strategy, K: int, p: float, trials: int, seed: int, engine: str = "zf",
             workers: int = 1, debug: bool = False) -> DofEstimate:
    """Average per-user DoF over ``trials`` random realizations.

    Parameters
    ----------
    strategy : Strategy, dict or str
        Strategy object or its JSON description.
    engine : {"zf", "tdma", "lemma-scheme"}
    debug : bool
        Recompute every trial through the readable reference path (with exact
        beam checks) and require agreement with the batch engine.
    """
    strategy = _strategy(strategy)
    counts = trial_dof(strategy, K, p, trials, seed, engine, workers)
    if debug:
        _debug_check(strategy, counts, K, p, seed, engine)
    x = counts / K
    mean = float(x.mean())
    stderr = float(x.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    f = strategy.f if strategy.kind == "fraction" else None
    return DofEstimate(mean, stderr, trials, K, float(p), strategy.describe(), int(seed), engine, f)


def _debug_check(strategy, counts, K, p, seed, engine):
    from .oracles import lemma2_4_scheme_dof, tdma_optimal

    a = strategy.assignment(K)
    for t, got in enumerate(counts):
        r = trial_realization(K, p, seed, t)
        if engine == "zf":
            want = reference_dof(a, r, coeff_seed=child_seed(seed, 1 << 20, t))
        elif engine == "tdma":
            want = tdma_optimal(r, a)
        else:
            which = next(k for k, v in LEMMA_STRINGS.items() if v == strategy.s)
            want = lemma2_4_scheme_dof(r, a, which)
        if want != got:
            raise EngineMismatchError(f"trial {t}: batch engine {got}, reference {want}")


# ---------------------------------------------------------------------------
# Sweeps

def fraction_grid(step=Fraction(1, 100)) -> list:
    step = Fraction(step)
    return [k * step for k in range(int(1 / step) + 1)]


@dataclass
class SweepResult:
    """Grid of estimates indexed by erasure probability and forward fraction."""

    cells: list = field(default_factory=list)

    def by_p(self) -> dict:
        out = {}
        for est in self.cells:
            out.setdefault(est.p, []).append(est)
        return out

    def best(self) -> list:
        """Per ``p``: the best fraction and every fraction statistically tied with it."""
        rows = []
        for p, ests in sorted(self.by_p().items()):
            top = max(ests, key=lambda e: (e.mean, -e.f))
            ties = sorted(
                e.f for e in ests
                if top.mean - e.mean <= TIE_Z * math.hypot(top.stderr, e.stderr)
            )
            rows.append({"p": p, "best_f": top.f, "mean": top.mean, "stderr": top.stderr, "ties": ties})
        return rows


def sweep_fraction(K: int, trials: int, p_grid, f_grid, seed: int, workers: int = 1) -> SweepResult:
    """Estimate every ``(p, f)`` cell of the fraction family with independent seeds."""
    result = SweepResult()
    for ip, p in enumerate(p_grid):
        for jf, f in enumerate(f_grid):
            s = Strategy("fraction", f=Fraction(f))
            cell_seed = child_seed(seed, ip, jf)
            result.cells.append(estimate(s, K, p, trials, cell_seed, "zf", workers))
    return result


M1_STRINGS = ((1,), (2, 1, 0), (1, 2, 1, 0))
M2_FIXED = ("theorem4", "theorem5")
COMPARE_FIELDS = ("p", "tau_m1", "m1_mean", "m1_stderr", "m1_strategy", "m2_mean", "m2_stderr", "m2_strategy")


def compare_m1_m2(K: int, trials: int, p_grid, seed: int, f_grid=None, workers: int = 1) -> list:
    """Best cell-association estimate versus the best two-transmitter estimate per ``p``.

    Two-transmitter candidates are every member of the fraction family on
    ``f_grid`` plus the two fixed cooperative assignments; ``m2_strategy``
    names the winner.
    """
    f_grid = fraction_grid() if f_grid is None else list(f_grid)
    rows = []
    for ip, p in enumerate(p_grid):
        m1 = [
            estimate(Strategy("ternary", s=s), K, p, trials, child_seed(seed, ip, 0, k), "tdma", workers)
            for k, s in enumerate(M1_STRINGS)
        ]
        m2 = sweep_fraction(K, trials, [p], f_grid, child_seed(seed, ip, 1), workers).cells
        m2 += [
            estimate(Strategy(kind), K, p, trials, child_seed(seed, ip, 2, k), "zf", workers)
            for k, kind in enumerate(M2_FIXED)
        ]
        b1 = max(m1, key=lambda e: e.mean)
        b2 = max(m2, key=lambda e: e.mean)
        rows.append({
            "p": float(p),
            "tau_m1": float(tau_m1(p)),
            "m1_mean": b1.mean,
            "m1_stderr": b1.stderr,
            "m1_strategy": b1.strategy,
            "m2_mean": b2.mean,
            "m2_stderr": b2.stderr,
            "m2_strategy": b2.strategy,
        })
    return rows


def write_csv(path, rows, fields) -> None:
    """Write dictionaries as CSV with a header, creating parent directories."""
    path = os.fspath(path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(fields))
        w.writeheader()
        for row in rows:
            w.writerow({k: row[k] for k in fields})
