"""Closed-form average per-user DoF curves as functions of the erasure probability.

Every curve vanishes at ``p = 1`` and carries a factor ``q = 1 - p``; the
``*_normalized`` variants return the curve divided by ``q`` with the limit at
``p = 1`` filled in, which is how the high-erasure asymptotes are read off.
All functions accept scalars or arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect


class NoCrossingError(ValueError):
    """Raised when two curves do not change order inside the bracket."""


def _q(p):
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p must lie in [0, 1]")
    return 1.0 - p


def _out(x, p):
    return float(x) if np.ndim(p) == 0 else x


def tau1_normalized(p):
    # odd-priority scheme; the geometric series over even-user swaps is summed:
    # sum_{i>=1} (1/2)(1-q^2)^2 q^(4i) = (1/2)(1-q^2) q^4 / (1+q^2)
    q = _q(p)
    s = 1 - q**2
    return _out(0.5 * (1 + s**2) + 0.5 * s * q**4 / (1 + q**2), p)


def tau2_normalized(p):
    q = _q(p)
    return _out(2 / 3 + (1 / 3) * (1 - q) * (1 - q**2), p)


def tau3_normalized(p):
    q = _q(p)
    return _out(0.5 + 0.25 * (1 - q**2) * (2 - q + q**3), p)


def zf_bound_thm4_normalized(p):
    q = _q(p)
    pp = 1 - q
    A = 2 * pp + (1 - q**2 + pp * q**3) * (1 + q**2)
    return _out((4 + A * pp) / 5, p)


def zf_bound_thm5_normalized(p):
    q = _q(p)
    pp = 1 - q
    B = 3 + (1 + q**3) * (1 - q**2 + pp * q**3) + pp * (1 + q**2)
    return _out((1 + q**3 + B * pp) / 3, p)


def _scaled(g):
    def f(p):
        return _out((1 - np.asarray(p, dtype=float)) * np.asarray(g(p)), p)

    f.__name__ = g.__name__.replace("_normalized", "")
    f.__doc__ = f"Average per-user DoF; equals ``(1 - p) * {g.__name__}(p)``."
    return f


tau1 = _scaled(tau1_normalized)
tau2 = _scaled(tau2_normalized)
tau3 = _scaled(tau3_normalized)
zf_bound_thm4 = _scaled(zf_bound_thm4_normalized)
zf_bound_thm5 = _scaled(zf_bound_thm5_normalized)

tau1.__doc__ = "Identity assignment, string (1): ``1/2`` at ``p = 0``."
tau2.__doc__ = "String (2,1,0): ``2/3`` at ``p = 0``."
tau3.__doc__ = "String (1,2,1,0): ``1/2`` at ``p = 0``."
zf_bound_thm4.__doc__ = "Period-5 cooperative assignment: ``4/5`` at ``p = 0``, slope ``7/5`` at ``p = 1``."
zf_bound_thm5.__doc__ = "Adjacent-pair cooperative assignment: ``2/3`` at ``p = 0``, slope 2 at ``p = 1``."


def tau_m1_normalized(p):
    return np.maximum(np.maximum(tau1_normalized(p), tau2_normalized(p)), tau3_normalized(p))


def tau_m1(p):
    """Best cell-association DoF: pointwise max of :func:`tau1`, :func:`tau2`, :func:`tau3`."""
    return np.maximum(np.maximum(tau1(p), tau2(p)), tau3(p))


def tau1_series(p, tol: float = 1e-15) -> float:
    """Term-by-term evaluation of the identity-scheme curve (reference for tests)."""
    q = 1.0 - p
    total = 0.5 * (q + q * (1 - q**2) ** 2)
    i = 1
    while True:
        term = 0.5 * (1 - q**2) ** 2 * q ** (4 * i + 1)
        total += term
        if term < tol:
            return total
        i += 1


CURVES = {
    "tau1": (tau1, tau1_normalized),
    "tau2": (tau2, tau2_normalized),
    "tau3": (tau3, tau3_normalized),
    "tau_m1": (tau_m1, tau_m1_normalized),
    "zf4": (zf_bound_thm4, zf_bound_thm4_normalized),
    "zf5": (zf_bound_thm5, zf_bound_thm5_normalized),
}


@dataclass(frozen=True)
class DofCurve:
    """A formula sampled on a grid of erasure probabilities."""

    label: str
    p_grid: np.ndarray
    values: np.ndarray

    @classmethod
    def evaluate(cls, label: str, p_grid) -> "DofCurve":
        p = np.sort(np.asarray(p_grid, dtype=float))
        return cls(label, p, np.asarray(CURVES[label][0](p), dtype=float))


def crossing_point(f, g, bracket=(0.0, 0.999), tol: float = 1e-6) -> float:
    """Erasure probability where curves ``f`` and ``g`` meet, by bisection.

    Raises
    ------
    NoCrossingError
        If ``f - g`` does not change sign on the bracket.
    """
    lo, hi = bracket
    d_lo = float(f(lo)) - float(g(lo))
    d_hi = float(f(hi)) - float(g(hi))
    if d_lo == 0 and d_hi == 0:
        raise NoCrossingError(f"f and g coincide at both ends of [{lo}, {hi}]")
    if d_lo == 0:
        return float(lo)
    if d_hi == 0:
        return float(hi)
    if np.sign(d_lo) == np.sign(d_hi):
        raise NoCrossingError(f"no sign change of f - g on [{lo}, {hi}]")
    return float(bisect(lambda x: float(f(x)) - float(g(x)), lo, hi, xtol=tol))


def formula_table(p_grid=None) -> dict:
    """Columns for every curve and its normalized version on a grid."""
    p = np.linspace(0.0, 1.0, 1001) if p_grid is None else np.asarray(p_grid, dtype=float)
    cols = {"p": p}
    for name, (f, _) in CURVES.items():
        cols[name] = np.asarray(f(p), dtype=float)
    for name, (_, g) in CURVES.items():
        cols[name + "_norm"] = np.asarray(g(p), dtype=float)
    return cols
