"""Riesz-basis admissibility criteria for perturbed lattices.

* ``L < ln 2 / (pi d)`` -- Neumann-series criterion from the bound ``e^{pi L d} - 1``;
* ``D_d(L) < 1`` with ``D_d(L) = (1 - cos pi L + sin pi L + sinc(pi L))^d - sinc(pi L)^d``
  (Sun-Zhou), whose threshold ``x_d`` solves ``D_d(x_d) = 1``;
* for d = 1, ``limsup |n - t_n| < 1/4`` (Pak-Shin), checked on the outermost
  deviation shell of a finite window.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError
from .nodes import deviation_stats, separation_gap

_LO = 1e-6
# closed upper end: x_1 = 1/4 exactly
_HI = 0.25


def ln2_bound(d):
    if d < 1:
        raise DomainError("dimension must be >= 1")
    return float(np.log(2.0) / (np.pi * d))


def _sun_zhou(L, d):
    x = np.pi * np.asarray(L, dtype=np.float64)
    s = np.sin(x)
    x2 = x * x
    # sinc(x) - 1 and 1 - cos(x) without cancellation
    series = x2 * (-1 / 6 + x2 * (1 / 120 + x2 * (-1 / 5040 + x2 / 362880)))
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = (s - x) / x
    sm1 = np.where(x < 0.1, series, direct)
    one_minus_cos = 2.0 * np.sin(0.5 * x) ** 2
    if d == 1:
        return one_minus_cos + s
    with np.errstate(over="ignore"):
        return np.exp(d * np.log1p(one_minus_cos + s + sm1)) - np.exp(d * np.log1p(sm1))


def sun_zhou_D(L, d):
    """``D_d(L)`` for ``0 < L <= 1/4`` (the closed end gives Kadec's constant)."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if not 0.0 < L <= 0.25:
        raise DomainError(f"L must lie in (0, 1/4], got {L}")
    return float(_sun_zhou(L, d))


def _check_monotone(d, n=2001):
    xs = np.geomspace(_LO, _HI, n)
    vals = _sun_zhou(xs, d)
    fin = np.isfinite(vals)
    # once D overflows it stays infinite
    if fin.sum() < 2 or not np.all(fin[:fin.sum()]):
        raise RuntimeError(f"D_{d} is not finite on the start of the bracket")
    if not np.all(np.diff(vals[fin]) > 0):
        raise RuntimeError(f"D_{d} is not strictly increasing on the bracket")
    if not (vals[0] < 1.0 and (not fin[-1] or vals[-1] >= 1.0 - 1e-12)):
        raise RuntimeError(f"D_{d} - 1 does not change sign on the bracket")


def solve_x_d(d, check=True):
    """Root of ``D_d(x) = 1`` in (0, 1/4) by bisection."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if check:
        _check_monotone(d)
    x = bisect(lambda L: sun_zhou_D(L, d) - 1.0, _LO, _HI, xtol=1e-17, rtol=8.9e-16, maxiter=200)
    if abs(sun_zhou_D(x, d) - 1.0) > 1e-12:
        raise RuntimeError(f"bisection for x_{d} did not reach |D - 1| <= 1e-12")
    return float(x)


def asymptotic_ratio(d, x_d=None):
    """``(x_d - ln2/(pi d)) / ((ln 2)^2 / (12 pi d^2))``; tends to 1 as d grows."""
    if x_d is None:
        x_d = solve_x_d(d)
    return float((x_d - ln2_bound(d)) / (np.log(2.0) ** 2 / (12.0 * np.pi * d * d)))


@dataclass(frozen=True)
class KadecReport:
    d: int
    L: float
    ln2_bound: float
    D_value: float | None
    x_d: float
    ln2_pass: bool
    sun_zhou_pass: bool
    frame_bounds: tuple | None
    limsup_proxy: float | None = None
    pak_shin_pass: bool | None = None
    limsup_is_proxy: bool = True

    def rows(self):
        """(key, value) pairs for CSV output."""
        return [
            ("d", self.d),
            ("L", self.L),
            ("ln2_bound", self.ln2_bound),
            ("D_value", "" if self.D_value is None else self.D_value),
            ("x_d", self.x_d),
            ("ln2_pass", self.ln2_pass),
            ("sun_zhou_pass", self.sun_zhou_pass),
            ("frame_lower", "" if self.frame_bounds is None else self.frame_bounds[0]),
            ("frame_upper", "" if self.frame_bounds is None else self.frame_bounds[1]),
            ("limsup_proxy", "" if self.limsup_proxy is None else self.limsup_proxy),
            ("pak_shin_pass", "" if self.pak_shin_pass is None else self.pak_shin_pass),
        ]


def criteria_for(L, d):
    """Evaluate the sup-deviation criteria for a given ``L`` and dimension."""
    if L < 0:
        raise DomainError("L must be non-negative")
    bound = ln2_bound(d)
    xd = solve_x_d(d)
    if L == 0:
        D = 0.0
    elif L <= 0.25:
        D = sun_zhou_D(L, d)
    else:
        D = None
    sz = D is not None and D < 1.0
    fb = ((1.0 - D) ** 2, (1.0 + D) ** 2) if sz else None
    return KadecReport(d, float(L), bound, D, xd, bool(L < bound), bool(sz), fb)


def admissibility(ns):
    """All applicable criteria for a node window.

    For d = 1 the Pak-Shin limsup is replaced by the largest deviation on the
    outermost shell ``|n| = W`` (flagged through ``limsup_is_proxy``).
    """
    stats = deviation_stats(ns)
    rep = criteria_for(stats.sup_dev, ns.dim)
    if ns.dim != 1:
        return rep
    proxy = stats.tail_dev[-1][1]
    distinct = len(ns) < 2 or not separation_gap(ns).duplicate
    return KadecReport(
        rep.d, rep.L, rep.ln2_bound, rep.D_value, rep.x_d, rep.ln2_pass,
        rep.sun_zhou_pass, rep.frame_bounds, proxy, bool(proxy < 0.25 and distinct), True,
    )


def sweep(dmax):
    """Rows ``(d, ln2_bound, x_d, ratio)`` for d = 1..dmax."""
    rows = []
    for d in range(1, dmax + 1):
        xd = solve_x_d(d)
        rows.append((d, ln2_bound(d), xd, asymptotic_ratio(d, xd)))
    return rows
