"""Biorthogonal functions of perturbed sinc systems in one dimension.

For nodes ``t_{-l}, ..., t_l`` (``t_n != 0`` for ``n != 0``) and integer nodes
beyond ``l``, the generating product is

    H_l(t) = (t - t_0) prod_{1<=k<=l} (1 - t/t_k)(1 - t/t_{-k}) prod_{k>l} (1 - t^2/k^2)

and the biorthogonal functions are ``G_n(t) = H_l(t) / ((t - t_n) H_l'(t_n))``.
The infinite tail is ``Gamma(l+1)^2 / (Gamma(l+1-t) Gamma(l+1+t))``.  All
products are accumulated as log-magnitudes with separate signs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, gammasgn

from . import _backend
from .errors import DomainError
from .kernels import sinc_pi
from .nodes import NodeSet


@dataclass(frozen=True, eq=False)
class BiorthSystem:
    """Nodes ``t_{-l..l}`` stored in index order, i.e. ``nodes[n + l] = t_n``."""

    nodes: np.ndarray
    l: int

    def __post_init__(self):
        t = np.array(self.nodes, dtype=np.float64).reshape(-1)
        if t.shape[0] != 2 * self.l + 1:
            raise DomainError(f"expected {2 * self.l + 1} nodes for l = {self.l}")
        if not np.all(np.isfinite(t)):
            raise DomainError("nodes must be finite")
        idx = np.arange(-self.l, self.l + 1)
        if np.any(t[idx != 0] == 0.0):
            raise DomainError("t_n must be nonzero for n != 0")
        if np.unique(t).shape[0] != t.shape[0]:
            raise DomainError("nodes must be distinct")
        # the tail factors vanish at |k| > l, so those integers must stay free
        ints = np.rint(t[np.abs(t) >= self.l + 1 - 0.5])
        clash = t[np.abs(t) >= self.l + 1 - 0.5] == ints
        if np.any(clash):
            raise DomainError("a node coincides with a tail zero |k| > l")
        t.flags.writeable = False
        object.__setattr__(self, "nodes", t)

    def node(self, n):
        if abs(n) > self.l:
            return float(n)
        return float(self.nodes[n + self.l])

    @property
    def indices(self):
        return np.arange(-self.l, self.l + 1)

    @classmethod
    def lattice(cls, l):
        return cls(np.arange(-l, l + 1, dtype=np.float64), l)

    @classmethod
    def single_displaced(cls, D, l):
        t = np.arange(-l, l + 1, dtype=np.float64)
        t[l] = D
        return cls(t, l)

    @classmethod
    def from_nodeset(cls, ns, l):
        """Take ``t_n`` for ``|n| <= l`` from a one-dimensional window."""
        if not isinstance(ns, NodeSet) or ns.dim != 1:
            raise DomainError("biorthogonal systems are one-dimensional")
        if l > ns.window_radius:
            raise DomainError(f"l = {l} exceeds the window radius {ns.window_radius}")
        lat = ns.lattice[:, 0]
        t = np.empty(2 * l + 1)
        for n in range(-l, l + 1):
            t[n + l] = ns.nodes[np.flatnonzero(lat == n)[0], 0]
        return cls(t, l)


def _factors(system):
    t = system.nodes
    idx = system.indices
    # factor for n != 0 is (1 - x/t_n) = (-1/t_n)(x - t_n); for n = 0 it is (x - t_0)
    scales = np.where(idx == 0, 1.0, -1.0 / np.where(idx == 0, 1.0, t))
    return t, scales


def _log_tail(t, l):
    """log|tail| and sign of ``prod_{k>l} (1 - t^2/k^2)``."""
    a = l + 1 - t
    b = l + 1 + t
    pole = ((a <= 0) & (a == np.rint(a))) | ((b <= 0) & (b == np.rint(b)))
    with np.errstate(invalid="ignore"):
        logv = 2.0 * gammaln(l + 1.0) - gammaln(a) - gammaln(b)
        sign = gammasgn(a) * gammasgn(b)
    logv = np.where(pole, -np.inf, logv)
    sign = np.where(pole, 0.0, sign)
    return logv, sign


def _log_deflated(t, system, skip):
    """log-magnitude and sign of ``H_l(t)`` with factor ``skip`` removed (-1 keeps all)."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    zeros, scales = _factors(system)
    la, sa = _backend.log_abs_product(t, zeros, scales, skip)
    lt, st = _log_tail(t, system.l)
    return la + lt, sa * st


def H_eval(t, system):
    t_arr = np.asarray(t, dtype=np.float64)
    logv, sign = _log_deflated(t_arr.ravel(), system, -1)
    with np.errstate(over="ignore"):
        out = (sign * np.exp(logv)).reshape(t_arr.shape)
    return out[()] if out.ndim == 0 else out


def H_prime_at(m, system):
    """``H_l'(t_m)``: the deflated product at ``t_m`` times the removed factor's slope."""
    if abs(m) > system.l:
        raise DomainError(f"|m| = {abs(m)} exceeds l = {system.l}")
    j = m + system.l
    tm = system.nodes[j]
    logv, sign = _log_deflated([tm], system, j)
    slope = 1.0 if m == 0 else -1.0 / tm
    return float(slope * sign[0] * np.exp(logv[0]))


def G_eval(n, t, system):
    """``G_n(t)``, computed as the ratio ``R_n(t) / R_n(t_n)`` of deflated products.

    ``R_n`` is ``H_l`` with the factor vanishing at ``t_n`` removed, so the
    ratio equals ``H_l(t) / ((t - t_n) H_l'(t_n))`` and is exactly 1 at ``t_n``
    with no cancellation nearby.
    """
    if abs(n) > system.l:
        raise DomainError(f"|n| = {abs(n)} exceeds l = {system.l}")
    j = n + system.l
    t_arr = np.asarray(t, dtype=np.float64)
    num, snum = _log_deflated(t_arr.ravel(), system, j)
    den, sden = _log_deflated([system.nodes[j]], system, j)
    with np.errstate(over="ignore"):
        out = (snum * sden[0] * np.exp(num - den[0])).reshape(t_arr.shape)
    return out[()] if out.ndim == 0 else out


def biorth_residual(system, M, reference=None):
    """Matrix ``G_m(t_n) - delta_{nm}`` for ``|m| <= M``.

    Columns run over ``|n| <= M`` of the system itself, or over every node of
    ``reference`` (a 1-D :class:`NodeSet`, columns in index order ``-W..W``)
    when given; the latter measures biorthogonality against an untruncated
    sequence.
    """
    if not 0 <= M <= system.l:
        raise DomainError(f"M = {M} must lie in [0, l = {system.l}]")
    if reference is None:
        cols = np.arange(-M, M + 1)
        pts = np.array([system.node(n) for n in cols])
    else:
        if reference.dim != 1:
            raise DomainError("reference nodes must be one-dimensional")
        order = np.argsort(reference.lattice[:, 0], kind="stable")
        cols = reference.lattice[order, 0]
        pts = reference.nodes[order, 0]
    rows = np.arange(-M, M + 1)
    out = np.empty((rows.size, cols.size))
    for i, m in enumerate(rows):
        out[i] = G_eval(int(m), pts, system) - (cols == m)
    return out


def closed_form_B(m, n, D):
    """Entries of ``B`` for the system with only ``t_0 = D`` displaced."""
    if D != 0 and float(D).is_integer():
        raise DomainError("D must not be a nonzero integer")
    s = float(sinc_pi(D))
    if m == 0 and n == 0:
        return 1.0 / s ** 2
    if n == 0:
        return D * (-1.0) ** m / (s * (m - D))
    if m == 0:
        return D * (-1.0) ** n / (s * (n - D))
    return float(m == n) + D * D * (-1.0) ** (n + m) / ((n - D) * (m - D))


def closed_form_G(n, t, D):
    """Biorthogonal functions of the single-displaced system in closed form."""
    t = np.asarray(t, dtype=np.float64)
    s = float(sinc_pi(D))
    if n == 0:
        return sinc_pi(t) / s
    # sinc(pi t) / (t - n) has the limit (-1)^n / n at t = n
    near = t == n
    safe = np.where(near, 0.0, t - n)
    ratio = np.where(near, (-1.0) ** n / n, sinc_pi(t) / np.where(near, 1.0, safe))
    out = (-1.0) ** n * n * (t - D) * ratio / (n - D)
    return out[()] if out.ndim == 0 else out
