"""Finite sections of the Gram matrix of normalized exponentials.

For nodes ``t_1, t_2, ...`` the Gram matrix of ``(2 pi)^{-d/2} exp(i <t_k, x>)``
on ``[-pi, pi]^d`` has entries ``prod_i sinc(pi (t_{n,i} - t_{m,i}))``.  Its
leading ``l x l`` section is what reconstruction inverts; the explicit inverse of
that section approximates the coefficient operator ``B`` entrywise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from . import _backend
from .errors import DomainError, IllConditionedError
from .kernels import sinc_pi_nd
from .nodes import NodeSet

COND_MAX = 1e12
NEAR_DUPLICATE = 1e-6


def gram_entry(t_n, t_m):
    t_n = np.atleast_1d(np.asarray(t_n, dtype=np.float64))
    t_m = np.atleast_1d(np.asarray(t_m, dtype=np.float64))
    if t_n.shape != t_m.shape:
        raise DomainError("node dimensions differ")
    return float(sinc_pi_nd(t_n - t_m))


@dataclass(frozen=True, eq=False)
class GramSection:
    l: int
    nodes: np.ndarray
    matrix: np.ndarray
    factor: tuple
    condition: float

    def solve(self, rhs):
        return solve_section(self, rhs)


@dataclass(frozen=True, eq=False)
class BApprox:
    l: int
    matrix: np.ndarray

    def row(self, i):
        return self.matrix[i]

    def column(self, j):
        return self.matrix[:, j]


def _closest_pair(nodes):
    if nodes.shape[0] < 2:
        return None, np.inf
    from scipy.spatial import cKDTree

    dist, idx = cKDTree(nodes).query(nodes, k=2)
    i = int(np.argmin(dist[:, 1]))
    j = int(idx[i, 1]) if idx[i, 1] != i else int(idx[i, 0])
    return tuple(sorted((i + 1, j + 1))), float(dist[i, 1])


def build_section(ns, l, cond_max=COND_MAX):
    """Assemble and Cholesky-factor the leading ``l x l`` Gram section.

    Raises
    ------
    IllConditionedError
        If the factorization fails or the 1-norm condition estimate exceeds
        ``cond_max``.  A node pair closer than ``NEAR_DUPLICATE`` is named.
    """
    nodes = ns.head(l) if isinstance(ns, NodeSet) else np.asarray(ns, dtype=np.float64)
    if nodes.ndim == 1:
        nodes = nodes[:, None]
    l = nodes.shape[0]
    if l == 0:
        raise DomainError("empty section")
    G = _backend.gram_matrix(nodes)
    pair, gap = _closest_pair(nodes)
    named = pair if gap < NEAR_DUPLICATE else None
    try:
        c, lower = sla.cho_factor(G, lower=False, check_finite=False)
    except sla.LinAlgError:
        msg = "Gram section is not positive definite"
        if named:
            msg += f"; nodes {named[0]} and {named[1]} are {gap:.3g} apart"
        raise IllConditionedError(msg, pair=named) from None
    anorm = float(np.abs(G).sum(axis=0).max())
    rcond, info = lapack.dpocon(c, anorm, uplo="U")
    cond = np.inf if rcond == 0 else 1.0 / rcond
    if info != 0 or not cond <= cond_max:
        msg = f"Gram section condition estimate {cond:.3g} exceeds {cond_max:.3g}"
        if named:
            msg += f"; nodes {named[0]} and {named[1]} are {gap:.3g} apart"
        raise IllConditionedError(msg, pair=named, condition=cond)
    G.flags.writeable = False
    return GramSection(l, np.array(nodes), G, (c, lower), float(cond))


def solve_section(section, rhs):
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.shape[0] != section.l:
        raise DomainError(f"right-hand side has length {rhs.shape[0]}, section has {section.l}")
    return sla.cho_solve(section.factor, rhs, check_finite=False)


def section_B(section):
    """Explicit inverse of the section (entries approximate ``B_{kn}``)."""
    inv = sla.cho_solve(section.factor, np.eye(section.l), check_finite=False)
    # symmetrize away solver round-off
    inv = 0.5 * (inv + inv.T)
    return BApprox(section.l, inv)


def diff_norm(a, ns):
    """``|| sum_k a_k (e_k - f_k) ||_2`` computed exactly from the 2x2-block Gram.

    ``e_k`` and ``f_k`` are the normalized exponentials at ``n_k`` and ``t_k``;
    ``a`` covers the first ``len(a)`` entries of the window.
    """
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    if a.shape[0] > len(ns):
        raise DomainError("coefficient vector longer than the node window")
    k = a.shape[0]
    n = ns.lattice[:k].astype(np.float64)
    t = ns.nodes[:k]

    def cross(x, y):
        diff = x[:, None, :] - y[None, :, :]
        return _backend.sinc_pi(diff.reshape(-1)).reshape(diff.shape).prod(axis=-1)

    M = np.eye(k) - cross(n, t) - cross(t, n) + _backend.gram_matrix(t)
    q = float(a @ M @ a)
    return float(np.sqrt(max(q, 0.0)))


def perturbation_bound(L, d):
    """Operator-norm bound ``e^{pi L d} - 1`` for the lattice-to-node perturbation."""
    if L < 0:
        raise DomainError("L must be non-negative")
    if d < 1:
        raise DomainError("dimension must be >= 1")
    return float(np.expm1(np.pi * L * d))


def frame_bound_estimates(section):
    """Smallest and largest eigenvalue of the section."""
    w = sla.eigvalsh(section.matrix, check_finite=False)
    return float(w[0]), float(w[-1])
