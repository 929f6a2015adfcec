"""sinc functions and the smooth oversampling kernel.

The oversampling kernel is the tensor product ``g(t) = prod_i g1(t_i)`` with

    g1(t) = (1/2pi) * integral psi(xi) exp(i t xi) dxi
          = sinc(pi t) + (1/pi) * integral_{pi}^{lambda0 pi} psi(xi) cos(t xi) dxi,

where ``psi`` is a C-infinity profile equal to 1 on ``[-pi, pi]`` and 0 outside
``[-lambda0 pi, lambda0 pi]``.  On the integer lattice this normalization makes
``f(t) = (1/lambda) sum_n f(n/lambda) g(t - n/lambda)`` an identity for every
``f`` bandlimited to ``[-pi, pi]`` and ``lambda >= lambda0``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import expit

from . import _backend
from .errors import DomainError

_TAYLOR_CUTOFF = 1e-3

# cache keys are arguments rounded to this spacing
CACHE_RESOLUTION = 1e-9
# skip caching for requests with more distinct arguments than this
CACHE_BATCH_LIMIT = 200_000


def sinc(x):
    """``sin(x)/x`` with the removable singularity filled in."""
    x = np.asarray(x, dtype=np.float64)
    small = np.abs(x) < _TAYLOR_CUTOFF
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return out[()] if out.ndim == 0 else out


def sinc_nd(x):
    """Product of ``sinc`` over the last axis."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise DomainError("sinc_nd needs a non-empty vector")
    return np.prod(sinc(x), axis=-1)


def sinc_pi(x):
    """``sinc(pi x)`` with exact zeros at the nonzero integers."""
    x = np.asarray(x, dtype=np.float64)
    out = _backend.sinc_pi(x.ravel()).reshape(x.shape)
    return out[()] if out.ndim == 0 else out


def sinc_pi_nd(x):
    """``SINC(pi x) = prod_i sinc(pi x_i)`` over the last axis."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise DomainError("sinc_pi_nd needs a non-empty vector")
    return np.prod(sinc_pi(x), axis=-1)


@dataclass(frozen=True)
class BumpProfile:
    """Even band profile: 1 on ``[-pi, pi]``, 0 for ``|xi| >= lambda0 pi``.

    In the transition region ``psi(xi) = h(s)`` with
    ``s = (lambda0 pi - |xi|) / (lambda0 pi - pi)`` and
    ``h(s) = phi(s) / (phi(s) + phi(1 - s))``, ``phi(s) = exp(-1/s)``.
    """

    lambda0: float

    def __post_init__(self):
        if not np.isfinite(self.lambda0) or self.lambda0 <= 1.0:
            raise DomainError(f"lambda0 must be > 1, got {self.lambda0}")

    def __call__(self, xi):
        return bump(xi, self)


def bump(xi, profile):
    xi = np.abs(np.asarray(xi, dtype=np.float64))
    lam0 = profile.lambda0
    s = (lam0 * np.pi - xi) / (lam0 * np.pi - np.pi)
    inner = (s > 0.0) & (s < 1.0)
    sc = np.where(inner, s, 0.5)
    # h(s) = 1 / (1 + exp(1/s - 1/(1-s)))
    h = expit(1.0 / (1.0 - sc) - 1.0 / sc)
    out = np.where(s >= 1.0, 1.0, np.where(s <= 0.0, 0.0, h))
    return out[()] if out.ndim == 0 else out


class SmoothKernel:
    """Tensor-product oversampling kernel evaluated by Gauss-Legendre quadrature.

    One-dimensional values are cached by argument rounded to
    ``CACHE_RESOLUTION``; the kernel is always evaluated at the rounded
    argument, so results do not depend on call order.
    """

    def __init__(self, dim, lambda0=1.5, quad_order=64):
        if dim < 1:
            raise DomainError("dimension must be >= 1")
        if quad_order < 2:
            raise DomainError("quadrature order must be >= 2")
        self.dim = int(dim)
        self.profile = BumpProfile(float(lambda0))
        self.quad_order = int(quad_order)
        self._rules = {}
        self._cache = {}
        self._lock = threading.Lock()
        self._decay = None

    @property
    def lambda0(self):
        return self.profile.lambda0

    def __repr__(self):
        return f"SmoothKernel(dim={self.dim}, lambda0={self.lambda0}, quad_order={self.quad_order})"

    def _rule(self, panels):
        """Composite Gauss-Legendre nodes and profile-weighted weights on ``[pi, lambda0 pi]``."""
        rule = self._rules.get(panels)
        if rule is None:
            x, w = leggauss(self.quad_order)
            edges = np.linspace(np.pi, self.lambda0 * np.pi, panels + 1)
            half = 0.5 * np.diff(edges)
            mid = 0.5 * (edges[1:] + edges[:-1])
            xi = (mid[:, None] + half[:, None] * x[None, :]).ravel()
            wt = (half[:, None] * w[None, :]).ravel() * bump(xi, self.profile) / np.pi
            rule = (xi, wt)
            self._rules[panels] = rule
        return rule

    def _raw_g1(self, t):
        t = np.ascontiguousarray(t, dtype=np.float64).ravel()
        out = _backend.sinc_pi(t)
        # one panel resolves cos(t xi) while |t| * half-width <= Q / 2; split in powers of two beyond
        half = 0.5 * (self.lambda0 - 1.0) * np.pi
        need = np.abs(t) * half / (0.5 * self.quad_order)
        level = np.ceil(np.log2(np.maximum(need, 1.0))).astype(np.int64)
        for j in np.unique(level):
            sel = level == j
            xi, wt = self._rule(1 << int(j))
            out[sel] += _backend.cosine_sum(t[sel], xi, wt)
        return out

    def g1(self, t):
        """One-dimensional kernel, elementwise."""
        t = np.asarray(t, dtype=np.float64)
        flat = np.abs(t.ravel())
        keys = np.rint(flat / CACHE_RESOLUTION).astype(np.int64)
        ukeys, inverse = np.unique(keys, return_inverse=True)
        if ukeys.size > CACHE_BATCH_LIMIT:
            vals = self._raw_g1(ukeys * CACHE_RESOLUTION)
        else:
            cache = self._cache
            vals = np.empty(ukeys.size)
            missing = []
            for i, k in enumerate(ukeys.tolist()):
                v = cache.get(k)
                if v is None:
                    missing.append(i)
                else:
                    vals[i] = v
            if missing:
                miss = np.asarray(missing)
                fresh = self._raw_g1(ukeys[miss] * CACHE_RESOLUTION)
                vals[miss] = fresh
                with self._lock:
                    for k, v in zip(ukeys[miss].tolist(), fresh.tolist()):
                        cache.setdefault(k, v)
        out = vals[inverse].reshape(t.shape)
        return out[()] if out.ndim == 0 else out

    def __call__(self, t):
        """``g(t)`` for points stacked along the last axis (length ``dim``)."""
        t = np.asarray(t, dtype=np.float64)
        if t.shape[-1:] != (self.dim,):
            raise DomainError(f"expected trailing axis of length {self.dim}")
        out = np.prod(self.g1(t), axis=-1)
        return out[()] if out.ndim == 0 else out

    def decay_fit(self):
        """Power-law envelope ``|g1(t)| <= C |t|^-p`` fitted over ``5 <= |t| <= 80``.

        Returns ``(C, p)``; used only for remainder estimates.
        """
        if self._decay is None:
            Ts = np.array([5.0, 10.0, 20.0, 40.0])
            env = []
            for T in Ts:
                tt = np.linspace(T, 2 * T, 2001)
                env.append(np.abs(self._raw_g1(tt)).max())
            env = np.maximum(np.array(env), 1e-300)
            slope, icpt = np.polyfit(np.log(Ts), np.log(env), 1)
            p = max(-slope, 1.5)
            C = float(np.max(env * Ts ** p))
            self._decay = (C, float(p))
        return self._decay


def kernel_g(t, kernel):
    return kernel(t)


class TailSum(NamedTuple):
    value: np.ndarray
    remainder: np.ndarray


def g_tail_sum(t, ns, lam, kernel, l=None):
    """``sum_k |g(t - t_k / lam)|`` over the node window (or its first ``l`` entries).

    ``t`` is a single point or an (M, d) array.  The remainder is an estimate
    of the same sum over lattice points outside the window, using the fitted
    power-law envelope of ``g1`` and the product structure of ``g``.
    """
    if lam < kernel.lambda0:
        raise DomainError(f"lambda={lam} must be >= lambda0={kernel.lambda0}")
    t = np.asarray(t, dtype=np.float64)
    single = t.ndim == 1
    pts = np.atleast_2d(t)
    if pts.shape[-1] != ns.dim or kernel.dim != ns.dim:
        raise DomainError("dimension mismatch between points, nodes and kernel")
    nodes = ns.nodes if l is None else ns.head(l)
    m = pts.shape[0]
    value = np.zeros(m)
    if nodes.shape[0]:
        step = max(1, 2_000_000 // (nodes.shape[0] * ns.dim))
        for lo in range(0, m, step):
            diff = pts[lo:lo + step, None, :] - nodes[None, :, :] / lam
            value[lo:lo + step] = np.abs(kernel(diff)).sum(axis=1)
    remainder = _tail_remainder(pts, ns.window_radius, lam, kernel) if len(ns) else np.zeros(m)
    if single:
        return TailSum(value[0], remainder[0])
    return TailSum(value, remainder)


def _tail_remainder(pts, W, lam, kernel):
    C, p = kernel.decay_fit()
    grid = np.arange(-W, W + 1) / lam
    inside = np.abs(kernel.g1(pts[:, :, None] - grid[None, None, :])).sum(axis=2)
    edge = W / lam
    r_lo = pts + edge
    r_hi = edge - pts
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = lam * C * (np.maximum(r_lo, 0.5) ** (1 - p) + np.maximum(r_hi, 0.5) ** (1 - p)) / (p - 1)
    tail = np.where((r_lo > 0.5) & (r_hi > 0.5), tail, np.inf)
    return np.prod(inside + tail, axis=1) - np.prod(inside, axis=1)
