"""Sampling node sets: perturbed windows of the integer lattice.

A :class:`NodeSet` pairs every lattice point ``n_k`` of the cube
``{-W, ..., W}^d`` with a node ``t_k``.  Entries are ordered by ascending
sup-norm of ``n_k`` with ties broken lexicographically, so the first ``l``
entries of a window form the sections used by the Gram routines.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError

MAX_NODES = 2_000_000

MODES = ("lattice", "constant", "decaying", "random", "single")


@dataclass(frozen=True)
class NodeMode:
    """Generator descriptor kept alongside a node window."""

    kind: str
    delta: float = 0.0
    rho: float | None = None
    seed: int | None = None
    displacement: float | None = None


@dataclass(frozen=True, eq=False)
class NodeSet:
    dim: int
    lattice: np.ndarray
    nodes: np.ndarray
    window_radius: int
    mode: NodeMode | None = field(default=None)

    def __post_init__(self):
        lat = np.array(self.lattice, dtype=np.int64).reshape(-1, self.dim)
        nod = np.array(self.nodes, dtype=np.float64).reshape(-1, self.dim)
        if lat.shape != nod.shape:
            raise DomainError("lattice and node arrays differ in shape")
        if not np.all(np.isfinite(nod)):
            raise DomainError("node coordinates must be finite")
        lat.flags.writeable = False
        nod.flags.writeable = False
        object.__setattr__(self, "lattice", lat)
        object.__setattr__(self, "nodes", nod)

    def __len__(self):
        return self.lattice.shape[0]

    @property
    def deviations(self):
        """``t_k - n_k`` as an (N, d) array."""
        return self.nodes - self.lattice

    @property
    def shells(self):
        """Sup-norm ``||n_k||_inf`` of every lattice point."""
        return np.abs(self.lattice).max(axis=1)

    def head(self, l):
        """Node coordinates of the first ``l`` entries."""
        if not 0 <= l <= len(self):
            raise DomainError(f"section size {l} outside [0, {len(self)}]")
        return self.nodes[:l]

    def same_as(self, other):
        return (
            self.dim == other.dim
            and self.window_radius == other.window_radius
            and np.array_equal(self.lattice, other.lattice)
            and np.array_equal(self.nodes, other.nodes)
        )


class DeviationStats(NamedTuple):
    sup_dev: float
    tail_dev: list


class Separation(NamedTuple):
    gap: float
    radius: float
    duplicate: bool
    pair: tuple | None


def enumerate_cube(d, W):
    """Integer points of ``{-W..W}^d`` in sup-norm shells, lexicographic within a shell."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if W < 0:
        raise DomainError("window radius must be >= 0")
    count = (2 * W + 1) ** d
    if count > MAX_NODES:
        raise DomainError(f"(2W+1)^d = {count} exceeds the maximum of {MAX_NODES} entries")
    axes = np.arange(-W, W + 1)
    pts = np.stack(np.meshgrid(*([axes] * d), indexing="ij"), axis=-1).reshape(-1, d)
    # meshgrid with ij indexing is already lexicographic; stable sort keeps ties in order
    order = np.argsort(np.abs(pts).max(axis=1), kind="stable")
    return pts[order]


def gen_lattice(d, W):
    lat = enumerate_cube(d, W)
    return NodeSet(d, lat, lat.astype(np.float64), W, NodeMode("lattice"))


def gen_perturbed(d, W, mode, *, delta=0.0, rho=None, seed=None, displacement=None):
    """Perturbed lattice window.

    Parameters
    ----------
    mode : {"lattice", "constant", "decaying", "random", "single"}
        ``constant`` shifts every coordinate by ``delta``; ``decaying`` by
        ``delta * rho**||n||_inf``; ``random`` draws each coordinate of the
        deviation uniformly from ``[-delta, delta]`` using ``seed``;
        ``single`` moves only the origin to ``displacement`` (d = 1).
    """
    if mode not in MODES:
        raise DomainError(f"unknown node mode {mode!r}; expected one of {MODES}")
    if delta < 0 or not np.isfinite(delta):
        raise DomainError("delta must be a finite non-negative number")
    lat = enumerate_cube(d, W)
    dev = np.zeros(lat.shape)
    if mode == "constant":
        dev[:] = delta
    elif mode == "decaying":
        if rho is None or not 0.0 < rho < 1.0:
            raise DomainError("decaying mode needs 0 < rho < 1")
        dev[:] = (delta * rho ** np.abs(lat).max(axis=1))[:, None]
    elif mode == "random":
        if seed is None:
            raise DomainError("random mode needs a seed")
        dev = np.random.default_rng(seed).uniform(-delta, delta, size=lat.shape)
    elif mode == "single":
        if d != 1:
            raise DomainError("single-displaced mode is one-dimensional")
        if displacement is None or not np.isfinite(displacement):
            raise DomainError("single-displaced mode needs a finite displacement")
        if displacement != 0 and float(displacement).is_integer():
            raise DomainError("displacement must not be a nonzero integer")
        dev[0, 0] = displacement
    nodes = lat + dev
    return NodeSet(d, lat, nodes, W, NodeMode(mode, delta, rho, seed, displacement))


def deviation_stats(ns):
    if len(ns) == 0:
        raise DomainError("empty node set")
    dev = np.abs(ns.deviations).max(axis=1)
    shells = ns.shells
    per_shell = np.zeros(ns.window_radius + 1)
    np.maximum.at(per_shell, shells, dev)
    # max over shells >= r
    tail = np.maximum.accumulate(per_shell[::-1])[::-1]
    return DeviationStats(float(dev.max()), [(r, float(v)) for r, v in enumerate(tail)])


def separation_gap(ns):
    """Minimum pairwise Euclidean node distance and Beurling's radius (half of it)."""
    if len(ns) < 2:
        raise DomainError("separation needs at least two nodes")
    tree = cKDTree(ns.nodes)
    dist, idx = tree.query(ns.nodes, k=2)
    nearest = dist[:, 1]
    i = int(np.argmin(nearest))
    gap = float(nearest[i])
    dup = gap == 0.0
    pair = None
    if dup:
        # k=2 may return the point itself second when duplicated; search explicitly
        j = next(int(j) for j in tree.query_ball_point(ns.nodes[i], 0.0) if j != i)
        pair = tuple(sorted((i + 1, j + 1)))
    return Separation(gap, gap / 2.0, dup, pair)


def covering_radius(ns, window, resolution=0.01):
    """Grid-search estimate of ``sup_x min_k ||x - t_k||_2`` over a box.

    ``window`` is ``(lo, hi)`` with scalars or length-d sequences.  The box is
    sampled on a uniform grid with spacing at most ``resolution`` per axis, so
    the estimate is low by at most the grid half-diagonal.
    """
    if len(ns) == 0:
        raise DomainError("empty node set")
    if resolution <= 0:
        raise DomainError("resolution must be positive")
    lo = np.broadcast_to(np.asarray(window[0], dtype=float), (ns.dim,))
    hi = np.broadcast_to(np.asarray(window[1], dtype=float), (ns.dim,))
    if np.any(hi < lo):
        raise DomainError("window upper corner below lower corner")
    if np.any(lo < ns.nodes.min(axis=0)) or np.any(hi > ns.nodes.max(axis=0)):
        raise DomainError("search window must lie inside the node hull")
    axes = [np.linspace(a, b, max(1, int(np.ceil((b - a) / resolution)) + 1)) for a, b in zip(lo, hi)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, ns.dim)
    dist, _ = cKDTree(ns.nodes).query(pts)
    return float(dist.max())


def truncate_nodes(ns, l):
    """Keep ``t_k`` for the first ``l`` entries and reset the rest to the lattice."""
    if not 0 <= l <= len(ns):
        raise DomainError(f"truncation level {l} outside [0, {len(ns)}]")
    nodes = ns.lattice.astype(np.float64)
    nodes[:l] = ns.nodes[:l]
    return NodeSet(ns.dim, ns.lattice, nodes, ns.window_radius, ns.mode)


def _header(d):
    return ["k"] + [f"n_{i + 1}" for i in range(d)] + [f"t_{i + 1}" for i in range(d)]


def write_nodes_csv(ns, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_header(ns.dim))
        for k, (n, t) in enumerate(zip(ns.lattice, ns.nodes), start=1):
            w.writerow([k] + [int(v) for v in n] + [repr(float(v)) for v in t])


def read_nodes_csv(path):
    """Read a node file and check that it enumerates a full window in canonical order."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path}: empty node file")
    head = [h.strip() for h in rows[0]]
    if len(head) < 3 or head[0] != "k" or (len(head) - 1) % 2:
        raise DomainError(f"{path}: bad header {head!r}")
    d = (len(head) - 1) // 2
    if head != _header(d):
        raise DomainError(f"{path}: bad header {head!r}")
    body = rows[1:]
    try:
        k = np.array([int(r[0]) for r in body])
        lat = np.array([[int(v) for v in r[1:1 + d]] for r in body], dtype=np.int64).reshape(-1, d)
        nod = np.array([[float(v) for v in r[1 + d:1 + 2 * d]] for r in body]).reshape(-1, d)
    except (ValueError, IndexError) as exc:
        raise DomainError(f"{path}: malformed row ({exc})") from None
    if not np.array_equal(k, np.arange(1, len(body) + 1)):
        raise DomainError(f"{path}: indices must run 1..N in order")
    if len(body) == 0:
        raise DomainError(f"{path}: no entries")
    W = int(np.abs(lat).max())
    if not np.array_equal(lat, enumerate_cube(d, W)):
        raise DomainError(f"{path}: lattice column does not enumerate {{-{W}..{W}}}^{d} in canonical order")
    return NodeSet(d, lat, nod, W)
