"""Ground-truth bandlimited functions: finite sums of shifted SINC kernels."""

from __future__ import annotations

import csv
import itertools
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _backend
from .errors import DomainError


class TruncationWarning(UserWarning):
    """A truncated inner-product sum left a remainder above tolerance."""


@dataclass(frozen=True, eq=False)
class BandlimitedFn:
    """``f(t) = sum_j c_j SINC(pi (t - s_j))``, a member of PW on the cube [-pi, pi]^d."""

    dim: int
    centers: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.centers, dtype=np.float64).reshape(-1, self.dim)
        a = np.array(self.coeffs, dtype=np.float64).reshape(-1)
        if c.shape[0] != a.shape[0]:
            raise DomainError("centers and coeffs differ in length")
        c.flags.writeable = False
        a.flags.writeable = False
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "coeffs", a)

    def __call__(self, t):
        return evaluate(self, t)

    def __add__(self, other):
        if not isinstance(other, BandlimitedFn) or other.dim != self.dim:
            return NotImplemented
        return BandlimitedFn(
            self.dim,
            np.vstack([self.centers, other.centers]),
            np.concatenate([self.coeffs, other.coeffs]),
        )

    def scaled(self, factor):
        return BandlimitedFn(self.dim, self.centers, factor * self.coeffs)

    def on_lattice(self):
        return bool(np.all(self.centers == np.rint(self.centers)))


def sinc_kernel(dim, center=None):
    """The single kernel ``SINC(pi (t - center))``."""
    c = np.zeros((1, dim)) if center is None else np.asarray(center, dtype=float).reshape(1, dim)
    return BandlimitedFn(dim, c, [1.0])


def make_random(seed, K, d, spread, lattice=False):
    """Random combination of ``K`` kernels.

    Centers are uniform in ``[-spread, spread]^d`` (uniform integers when
    ``lattice`` is set); coefficients are uniform in ``[-1, 1]``.
    """
    if K < 1:
        raise DomainError("need at least one center")
    if spread < 0:
        raise DomainError("spread must be non-negative")
    rng = np.random.default_rng(seed)
    if lattice:
        s = int(np.floor(spread))
        centers = rng.integers(-s, s + 1, size=(K, d)).astype(np.float64)
    else:
        centers = rng.uniform(-spread, spread, size=(K, d))
    coeffs = rng.uniform(-1.0, 1.0, size=K)
    return BandlimitedFn(d, centers, coeffs)


def evaluate(f, t):
    """Exact evaluation at one point (shape (d,)) or at an (M, d) array of points."""
    t = np.asarray(t, dtype=np.float64)
    if f.dim == 1 and t.ndim <= 1 and t.shape[-1:] != (1,):
        pts = t.reshape(-1, 1)
        out = _backend.sinc_synthesis(pts, f.centers, f.coeffs)
        return out.reshape(t.shape)[()] if t.ndim == 0 else out
    if t.shape[-1] != f.dim:
        raise DomainError(f"expected points of dimension {f.dim}")
    pts = t.reshape(-1, f.dim)
    out = _backend.sinc_synthesis(pts, f.centers, f.coeffs)
    return out[0] if t.ndim == 1 else out.reshape(t.shape[:-1])


def pw_inner(f1, f2, *, k_max=None, tol=1e-8):
    """Inner product in the Paley-Wiener space (the L2(R^d) inner product).

    For two :class:`BandlimitedFn` values the reproducing-kernel identity
    ``<SINC(pi(.-a)), SINC(pi(.-b))> = SINC(pi(a-b))`` gives the exact value.
    Any other callable is handled by :func:`parseval_inner`; a remainder above
    ``tol`` raises :class:`TruncationWarning`.
    """
    if isinstance(f1, BandlimitedFn) and isinstance(f2, BandlimitedFn):
        if f1.dim != f2.dim:
            raise DomainError("dimension mismatch")
        diff = f1.centers[:, None, :] - f2.centers[None, :, :]
        g = _backend.sinc_pi(diff.reshape(-1)).reshape(diff.shape).prod(axis=-1)
        return float(f1.coeffs @ g @ f2.coeffs)
    dim = getattr(f1, "dim", None) or getattr(f2, "dim", None) or 1
    value, remainder = parseval_inner(f1, f2, dim=dim, k_max=k_max)
    if remainder > tol:
        warnings.warn(
            f"truncated sinc-basis sum: remainder estimate {remainder:.3g} > {tol:.3g}",
            TruncationWarning,
            stacklevel=2,
        )
    return value


def _centers_extent(f):
    c = getattr(f, "centers", None)
    return float(np.abs(c).max()) if c is not None and c.size else 0.0


def parseval_inner(f1, f2, *, dim=1, k_max=None):
    """``sum_{k in Z^d, |k|_inf <= K} f1(k) f2(k)`` with a tail estimate.

    Valid because ``{SINC(pi(. - k))}`` is an orthonormal basis whose
    coefficients are the integer samples.  The default ``K`` is
    ``10 * (max center + 10)``.  With ``S(r)`` the sum of ``|f1 f2|`` over the
    shell ``|k|_inf = r``, products of sinc tails give ``S(r) ~ C / r^2`` and a
    remainder ``~ C / K``; ``C`` is taken as the largest ``r^2 S(r)`` over the
    outer half of the window.
    """
    if k_max is None:
        k_max = int(10 * (max(_centers_extent(f1), _centers_extent(f2)) + 10))
    k_max = max(int(k_max), 1)
    axis = np.arange(-k_max, k_max + 1, dtype=np.float64)
    if dim == 1:
        pts = axis
    else:
        pts = np.array(list(itertools.product(axis, repeat=dim)))
    v1 = np.asarray(f1(pts), dtype=np.float64).reshape(-1)
    v2 = np.asarray(f2(pts), dtype=np.float64).reshape(-1)
    value = float(v1 @ v2)
    rad = np.abs(pts).reshape(len(v1), -1).max(axis=1).astype(np.int64)
    shell = np.bincount(rad, weights=np.abs(v1 * v2), minlength=k_max + 1)
    r = np.arange(k_max + 1)
    outer = r >= max(1, k_max // 2)
    remainder = float(np.max(r[outer] ** 2 * shell[outer])) / k_max
    return value, remainder


def read_function_csv(path):
    """Read rows ``c,s_1..s_d`` (optional header) into a :class:`BandlimitedFn`."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if rows and rows[0][0].strip() == "c":
        rows = rows[1:]
    if not rows:
        raise DomainError(f"{path}: no function terms")
    widths = {len(r) for r in rows}
    if len(widths) != 1 or min(widths) < 2:
        raise DomainError(f"{path}: rows must all be c,s_1..s_d")
    try:
        arr = np.array([[float(v) for v in r] for r in rows])
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from None
    return BandlimitedFn(arr.shape[1] - 1, arr[:, 1:], arr[:, 0])


def write_function_csv(f, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["c"] + [f"s_{i + 1}" for i in range(f.dim)])
        for c, s in zip(f.coeffs, f.centers):
            w.writerow([repr(float(c))] + [repr(float(v)) for v in s])
