"""Reconstruction of bandlimited functions from nonuniform samples.

Two finite-section formulas are provided.  Both solve ``G_l c = samples`` with
the leading ``l x l`` Gram section ``G_l`` of the *unscaled* nodes:

* ``reconstruct_sinc``:  ``f(t) ~ sum_k c_k SINC(pi (t - t_k))`` from
  ``f(t_k)`` (no oversampling);
* ``reconstruct_oversampled``:  ``f(t) ~ lam^-d sum_k c_k g(t - t_k / lam)``
  from ``f(t_k / lam)`` with the smooth kernel ``g`` and ``lam >= lambda0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _backend
from .errors import DomainError
from .gram import build_section, solve_section
from .kernels import g_tail_sum

PERTURB_MODES = ("uniform", "alternating", "constant")


@dataclass(frozen=True, eq=False)
class SampleVector:
    values: np.ndarray
    lam: float
    provenance: str = "clean"
    eps: float = 0.0
    mode: str | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.lam < 1:
            raise DomainError(f"oversampling factor must be >= 1, got {self.lam}")
        if self.eps < 0:
            raise DomainError("perturbation magnitude must be non-negative")
        v = np.array(self.values, dtype=np.float64).reshape(-1)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.shape[0]


class ErrorMetrics(NamedTuple):
    sup: float
    rms: float


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    coefficients: np.ndarray
    grid: np.ndarray
    values: np.ndarray
    truth: np.ndarray | None = None
    metrics: ErrorMetrics | None = None


def make_grid(a, b, step, d=1):
    """Uniform tensor grid on ``[a, b]^d`` as an (M, d) array, endpoints included."""
    if step <= 0:
        raise DomainError("grid step must be positive")
    if b < a:
        raise DomainError("grid end below grid start")
    n = int(np.floor((b - a) / step + 1e-9)) + 1
    axis = a + step * np.arange(n)
    if d == 1:
        return axis[:, None]
    return np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)


def default_grid(ns, step=0.1):
    half = ns.window_radius / 2
    return make_grid(-half, half, step, ns.dim)


def parse_grid(spec, d=1):
    """Parse ``"a:b:step"``."""
    try:
        a, b, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise DomainError(f"grid spec {spec!r} is not a:b:step") from None
    return make_grid(a, b, step, d)


def sample(f, ns, l, lam=1.0, perturb=None, seed=None):
    """Exact samples ``f(t_k / lam)`` for the first ``l`` entries.

    ``perturb=(eps, mode)`` adds recorded noise with ``|noise_k| <= eps``;
    ``mode`` is ``uniform`` (seeded), ``alternating`` (``eps (-1)^k``) or
    ``constant``.  No reconstruction error bound is attached to such noise.
    """
    if lam < 1:
        raise DomainError(f"oversampling factor must be >= 1, got {lam}")
    if f.dim != ns.dim:
        raise DomainError("function and nodes differ in dimension")
    pts = ns.head(l) / lam
    values = np.asarray(_backend.sinc_synthesis(pts, f.centers, f.coeffs))
    if perturb is None:
        return SampleVector(values, lam)
    eps, mode = perturb
    if eps < 0:
        raise DomainError("perturbation magnitude must be non-negative")
    if mode == "uniform":
        if seed is None:
            raise DomainError("uniform sample perturbation needs a seed")
        noise = np.random.default_rng(seed).uniform(-eps, eps, size=l)
    elif mode == "alternating":
        noise = eps * (-1.0) ** np.arange(l)
    elif mode == "constant":
        noise = np.full(l, float(eps))
    else:
        raise DomainError(f"unknown perturbation mode {mode!r}; expected one of {PERTURB_MODES}")
    return SampleVector(values + noise, lam, "perturbed", float(eps), mode, seed)


def _check_grid(grid, d):
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim == 1 and d == 1:
        grid = grid[:, None]
    if grid.ndim != 2 or grid.shape[1] != d:
        raise DomainError(f"grid must be an (M, {d}) array")
    return grid


def _section_and_coeffs(ns, l, samples, section):
    if len(samples) != l:
        raise DomainError(f"{len(samples)} samples for a section of size {l}")
    if section is None:
        section = build_section(ns, l)
    elif section.l != l:
        raise DomainError("supplied section has the wrong size")
    return solve_section(section, samples.values)


def synthesize_sinc(coeffs, nodes, grid):
    return _backend.sinc_synthesis(grid, nodes, coeffs)


def synthesize_oversampled(coeffs, nodes, lam, kernel, grid):
    """``lam^-d sum_k c_k g(t - t_k / lam)`` on every grid point."""
    d = nodes.shape[1]
    out = np.empty(grid.shape[0])
    scaled = nodes / lam
    step = max(1, 2_000_000 // max(1, nodes.shape[0] * d))
    for lo in range(0, grid.shape[0], step):
        diff = grid[lo:lo + step, None, :] - scaled[None, :, :]
        out[lo:lo + step] = kernel(diff) @ coeffs
    return out / lam ** d


def reconstruct_sinc(ns, l, samples, grid, section=None):
    if samples.lam != 1:
        raise DomainError("the SINC formula uses unscaled samples (lam = 1)")
    grid = _check_grid(grid, ns.dim)
    c = _section_and_coeffs(ns, l, samples, section)
    vals = synthesize_sinc(c, ns.head(l), grid)
    return ReconstructionResult(c, grid, vals)


def reconstruct_oversampled(ns, l, samples, kernel, grid, section=None):
    lam = samples.lam
    if lam < kernel.lambda0:
        raise DomainError(f"lambda={lam} must be >= lambda0={kernel.lambda0}")
    if kernel.dim != ns.dim:
        raise DomainError("kernel and nodes differ in dimension")
    grid = _check_grid(grid, ns.dim)
    c = _section_and_coeffs(ns, l, samples, section)
    vals = synthesize_oversampled(c, ns.head(l), lam, kernel, grid)
    return ReconstructionResult(c, grid, vals)


def stability_bound(eps, grid, ns, lam, kernel, l=None):
    """Pointwise bound ``eps * sum_k |g(t - t_k / lam)|``.

    Valid for perturbations of the solved coefficient vector with sup-norm at
    most ``eps``; raw sample noise is not covered.
    """
    if eps < 0:
        raise DomainError("eps must be non-negative")
    grid = _check_grid(grid, ns.dim)
    return eps * g_tail_sum(grid, ns, lam, kernel, l=l).value


def error_report(truth, result):
    """Sup and root-mean-square error of a result against a ground truth.

    ``truth`` is a callable on (M, d) points or an array of values on the
    result grid.
    """
    if callable(truth):
        ref = np.asarray(truth(result.grid), dtype=np.float64).reshape(-1)
    else:
        ref = np.asarray(truth, dtype=np.float64).reshape(-1)
    if ref.shape != result.values.shape:
        raise DomainError("truth and reconstruction grids differ")
    err = np.abs(result.values - ref)
    return ErrorMetrics(float(err.max(initial=0.0)), float(np.sqrt(np.mean(err ** 2))) if err.size else 0.0)


def with_truth(result, truth):
    """Copy of ``result`` carrying ground-truth values and error metrics."""
    ref = np.asarray(truth(result.grid), dtype=np.float64).reshape(-1)
    return ReconstructionResult(
        result.coefficients, result.grid, result.values, ref, error_report(ref, result)
    )
