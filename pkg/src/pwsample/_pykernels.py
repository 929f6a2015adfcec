"""Pure-NumPy implementations of the hot loops.

These are the reference versions of the routines in ``_ckernels.pyx`` and are
used whenever the compiled extension is unavailable (or disabled through the
``PWSAMPLE_PURE_PYTHON`` environment variable).  Both modules expose the same
functions with the same signatures.
"""

import numpy as np

# cap on the number of float64 temporaries materialised per chunk
_CHUNK_ELEMS = 1 << 21

# below this |pi*x| the even Taylor polynomial is used
_TAYLOR_CUTOFF = 1e-3


def sinc_pi(x):
    """Elementwise ``sin(pi*x) / (pi*x)`` with exact zeros on the integers.

    The argument is reduced to ``r = x - round(x)`` before calling ``sin`` so
    that ``sin(pi*n)`` is exactly zero and large arguments keep full relative
    accuracy.
    """
    x = np.asarray(x, dtype=np.float64)
    n = np.rint(x)
    r = x - n
    s = np.sin(np.pi * r)
    s = np.where(np.fmod(n, 2.0) == 0.0, s, -s)
    y = np.pi * x
    small = np.abs(y) < _TAYLOR_CUTOFF
    safe = np.where(small, 1.0, y)
    y2 = y * y
    return np.where(small, 1.0 - y2 / 6.0 + y2 * y2 / 120.0, s / safe)


def gram_matrix(nodes):
    """Matrix of ``prod_i sinc(pi*(t_n[i] - t_m[i]))`` for an (l, d) node array."""
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    l, d = nodes.shape
    out = np.ones((l, l))
    for i in range(d):
        col = nodes[:, i]
        out *= sinc_pi(col[:, None] - col[None, :])
    return out


def sinc_synthesis(points, centers, coeffs):
    """Evaluate ``sum_k c_k prod_i sinc(pi*(x_i - s_{k,i}))`` at every point.

    ``points`` is (M, d), ``centers`` is (K, d) and ``coeffs`` is (K,).
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    m, d = points.shape
    k = centers.shape[0]
    out = np.empty(m)
    if k == 0:
        out[:] = 0.0
        return out
    step = max(1, _CHUNK_ELEMS // max(1, k * d))
    for lo in range(0, m, step):
        blk = points[lo:lo + step]
        prod = np.ones((blk.shape[0], k))
        for i in range(d):
            prod *= sinc_pi(blk[:, i, None] - centers[None, :, i])
        out[lo:lo + step] = prod @ coeffs
    return out


def cosine_sum(t, xi, w):
    """``sum_j w_j cos(t * xi_j)`` for every entry of the 1-D array ``t``."""
    t = np.ascontiguousarray(t, dtype=np.float64)
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    out = np.empty(t.shape[0])
    step = max(1, _CHUNK_ELEMS // max(1, xi.shape[0]))
    for lo in range(0, t.shape[0], step):
        out[lo:lo + step] = np.cos(np.outer(t[lo:lo + step], xi)) @ w
    return out


def log_abs_product(t, zeros, scales, skip=-1):
    """Log-magnitude and sign of ``prod_j scales_j * (t - zeros_j)``.

    Factor ``skip`` (if non-negative) is left out.  Returns ``(logabs, sign)``;
    a vanishing factor gives ``logabs = -inf`` and ``sign = 0``.
    """
    t = np.ascontiguousarray(t, dtype=np.float64)
    zeros = np.ascontiguousarray(zeros, dtype=np.float64)
    scales = np.ascontiguousarray(scales, dtype=np.float64)
    keep = np.ones(zeros.shape[0], dtype=bool)
    if skip >= 0:
        keep[skip] = False
    z = zeros[keep]
    sc = scales[keep]
    with np.errstate(divide="ignore"):
        logsc = np.log(np.abs(sc))
    sgnsc = np.prod(np.sign(sc))
    m = t.shape[0]
    logabs = np.empty(m)
    sign = np.empty(m)
    step = max(1, _CHUNK_ELEMS // max(1, z.shape[0]))
    for lo in range(0, m, step):
        diff = t[lo:lo + step, None] - z[None, :]
        with np.errstate(divide="ignore"):
            logabs[lo:lo + step] = np.log(np.abs(diff)).sum(axis=1) + logsc.sum()
        sign[lo:lo + step] = np.prod(np.sign(diff), axis=1) * sgnsc
    logabs[sign == 0.0] = -np.inf
    return logabs, sign
