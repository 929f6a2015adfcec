"""Static polyline SVG output with byte-deterministic formatting."""

from __future__ import annotations

from collections.abc import Mapping
from xml.sax.saxutils import escape

import numpy as np

from .errors import DomainError

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _as_series(series):
    if isinstance(series, Mapping):
        items = list(series.items())
    else:
        items = [("", series)]
    out = []
    for label, pts in items:
        arr = np.asarray(pts, dtype=np.float64)
        if arr.size == 0:
            continue
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise DomainError("series points must be (x, y) pairs")
        arr = arr[np.all(np.isfinite(arr), axis=1)]
        if arr.shape[0]:
            out.append((str(label), arr))
    return out


def emit_svg(series, path, *, width=640, height=400, title="", xlabel="", ylabel=""):
    """Write one polyline per series, framed by axes with min/max labels.

    ``series`` is a sequence of ``(x, y)`` pairs or a mapping from label to
    such a sequence.  Non-finite points are dropped; nothing left to draw
    raises :class:`DomainError`.
    """
    data = _as_series(series)
    if not data:
        raise DomainError("cannot plot an empty series")
    allpts = np.vstack([a for _, a in data])
    x0, y0 = allpts.min(axis=0)
    x1, y1 = allpts.max(axis=0)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    m = 50
    pw, ph = width - 2 * m, height - 2 * m

    def px(x):
        return m + (x - x0) / (x1 - x0) * pw

    def py(y):
        return m + (y1 - y) / (y1 - y0) * ph

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{m}" y1="{m + ph}" x2="{m + pw}" y2="{m + ph}" stroke="black"/>',
        f'<line x1="{m}" y1="{m}" x2="{m}" y2="{m + ph}" stroke="black"/>',
        f'<text x="{m}" y="{m + ph + 16}" font-size="11">{x0:.6g}</text>',
        f'<text x="{m + pw}" y="{m + ph + 16}" font-size="11" text-anchor="end">{x1:.6g}</text>',
        f'<text x="{m - 4}" y="{m + ph}" font-size="11" text-anchor="end">{y0:.6g}</text>',
        f'<text x="{m - 4}" y="{m + 10}" font-size="11" text-anchor="end">{y1:.6g}</text>',
    ]
    if title:
        lines.append(f'<text x="{width / 2:.1f}" y="{m / 2:.1f}" font-size="14" text-anchor="middle">{escape(title)}</text>')
    if xlabel:
        lines.append(f'<text x="{m + pw / 2:.1f}" y="{height - 10}" font-size="12" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        lines.append(f'<text x="14" y="{m + ph / 2:.1f}" font-size="12" text-anchor="middle" '
                     f'transform="rotate(-90 14 {m + ph / 2:.1f})">{escape(ylabel)}</text>')
    for i, (label, arr) in enumerate(data):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in arr)
        lines.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        if label:
            lines.append(f'<text x="{m + pw - 4}" y="{m + 14 * (i + 1)}" font-size="11" '
                         f'text-anchor="end" fill="{color}">{escape(label)}</text>')
    lines.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
