"""Self-contained SVG line plots (no plotting dependency; CSV stays the contract)."""

from __future__ import annotations

import numpy as np

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H, _PAD = 640, 420, 60


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** np.floor(np.log10(raw))
    step = min(s * mag for s in (1, 2, 5, 10) if s * mag >= raw)
    start = np.ceil(lo / step) * step
    return np.arange(start, hi + step / 2, step)


def write_line_plot(path, x, series: dict, title="", xlabel="", ylabel=""):
    """Render named y-series against shared x into an SVG file."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    finite = np.concatenate([v[np.isfinite(v)] for v in ys.values()])
    if len(finite) == 0:
        finite = np.array([0.0, 1.0])
    x0, x1 = float(x.min()), float(x.max()) if len(x) else (0.0, 1.0)
    y0, y1 = float(finite.min()), float(finite.max())
    if y1 - y0 < 1e-300:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad_y = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad_y, y1 + pad_y

    def sx(v):
        return _PAD + (v - x0) / (x1 - x0 or 1.0) * (_W - 2 * _PAD)

    def sy(v):
        return _H - _PAD - (v - y0) / (y1 - y0) * (_H - 2 * _PAD)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>']
    for tv in _ticks(x0, x1):
        parts.append(f'<line x1="{sx(tv):.1f}" y1="{_H - _PAD}" x2="{sx(tv):.1f}" '
                     f'y2="{_H - _PAD + 5}" stroke="black"/>')
        parts.append(f'<text x="{sx(tv):.1f}" y="{_H - _PAD + 18}" '
                     f'text-anchor="middle">{tv:g}</text>')
    for tv in _ticks(y0, y1):
        parts.append(f'<line x1="{_PAD - 5}" y1="{sy(tv):.1f}" x2="{_PAD}" '
                     f'y2="{sy(tv):.1f}" stroke="black"/>')
        parts.append(f'<text x="{_PAD - 8}" y="{sy(tv):.1f}" text-anchor="end" '
                     f'dominant-baseline="middle">{tv:g}</text>')
    parts.append(f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" '
                 f'height="{_H - 2 * _PAD}" fill="none" stroke="black"/>')
    for i, (name, y) in enumerate(ys.items()):
        pts = " ".join(f"{sx(xx):.2f},{sy(yy):.2f}" for xx, yy in zip(x, y)
                       if np.isfinite(yy))
        color = _COLORS[i % len(_COLORS)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        parts.append(f'<text x="{_W - _PAD - 8}" y="{_PAD + 16 + 16 * i}" '
                     f'text-anchor="end" fill="{color}">{name}</text>')
    if title:
        parts.append(f'<text x="{_W / 2}" y="24" text-anchor="middle" '
                     f'font-size="15">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{_W / 2}" y="{_H - 14}" text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="16" y="{_H / 2}" text-anchor="middle" '
                     f'transform="rotate(-90 16 {_H / 2})">{ylabel}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
