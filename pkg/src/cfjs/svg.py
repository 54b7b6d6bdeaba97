"""A small dependency-free SVG line-chart writer for sweep results."""

import math
from typing import Mapping, Sequence, Tuple
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = {"left": 72, "right": 150, "top": 40, "bottom": 52}
COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    step = (hi - lo) / count
    return [lo + i * step for i in range(count + 1)]


def line_chart(
    series: Mapping[str, Tuple[Sequence[float], Sequence[float]]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    log_y: bool = False,
) -> str:
    """Render ``{label: (xs, ys)}`` as an SVG document.

    Points that are not finite, or not positive on a log axis, are skipped.
    """
    clean = {}
    for label, (xs, ys) in series.items():
        pts = [
            (float(x), float(y)) for x, y in zip(xs, ys)
            if y is not None and math.isfinite(y) and (y > 0 or not log_y)
        ]
        clean[label] = [(x, math.log10(y) if log_y else y) for x, y in pts]

    allpts = [p for pts in clean.values() for p in pts] or [(0.0, 0.0)]
    x0, x1 = min(p[0] for p in allpts), max(p[0] for p in allpts)
    y0, y1 = min(p[1] for p in allpts), max(p[1] for p in allpts)
    if log_y:
        y0, y1 = math.floor(y0), math.ceil(y1)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return MARGIN["top"] + (1.0 - (y - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>',
    ]
    if log_y:
        yt = [float(v) for v in range(int(y0), int(y1) + 1)]
        step = max(1, len(yt) // 8)
        yt = yt[::step]
    else:
        yt = _ticks(y0, y1)
    for v in yt:
        label = f"1e{int(v)}" if log_y else f"{v:.3g}"
        out.append(f'<line x1="{MARGIN["left"] - 4}" x2="{MARGIN["left"]}" '
                   f'y1="{sy(v):.1f}" y2="{sy(v):.1f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 6}" y="{sy(v) + 4:.1f}" text-anchor="end">{label}</text>')
    for v in _ticks(x0, x1):
        out.append(f'<text x="{sx(v):.1f}" y="{MARGIN["top"] + ph + 18}" '
                   f'text-anchor="middle">{v:.3g}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.1f}" y="{HEIGHT - 12}" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{MARGIN["top"] + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.1f})">{escape(ylabel)}</text>')

    for idx, (label, pts) in enumerate(clean.items()):
        color = COLORS[idx % len(COLORS)]
        if len(pts) > 1:
            path = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in pts:
            out.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="2" fill="{color}"/>')
        ly = MARGIN["top"] + 14 + 18 * idx
        lx = WIDTH - MARGIN["right"] + 12
        out.append(f'<line x1="{lx}" x2="{lx + 18}" y1="{ly - 4}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 24}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
