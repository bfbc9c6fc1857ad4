"""Static SVG line charts (mean curve with a one-standard-deviation band).

No plotting library is involved; the output is a small hand-built SVG
document with axes, tick labels, a legend and one ``<polyline>`` per curve.
"""

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 400
MARGIN = {"left": 70, "right": 130, "top": 40, "bottom": 50}
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(v)
        v += step
    return ticks


def _label(v):
    return f"{v:.3g}"


def line_chart(title, curves, xlabel="t", ylabel=""):
    """Render curves given as ``(label, t, mean, std_or_None)`` tuples."""
    xs = np.concatenate([np.asarray(c[1], float) for c in curves])
    lows, highs = [], []
    for _, _, mean, std in curves:
        mean = np.asarray(mean, float)
        spread = np.zeros_like(mean) if std is None else np.asarray(std, float)
        lows.append(mean - spread)
        highs.append(mean + spread)
    ylo = float(np.nanmin(np.concatenate(lows)))
    yhi = float(np.nanmax(np.concatenate(highs)))
    if yhi == ylo:
        pad = 1.0 if ylo == 0 else abs(ylo) * 0.1
        ylo, yhi = ylo - pad, yhi + pad
    xlo, xhi = float(xs.min()), float(xs.max())
    if xhi == xlo:
        xhi = xlo + 1.0

    left, top = MARGIN["left"], MARGIN["top"]
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return left + (x - xlo) / (xhi - xlo) * pw

    def py(y):
        return top + (yhi - y) / (yhi - ylo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">'
        f'{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for v in _ticks(xlo, xhi):
        x = px(v)
        out.append(f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" '
                   'stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{top + ph + 18}" text-anchor="middle">'
                   f'{_label(v)}</text>')
    for v in _ticks(ylo, yhi):
        y = py(v)
        out.append(f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" '
                   'stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end">{_label(v)}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">'
               f'{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(ylabel)}</text>')

    for i, (label, t, mean, std) in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        t = np.asarray(t, float)
        mean = np.asarray(mean, float)
        if std is not None:
            std = np.asarray(std, float)
            upper = [f"{px(a):.2f},{py(b):.2f}" for a, b in zip(t, mean + std)]
            lower = [f"{px(a):.2f},{py(b):.2f}" for a, b in zip(t[::-1], (mean - std)[::-1])]
            out.append(f'<polygon points="{" ".join(upper + lower)}" fill="{color}" '
                       'fill-opacity="0.18" stroke="none"/>')
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(t, mean))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.8"><title>{escape(label)}</title></polyline>')
        ly = top + 14 + 18 * i
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" '
                   'stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_chart(path, title, curves, xlabel="t", ylabel=""):
    with open(path, "w") as fh:
        fh.write(line_chart(title, curves, xlabel, ylabel))
