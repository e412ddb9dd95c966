"""Small deterministic SVG line plots (no plotting dependency)."""
from __future__ import annotations

import math
from typing import Mapping, Sequence

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
W, H = 640, 400
ML, MR, MT, MB = 70, 20, 40, 50


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _ticks(lo: float, hi: float, n: int = 5) -> list:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def line_plot(series: Mapping[str, tuple], title: str = "", xlabel: str = "", ylabel: str = "",
              logx: bool = False) -> str:
    """``series`` maps a legend label to ``(xs, ys)``; non-finite points are skipped."""
    pts = {}
    for name, (xs, ys) in series.items():
        keep = [(math.log10(x) if logx else x, y) for x, y in zip(xs, ys)
                if math.isfinite(y) and (x > 0 or not logx)]
        pts[name] = keep
    allx = [p[0] for v in pts.values() for p in v] or [0.0, 1.0]
    ally = [p[1] for v in pts.values() for p in v] or [0.0, 1.0]
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1

    def sx(x):
        return ML + (x - x0) / (x1 - x0) * (W - ML - MR)

    def sy(y):
        return H - MB - (y - y0) / (y1 - y0) * (H - MT - MB)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-size="14">{_esc(title)}</text>',
           f'<line x1="{ML}" y1="{H - MB}" x2="{W - MR}" y2="{H - MB}" stroke="black"/>',
           f'<line x1="{ML}" y1="{MT}" x2="{ML}" y2="{H - MB}" stroke="black"/>']
    for t in _ticks(x0, x1):
        lab = f"1e{t:.2g}" if logx else f"{t:.4g}"
        out.append(f'<text x="{sx(t):.1f}" y="{H - MB + 16}" text-anchor="middle" font-size="10">{lab}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<text x="{ML - 6}" y="{sy(t) + 3:.1f}" text-anchor="end" font-size="10">{t:.4g}</text>')
    out.append(f'<text x="{W / 2:.1f}" y="{H - 12}" text-anchor="middle" font-size="12">{_esc(xlabel)}</text>')
    out.append(f'<text x="14" y="{H / 2:.1f}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 14 {H / 2:.1f})">{_esc(ylabel)}</text>')
    for k, (name, v) in enumerate(pts.items()):
        color = _COLORS[k % len(_COLORS)]
        if v:
            path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in v)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>')
        ly = MT + 14 * k
        out.append(f'<text x="{W - MR - 4}" y="{ly + 10}" text-anchor="end" font-size="11" '
                   f'fill="{color}">{_esc(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def save(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def scan_plot(rows: Sequence, title: str) -> str:
    xs = [r.qmax for r in rows]
    return line_plot({"U (sigma used in bound)": (xs, [r.u_hi for r in rows]),
                      "U (stated sigma)": (xs, [r.stated_hi for r in rows]),
                      "convergent lower bound": (xs, [r.lower_bound for r in rows])},
                     title=title, xlabel="Qmax", ylabel="truncated potential", logx=True)
