"""Self-contained SVG scatter plot with an identity line. Output depends only on the data."""

from __future__ import annotations

from xml.sax.saxutils import escape

WIDTH, HEIGHT, MARGIN = 480, 480, 60


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def scatter_svg(x, y, xlabel: str = "x", ylabel: str = "y", title: str = "") -> str:
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    if len(x) != len(y) or not x:
        raise ValueError("x and y must be non-empty and of equal length")
    lo = min(min(x), min(y))
    hi = max(max(x), max(y))
    pad = (hi - lo) * 0.05 or 0.5
    lo, hi = lo - pad, hi + pad
    span = hi - lo
    plot = WIDTH - 2 * MARGIN

    def px(v):
        return MARGIN + (v - lo) / span * plot

    def py(v):
        return HEIGHT - MARGIN - (v - lo) / span * plot

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{plot}" height="{plot}" fill="none" stroke="black"/>',
        f'<line x1="{_fmt(px(lo))}" y1="{_fmt(py(lo))}" x2="{_fmt(px(hi))}" y2="{_fmt(py(hi))}" '
        'stroke="grey" stroke-dasharray="4 3"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        v = lo + frac * span
        out.append(
            f'<text x="{_fmt(px(v))}" y="{HEIGHT - MARGIN + 16}" font-size="10" '
            f'text-anchor="middle">{v:.3g}</text>'
        )
        out.append(
            f'<text x="{MARGIN - 6}" y="{_fmt(py(v) + 3)}" font-size="10" '
            f'text-anchor="end">{v:.3g}</text>'
        )
    for a, b in zip(x, y):
        out.append(f'<circle cx="{_fmt(px(a))}" cy="{_fmt(py(b))}" r="3" fill="steelblue" fill-opacity="0.7"/>')
    out.append(
        f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 15}" font-size="12" text-anchor="middle">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="15" y="{HEIGHT / 2:.0f}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 15 {HEIGHT / 2:.0f})">{escape(ylabel)}</text>'
    )
    if title:
        out.append(f'<text x="{WIDTH / 2:.0f}" y="30" font-size="14" text-anchor="middle">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
