"""Self-contained deterministic SVG charts (no plotting toolchain).

Charts are plain strings built from the data alone, so identical inputs
produce byte-identical files and plots can be golden-file tested.  Each
chart embeds its data table in a leading XML comment.
"""

from __future__ import annotations

import math

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")

_MARGIN_LEFT = 72
_MARGIN_RIGHT = 24
_MARGIN_TOP = 44
_MARGIN_BOTTOM = 56


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _fmt_tick(x: float) -> str:
    return f"{x:.6g}"


def _escape(text: str) -> str:
    return (
        str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


class _Axis:
    def __init__(self, lo: float, hi: float, pixels: tuple[float, float],
                 log: bool):
        if log:
            lo = max(lo, 1e-300)
            hi = max(hi, lo * 10.0)
            self.lo, self.hi = math.log10(lo), math.log10(hi)
        else:
            if hi <= lo:
                hi = lo + 1.0
            self.lo, self.hi = lo, hi
        self.p0, self.p1 = pixels
        self.log = log

    def place(self, value: float) -> float | None:
        v = value
        if self.log:
            if value <= 0.0:
                return None
            v = math.log10(value)
        frac = (v - self.lo) / (self.hi - self.lo)
        return self.p0 + frac * (self.p1 - self.p0)

    def ticks(self, count: int = 6):
        if self.log:
            lo, hi = math.floor(self.lo), math.ceil(self.hi)
            decades = range(lo, hi + 1)
            return [(10.0 ** e, self.place(10.0 ** e)) for e in decades]
        out = []
        for i in range(count):
            v = self.lo + (self.hi - self.lo) * i / (count - 1)
            out.append((v, self.place(v)))
        return out


def render_chart(series, *, title: str, xlabel: str, ylabel: str,
                 kind: str = "line", log_x: bool = False, log_y: bool = False,
                 width: int = 720, height: int = 480,
                 data_header: str | None = None, data_rows=None,
                 vlines=()) -> str:
    """Render labelled series as a standalone SVG string.

    ``series`` is a list of ``(label, xs, ys)``; ``kind`` is "line" or
    "bars".  ``vlines`` draws labelled vertical reference lines.  The
    optional data table (header string plus row iterables) is embedded in
    a comment block right after the SVG opening tag.
    """
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    if log_y:
        positive = [y for y in ys_all if y > 0]
        y_lo = min(positive) if positive else 0.1
        y_hi = max(positive) if positive else 1.0
    else:
        y_lo = min(0.0, min(ys_all)) if ys_all else 0.0
        y_hi = max(ys_all) if ys_all else 1.0
        if y_hi <= y_lo:
            y_hi = y_lo + 1.0
    x_values = list(xs_all) + [x for x, _ in vlines]
    x_lo = min(x_values) if x_values else 0.0
    x_hi = max(x_values) if x_values else 1.0

    x_axis = _Axis(x_lo, x_hi, (_MARGIN_LEFT, width - _MARGIN_RIGHT), log_x)
    y_axis = _Axis(y_lo, y_hi, (height - _MARGIN_BOTTOM, _MARGIN_TOP), log_y)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">'
    ]
    if data_header is not None:
        lines = [data_header]
        for row in data_rows or ():
            lines.append(",".join(_fmt_tick(v) if isinstance(v, float) else str(v)
                                  for v in row))
        table = "\n".join(lines).replace("--", "- -")
        parts.append(f"<!-- data\n{table}\n-->")
    parts.append(f'<rect width="{width}" height="{height}" fill="white"/>')

    # Frame and ticks.
    x0, x1 = _MARGIN_LEFT, width - _MARGIN_RIGHT
    y0, y1 = height - _MARGIN_BOTTOM, _MARGIN_TOP
    parts.append(
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
        f'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    for value, px in x_axis.ticks():
        if px is None:
            continue
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{y0}" x2="{_fmt(px)}" y2="{y0 + 5}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{y0 + 20}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif">'
            f"{_escape(_fmt_tick(value))}</text>"
        )
    for value, py in y_axis.ticks():
        if py is None:
            continue
        parts.append(
            f'<line x1="{x0 - 5}" y1="{_fmt(py)}" x2="{x0}" y2="{_fmt(py)}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 8}" y="{_fmt(py + 4)}" font-size="12" '
            f'text-anchor="end" font-family="sans-serif">'
            f"{_escape(_fmt_tick(value))}</text>"
        )

    parts.append(
        f'<text x="{(x0 + x1) // 2}" y="24" font-size="15" '
        f'text-anchor="middle" font-family="sans-serif">{_escape(title)}</text>'
    )
    parts.append(
        f'<text x="{(x0 + x1) // 2}" y="{height - 14}" font-size="13" '
        f'text-anchor="middle" font-family="sans-serif">{_escape(xlabel)}</text>'
    )
    parts.append(
        f'<text x="18" y="{(y0 + y1) // 2}" font-size="13" '
        f'text-anchor="middle" font-family="sans-serif" '
        f'transform="rotate(-90 18 {(y0 + y1) // 2})">{_escape(ylabel)}</text>'
    )

    for x_value, label in vlines:
        px = x_axis.place(x_value)
        if px is None:
            continue
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{y1}" x2="{_fmt(px)}" y2="{y0}" '
            f'stroke="#888888" stroke-width="1" stroke-dasharray="4,3"/>'
        )
        parts.append(
            f'<text x="{_fmt(px + 4)}" y="{y1 + 14}" font-size="11" '
            f'font-family="sans-serif" fill="#555555">{_escape(label)}</text>'
        )

    if kind == "bars":
        groups = sorted({x for _, xs, _ in series for x in xs})
        slot = (x1 - x0) / max(1, len(groups))
        bar_w = slot / (len(series) + 1)
        zero_y = y_axis.place(0.0) if not log_y else y0
        for s_index, (label, xs, ys) in enumerate(series):
            color = PALETTE[s_index % len(PALETTE)]
            lookup = dict(zip(xs, ys))
            for g_index, g in enumerate(groups):
                y = lookup.get(g)
                if y is None:
                    continue
                py = y_axis.place(y)
                if py is None:
                    continue
                left = x0 + g_index * slot + bar_w * (s_index + 0.5)
                top = min(py, zero_y if zero_y is not None else y0)
                height_px = abs((zero_y if zero_y is not None else y0) - py)
                parts.append(
                    f'<rect x="{_fmt(left)}" y="{_fmt(top)}" '
                    f'width="{_fmt(bar_w)}" height="{_fmt(height_px)}" '
                    f'fill="{color}" data-series="{_escape(label)}"/>'
                )
    else:
        for s_index, (label, xs, ys) in enumerate(series):
            color = PALETTE[s_index % len(PALETTE)]
            coords = []
            for x, y in zip(xs, ys):
                px, py = x_axis.place(x), y_axis.place(y)
                if px is None or py is None:
                    continue
                coords.append(f"{_fmt(px)},{_fmt(py)}")
            if coords:
                parts.append(
                    f'<polyline points="{" ".join(coords)}" fill="none" '
                    f'stroke="{color}" stroke-width="2" '
                    f'data-series="{_escape(label)}"/>'
                )

    for s_index, (label, _, _) in enumerate(series):
        color = PALETTE[s_index % len(PALETTE)]
        ly = _MARGIN_TOP + 16 * s_index + 8
        parts.append(
            f'<rect x="{x1 - 150}" y="{ly - 9}" width="12" height="12" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{x1 - 133}" y="{ly + 2}" font-size="12" '
            f'font-family="sans-serif">{_escape(label)}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
