"""Minimal standalone SVG line plots from CSV text.

No external plotting dependency and no timestamps: identical input always
produces byte-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidArgumentError

__all__ = ["PlotStyle", "render_svg"]


@dataclass(frozen=True)
class PlotStyle:
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    vlines: tuple = ()
    width: int = 720
    height: int = 480
    margin: int = 64
    n_ticks: int = 5
    stroke: str = "#1f4e9c"


def _parse_csv_xy(csv_content: str) -> tuple[list[float], list[float]]:
    """First two numeric columns after the header; rows with an empty second
    field are skipped (flagged-out scan rows)."""
    xs: list[float] = []
    ys: list[float] = []
    header_seen = False
    for raw in csv_content.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) < 2:
            raise InvalidArgumentError(f"row has fewer than two fields: {line!r}")
        if fields[1].strip() == "":
            continue
        try:
            xs.append(float(fields[0]))
            ys.append(float(fields[1]))
        except ValueError:
            raise InvalidArgumentError(f"non-numeric row: {line!r}") from None
    return xs, ys


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def render_svg(csv_content: str, style: PlotStyle = PlotStyle()) -> str:
    """Render the first two CSV columns as a polyline with axes and ticks."""
    xs, ys = _parse_csv_xy(csv_content)
    if len(xs) < 2:
        raise InvalidArgumentError("need at least 2 data rows to plot")

    x_lo, x_hi = min(xs), max(xs)
    if style.vlines:
        x_lo = min(x_lo, min(style.vlines))
        x_hi = max(x_hi, max(style.vlines))
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    # headroom so the curve does not sit on the frame
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    m = style.margin
    plot_w = style.width - 2 * m
    plot_h = style.height - 2 * m

    def px(x: float) -> float:
        return m + plot_w * (x - x_lo) / (x_hi - x_lo)

    def py(y: float) -> float:
        return style.height - m - plot_h * (y - y_lo) / (y_hi - y_lo)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" '
        f'height="{style.height}" viewBox="0 0 {style.width} {style.height}">',
        f'<rect width="{style.width}" height="{style.height}" fill="white"/>',
        f'<rect x="{m}" y="{m}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black"/>',
    ]

    for k in range(style.n_ticks + 1):
        xv = x_lo + k * (x_hi - x_lo) / style.n_ticks
        yv = y_lo + k * (y_hi - y_lo) / style.n_ticks
        xp, yp = px(xv), py(yv)
        parts.append(
            f'<line x1="{xp:.2f}" y1="{style.height - m}" x2="{xp:.2f}" '
            f'y2="{style.height - m + 6}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{xp:.2f}" y="{style.height - m + 20}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{_fmt(xv)}</text>'
        )
        parts.append(
            f'<line x1="{m - 6}" y1="{yp:.2f}" x2="{m}" y2="{yp:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{m - 9}" y="{yp + 4:.2f}" font-size="11" '
            f'text-anchor="end" font-family="sans-serif">{_fmt(yv)}</text>'
        )

    for xv in style.vlines:
        if x_lo <= xv <= x_hi:
            parts.append(
                f'<line x1="{px(xv):.2f}" y1="{m}" x2="{px(xv):.2f}" '
                f'y2="{style.height - m}" stroke="#888888" stroke-dasharray="5,4"/>'
            )

    points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    parts.append(
        f'<polyline points="{points}" fill="none" stroke="{style.stroke}" '
        'stroke-width="1.6"/>'
    )

    if style.title:
        parts.append(
            f'<text x="{style.width / 2:.0f}" y="{m - 16}" font-size="15" '
            f'text-anchor="middle" font-family="sans-serif">{style.title}</text>'
        )
    if style.x_label:
        parts.append(
            f'<text x="{style.width / 2:.0f}" y="{style.height - 14}" font-size="13" '
            f'text-anchor="middle" font-family="sans-serif">{style.x_label}</text>'
        )
    if style.y_label:
        parts.append(
            f'<text x="18" y="{style.height / 2:.0f}" font-size="13" '
            f'text-anchor="middle" font-family="sans-serif" '
            f'transform="rotate(-90 18 {style.height / 2:.0f})">{style.y_label}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
