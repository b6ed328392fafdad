"""Minimal SVG line charts for per-step metric curves.

Numeric ground truth lives in the results CSV; these charts exist for
eyeballing.  Output is a pure function of the inputs.
"""

from __future__ import annotations

WIDTH = 760
HEIGHT = 480
MARGIN = 64

#: Curve colors by scenario name (single-population scenarios in warm
#: colors and green, interleaved runs in blues).
SCENARIO_COLORS = {
    "birds_only": "#d62728",
    "fish_only": "#ff7f0e",
    "penguin_only": "#2ca02c",
    "interleaved_bird_first": "#1f77b4",
    "interleaved_fish_first": "#17becf",
}
_FALLBACK_COLORS = ("#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22")


def _color_for(label: str, index: int) -> str:
    return SCENARIO_COLORS.get(label, _FALLBACK_COLORS[index % len(_FALLBACK_COLORS)])


def render_line_chart(
    curves: list[tuple[str, list[tuple[float, float]]]],
    title: str,
    y_label: str,
    x_label: str = "step",
) -> str:
    """Render labeled (x, y) polylines with axes, ticks, and a legend."""
    if not curves or not any(points for _, points in curves):
        raise ValueError("render_line_chart needs at least one nonempty curve")
    xs = [x for _, points in curves for x, _ in points]
    ys = [y for _, points in curves for _, y in points]
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(ys), max(ys)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0
    pad = 0.05 * (y_max - y_min)
    y_min -= pad
    y_max += pad

    def sx(x: float) -> float:
        return MARGIN + (x - x_min) / (x_max - x_min) * (WIDTH - 2 * MARGIN)

    def sy(y: float) -> float:
        return HEIGHT - MARGIN - (y - y_min) / (y_max - y_min) * (HEIGHT - 2 * MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="28" font-family="sans-serif" font-size="16" '
        f'text-anchor="middle">{title}</text>',
    ]
    # horizontal grid plus y tick labels
    for i in range(5):
        y_val = y_min + (y_max - y_min) * i / 4
        y_pix = sy(y_val)
        parts.append(
            f'<line x1="{MARGIN}" y1="{y_pix:.1f}" x2="{WIDTH - MARGIN}" '
            f'y2="{y_pix:.1f}" stroke="#dddddd" stroke-dasharray="4"/>'
        )
        parts.append(
            f'<text x="{MARGIN - 8}" y="{y_pix + 4:.1f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{y_val:.3g}</text>'
        )
    # axes
    parts.append(
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>'
    )
    # x ticks at integer steps
    for step in range(int(x_min), int(x_max) + 1):
        x_pix = sx(step)
        parts.append(
            f'<line x1="{x_pix:.1f}" y1="{HEIGHT - MARGIN}" x2="{x_pix:.1f}" '
            f'y2="{HEIGHT - MARGIN + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x_pix:.1f}" y="{HEIGHT - MARGIN + 18}" '
            f'font-family="sans-serif" font-size="11" text-anchor="middle">{step}</text>'
        )
    parts.append(
        f'<text x="{WIDTH / 2:.1f}" y="{HEIGHT - 16}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="20" y="{HEIGHT / 2:.1f}" font-family="sans-serif" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 20,{HEIGHT / 2:.1f})">{y_label}</text>'
    )
    # curves and legend
    legend_y = MARGIN
    for index, (label, points) in enumerate(curves):
        color = _color_for(label, index)
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in points)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<rect x="{WIDTH - MARGIN - 190}" y="{legend_y}" width="12" height="12" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{WIDTH - MARGIN - 172}" y="{legend_y + 10}" '
            f'font-family="sans-serif" font-size="11">{label}</text>'
        )
        legend_y += 18
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
