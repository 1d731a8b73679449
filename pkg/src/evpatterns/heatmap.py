"""Self-contained SVG heatmaps for charging matrices (no plotting dependency).

Cells use a monotone white-to-dark-blue ramp, linear in cell value over
[0, max cell]. Arrival hour runs left to right on the x axis; duration bin
runs bottom to top on the y axis.
"""

from __future__ import annotations

from pathlib import Path

from .matrix import N_DURATION_BINS, N_HOURS, ChargingMatrix

CELL_PX = 16
MARGIN_LEFT = 54
MARGIN_BOTTOM = 46
MARGIN_TOP = 34
MARGIN_RIGHT = 70

_RAMP_LOW = (255, 255, 255)
_RAMP_HIGH = (8, 48, 107)


def _ramp_color(t: float) -> str:
    t = min(1.0, max(0.0, t))
    r, g, b = (round(lo + t * (hi - lo)) for lo, hi in zip(_RAMP_LOW, _RAMP_HIGH))
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_svg(m: ChargingMatrix, title: str) -> str:
    """Render one charging matrix as an SVG document string."""
    grid_w = N_HOURS * CELL_PX
    grid_h = N_DURATION_BINS * CELL_PX
    width = MARGIN_LEFT + grid_w + MARGIN_RIGHT
    height = MARGIN_TOP + grid_h + MARGIN_BOTTOM
    vmax = float(m.cells.max())

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        "<desc>Charging matrix heatmap; color is linear in cell value from white (0) "
        f"to dark blue (max = {vmax:.6f}).</desc>",
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{MARGIN_LEFT + grid_w / 2:.0f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{title}</text>',
    ]

    for hour in range(N_HOURS):
        for dbin in range(N_DURATION_BINS):
            value = float(m.cells[hour, dbin])
            t = value / vmax if vmax > 0 else 0.0
            x = MARGIN_LEFT + hour * CELL_PX
            y = MARGIN_TOP + (N_DURATION_BINS - 1 - dbin) * CELL_PX
            parts.append(
                f'<rect x="{x}" y="{y}" width="{CELL_PX}" height="{CELL_PX}" '
                f'fill="{_ramp_color(t)}"><title>hour {hour}, bin {dbin}: {value:.6f}</title></rect>'
            )

    axis_y = MARGIN_TOP + grid_h
    for hour in range(0, N_HOURS, 4):
        x = MARGIN_LEFT + hour * CELL_PX + CELL_PX // 2
        parts.append(
            f'<text x="{x}" y="{axis_y + 14}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{hour}</text>'
        )
    for dbin in range(0, N_DURATION_BINS, 4):
        y = MARGIN_TOP + (N_DURATION_BINS - 1 - dbin) * CELL_PX + CELL_PX // 2 + 4
        parts.append(
            f'<text x="{MARGIN_LEFT - 6}" y="{y}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{dbin}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_LEFT + grid_w / 2:.0f}" y="{axis_y + 32}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">arrival hour</text>'
    )
    parts.append(
        f'<text x="14" y="{MARGIN_TOP + grid_h / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11" '
        f'transform="rotate(-90 14 {MARGIN_TOP + grid_h / 2:.0f})">duration (h)</text>'
    )

    # Color legend: a vertical ramp with min/max labels.
    legend_x = MARGIN_LEFT + grid_w + 18
    legend_h = grid_h // 2
    legend_y = MARGIN_TOP
    steps = 24
    for s in range(steps):
        t = 1.0 - s / (steps - 1)
        y = legend_y + s * legend_h / steps
        parts.append(
            f'<rect x="{legend_x}" y="{y:.1f}" width="12" height="{legend_h / steps + 0.5:.1f}" '
            f'fill="{_ramp_color(t)}"/>'
        )
    parts.append(
        f'<text x="{legend_x + 16}" y="{legend_y + 8}" font-family="sans-serif" '
        f'font-size="9">{vmax:.4f}</text>'
    )
    parts.append(
        f'<text x="{legend_x + 16}" y="{legend_y + legend_h}" font-family="sans-serif" '
        f'font-size="9">0</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_heatmap_svg(m: ChargingMatrix, title: str, dest: str | Path) -> None:
    Path(dest).write_text(heatmap_svg(m, title), encoding="utf-8")
