"""Self-contained SVG quantile plots.

One fixed-size canvas per report: the symbol's monotone rearrangement as a
dark-blue polyline with the sorted empirical values as blue markers on top,
plus simple axes and ticks.  Output is deterministic (fixed float formats),
so identical reports produce byte-identical files.
"""

from __future__ import annotations

import numpy as np

from .distribution import DistributionReport, _resample_quantiles

__all__ = ["quantile_plot_svg", "write_quantile_svg"]

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 62, 18, 42, 48
CURVE_COLOR = "#00008b"  # dark blue: symbol rearrangement
POINT_COLOR = "#1e90ff"  # blue: empirical values
N_TICKS = 5


def _px(x: float) -> str:
    return f"{x:.2f}"


def _val(v: float) -> str:
    return f"{v:.4g}"


def quantile_plot_svg(report: DistributionReport, title: str | None = None) -> str:
    """Render one report as an SVG document string."""
    emp = np.asarray(report.empirical, dtype=float)
    sym = np.asarray(report.symbol_quantiles, dtype=float)
    if sym.size != emp.size:
        sym = _resample_quantiles(sym, emp.size)
    k = emp.size
    pos = (np.arange(k) + 0.5) / k

    lo = float(min(emp.min(), sym.min()))
    hi = float(max(emp.max(), sym.max()))
    pad = 0.05 * (hi - lo) if hi > lo else max(0.5, 0.05 * abs(hi))
    lo, hi = lo - pad, hi + pad

    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    y0, y1 = HEIGHT - MARGIN_B, MARGIN_T

    def sx(p: float) -> float:
        return x0 + p * (x1 - x0)

    def sy(v: float) -> float:
        return y0 + (v - lo) / (hi - lo) * (y1 - y0)

    if title is None:
        title = (
            f"{report.mode} quantiles, kernel {report.kernel_label}, "
            f"n={'x'.join(map(str, report.nvec))}"
        )

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
        # axes
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black" stroke-width="1"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1"/>',
    ]
    for i in range(N_TICKS + 1):
        p = i / N_TICKS
        xt = sx(p)
        lines.append(
            f'<line x1="{_px(xt)}" y1="{y0}" x2="{_px(xt)}" y2="{y0 + 4}" stroke="black"/>'
        )
        lines.append(
            f'<text x="{_px(xt)}" y="{y0 + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_val(p)}</text>'
        )
        v = lo + p * (hi - lo)
        yt = sy(v)
        lines.append(
            f'<line x1="{x0 - 4}" y1="{_px(yt)}" x2="{x0}" y2="{_px(yt)}" stroke="black"/>'
        )
        lines.append(
            f'<text x="{x0 - 7}" y="{_px(yt + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_val(v)}</text>'
        )
    lines.append(
        f'<text x="{(x0 + x1) // 2}" y="{HEIGHT - 10}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">quantile position</text>'
    )
    # symbol rearrangement curve
    points = " ".join(f"{_px(sx(p))},{_px(sy(v))}" for p, v in zip(pos, sym))
    lines.append(
        f'<polyline points="{points}" fill="none" stroke="{CURVE_COLOR}" stroke-width="2"/>'
    )
    # empirical markers
    for p, v in zip(pos, emp):
        lines.append(
            f'<circle cx="{_px(sx(p))}" cy="{_px(sy(v))}" r="2.5" '
            f'fill="{POINT_COLOR}" fill-opacity="0.75"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_quantile_svg(report: DistributionReport, path, title: str | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(quantile_plot_svg(report, title))
