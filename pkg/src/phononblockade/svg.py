"""Minimal deterministic SVG plots of sweep results.

One-axis results become line plots (log-scaled y for g2 columns); two-axis
results become a heatmap of log10 g2, or a family of curves when the outer
axis is an explicit value list.
"""

from __future__ import annotations

import math
from pathlib import Path

from .errors import IoFailure, UnsupportedShape
from .sweep import SweepResult

W, H = 640, 480
LEFT, RIGHT, TOP, BOTTOM = 80, 150, 40, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
# viridis anchors
CMAP = ((68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37))


def _f(x: float) -> str:
    return f"{x:.2f}"


def _tick(x: float) -> str:
    return f"{x:.3g}"


def _color(t: float) -> str:
    t = min(max(t, 0.0), 1.0) * (len(CMAP) - 1)
    i = min(int(t), len(CMAP) - 2)
    u = t - i
    c = [round(a + (b - a) * u) for a, b in zip(CMAP[i], CMAP[i + 1])]
    return "#{:02x}{:02x}{:02x}".format(*c)


class _Frame:
    def __init__(self, xlo, xhi, ylo, yhi, xlog=False, ylog=False):
        self.xlog, self.ylog = xlog, ylog
        self.xlo, self.xhi = self._t(xlo, xlog), self._t(xhi, xlog)
        self.ylo, self.yhi = self._t(ylo, ylog), self._t(yhi, ylog)
        if self.xhi == self.xlo:
            self.xhi = self.xlo + 1.0
        if self.yhi == self.ylo:
            self.yhi = self.ylo + 1.0

    @staticmethod
    def _t(v, log):
        return math.log10(v) if log else v

    def x(self, v):
        return LEFT + (self._t(v, self.xlog) - self.xlo) / (self.xhi - self.xlo) * (W - LEFT - RIGHT)

    def y(self, v):
        return H - BOTTOM - (self._t(v, self.ylog) - self.ylo) / (self.yhi - self.ylo) * (H - TOP - BOTTOM)


def _axes(out: list, fr: _Frame, xlabel: str, ylabel: str, title: str) -> None:
    x0, x1, y0, y1 = LEFT, W - RIGHT, H - BOTTOM, TOP
    out.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="#000"/>')
    for k in range(5):
        tx = fr.xlo + (fr.xhi - fr.xlo) * k / 4
        ty = fr.ylo + (fr.yhi - fr.ylo) * k / 4
        px = x0 + (x1 - x0) * k / 4
        py = y0 - (y0 - y1) * k / 4
        xv = 10**tx if fr.xlog else tx
        yv = 10**ty if fr.ylog else ty
        out.append(f'<line x1="{_f(px)}" y1="{y0}" x2="{_f(px)}" y2="{y0 + 5}" stroke="#000"/>')
        out.append(f'<text x="{_f(px)}" y="{y0 + 20}" font-size="12" text-anchor="middle">{_tick(xv)}</text>')
        out.append(f'<line x1="{x0 - 5}" y1="{_f(py)}" x2="{x0}" y2="{_f(py)}" stroke="#000"/>')
        out.append(f'<text x="{x0 - 8}" y="{_f(py + 4)}" font-size="12" text-anchor="end">{_tick(yv)}</text>')
    out.append(f'<text x="{(x0 + x1) / 2}" y="{H - 15}" font-size="14" text-anchor="middle">{xlabel}</text>')
    out.append(
        f'<text x="20" y="{(y0 + y1) / 2}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 20 {(y0 + y1) / 2})">{ylabel}</text>'
    )
    out.append(f'<text x="{(x0 + x1) / 2}" y="25" font-size="15" text-anchor="middle">{title}</text>')


def _is_pos(v) -> bool:
    return isinstance(v, float) and math.isfinite(v) and v > 0


def _line_plot(series: list[tuple[str, list, list]], xlabel: str, ylabel: str, title: str, ylog: bool, xlog: bool) -> list:
    xs = [x for _, sx, _ in series for x in sx]
    keep = _is_pos if ylog else (lambda v: isinstance(v, float) and math.isfinite(v))
    ys = [y for _, _, sy in series for y in sy if keep(y)]
    if not ys:
        ys = [1.0]
    fr = _Frame(min(xs), max(xs), min(ys), max(ys), xlog=xlog, ylog=ylog)
    out: list[str] = []
    _axes(out, fr, xlabel, ylabel + (" (log scale)" if ylog else ""), title)
    for k, (label, sx, sy) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        segs, cur = [], []
        for x, y in zip(sx, sy):
            if keep(y):
                cur.append(f"{_f(fr.x(x))},{_f(fr.y(y))}")
            elif cur:
                segs.append(cur)
                cur = []
        if cur:
            segs.append(cur)
        for seg in segs:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(seg)}"/>')
        ly = TOP + 20 * k + 10
        out.append(f'<line x1="{W - RIGHT + 10}" y1="{ly}" x2="{W - RIGHT + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{W - RIGHT + 35}" y="{ly + 4}" font-size="12">{label}</text>')
    return out


def _heatmap(result: SweepResult, zname: str) -> list:
    spec = result.spec
    ax_x, ax_y = spec.axes
    gx, gy = list(ax_x.grid()), list(ax_y.grid())
    zcol = result.column(zname)
    logz = [math.log10(v) if _is_pos(v) else None for v in zcol]
    finite = [v for v in logz if v is not None]
    zlo, zhi = (min(finite), max(finite)) if finite else (0.0, 1.0)
    if zhi == zlo:
        zhi = zlo + 1.0
    fr = _Frame(gx[0], gx[-1], gy[0], gy[-1], xlog=ax_x.spacing == "log", ylog=ax_y.spacing == "log")
    nx, ny = len(gx), len(gy)
    # widen by half a cell so grid points sit at cell centres
    hx = (fr.xhi - fr.xlo) / (2 * (nx - 1))
    hy = (fr.yhi - fr.ylo) / (2 * (ny - 1))
    fr.xlo, fr.xhi, fr.ylo, fr.yhi = fr.xlo - hx, fr.xhi + hx, fr.ylo - hy, fr.yhi + hy
    out: list[str] = []
    cw = (W - LEFT - RIGHT) / nx
    ch = (H - TOP - BOTTOM) / ny
    for i in range(nx):
        for j in range(ny):
            v = logz[i * ny + j]
            fill = "#bbbbbb" if v is None else _color((v - zlo) / (zhi - zlo))
            out.append(
                f'<rect x="{_f(fr.x(gx[i]) - cw / 2)}" y="{_f(fr.y(gy[j]) - ch / 2)}" '
                f'width="{_f(cw + 0.3)}" height="{_f(ch + 0.3)}" fill="{fill}"/>'
            )
    _axes(out, fr, ax_x.name, ax_y.name, f"{spec.name}: log10 {zname}")
    names = {ax_x.name, ax_y.name}
    if names == {"delta_p", "g"}:
        # two-phonon resonance curves delta_p = +-sqrt(2) g / 2
        g_axis = ax_y if ax_y.name == "g" else ax_x
        glo, ghi = g_axis.grid()[0], g_axis.grid()[-1]
        for sign in (1, -1):
            pts = []
            for j in range(201):
                gval = glo + (ghi - glo) * j / 200
                dp = sign * math.sqrt(2) * gval / 2
                px, py = (dp, gval) if ax_x.name == "delta_p" else (gval, dp)
                if min(gx) <= px <= max(gx) and min(gy) <= py <= max(gy):
                    pts.append(f"{_f(fr.x(px))},{_f(fr.y(py))}")
            if pts:
                out.append(
                    f'<polyline fill="none" stroke="#ffffff" stroke-width="2" '
                    f'stroke-dasharray="6,4" points="{" ".join(pts)}"/>'
                )
    if names == {"kappa", "gamma"} and spec.axes[0].spacing == "log":
        # unit-cooperativity curve kappa * gamma = 4 g^2
        c = 4 * spec.base.g**2
        pts = []
        for i in range(nx * 4 + 1):
            xv = 10 ** (fr.xlo + (fr.xhi - fr.xlo) * i / (nx * 4))
            yv = c / xv
            if min(gy) <= yv <= max(gy):
                pts.append(f"{_f(fr.x(xv))},{_f(fr.y(yv))}")
        if pts:
            out.append(f'<polyline fill="none" stroke="#ffffff" stroke-width="2" points="{" ".join(pts)}"/>')
    bar_h = (H - TOP - BOTTOM) / 4
    for k in range(4):
        out.append(
            f'<rect x="{W - RIGHT + 20}" y="{_f(H - BOTTOM - (k + 1) * bar_h)}" width="20" '
            f'height="{_f(bar_h)}" fill="{_color((k + 0.5) / 4)}"/>'
        )
    for k in range(5):
        yb = H - BOTTOM - k * bar_h
        out.append(f'<text x="{W - RIGHT + 45}" y="{_f(yb + 4)}" font-size="12">{_tick(zlo + k / 4 * (zhi - zlo))}</text>')
    return out


def svg_text(result: SweepResult) -> str:
    spec = result.spec
    g2_cols = [o for o in spec.outputs if o.startswith("g2")]
    if len(spec.axes) == 1:
        ax = spec.axes[0]
        xs = list(ax.grid())
        cols = g2_cols or list(spec.outputs[:1])
        series = [(c, xs, result.column(c)) for c in cols]
        body = _line_plot(series, ax.name, ", ".join(cols), spec.name, ylog=bool(g2_cols), xlog=ax.spacing == "log")
    elif len(spec.axes) == 2:
        outer, inner = spec.axes
        if outer.spacing == "values":
            col = (g2_cols or list(spec.outputs[:1]))[0]
            xs = list(inner.grid())
            z = result.column(col)
            n = len(xs)
            series = [(f"{outer.name}={_tick(v)}", xs, z[k * n:(k + 1) * n]) for k, v in enumerate(outer.grid())]
            body = _line_plot(series, inner.name, col, spec.name, ylog=bool(g2_cols), xlog=inner.spacing == "log")
        else:
            body = _heatmap(result, (g2_cols or list(spec.outputs[:1]))[0])
    else:
        raise UnsupportedShape(f"cannot plot {len(spec.axes)} axes")
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
        f'font-family="sans-serif">'
    )
    return "\n".join([head, f'<rect width="{W}" height="{H}" fill="#ffffff"/>', *body, "</svg>"]) + "\n"


def render_svg(result: SweepResult, path: str | Path) -> None:
    if not 1 <= len(result.spec.axes) <= 2:
        raise UnsupportedShape(f"cannot plot {len(result.spec.axes)} axes")
    text = svg_text(result)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
