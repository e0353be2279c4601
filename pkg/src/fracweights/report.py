"""CSV and SVG output.  CSV is the record; every SVG is drawn from CSV rows
so a figure can always be regenerated from the table behind it."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Sequence

from .params import Region, classify

REGION_COLUMNS = ("gamma", "n", "m", "k", "j", "inv_p", "delta", "region")
OVERLAY_COLUMNS = ("gamma", "inv_p", "delta", "verdict", "sup_value", "stability")

COLORS = {
    Region.ADMISSIBLE.value: "#9ecae1",
    Region.TRIVIAL.value: "#f2f2f2",
    Region.EXCLUDED_CORNER.value: "#fdae6b",
}
VERDICT_MARKS = {"bounded": "#08519c", "unbounded": "#a50f15", "inconclusive": "#737373"}


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def csv_text(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def write_csv(path, rows: Sequence[dict], columns: Sequence[str]) -> Path:
    path = Path(path)
    path.write_text(csv_text(rows, columns), encoding="utf-8")
    return path


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# region map


def region_rows(spec) -> list[dict]:
    """Classification raster: x_k = k m / res, delta_j = top - j h."""
    h = spec.delta_step
    rows = []
    for g in spec.gammas:
        for j in range(spec.resolution):
            delta = spec.delta_top - j * h
            for k in range(spec.resolution):
                x = k * spec.m / spec.resolution
                rows.append({"gamma": g, "n": spec.n, "m": spec.m, "k": k, "j": j, "inv_p": x,
                             "delta": delta, "region": classify(g, spec.n * x, delta).value})
    return rows


def _panel_geometry(rows):
    xs = sorted({float(r["inv_p"]) for r in rows})
    ds = sorted({float(r["delta"]) for r in rows})
    dx = xs[1] - xs[0] if len(xs) > 1 else 1.0
    dd = ds[1] - ds[0] if len(ds) > 1 else 1.0
    return xs[0], xs[-1] + dx, ds[0] - dd / 2, ds[-1] + dd / 2, dx, dd


def region_svg(rows: Sequence[dict], overlay: Sequence[dict] = (), panel: int = 300, margin: int = 48) -> str:
    """One panel per gamma: shaded classification, the line delta = gamma - n/p,
    the cap delta = 1, the open corner and the level gamma - m n."""
    by_gamma: dict[float, list] = {}
    for r in rows:
        by_gamma.setdefault(float(r["gamma"]), []).append(r)
    gammas = sorted(by_gamma)
    W = len(gammas) * (panel + 2 * margin)
    H = panel + 2 * margin
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
           f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>']
    for p, g in enumerate(gammas):
        pr = by_gamma[g]
        n, m = int(pr[0]["n"]), int(pr[0]["m"])
        x0, x1, d0, d1, dx, dd = _panel_geometry(pr)
        ox = p * (panel + 2 * margin) + margin
        oy = margin

        def X(x):
            return ox + (x - x0) / (x1 - x0) * panel

        def Y(d):
            return oy + (d1 - d) / (d1 - d0) * panel

        out.append(f'<g id="panel-{p}">')
        # run-length encode each raster row to keep the file small
        grid: dict[float, list] = {}
        for r in pr:
            grid.setdefault(float(r["delta"]), []).append((float(r["inv_p"]), r["region"]))
        for d in sorted(grid, reverse=True):
            cells = sorted(grid[d])
            start, label = cells[0]
            for i in range(1, len(cells) + 1):
                if i == len(cells) or cells[i][1] != label:
                    end = cells[i - 1][0] + dx
                    out.append(f'<rect x="{X(start):.2f}" y="{Y(d + dd / 2):.2f}" '
                               f'width="{X(end) - X(start):.2f}" height="{Y(d - dd / 2) - Y(d + dd / 2):.2f}" '
                               f'fill="{COLORS[label]}" stroke="none"/>')
                    if i < len(cells):
                        start, label = cells[i]
        out.append(f'<rect x="{ox}" y="{oy}" width="{panel}" height="{panel}" fill="none" stroke="black"/>')
        # boundary delta = gamma - n x, clipped to the panel
        # (dotted above the cap, where it no longer bounds the region)
        for above, style in ((False, 'stroke-width="1.5"'), (True, 'stroke-width="1" stroke-dasharray="1,3"')):
            pts = []
            for t in range(201):
                x = x0 + (x1 - x0) * t / 200
                d = g - n * x
                if d0 <= d <= d1 and (d > 1.0) == above:
                    pts.append(f"{X(x):.2f},{Y(d):.2f}")
            if len(pts) > 1:
                out.append(f'<polyline points="{" ".join(pts)}" fill="none" stroke="#08306b" {style}/>')
        # cap delta = 1 where gamma - n x >= 1
        xc = (g - 1.0) / n
        if xc >= x0 and d0 <= 1.0 <= d1:
            out.append(f'<line x1="{X(x0):.2f}" y1="{Y(1.0):.2f}" x2="{X(min(xc, x1)):.2f}" y2="{Y(1.0):.2f}" '
                       f'stroke="#08306b" stroke-width="1.5"/>')
        if x0 <= xc <= x1 and d0 <= 1.0 <= d1:
            out.append(f'<circle cx="{X(xc):.2f}" cy="{Y(1.0):.2f}" r="4" fill="white" stroke="#08306b" '
                       f'stroke-width="1.5"><title>excluded corner</title></circle>')
        low = g - m * n
        if d0 <= low <= d1:
            out.append(f'<line x1="{X(x0):.2f}" y1="{Y(low):.2f}" x2="{X(x1):.2f}" y2="{Y(low):.2f}" '
                       f'stroke="#636363" stroke-dasharray="4,3"/>')
            out.append(f'<text x="{X(x1) - 4:.2f}" y="{Y(low) - 4:.2f}" text-anchor="end" fill="#636363">'
                       f'γ - mn</text>')
        for r in overlay:
            if float(r["gamma"]) != g:
                continue
            col = VERDICT_MARKS.get(r["verdict"], "#000000")
            out.append(f'<circle cx="{X(float(r["inv_p"])):.2f}" cy="{Y(float(r["delta"])):.2f}" r="3" '
                       f'fill="{col}"><title>{r["verdict"]}</title></circle>')
        # axes
        for t in range(m + 1):
            out.append(f'<text x="{X(t):.2f}" y="{oy + panel + 14}" text-anchor="middle">{t}</text>')
        lo_tick, hi_tick = math.ceil(d0), math.floor(d1)
        for t in range(lo_tick, hi_tick + 1):
            out.append(f'<text x="{ox - 6}" y="{Y(t) + 4:.2f}" text-anchor="end">{t}</text>')
        out.append(f'<text x="{ox + panel / 2:.2f}" y="{oy + panel + 30}" text-anchor="middle">1/p</text>')
        out.append(f'<text x="{ox - 30}" y="{oy + panel / 2:.2f}" text-anchor="middle" '
                   f'transform="rotate(-90 {ox - 30} {oy + panel / 2:.2f})">δ</text>')
        out.append(f'<text x="{ox + panel / 2:.2f}" y="{oy - 12}" text-anchor="middle" font-size="13">'
                   f'γ = {g:g}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# log-log curves


def loglog_svg(series: dict, title: str = "", xlabel: str = "R", ylabel: str = "value",
               width: int = 480, height: int = 320, margin: int = 56) -> str:
    """Polyline per series on log-log axes; nonpositive points are dropped."""
    palette = ("#08519c", "#a50f15", "#006d2c", "#54278f", "#b15928", "#636363")
    clean = {}
    for name in series:
        xs, ys = series[name]
        pts = [(math.log10(x), math.log10(y)) for x, y in zip(xs, ys)
               if x > 0 and y > 0 and math.isfinite(x) and math.isfinite(y)]
        if pts:
            clean[name] = pts
    allp = [p for pts in clean.values() for p in pts] or [(0.0, 0.0)]
    lx0, lx1 = math.floor(min(p[0] for p in allp)), math.ceil(max(p[0] for p in allp))
    ly0, ly1 = math.floor(min(p[1] for p in allp)), math.ceil(max(p[1] for p in allp))
    lx1 = lx1 if lx1 > lx0 else lx0 + 1
    ly1 = ly1 if ly1 > ly0 else ly0 + 1
    pw, ph = width - 2 * margin, height - 2 * margin

    def X(v):
        return margin + (v - lx0) / (lx1 - lx0) * pw

    def Y(v):
        return margin + (ly1 - v) / (ly1 - ly0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
           f'<rect x="{margin}" y="{margin}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for e in range(lx0, lx1 + 1):
        out.append(f'<text x="{X(e):.2f}" y="{margin + ph + 14}" text-anchor="middle">1e{e}</text>')
    for e in range(ly0, ly1 + 1):
        out.append(f'<text x="{margin - 6}" y="{Y(e) + 4:.2f}" text-anchor="end">1e{e}</text>')
    for i, name in enumerate(sorted(clean)):
        col = palette[i % len(palette)]
        pts = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in clean[name])
        out.append(f'<polyline points="{pts}" fill="none" stroke="{col}" stroke-width="1.5"/>')
        out.append(f'<text x="{margin + pw - 4}" y="{margin + 14 + 14 * i}" text-anchor="end" fill="{col}">{name}</text>')
    out.append(f'<text x="{margin + pw / 2:.2f}" y="{height - 14}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="14" y="{margin + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {margin + ph / 2:.2f})">{ylabel}</text>')
    if title:
        out.append(f'<text x="{width / 2:.2f}" y="{margin - 16}" text-anchor="middle" font-size="13">{title}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
