"""Test-phase plot data (CSV) and static SVG renderings.

SVGs are assembled as plain text with fixed-precision coordinates so repeated
runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import logging
import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .. import metrics
from ..models import FAMILIES

log = logging.getLogger(__name__)

COLORS = {"ANN-GA": "#1f77b4", "ANN-PSO": "#ff7f0e", "ANFIS-PSO": "#2ca02c"}
SIZE = 420
MARGIN = 60


def _f(v: float) -> str:
    return f"{v:.3f}"


def _svg(body: list[str], width=SIZE, height=SIZE) -> str:
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">')
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>', *body, "</svg>"]) + "\n"


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks, t = [], start
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 10))
        t += step
    return ticks


def scatter_svg(family: str, observed, predicted) -> str:
    o, p = np.asarray(observed, float), np.asarray(predicted, float)
    lo = float(min(o.min(), p.min()))
    hi = float(max(o.max(), p.max()))
    pad = 0.05 * (hi - lo) if hi > lo else 1.0
    lo, hi = lo - pad, hi + pad
    span = SIZE - 2 * MARGIN

    def sx(v):
        return MARGIN + (v - lo) / (hi - lo) * span

    def sy(v):
        return SIZE - MARGIN - (v - lo) / (hi - lo) * span

    color = COLORS.get(family, "#444444")
    body = [f'<text x="{SIZE / 2}" y="24" text-anchor="middle" font-size="14">{escape(family)}: predicted vs observed (test)</text>',
            f'<rect x="{MARGIN}" y="{MARGIN}" width="{span}" height="{span}" fill="none" stroke="black"/>']
    for t in _nice_ticks(lo, hi):
        body.append(f'<line x1="{_f(sx(t))}" y1="{SIZE - MARGIN}" x2="{_f(sx(t))}" y2="{SIZE - MARGIN + 4}" stroke="black"/>')
        body.append(f'<text x="{_f(sx(t))}" y="{SIZE - MARGIN + 16}" text-anchor="middle">{t:g}</text>')
        body.append(f'<line x1="{MARGIN - 4}" y1="{_f(sy(t))}" x2="{MARGIN}" y2="{_f(sy(t))}" stroke="black"/>')
        body.append(f'<text x="{MARGIN - 6}" y="{_f(sy(t) + 4)}" text-anchor="end">{t:g}</text>')
    body.append(f'<line x1="{_f(sx(lo))}" y1="{_f(sy(lo))}" x2="{_f(sx(hi))}" y2="{_f(sy(hi))}" '
                f'stroke="gray" stroke-dasharray="4,3"/>')
    for ov, pv in zip(o, p):
        body.append(f'<circle cx="{_f(sx(ov))}" cy="{_f(sy(pv))}" r="3" fill="{color}" fill-opacity="0.7"/>')
    body.append(f'<text x="{SIZE / 2}" y="{SIZE - 18}" text-anchor="middle">observed air velocity (m/s)</text>')
    body.append(f'<text x="16" y="{SIZE / 2}" text-anchor="middle" transform="rotate(-90 16 {SIZE / 2})">'
                f'predicted air velocity (m/s)</text>')
    return _svg(body)


def taylor_svg(std_obs: float, points: dict[str, tuple[float, float]]) -> str:
    """Quarter-polar Taylor diagram (half-polar if any correlation is negative).

    ``points`` maps label -> (std_P, cc); the reference sits at (std_obs, 1).
    """
    half = any(c < 0 for _, c in points.values())
    rmax = 1.25 * max([std_obs, *[s for s, _ in points.values()]]) or 1.0
    width = 2 * SIZE if half else SIZE + 40
    r_px = SIZE - 2 * MARGIN
    ox = width / 2 if half else MARGIN
    oy = SIZE - MARGIN

    def xy(r, theta):
        return ox + r / rmax * r_px * math.cos(theta), oy - r / rmax * r_px * math.sin(theta)

    theta_max = math.pi if half else math.pi / 2
    body = ['<text x="{}" y="24" text-anchor="middle" font-size="14">Taylor diagram (test phase)</text>'.format(width / 2)]
    for r in _nice_ticks(0.0, rmax):
        if r <= 0:
            continue
        x0, y0 = xy(r, 0.0)
        x1, y1 = xy(r, theta_max)
        body.append(f'<path d="M {_f(x0)} {_f(y0)} A {_f(r / rmax * r_px)} {_f(r / rmax * r_px)} 0 0 0 {_f(x1)} {_f(y1)}" '
                    f'fill="none" stroke="#bbbbbb"/>')
        body.append(f'<text x="{_f(x0)}" y="{_f(oy + 14)}" text-anchor="middle">{r:g}</text>')
    corr_ticks = [0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.95, 0.99, 1.0]
    if half:
        corr_ticks = sorted({-c for c in corr_ticks} | set(corr_ticks))
    for c in corr_ticks:
        th = math.acos(c)
        x1, y1 = xy(rmax, th)
        body.append(f'<line x1="{_f(ox)}" y1="{_f(oy)}" x2="{_f(x1)}" y2="{_f(y1)}" stroke="#dddddd"/>')
        lx, ly = xy(rmax * 1.06, th)
        body.append(f'<text x="{_f(lx)}" y="{_f(ly)}" text-anchor="middle" font-size="9">{c:g}</text>')
    # reference arc and point
    x0, y0 = xy(std_obs, 0.0)
    x1, y1 = xy(std_obs, theta_max)
    body.append(f'<path d="M {_f(x0)} {_f(y0)} A {_f(std_obs / rmax * r_px)} {_f(std_obs / rmax * r_px)} 0 0 0 '
                f'{_f(x1)} {_f(y1)}" fill="none" stroke="black" stroke-dasharray="5,3"/>')
    body.append(f'<circle cx="{_f(x0)}" cy="{_f(y0)}" r="5" fill="black"/>')
    body.append(f'<text x="{_f(x0)}" y="{_f(y0 - 8)}" text-anchor="middle">observed</text>')
    for label, (s, c) in points.items():
        px, py = xy(s, math.acos(max(-1.0, min(1.0, c))))
        color = COLORS.get(label, "#444444")
        body.append(f'<circle cx="{_f(px)}" cy="{_f(py)}" r="5" fill="{color}"/>')
        body.append(f'<text x="{_f(px + 7)}" y="{_f(py - 6)}" fill="{color}">{escape(label)}</text>')
    body.append(f'<text x="{_f(ox + r_px / 2)}" y="{SIZE - 18}" text-anchor="middle">standard deviation (m/s)</text>')
    return _svg(body, width=width)


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def emit_plots(predictions: dict[str, dict], out_dir) -> list[Path]:
    """Write per-champion scatter/deviation/taylor CSVs and the SVG figures.

    ``predictions`` maps family -> {"observed": [...], "predicted": [...]}.
    """
    out = Path(out_dir)
    written = []
    points = {}
    std_obs = None
    order = [f for f in FAMILIES if f in predictions] + sorted(set(predictions) - set(FAMILIES))
    for fam in order:
        series = predictions[fam]
        pair = metrics.EvalPair(series["observed"], series["predicted"])
        d = out / fam
        d.mkdir(parents=True, exist_ok=True)
        _write_rows(d / "scatter.csv", ["observed", "predicted"],
                    [[repr(float(o)), repr(float(p))] for o, p in zip(pair.observed, pair.predicted)])
        _write_rows(d / "deviation.csv", ["index", "deviation"],
                    [[i, repr(v)] for i, v in metrics.deviation_series(pair)])
        try:
            so, sp, r = metrics.taylor_stats(pair)
            points[fam] = (sp, r)
        except metrics.MetricError as exc:
            log.warning("%s: no Taylor point (%s)", fam, exc)
            so, sp, r = float(np.std(pair.observed)), float(np.std(pair.predicted)), float("nan")
        std_obs = so
        _write_rows(d / "taylor.csv", ["std_observed", "std_predicted", "cc"], [[repr(so), repr(sp), repr(r)]])
        svg = out / f"scatter_{fam}.svg"
        svg.write_text(scatter_svg(fam, pair.observed, pair.predicted), encoding="utf-8")
        written += [d / "scatter.csv", d / "deviation.csv", d / "taylor.csv", svg]
    if std_obs is not None:
        path = out / "taylor.svg"
        path.write_text(taylor_svg(std_obs, points), encoding="utf-8")
        written.append(path)
    return written
