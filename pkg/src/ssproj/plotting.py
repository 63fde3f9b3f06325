"""Deterministic SVG plots of scenario reports (no plotting library needed)."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .errors import MissingSeries

WIDTH, HEIGHT = 640, 420
MARGIN = 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x):
    return f"{x:.2f}"


class _Axes:
    def __init__(self, xs, ys):
        x0, x1 = float(np.min(xs)), float(np.max(xs))
        y0, y1 = float(np.min(ys)), float(np.max(ys))
        padx = 0.05 * (x1 - x0 or 1.0)
        pady = 0.05 * (y1 - y0 or 1.0)
        self.x0, self.x1 = x0 - padx, x1 + padx
        self.y0, self.y1 = y0 - pady, y1 + pady

    def px(self, x):
        return MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2 * MARGIN)

    def py(self, y):
        return HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2 * MARGIN)


def _frame(ax, title, xlabel, ylabel, footer):
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 22}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="16" y="{HEIGHT / 2:.0f}" text-anchor="middle" font-size="12" transform="rotate(-90 16 {HEIGHT / 2:.0f})">{escape(ylabel)}</text>',
        f'<text x="{WIDTH - 8}" y="{HEIGHT - 6}" text-anchor="end" font-size="10" fill="#555">{escape(footer)}</text>',
    ]
    for i in range(5):
        xv = ax.x0 + (ax.x1 - ax.x0) * i / 4
        yv = ax.y0 + (ax.y1 - ax.y0) * i / 4
        out.append(f'<text x="{_fmt(ax.px(xv))}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle" font-size="10">{xv:.3g}</text>')
        out.append(f'<text x="{MARGIN - 6}" y="{_fmt(ax.py(yv) + 3)}" text-anchor="end" font-size="10">{yv:.3g}</text>')
    return out


def _polyline(ax, xs, ys, color, dots=True):
    pts = " ".join(f"{_fmt(ax.px(x))},{_fmt(ax.py(y))}" for x, y in zip(xs, ys))
    out = [f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>']
    if dots:
        out += [f'<circle cx="{_fmt(ax.px(x))}" cy="{_fmt(ax.py(y))}" r="2.5" fill="{color}"/>' for x, y in zip(xs, ys)]
    return out


def _footer(report):
    seeds = report.get("seeds", {})
    return f"{report.get('scenario', '?')} | seeds {seeds.get('sample', '?')}/{seeds.get('estimator', '?')}"


def _estimate_series(report):
    series = []
    for case in report.get("cases", []) + report.get("sweep_cases", []):
        est = case.get("estimate")
        if est and est.get("profile"):
            series.append((case["label"], est))
    for i, est in enumerate(report.get("orbit", {}).get("estimates", [])):
        if est.get("profile"):
            series.append((f"g[{i}]", est))
    return series


def loglog(report):
    series = _estimate_series(report)
    if not series:
        raise MissingSeries("report has no estimate profiles for a log-log plot")
    series = series[: len(COLORS)]
    curves = []
    for label, est in series:
        prof = np.array(est["profile"], dtype=float)
        x = np.log(1.0 / prof[:, 0])
        y = np.log(prof[:, 1]) if est["method"] == "box" else prof[:, 1]
        curves.append((label, est, x, y))
    ax = _Axes(np.concatenate([c[2] for c in curves]), np.concatenate([c[3] for c in curves]))
    ylabel = "log N(r)" if series[0][1]["method"] == "box" else "H_r"
    out = _frame(ax, f"{series[0][1]['method']} estimate vs scale", "log(1/r)", ylabel, _footer(report))
    for i, (label, est, x, y) in enumerate(curves):
        color = COLORS[i]
        out += _polyline(ax, x, y, color)
        note = f"{label}: slope {est['value']:.3f} +/- {est['stderr']:.3f}"
        out.append(f'<text x="{MARGIN + 8}" y="{MARGIN + 14 * i}" font-size="11" fill="{color}">{escape(note)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def theta_sweep(report):
    sweep = report.get("sweep")
    if not sweep or not sweep.get("theta"):
        raise MissingSeries("report has no theta sweep")
    th = np.asarray(sweep["theta"], dtype=float)
    val = np.asarray(sweep["value"], dtype=float)
    err = np.asarray(sweep["stderr"], dtype=float)
    pred = report["cases"][0]["prediction"]
    ax = _Axes(th, np.concatenate([val - err, val + err, [pred]]))
    out = _frame(ax, "projection dimension along the curve", "theta", "estimate", _footer(report))
    y = _fmt(ax.py(pred))
    out.append(f'<line x1="{MARGIN}" y1="{y}" x2="{WIDTH - MARGIN}" y2="{y}" stroke="#888" stroke-dasharray="4 3"/>')
    out.append(f'<text x="{WIDTH - MARGIN}" y="{float(y) - 4:.2f}" text-anchor="end" font-size="10">prediction {pred:.3f}</text>')
    for t, v, e in zip(th, val, err):
        out.append(f'<line x1="{_fmt(ax.px(t))}" y1="{_fmt(ax.py(v - e))}" x2="{_fmt(ax.px(t))}" y2="{_fmt(ax.py(v + e))}" stroke="{COLORS[0]}"/>')
    out += _polyline(ax, th, val, COLORS[0])
    out.append("</svg>")
    return "\n".join(out) + "\n"


def orbit_hist(report, bins=12):
    orbit = report.get("orbit")
    if not orbit or not orbit.get("estimates"):
        raise MissingSeries("report has no orbit estimates")
    vals = np.array([e["value"] for e in orbit["estimates"]], dtype=float)
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo:
        lo, hi = lo - 0.01, hi + 0.01
    counts, edges = np.histogram(vals, bins=bins, range=(lo, hi))
    ax = _Axes(edges, np.array([0.0, counts.max()]))
    out = _frame(ax, "dimension estimates over the sampled orbit", "estimate", "count", _footer(report))
    base = ax.py(0.0)
    for c, a, b in zip(counts, edges[:-1], edges[1:]):
        top = ax.py(c)
        out.append(
            f'<rect x="{_fmt(ax.px(a))}" y="{_fmt(top)}" width="{_fmt(ax.px(b) - ax.px(a))}" height="{_fmt(base - top)}" fill="{COLORS[0]}" stroke="white"/>'
        )
    m = _fmt(ax.px(orbit["mean"]))
    out.append(f'<line x1="{m}" y1="{MARGIN}" x2="{m}" y2="{HEIGHT - MARGIN}" stroke="{COLORS[1]}"/>')
    note = f"mean {orbit['mean']:.3f}, spread {orbit['spread']:.3f}, pooled stderr {orbit['pooled_stderr']:.3f}"
    out.append(f'<text x="{MARGIN + 8}" y="{MARGIN}" font-size="11">{escape(note)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


PLOTS = {"loglog": loglog, "theta_sweep": theta_sweep, "orbit_hist": orbit_hist}


def emit_plot(report, kind):
    if kind not in PLOTS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {sorted(PLOTS)}")
    return PLOTS[kind](report)
