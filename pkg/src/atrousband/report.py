"""
CSV and static SVG output.

Everything here is byte-deterministic: floats go out with 9 significant
digits and SVG coordinates with 2 decimals.
"""
from __future__ import annotations

import csv
import io
import math
import os
from xml.sax.saxutils import escape

import numpy as np

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
MAX_SVG_COLUMNS = 1000


def fmt(v) -> str:
    """9 significant digits; NaN (gap) becomes an empty cell."""
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return ""
    if v == 0:
        v = 0.0  # no "-0"
    return f"{v:.9g}"


def atomic_write(path, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv_text(rows, comments=()):
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def isd_csv(report) -> str:
    rows = [("band", "f_low_hz", "f_high_hz", "weight_percent")]
    for label, w in zip(report.band_labels, report.weights_percent):
        rows.append((label.name, fmt(label.f_low_hz), fmt(label.f_high_hz), fmt(w)))
    return _csv_text(rows)


def tisd_csv(series) -> str:
    comments = []
    if series.variant == "windowed" or series.source_variant == "windowed":
        comments.append(
            f"time_s is the window center; window={series.window_len} "
            f"hop={series.hop} kind={series.window_kind}"
        )
    if series.variant == "gradient":
        comments.append(f"first difference of the {series.source_variant} series")
    rows = [("time_s",) + tuple(l.name for l in series.band_labels)]
    values = series.values
    for j, t in enumerate(series.times_s):
        rows.append((fmt(t),) + tuple(fmt(v) for v in values[:, j]))
    return _csv_text(rows, comments)


def bands_manifest_csv(labels, files, energies, header) -> str:
    rows = [("band", "f_low_hz", "f_high_hz", "file", "energy")]
    for label, name, e in zip(labels, files, energies):
        rows.append((label.name, fmt(label.f_low_hz), fmt(label.f_high_hz), name, fmt(e)))
    return _csv_text(rows, [header])


def aliasing_csv(rows) -> str:
    return _csv_text([("method", "tone_hz", "aliasing_db")] +
                     [(m, fmt(f), fmt(v)) for m, f, v in rows])


def _c(v):
    return f"{v:.2f}"


def _svg(width, height, body, title):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        f'<text x="{_c(width / 2)}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>\n'
        + "".join(body)
        + "</svg>\n"
    )


def _color(i, n):
    base = PALETTE[i % len(PALETTE)]
    # second half of a joint stereo chart: same hue, lighter
    return base, (0.55 if n > len(PALETTE) and i >= n // 2 else 1.0)


def isd_bar_svg(report, title="ISD") -> str:
    """Equal-width bars regardless of each band's width in Hz."""
    labels = report.band_labels
    n = len(labels)
    bar_w = 60
    left, top, plot_h = 50, 40, 260
    width = left + n * bar_w + 20
    height = top + plot_h + 70
    ymax = 100.0
    body = []
    for pct in (0, 25, 50, 75, 100):
        y = top + plot_h * (1 - pct / ymax)
        body.append(f'<line x1="{left}" y1="{_c(y)}" x2="{width - 20}" y2="{_c(y)}" stroke="#ddd"/>\n')
        body.append(f'<text x="{left - 6}" y="{_c(y + 4)}" text-anchor="end">{pct}%</text>\n')
    for i, (label, w) in enumerate(zip(labels, report.weights_percent)):
        color, alpha = _color(i, n)
        h = plot_h * float(w) / ymax
        x = left + i * bar_w
        body.append(
            f'<rect x="{_c(x + 6)}" y="{_c(top + plot_h - h)}" width="{bar_w - 12}" '
            f'height="{_c(h)}" fill="{color}" fill-opacity="{alpha}"/>\n'
        )
        body.append(f'<text x="{_c(x + bar_w / 2)}" y="{_c(top + plot_h - h - 4)}" '
                    f'text-anchor="middle" font-size="9">{float(w):.1f}</text>\n')
        cx = x + bar_w / 2
        body.append(f'<text x="{_c(cx)}" y="{top + plot_h + 16}" text-anchor="middle" '
                    f'font-size="9">{escape(label.name)}</text>\n')
        body.append(f'<text x="{_c(cx)}" y="{top + plot_h + 30}" text-anchor="middle" '
                    f'font-size="8" fill="#555">{fmt(label.f_low_hz)}-{fmt(label.f_high_hz)}</text>\n')
    if math.isfinite(report.level_dbfs):
        body.append(f'<text x="{left}" y="{height - 12}" fill="#555">level {report.level_dbfs:.2f} dBFS RMS</text>\n')
    return _svg(width, height, body, title)


def _decimate(times, values):
    step = max(1, -(-len(times) // MAX_SVG_COLUMNS))
    return times[::step], values[:, ::step]


def tisd_svg(series, title=None) -> str:
    """Stacked band-colored chart; gradient series are drawn as one line per band."""
    title = title or f"TISD ({series.variant})"
    times, values = _decimate(np.asarray(series.times_s), np.asarray(series.values))
    n = values.shape[0]
    left, top, plot_w, plot_h = 60, 40, 800, 300
    legend_h = 16 * ((n + 4) // 5)
    width, height = left + plot_w + 20, top + plot_h + 40 + legend_h
    t0, t1 = (float(times[0]), float(times[-1])) if len(times) else (0.0, 1.0)
    span = (t1 - t0) or 1.0

    def xpos(t):
        return left + plot_w * (t - t0) / span

    body = []
    if series.variant == "gradient":
        lim = float(np.nanmax(np.abs(values))) if values.size else 1.0
        lim = lim or 1.0

        def ypos(v):
            return top + plot_h * (0.5 - 0.5 * v / lim)

        body.append(f'<line x1="{left}" y1="{_c(ypos(0))}" x2="{left + plot_w}" y2="{_c(ypos(0))}" stroke="#999"/>\n')
        body.append(f'<text x="{left - 6}" y="{_c(top + 4)}" text-anchor="end">{fmt(lim)}</text>\n')
        body.append(f'<text x="{left - 6}" y="{_c(top + plot_h + 4)}" text-anchor="end">{fmt(-lim)}</text>\n')
        for b in range(n):
            color, alpha = _color(b, n)
            pts = " ".join(f"{_c(xpos(t))},{_c(ypos(v))}" for t, v in zip(times, values[b]))
            body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                        f'stroke-opacity="{alpha}" stroke-width="1"/>\n')
    else:
        filled = np.nan_to_num(values, nan=0.0)
        lower = np.zeros(filled.shape[1])

        def ypos(v):
            return top + plot_h * (1 - v / 100.0)

        for pct in (0, 50, 100):
            body.append(f'<text x="{left - 6}" y="{_c(ypos(pct) + 4)}" text-anchor="end">{pct}%</text>\n')
        for b in range(n):
            upper = lower + filled[b]
            color, alpha = _color(b, n)
            fwd = [f"{_c(xpos(t))},{_c(ypos(v))}" for t, v in zip(times, upper)]
            back = [f"{_c(xpos(t))},{_c(ypos(v))}" for t, v in zip(times[::-1], lower[::-1])]
            body.append(f'<polygon points="{" ".join(fwd + back)}" fill="{color}" '
                        f'fill-opacity="{alpha}" stroke="none"/>\n')
            lower = upper
    body.append(f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333"/>\n')
    body.append(f'<text x="{left}" y="{top + plot_h + 16}">{fmt(t0)} s</text>\n')
    body.append(f'<text x="{left + plot_w}" y="{top + plot_h + 16}" text-anchor="end">{fmt(t1)} s</text>\n')
    for b, label in enumerate(series.band_labels):
        color, alpha = _color(b, n)
        lx = left + (b % 5) * 160
        ly = top + plot_h + 32 + 16 * (b // 5)
        body.append(f'<rect x="{lx}" y="{ly - 9}" width="10" height="10" fill="{color}" fill-opacity="{alpha}"/>\n')
        body.append(f'<text x="{lx + 14}" y="{ly}">{escape(label.name)}</text>\n')
    return _svg(width, height, body, title)
