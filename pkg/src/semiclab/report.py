"""CSV tables and dependency-free SVG plots."""
from __future__ import annotations

import math
from html import escape
from pathlib import Path

import numpy as np

BOUND_COLUMNS = (
    "scenario", "hbar", "eps", "t", "delta_meas", "d_lower", "trace_dist", "w2", "Delta_in",
    "E0", "Eeps", "Lambda", "gamma_t", "C_t", "D_t", "E_t", "rhs_thm1", "rhs_duhamel",
    "rhs_cor2", "pass_thm1", "pass_duhamel", "pass_cor2", "guard_flags",
)


def fmt(v) -> str:
    """Shortest round-trip decimal for floats, 1/0 for booleans."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(rows, path, columns=BOUND_COLUMNS) -> None:
    lines = [",".join(columns)]
    for r in rows:
        lines.append(",".join(fmt(r[c]) for c in columns))
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> list[dict]:
    lines = Path(path).read_text().splitlines()
    head = lines[0].split(",")
    return [dict(zip(head, ln.split(","))) for ln in lines[1:] if ln]


def write_field_csv(field, path) -> None:
    X, XI = np.meshgrid(field.x, field.xi, indexing="ij")
    lines = ["x,xi,value"]
    lines += [f"{fmt(a)},{fmt(b)},{fmt(c)}" for a, b, c in zip(X.ravel(), XI.ravel(), field.values.ravel())]
    Path(path).write_text("\n".join(lines) + "\n")


# --- SVG ---------------------------------------------------------------------------

_W, _H, _PAD = 640, 420, 60
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _ticks(lo: float, hi: float):
    return [10.0**k for k in range(math.floor(lo), math.ceil(hi) + 1)]


def svg_loglog(series, path, title: str = "", xlabel: str = "", ylabel: str = "") -> None:
    """series: iterable of (label, xs, ys, dashed).  Nonpositive points are dropped."""
    clean = []
    for label, xs, ys, dashed in series:
        pts = [(math.log10(x), math.log10(y)) for x, y in zip(xs, ys)
               if x > 0 and y > 0 and math.isfinite(x) and math.isfinite(y)]
        if pts:
            clean.append((label, pts, dashed))
    allpts = [p for _, pts, _ in clean for p in pts] or [(0.0, 0.0), (1.0, 1.0)]
    x0, x1 = min(p[0] for p in allpts), max(p[0] for p in allpts)
    y0, y1 = min(p[1] for p in allpts), max(p[1] for p in allpts)
    x0, x1 = (x0 - 0.5, x1 + 0.5) if x1 - x0 < 1e-9 else (x0, x1)
    y0, y1 = (y0 - 0.5, y1 + 0.5) if y1 - y0 < 1e-9 else (y0, y1)

    def sx(v):
        return _PAD + (v - x0) / (x1 - x0) * (_W - 2 * _PAD)

    def sy(v):
        return _H - _PAD - (v - y0) / (y1 - y0) * (_H - 2 * _PAD)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" font-family="sans-serif" font-size="11">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>',
           f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1):
        lt = math.log10(t)
        if x0 <= lt <= x1:
            out.append(f'<line x1="{sx(lt):.1f}" y1="{_H - _PAD}" x2="{sx(lt):.1f}" y2="{_H - _PAD + 5}" stroke="black"/>')
            out.append(f'<text x="{sx(lt):.1f}" y="{_H - _PAD + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        lt = math.log10(t)
        if y0 <= lt <= y1:
            out.append(f'<line x1="{_PAD - 5}" y1="{sy(lt):.1f}" x2="{_PAD}" y2="{sy(lt):.1f}" stroke="black"/>')
            out.append(f'<text x="{_PAD - 8}" y="{sy(lt) + 4:.1f}" text-anchor="end">{t:g}</text>')
    for k, (label, pts, dashed) in enumerate(clean):
        color = _COLORS[k % len(_COLORS)]
        poly = " ".join(f"{sx(a):.1f},{sy(b):.1f}" for a, b in pts)
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        out.append(f'<polyline points="{poly}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>')
        for a, b in pts:
            out.append(f'<circle cx="{sx(a):.1f}" cy="{sy(b):.1f}" r="2.5" fill="{color}"/>')
        out.append(f'<text x="{_W - _PAD + 4}" y="{_PAD + 14 * k + 10}" fill="{color}" font-size="9">{escape(label)}</text>')
    out.append(f'<text x="{_W / 2}" y="{_PAD / 2}" text-anchor="middle" font-size="13">{escape(title)}</text>')
    out.append(f'<text x="{_W / 2}" y="{_H - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="15" y="{_H / 2}" text-anchor="middle" transform="rotate(-90 15 {_H / 2})">{escape(ylabel)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


def _diverging(v: float) -> str:
    # v in [-1, 1]: blue - white - red
    v = max(-1.0, min(1.0, v))
    if v >= 0:
        return f"#ff{int(255 * (1 - v)):02x}{int(255 * (1 - v)):02x}"
    return f"#{int(255 * (1 + v)):02x}{int(255 * (1 + v)):02x}ff"


def svg_heatmap(field, path, title: str = "", max_cells: int = 128) -> None:
    vals = np.asarray(field.values)
    step_x = max(1, math.ceil(vals.shape[0] / max_cells))
    step_p = max(1, math.ceil(vals.shape[1] / max_cells))
    v = vals[::step_x, ::step_p]
    scale = float(np.abs(v).max()) or 1.0
    nx, npp = v.shape
    cw, ch = (_W - 2 * _PAD) / nx, (_H - 2 * _PAD) / npp
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" font-family="sans-serif" font-size="11">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>']
    for i in range(nx):
        for k in range(npp):
            out.append(f'<rect x="{_PAD + i * cw:.2f}" y="{_H - _PAD - (k + 1) * ch:.2f}" '
                       f'width="{cw + 0.05:.2f}" height="{ch + 0.05:.2f}" fill="{_diverging(v[i, k] / scale)}"/>')
    out.append(f'<text x="{_W / 2}" y="{_PAD / 2}" text-anchor="middle" font-size="13">{escape(title)} '
               f'(max |value| {scale:.3g})</text>')
    out.append(f'<text x="{_W / 2}" y="{_H - 15}" text-anchor="middle">x in [{field.x[0]:.3g}, {field.x[-1]:.3g}]</text>')
    out.append(f'<text x="15" y="{_H / 2}" text-anchor="middle" transform="rotate(-90 15 {_H / 2})">'
               f'xi in [{field.xi[0]:.3g}, {field.xi[-1]:.3g}]</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


def format_table(rows, columns) -> str:
    """Fixed-width text table."""
    cells = [[str(c) for c in columns]] + [[_short(r[c]) for c in columns] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    return "\n".join("  ".join(s.rjust(w) for s, w in zip(row, widths)) for row in cells)


def _short(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "PASS" if v else "FAIL"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.4g}"
    return str(v)
