"""Deterministic SVG heatmaps of grid sweeps (x: beta, y: alpha).

Cells are grayscale (0 black, 1 white).  The exact-recovery threshold
``sqrt(alpha) - sqrt(beta) = sqrt(2)`` is drawn in red; agreement maps also
get the diagonal ``alpha = beta`` in green.  Cells with ``alpha <= beta`` are
left empty.  Output depends only on the inputs (fixed float formatting, no
timestamps), so equal runs give byte-identical files.
"""

import math

from .clustering import Method
from .errors import ParameterError

METRICS = ("success_rate", "mean_agreement")

_W, _H = 480, 480
_LEFT, _BOTTOM, _TOP, _RIGHT = 56, 44, 28, 16


def threshold_curve(beta_max, points=200):
    """Points ``(beta, alpha)`` on ``alpha = (sqrt(beta) + sqrt(2))^2``."""
    return [(beta_max * k / points, (math.sqrt(beta_max * k / points) + math.sqrt(2.0)) ** 2)
            for k in range(points + 1)]


def _step(values):
    if len(values) < 2:
        return 1.0
    return min(b - a for a, b in zip(values, values[1:]))


def _fmt(x):
    return f"{x:.2f}"


def render_heatmap(spec, cells, metric="success_rate", method=Method.UNNORMALIZED, title=None):
    """SVG text for one method's metric over a :class:`GridSpec` sweep."""
    if metric not in METRICS:
        raise ParameterError(f"metric must be one of {METRICS}")
    method = Method.parse(method)
    if method not in spec.methods:
        raise ParameterError(f"method {method.value} was not run")
    cells = list(cells)
    if len(cells) != len(spec.alphas) * len(spec.betas):
        raise ParameterError("cell count does not match the grid")

    db, da = _step(spec.betas), _step(spec.alphas)
    bmax = spec.betas[-1] + db / 2
    amax = spec.alphas[-1] + da / 2
    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def X(b):
        return _LEFT + pw * b / bmax

    def Y(a):
        return _TOP + ph * (1 - a / amax)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
    ]
    label = title or f"{method.value} {metric}"
    out.append(f'<text x="{_W / 2:.0f}" y="18" text-anchor="middle" font-size="13" '
               f'font-family="sans-serif">{label}</text>')
    for (_, _, a, b), cell in zip(spec.cells(), cells):
        if cell is None:
            continue
        v = getattr(cell.stats(method), metric)
        g = max(0, min(255, round(255 * v)))
        x0, x1 = X(max(0.0, b - db / 2)), X(b + db / 2)
        y0, y1 = Y(a + da / 2), Y(max(0.0, a - da / 2))
        out.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(x1 - x0)}" '
                   f'height="{_fmt(y1 - y0)}" fill="rgb({g},{g},{g})"/>')

    pts = [(b, a) for b, a in threshold_curve(bmax) if a <= amax]
    if pts:
        path = " ".join(f"{_fmt(X(b))},{_fmt(Y(a))}" for b, a in pts)
        out.append(f'<polyline points="{path}" fill="none" stroke="red" stroke-width="2"/>')
    if metric == "mean_agreement":
        top = min(bmax, amax)
        out.append(f'<line x1="{_fmt(X(0))}" y1="{_fmt(Y(0))}" x2="{_fmt(X(top))}" '
                   f'y2="{_fmt(Y(top))}" stroke="green" stroke-width="2"/>')

    # axes and ticks
    out.append(f'<rect x="{_LEFT}" y="{_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for b in _ticks(bmax):
        out.append(f'<text x="{_fmt(X(b))}" y="{_H - _BOTTOM + 16}" text-anchor="middle" '
                   f'font-size="10" font-family="sans-serif">{b:g}</text>')
    for a in _ticks(amax):
        out.append(f'<text x="{_LEFT - 6}" y="{_fmt(Y(a) + 3)}" text-anchor="end" '
                   f'font-size="10" font-family="sans-serif">{a:g}</text>')
    out.append(f'<text x="{_LEFT + pw / 2:.0f}" y="{_H - 8}" text-anchor="middle" '
               f'font-size="12" font-family="sans-serif">beta</text>')
    out.append(f'<text x="14" y="{_TOP + ph / 2:.0f}" text-anchor="middle" font-size="12" '
               f'font-family="sans-serif" transform="rotate(-90 14 {_TOP + ph / 2:.0f})">alpha</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _ticks(vmax, target=6):
    raw = vmax / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    return [k * step for k in range(int(vmax / step) + 1)]
