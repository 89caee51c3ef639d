"""Dependency-free SVG persistence diagrams."""

from __future__ import annotations

import math

from .complex import PersistenceDiagram

__all__ = ["diagram_svg"]

_SIZE = 600
_PAD = 50
_COLORS = {0: "#1f77b4", 1: "#d62728", 2: "#2ca02c"}


def diagram_svg(dgm: PersistenceDiagram, title: str = "") -> str:
    """Birth/death scatter on a 600x600 canvas.

    H0 points are circles, higher dimensions squares. Infinite deaths sit at
    1.05 times the largest finite value, marked with an upward arrow.
    """
    finite = [v for v in list(dgm.births) + list(dgm.deaths) if math.isfinite(v)]
    top = max(finite) if finite else 1.0
    top = top if top > 0 else 1.0
    inf_y = 1.05 * top
    span = 1.1 * top
    inner = _SIZE - 2 * _PAD

    def sx(v):
        return _PAD + inner * v / span

    def sy(v):
        return _SIZE - _PAD - inner * v / span

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_SIZE} {_SIZE}" width="{_SIZE}" height="{_SIZE}">',
        '<defs><marker id="arrow" viewBox="0 0 10 10" refX="5" refY="5" markerWidth="6" '
        'markerHeight="6" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>',
        f'<rect x="0" y="0" width="{_SIZE}" height="{_SIZE}" fill="white"/>',
        f'<line x1="{sx(0):.2f}" y1="{sy(0):.2f}" x2="{sx(span):.2f}" y2="{sy(span):.2f}" '
        'stroke="#888" stroke-dasharray="4 4"/>',
        f'<line x1="{_PAD}" y1="{_SIZE - _PAD}" x2="{_SIZE - _PAD}" y2="{_SIZE - _PAD}" stroke="black"/>',
        f'<line x1="{_PAD}" y1="{_SIZE - _PAD}" x2="{_PAD}" y2="{_PAD}" stroke="black"/>',
        f'<line x1="{_PAD}" y1="{sy(inf_y):.2f}" x2="{_SIZE - _PAD}" y2="{sy(inf_y):.2f}" '
        'stroke="#bbb" stroke-width="0.5"/>',
        f'<text x="{_SIZE / 2}" y="{_SIZE - 12}" text-anchor="middle" font-size="14">birth</text>',
        f'<text x="14" y="{_SIZE / 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 14 {_SIZE / 2})">death</text>',
        f'<text x="{_SIZE - _PAD}" y="{_SIZE - _PAD + 16}" text-anchor="end" font-size="11">{top:g}</text>',
    ]
    if title:
        out.append(f'<text x="{_SIZE / 2}" y="28" text-anchor="middle" font-size="16">{title}</text>')
    for d, b, x in zip(dgm.dims.tolist(), dgm.births.tolist(), dgm.deaths.tolist()):
        col = _COLORS.get(d, "#555")
        y = inf_y if not math.isfinite(x) else x
        cx, cy = sx(b), sy(y)
        if d == 0:
            out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="4" fill="{col}" fill-opacity="0.7"/>')
        else:
            out.append(f'<rect x="{cx - 4:.2f}" y="{cy - 4:.2f}" width="8" height="8" fill="{col}" '
                       'fill-opacity="0.7"/>')
        if not math.isfinite(x):
            out.append(f'<line x1="{cx:.2f}" y1="{cy - 5:.2f}" x2="{cx:.2f}" y2="{cy - 18:.2f}" '
                       f'stroke="{col}" marker-end="url(#arrow)"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
