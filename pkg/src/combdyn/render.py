"""Deterministic SVG output for barcodes, persistence diagrams and Morse sets."""

from __future__ import annotations

from typing import Sequence

from .complex import SimplicialComplex
from .persistence import Barcode

DIM_COLORS = {0: "#d4a017", 1: "#1f5fbf", 2: "#2e8b57"}
PALETTE = [
    "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4", "#f032e6",
    "#bfef45", "#469990", "#9a6324", "#800000", "#808000", "#000075", "#a9a9a9",
]


def _num(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def _svg(width: float, height: float, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(width)} {_num(height)}">'
    )
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *body, "</svg>"]) + "\n"


def _write(path, text: str) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def barcode_svg(
    barcode: Barcode,
    path,
    weights: Sequence[float] | None = None,
    step_labels: Sequence[str] | None = None,
    title: str = "",
) -> None:
    """Horizontal bars, degree-0 bars above degree-1 bars; within a degree by decreasing weight."""
    n = max(barcode.n_steps, 1)
    bars = list(enumerate(barcode.intervals))
    w = list(weights) if weights is not None else [0.0] * len(bars)
    bars.sort(key=lambda ib: (ib[1][0], -w[ib[0]], ib[1][1], ib[1][2]))
    left, top, step_w, bar_h = 60.0, 30.0, 40.0, 12.0
    width = left + n * step_w + 20
    height = top + max(len(bars), 1) * (bar_h + 4) + 40
    body = []
    if title:
        body.append(f'<text x="{_num(left)}" y="18" font-family="sans-serif" font-size="12">{title}</text>')
    axis_y = height - 30
    body.append(f'<line x1="{_num(left)}" y1="{_num(axis_y)}" x2="{_num(left + n * step_w)}" y2="{_num(axis_y)}" stroke="black"/>')
    for t in range(1, n + 1):
        x = left + (t - 0.5) * step_w
        label = step_labels[t - 1] if step_labels else str(t)
        body.append(f'<text x="{_num(x)}" y="{_num(axis_y + 14)}" font-family="sans-serif" font-size="9" text-anchor="middle">{label}</text>')
    for row, (_, (k, b, d)) in enumerate(bars):
        y = top + row * (bar_h + 4)
        x0 = left + (b - 1) * step_w
        x1 = left + d * step_w
        color = DIM_COLORS.get(k, "#555555")
        body.append(f'<rect x="{_num(x0)}" y="{_num(y)}" width="{_num(x1 - x0)}" height="{_num(bar_h)}" fill="{color}"/>')
    _write(path, _svg(width, height, body))


def diagram_svg(barcode: Barcode, path, title: str = "") -> None:
    """Birth/death diagram over step indices; red pluses for degree 0, blue crosses for degree 1."""
    n = max(barcode.n_steps, 1)
    size, margin = 320.0, 40.0
    scale = size / (n + 1)

    def px(v: float) -> float:
        return margin + v * scale

    def py(v: float) -> float:
        return margin + size - v * scale

    body = []
    if title:
        body.append(f'<text x="{_num(margin)}" y="20" font-family="sans-serif" font-size="12">{title}</text>')
    body.append(f'<line x1="{_num(px(0))}" y1="{_num(py(0))}" x2="{_num(px(n + 1))}" y2="{_num(py(0))}" stroke="black"/>')
    body.append(f'<line x1="{_num(px(0))}" y1="{_num(py(0))}" x2="{_num(px(0))}" y2="{_num(py(n + 1))}" stroke="black"/>')
    body.append(f'<line x1="{_num(px(0))}" y1="{_num(py(0))}" x2="{_num(px(n + 1))}" y2="{_num(py(n + 1))}" stroke="#bbbbbb"/>')
    body.append(f'<text x="{_num(px(0) - 4)}" y="{_num(py(n + 1) + 4)}" font-family="sans-serif" font-size="9" text-anchor="end">inf</text>')
    r = 4.0
    for k, b, d in barcode.intervals:
        x = px(b)
        y = py(n + 1 if d >= barcode.n_steps else d)
        if k == 0:
            body.append(
                f'<path d="M {_num(x - r)} {_num(y)} H {_num(x + r)} M {_num(x)} {_num(y - r)} V {_num(y + r)}" stroke="red" stroke-width="1.5"/>'
            )
        else:
            body.append(
                f'<path d="M {_num(x - r)} {_num(y - r)} L {_num(x + r)} {_num(y + r)} M {_num(x - r)} {_num(y + r)} L {_num(x + r)} {_num(y - r)}" stroke="blue" stroke-width="1.5"/>'
            )
    _write(path, _svg(size + 2 * margin, size + 2 * margin, body))


def morse_overlay_svg(K: SimplicialComplex, sets: Sequence[frozenset[int]], path, size: float = 480.0, title: str = "") -> None:
    """Mesh in light grey with each Morse set filled in its own color."""
    X = K.float_coords
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = max(float((hi - lo).max()), 1e-12)
    margin = 20.0

    def pt(v: int) -> tuple[float, float]:
        x = margin + (X[v, 0] - lo[0]) / span * size
        y = margin + size - (X[v, 1] - lo[1]) / span * size if X.shape[1] > 1 else margin + size / 2
        return x, y

    owner = {s: i for i, m in enumerate(sets) for s in m}
    body = []
    if title:
        body.append(f'<text x="{_num(margin)}" y="14" font-family="sans-serif" font-size="12">{title}</text>')
    order = sorted(range(len(K)), key=lambda s: (-int(K.dims[s]), s))
    for s in order:
        verts = K.simplices[s]
        color = PALETTE[owner[s] % len(PALETTE)] if s in owner else None
        pts = [pt(v) for v in verts]
        if len(verts) == 3:
            d = " ".join(f"{_num(x)},{_num(y)}" for x, y in pts)
            fill = color or "none"
            body.append(f'<polygon points="{d}" fill="{fill}" stroke="#dddddd" stroke-width="0.3"/>')
        elif len(verts) == 2 and color:
            (x0, y0), (x1, y1) = pts
            body.append(f'<line x1="{_num(x0)}" y1="{_num(y0)}" x2="{_num(x1)}" y2="{_num(y1)}" stroke="{color}" stroke-width="1.5"/>')
        elif len(verts) == 1 and color:
            x, y = pts[0]
            body.append(f'<circle cx="{_num(x)}" cy="{_num(y)}" r="1.5" fill="{color}"/>')
    _write(path, _svg(size + 2 * margin, size + 2 * margin, body))
