"""SVG drawings of lattice balls in the Poincare disc."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Sequence

from .embedding import EmbeddingConfig, embed_ball
from .lattice import LatticeBall


class IoFailure(OSError):
    pass


def geodesic_path(z1: complex, z2: complex, scale: float, center: float, tol: float = 1e-9) -> str:
    """SVG path data for the hyperbolic geodesic from z1 to z2.

    The geodesic is an arc of the circle through z1, z2 and the inversion of
    z1 in the unit circle; it degenerates to a segment when the chord runs
    through the origin.
    """

    def xy(z: complex) -> tuple[float, float]:
        return center + scale * z.real, center - scale * z.imag

    x1, y1 = xy(z1)
    x2, y2 = xy(z2)
    cross = z1.real * z2.imag - z1.imag * z2.real
    if abs(cross) < tol:
        return f"M{x1:.3f},{y1:.3f}L{x2:.3f},{y2:.3f}"
    # circle centre c with |c - z|^2 = |c|^2 - 1 for z = z1, z2
    a1, a2 = 2 * z1.real, 2 * z1.imag
    b1, b2 = 2 * z2.real, 2 * z2.imag
    r1, r2 = abs(z1) ** 2 + 1, abs(z2) ** 2 + 1
    det = a1 * b2 - a2 * b1
    c = complex((r1 * b2 - a2 * r2) / det, (a1 * r2 - r1 * b1) / det)
    radius = math.sqrt(max(abs(c) ** 2 - 1, 0.0)) * scale
    cx, cy = xy(c)
    t1 = math.atan2(y1 - cy, x1 - cx)
    t2 = math.atan2(y2 - cy, x2 - cx)
    sweep = 1 if (t2 - t1) % (2 * math.pi) < math.pi else 0
    return f"M{x1:.3f},{y1:.3f}A{radius:.3f},{radius:.3f} 0 0 {sweep} {x2:.3f},{y2:.3f}"


def svg_document(
    edges: Iterable[tuple[int, int]],
    coords: Sequence[complex],
    cfg: EmbeddingConfig,
    highlights: Sequence[tuple[Iterable[int], str]] = (),
    show_vertices: bool = True,
) -> str:
    size = cfg.size
    half = size / 2
    scale = half * 0.98
    cull = cfg.cull_radius
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle cx="{half}" cy="{half}" r="{scale:.3f}" fill="white" stroke="black" stroke-width="1"/>',
        f'<g fill="none" stroke="#555" stroke-width="{cfg.edge_width}">',
    ]
    for u, w in edges:
        if abs(coords[u]) > cull and abs(coords[w]) > cull:
            continue
        out.append(f'<path d="{geodesic_path(coords[u], coords[w], scale, half)}"/>')
    out.append("</g>")
    colour: dict[int, str] = {}
    for members, col in highlights:
        for v in members:
            colour[v] = col
    if show_vertices or colour:
        out.append("<g>")
        for v, z in enumerate(coords):
            if abs(z) > cull or (not show_vertices and v not in colour):
                continue
            # shrink dots with the conformal factor so the picture looks hyperbolic
            rad = cfg.vertex_radius * (1 - abs(z) ** 2) * (1.6 if v in colour else 1.0)
            if rad * 2 < 0.05:
                continue
            fill = colour.get(v, "#222")
            out.append(f'<circle cx="{half + scale * z.real:.3f}" cy="{half - scale * z.imag:.3f}" r="{rad:.3f}" fill="{fill}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(
    ball: LatticeBall,
    coords: Sequence[complex] | None = None,
    highlights: Sequence[tuple[Iterable[int], str]] = (),
    path: str | Path | None = None,
    cfg: EmbeddingConfig | None = None,
) -> str:
    """Draw ``ball`` with optional highlighted vertex sets; write to ``path`` if given."""
    cfg = cfg or EmbeddingConfig.for_params(ball.params)
    if coords is None:
        coords = embed_ball(ball, cfg).coords
    if len(coords) < ball.num_vertices:
        raise ValueError("coordinates do not cover every vertex")
    for members, _ in highlights:
        ball.check_vertices(members)
    doc = svg_document(ball.edges(), coords, cfg, highlights)
    if path is not None:
        try:
            Path(path).write_text(doc)
        except OSError as exc:
            raise IoFailure(f"cannot write {path}: {exc}") from exc
    return doc


def layer_highlights(ball: LatticeBall, cfg: EmbeddingConfig) -> list[tuple[list[int], str]]:
    """One colour per layer, in the style of a layer diagram."""
    pal = cfg.palette
    return [(list(ball.layer_vertices(k)), pal[k % len(pal)]) for k in range(ball.depth + 1)]
