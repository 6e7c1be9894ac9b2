"""Deterministic SVG drawings of plabic graphs and their quivers.

Marked points sit clockwise on a circle; nodes are placed by a Tutte
(barycentric) embedding and quiver vertices at face barycentres.
"""

from __future__ import annotations

import math
from collections import defaultdict

import numpy as np

from .diagram import BLACK, PlabicGraph, bvertex, face_names, is_boundary
from .qp import IceQP

SIZE = 400
RADIUS = 170


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def tutte_layout(g: PlabicGraph) -> dict[object, tuple[float, float]]:
    pos: dict[object, tuple[float, float]] = {}
    c = SIZE / 2
    for m in range(1, g.n + 1):
        ang = math.pi / 2 - 2 * math.pi * (m - 1) / g.n
        pos[bvertex(m)] = (c + RADIUS * math.cos(ang), c - RADIUS * math.sin(ang))
    nodes = list(g.node_order)
    idx = {v: i for i, v in enumerate(nodes)}
    lap = np.zeros((len(nodes), len(nodes)))
    rhs = np.zeros((len(nodes), 2))
    for v in nodes:
        for link in g.rotation[v]:
            w = g.other(v, link)
            lap[idx[v], idx[v]] += 1
            if is_boundary(w):
                rhs[idx[v]] += pos[w]
            else:
                lap[idx[v], idx[w]] -= 1
    if nodes:
        sol = np.linalg.solve(lap, rhs)
        for v in nodes:
            pos[v] = (float(sol[idx[v], 0]), float(sol[idx[v], 1]))
    return pos


def face_centres(g: PlabicGraph, pos) -> dict[int, tuple[float, float]]:
    out = {}
    for f, cyc in enumerate(g.faces):
        pts = [pos[v] for v, _ in cyc]
        out[f] = (sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts))
    return out


def _header() -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        '<defs><marker id="head" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" markerHeight="6" '
        'orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#333"/></marker></defs>',
        f'<circle cx="{SIZE / 2}" cy="{SIZE / 2}" r="{RADIUS}" fill="none" stroke="#bbb"/>',
    ]


def render_plabic_svg(g: PlabicGraph) -> str:
    pos = tutte_layout(g)
    out = _header()
    for a, b in g.edges:
        (x1, y1), (x2, y2) = pos[a], pos[b]
        out.append(f'<line class="edge" x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" stroke="#000"/>')
    for m, v in sorted(g.legs.items()):
        (x1, y1), (x2, y2) = pos[v], pos[bvertex(m)]
        out.append(f'<line class="leg" x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" stroke="#000"/>')
        out.append(f'<text x="{_fmt(x2)}" y="{_fmt(y2 - 6)}" font-size="12" text-anchor="middle">{m}</text>')
    for v in g.node_order:
        x, y = pos[v]
        fill = "#000" if g.colors[v] == BLACK else "#fff"
        out.append(f'<circle class="node" cx="{_fmt(x)}" cy="{_fmt(y)}" r="6" fill="{fill}" stroke="#000"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_quiver_svg(g: PlabicGraph, qp: IceQP) -> str:
    """Frozen vertices as white diamonds, frozen arrows bold."""
    pos = tutte_layout(g)
    centres = face_centres(g, pos)
    names = face_names(g)
    at = {names[f]: centres[f] for f in names}
    q = qp.quiver
    missing = [v for v in q.vertex_ids if v not in at]
    if missing:
        raise ValueError(f"quiver vertices without a region: {missing}")
    out = _header()
    seen: dict[frozenset, int] = defaultdict(int)
    for a in q.arrows:
        (x1, y1), (x2, y2) = at[a.tail], at[a.head]
        pair = frozenset((a.tail, a.head))
        k = seen[pair]
        seen[pair] += 1
        dx, dy = x2 - x1, y2 - y1
        length = math.hypot(dx, dy) or 1.0
        # parallel arrows fan out; endpoints stop short of the vertex marks
        off = 8 * ((k + 1) // 2) * (1 if k % 2 else -1) if k else 0
        nx, ny = -dy / length * off, dx / length * off
        sx, sy = x1 + dx / length * 12 + nx, y1 + dy / length * 12 + ny
        ex, ey = x2 - dx / length * 12 + nx, y2 - dy / length * 12 + ny
        cls, width = ("arrow frozen", 3) if a.frozen else ("arrow", 1)
        out.append(f'<line class="{cls}" data-id="{a.id}" x1="{_fmt(sx)}" y1="{_fmt(sy)}" x2="{_fmt(ex)}" '
                   f'y2="{_fmt(ey)}" stroke="#333" stroke-width="{width}" marker-end="url(#head)"/>')
    for v in q.vertex_ids:
        x, y = at[v]
        if q.is_frozen(v):
            pts = " ".join(f"{_fmt(x + dx)},{_fmt(y + dy)}" for dx, dy in ((0, -9), (9, 0), (0, 9), (-9, 0)))
            out.append(f'<polygon class="vertex frozen" points="{pts}" fill="#fff" stroke="#000"/>')
        else:
            out.append(f'<circle class="vertex" cx="{_fmt(x)}" cy="{_fmt(y)}" r="8" fill="#fff" stroke="#000"/>')
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(y + 20)}" font-size="11" text-anchor="middle">{v}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
