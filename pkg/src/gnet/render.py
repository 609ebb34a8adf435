"""SVG rendering: straight segments on the flat plane, sampled Poincare-disk
arcs with the boundary circle, orthographic pole projection for the sphere.
Balanced vertices are filled, unbalanced hollow."""

from __future__ import annotations

import math

from . import surfaces
from .net import DEFAULT_BALANCE_TOL, Net, classify_vertices

ARC_SAMPLES = 24


def _sample_edge(net: Net, u: str, v: str):
    """Drawing-plane polyline for one geodesic edge."""
    surface = net.surface
    pu, pv = net.point(u), net.point(v)
    if surface.kind == surfaces.FLAT:
        return [pu.coords, pv.coords]
    seg = surfaces.geodesic_connect(pu, pv)
    pts = []
    for k in range(ARC_SAMPLES + 1):
        s = seg.length * k / ARC_SAMPLES
        q = surfaces.point_at(pu, seg.dir_at_a.theta, s) if k else pu
        pts.append(_project(surface, q))
    return pts


def _project(surface, p):
    if surface.kind == surfaces.SPHERICAL:
        lon, colat = p.coords
        r = math.sin(colat)
        return (r * math.cos(lon), r * math.sin(lon))
    return p.coords


def render_svg(net: Net, width: int = 720, tol: float = DEFAULT_BALANCE_TOL,
               imbalance_glyphs: bool = False) -> str:
    report = classify_vertices(net, tol)
    polylines = [_sample_edge(net, u, v) for u, v in net.edges]
    vertex_xy = {vid: _project(net.surface, net.point(vid)) for vid in net.vertices}

    xs = [p[0] for line in polylines for p in line]
    ys = [p[1] for line in polylines for p in line]
    if net.surface.kind != surfaces.FLAT:
        xs += [-1.0, 1.0]
        ys += [-1.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-9)
    margin = 0.06 * span
    scale = width / (span + 2 * margin)
    height = int(math.ceil((y1 - y0 + 2 * margin) * scale))

    def to_screen(p):
        # stored math is ccw-positive; the y-axis is flipped only here
        return ((p[0] - x0 + margin) * scale,
                (y1 - p[1] + margin) * scale)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
           f'height="{height}" viewBox="0 0 {width} {height}">']
    out.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    if net.surface.kind != surfaces.FLAT:
        cx, cy = to_screen((0.0, 0.0))
        out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{scale:.2f}" '
                   'fill="none" stroke="#bbbbbb" stroke-dasharray="4 4"/>')
    for line in polylines:
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in (to_screen(p) for p in line))
        out.append(f'<polyline points="{pts}" fill="none" stroke="black" '
                   'stroke-width="1.5"/>')
    rad = max(3.0, width / 240.0)
    for vid in sorted(net.vertices):
        x, y = to_screen(vertex_xy[vid])
        entry = report.entries[vid]
        if imbalance_glyphs and entry.norm > tol:
            gx = x + entry.vector[0] * rad * 6.0
            gy = y - entry.vector[1] * rad * 6.0
            out.append(f'<line x1="{x:.2f}" y1="{y:.2f}" x2="{gx:.2f}" y2="{gy:.2f}" '
                       'stroke="#cc3333" stroke-width="1.2"/>')
        if entry.balanced:
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{rad:.2f}" fill="black">'
                       f'<title>{vid}</title></circle>')
        else:
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{rad:.2f}" fill="white" '
                       f'stroke="black" stroke-width="1.3"><title>{vid}</title></circle>')
    out.append("</svg>")
    return "\n".join(out)
