"""SVG drawing of a network with its HBR halves, mask holes and routes."""

from __future__ import annotations

from .geometry import Mask, Network
from .hbr import HbrStructure
from .trace import RouteTrace

NODE_COLORS = {"0": "#b8e6b8", "1": "#f4b6b6", "": "#dddddd"}
ROUTE_COLORS = {"HBR": "#000000", "GEO": "#e6c200", "LMR": "#3a7bd5", "SP": "#888888"}


def _f(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def render_route_svg(
    network: Network,
    structure: HbrStructure | None = None,
    routes: list[RouteTrace] = (),
    mask: Mask | None = None,
    size: int = 800,
    node_radius: float = 2.5,
    edges: bool = True,
) -> str:
    """Return an SVG document.

    Nodes are light green or light red by the first bit of their HBR
    address; routes are drawn in their protocol colour with dead-ends in
    red, the source circled green and the target circled blue.
    """
    w, h = network.width, network.height
    scale = size / max(w, h, 1e-9)
    W, H = w * scale, h * scale

    def X(x):
        return _f(x * scale)

    def Y(y):
        return _f(H - y * scale)  # y axis points up in the field

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(W)}" height="{_f(H)}" viewBox="0 0 {_f(W)} {_f(H)}">',
        f'<rect x="0" y="0" width="{_f(W)}" height="{_f(H)}" fill="#ffffff"/>',
    ]
    if mask is not None:
        rows, cols = mask.shape
        cw, ch = W / cols, H / rows
        out.append('<g fill="#9aa5b1" stroke="none">')
        for r in range(rows):
            line = mask.holes[r]
            c = 0
            while c < cols:
                if line[c]:
                    start = c
                    while c < cols and line[c]:
                        c += 1
                    y = H - (r + 1) * ch
                    out.append(f'<rect x="{_f(start * cw)}" y="{_f(y)}" width="{_f((c - start) * cw)}" height="{_f(ch)}"/>')
                else:
                    c += 1
        out.append("</g>")
    xy = network.xy
    if edges and network.num_edges:
        out.append('<g stroke="#cccccc" stroke-width="0.5">')
        for u, v in network.edges.tolist():
            out.append(f'<line x1="{X(xy[u, 0])}" y1="{Y(xy[u, 1])}" x2="{X(xy[v, 0])}" y2="{Y(xy[v, 1])}"/>')
        out.append("</g>")
    out.append('<g stroke="#555555" stroke-width="0.3">')
    for u in range(network.n):
        bit = structure.addresses[u][:1] if structure is not None else ""
        out.append(f'<circle cx="{X(xy[u, 0])}" cy="{Y(xy[u, 1])}" r="{_f(node_radius)}" fill="{NODE_COLORS[bit]}"/>')
    out.append("</g>")
    for trace in routes:
        color = ROUTE_COLORS.get(trace.protocol, "#000000")
        pts = " ".join(f"{X(xy[u, 0])},{Y(xy[u, 1])}" for u in trace.path)
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for pos in trace.dead_end_positions:
            u = trace.path[pos]
            out.append(f'<circle cx="{X(xy[u, 0])}" cy="{Y(xy[u, 1])}" r="{_f(node_radius * 1.6)}" fill="#e02020"/>')
        for u, ring in ((trace.source, "#1a9a1a"), (trace.target, "#1a4fd8")):
            out.append(
                f'<circle cx="{X(xy[u, 0])}" cy="{Y(xy[u, 1])}" r="{_f(node_radius * 3)}" fill="none" stroke="{ring}" stroke-width="1.5"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
