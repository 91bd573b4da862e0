"""SVG snapshots of the wound and the aggregation forest.

Colour convention: active wound red, healed wound black, tree edges green,
ordinary nodes small green dots, parents larger green dots, roots blue.
Sleeping and dead nodes are not drawn.
"""

from __future__ import annotations

from pathlib import Path

from .wound import Capsule, Disk, Ellipse

SCALE = 25.0  # px per cm


def _f(v: float) -> str:
    return f"{v * SCALE:.2f}"


def _shape(s, colour: str) -> str:
    if isinstance(s, Disk):
        return f'<circle cx="{_f(s.cx)}" cy="{_f(s.cy)}" r="{_f(s.r)}" fill="{colour}"/>'
    if isinstance(s, Ellipse):
        return f'<ellipse cx="{_f(s.cx)}" cy="{_f(s.cy)}" rx="{_f(s.a)}" ry="{_f(s.b)}" fill="{colour}"/>'
    if isinstance(s, Capsule):
        return (
            f'<line x1="{_f(s.x0)}" y1="{_f(s.y0)}" x2="{_f(s.x1)}" y2="{_f(s.y1)}" '
            f'stroke="{colour}" stroke-width="{_f(2 * s.r)}" stroke-linecap="round"/>'
        )
    raise TypeError(s)


def snapshot_svg(state) -> str:
    """Render the state at the end of the last completed round."""
    cfg = state.config
    t = max(state.t - 1, 0)
    fld = state.field
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(cfg.patch_width)}" '
        f'height="{_f(cfg.patch_height)}" viewBox="0 0 {_f(cfg.patch_width)} {_f(cfg.patch_height)}">',
        f"<title>round {state.t - 1}</title>",
        f'<rect x="0" y="0" width="{_f(cfg.patch_width)}" height="{_f(cfg.patch_height)}" fill="white"/>',
        '<g id="healed">',
    ]
    lines += [_shape(s, "black") for s in fld.shapes(fld.peak_round(t))]
    lines.append('</g>\n<g id="wound">')
    lines += [_shape(s, "red") for s in fld.shapes(t)]
    lines.append("</g>")

    live = [n for n in state.nodes if n.active and n.is_alive]
    by_id = {n.id: n for n in live}
    parents = {n.parent for n in live if n.parent != n.id and n.parent in by_id}
    lines.append('<g id="edges">')
    for n in live:
        p = by_id.get(n.parent)
        if p is not None and p is not n:
            lines.append(
                f'<line x1="{_f(n.loc.x)}" y1="{_f(n.loc.y)}" x2="{_f(p.loc.x)}" y2="{_f(p.loc.y)}" '
                f'stroke="green" stroke-width="1"/>'
            )
    lines.append('</g>\n<g id="nodes">')
    for n in live:
        if n.parent == n.id:
            lines.append(f'<circle class="root" cx="{_f(n.loc.x)}" cy="{_f(n.loc.y)}" r="4.5" fill="blue"/>')
        elif n.id in parents:
            lines.append(f'<circle class="parent" cx="{_f(n.loc.x)}" cy="{_f(n.loc.y)}" r="3.5" fill="green"/>')
        else:
            lines.append(f'<circle class="node" cx="{_f(n.loc.x)}" cy="{_f(n.loc.y)}" r="2" fill="green"/>')
    lines.append("</g>\n</svg>\n")
    return "\n".join(lines)


def render_snapshot(state, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(snapshot_svg(state), encoding="utf-8")
    return path
