"""SVG emission for layouts and splitting trees.

The y axis is flipped so (0, 0) renders at the bottom-left, matching the
layout coordinate convention. Fill colors come from a fixed palette keyed by
material index.
"""

from __future__ import annotations

from .grammar import SplitTree
from .layout import Layout

PALETTE = (
    "#f0f0f0",  # 0: reserved / outside
    "#d9c8a9",  # wall-ish
    "#9ecae1",  # window-ish
    "#a1662f",  # door-ish
    "#b0b0b0",  # ledge-ish
    "#c6dbaf",
    "#f4a582",
    "#cab2d6",
    "#ffff99",
    "#80b1d3",
    "#fb8072",
    "#bc80bd",
)

_RULE_COLORS = ("#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#17becf")


def material_color(index: int) -> str:
    return PALETTE[index % len(PALETTE)]


def layout_svg(layout: Layout, scale: float = 0.04) -> str:
    """One rect per terminal, domain-sized viewBox, y flipped."""
    w = layout.width * scale
    h = layout.height * scale
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1f}" height="{h:.1f}" '
        f'viewBox="0 0 {w:.1f} {h:.1f}">'
    ]
    for t in layout.terminals:
        x = t.x * scale
        y = (layout.height - (t.y + t.h)) * scale
        name = layout.materials[t.label] if t.label < len(layout.materials) else str(t.label)
        parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{t.w * scale:.2f}" height="{t.h * scale:.2f}" '
            f'fill="{material_color(t.label)}" stroke="#333" stroke-width="0.5"><title>{name}</title></rect>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def tree_svg(tree: SplitTree, scale: float = 0.04) -> str:
    """Nested rectangles with depth-colored borders and symbol labels."""
    _, _, rw, rh = tree.root.rect
    w = rw * scale
    h = rh * scale
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1f}" height="{h:.1f}" '
        f'viewBox="0 0 {w:.1f} {h:.1f}">'
    ]
    label_of = {name: i for i, name in enumerate(tree.materials)}

    def emit(node, depth):
        x, y, nw, nh = node.rect
        sx = x * scale
        sy = (rh - (y + nh)) * scale
        if node.is_leaf:
            fill = material_color(label_of.get(node.symbol, 0))
            parts.append(
                f'<rect x="{sx:.2f}" y="{sy:.2f}" width="{nw * scale:.2f}" height="{nh * scale:.2f}" '
                f'fill="{fill}" stroke="#999" stroke-width="0.3"/>'
            )
            return
        for child in node.children:
            emit(child, depth + 1)
        color = _RULE_COLORS[depth % len(_RULE_COLORS)]
        parts.append(
            f'<rect x="{sx:.2f}" y="{sy:.2f}" width="{nw * scale:.2f}" height="{nh * scale:.2f}" '
            f'fill="none" stroke="{color}" stroke-width="{max(0.6, 2.2 - 0.3 * depth):.2f}"/>'
        )
        parts.append(
            f'<text x="{sx + 2:.2f}" y="{sy + 9:.2f}" font-size="8" fill="{color}">{node.symbol}</text>'
        )

    emit(tree.root, 0)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
