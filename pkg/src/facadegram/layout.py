"""Facade layouts: labeled rectangle tilings, validation, signatures, file I/O.

Coordinates are fixed-point integers, 1000 units to the meter, origin at the
bottom-left corner. A valid layout's terminals tile the domain rectangle
exactly. Material label 0 is reserved for "outside" and never appears on a
terminal.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import LayoutParseError, LayoutValidationError

UNITS_PER_METER = 1000

# (x, y, w, h) with the lower-left corner first
Rect = tuple[int, int, int, int]

OVERLAP = "overlap"
GAP = "gap"
OUT_OF_BOUNDS = "out-of-bounds"
BAD_LABEL = "bad-label"


@dataclass(frozen=True)
class TerminalRect:
    """An atomic labeled rectangle; never split further."""

    x: int
    y: int
    w: int
    h: int
    label: int

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    @property
    def rect(self) -> Rect:
        return (self.x, self.y, self.w, self.h)


@dataclass(frozen=True)
class Layout:
    """A rectangular domain tiled by labeled terminal rectangles.

    ``groups`` is optional metadata naming same-size terminal groups for
    regularization; it does not affect validity.
    """

    width: int
    height: int
    materials: tuple[str, ...]
    terminals: tuple[TerminalRect, ...]
    groups: tuple[tuple[int, ...], ...] | None = None

    @property
    def domain(self) -> Rect:
        return (0, 0, self.width, self.height)


@dataclass(frozen=True)
class Violation:
    kind: str
    terminal_ids: tuple[int, ...]
    detail: str

    def __str__(self) -> str:
        ids = ",".join(map(str, self.terminal_ids)) or "-"
        return f"{self.kind}[{ids}]: {self.detail}"


def validate_layout(layout: Layout) -> list[Violation]:
    """Return all invariant violations; an empty list means the layout is valid."""
    out: list[Violation] = []
    if layout.width <= 0 or layout.height <= 0:
        out.append(Violation(OUT_OF_BOUNDS, (), "domain must have positive extent"))
        return out
    n_mat = len(layout.materials)
    for i, t in enumerate(layout.terminals):
        if t.w <= 0 or t.h <= 0:
            out.append(Violation(OUT_OF_BOUNDS, (i,), f"terminal {i} has non-positive size {t.w}x{t.h}"))
        elif t.x < 0 or t.y < 0 or t.x2 > layout.width or t.y2 > layout.height:
            out.append(Violation(OUT_OF_BOUNDS, (i,), f"terminal {i} extends past the domain"))
        if not (1 <= t.label < n_mat):
            out.append(Violation(BAD_LABEL, (i,), f"terminal {i} has label {t.label}, valid range is 1..{n_mat - 1}"))
    if out:
        return out

    ts = layout.terminals
    order = sorted(range(len(ts)), key=lambda i: (ts[i].x, ts[i].y))
    for a in range(len(order)):
        i = order[a]
        ti = ts[i]
        for b in range(a + 1, len(order)):
            j = order[b]
            tj = ts[j]
            if tj.x >= ti.x2:
                break
            if ti.y < tj.y2 and tj.y < ti.y2:
                out.append(Violation(OVERLAP, tuple(sorted((i, j))), f"terminals {i} and {j} overlap"))
    if out:
        return out

    covered = sum(t.w * t.h for t in ts)
    if covered != layout.width * layout.height:
        out.append(Violation(GAP, (), _gap_witness(layout)))
    return out


def _gap_witness(layout: Layout) -> str:
    # coordinate-compressed scan for the first uncovered cell
    xs = sorted({0, layout.width} | {t.x for t in layout.terminals} | {t.x2 for t in layout.terminals})
    ys = sorted({0, layout.height} | {t.y for t in layout.terminals} | {t.y2 for t in layout.terminals})
    for yi in range(len(ys) - 1):
        for xi in range(len(xs) - 1):
            cx, cy = xs[xi], ys[yi]
            if not any(t.x <= cx and t.x2 > cx and t.y <= cy and t.y2 > cy for t in layout.terminals):
                return f"uncovered area at ({cx},{cy})"
    return "covered area does not add up (overlap past domain?)"


@dataclass(frozen=True)
class Region:
    """An axis-aligned sub-rectangle plus the terminals that tile it exactly."""

    rect: Rect
    terminal_ids: tuple[int, ...]


def full_region(layout: Layout) -> Region:
    return Region(layout.domain, tuple(range(len(layout.terminals))))


def region_at(layout: Layout, rect: Rect, within: Region | None = None) -> Region | None:
    """The Region exactly tiled by whole terminals over ``rect``, or None.

    ``within`` restricts the candidate terminals (the rect must lie inside it).
    """
    x0, y0, w, h = rect
    if w <= 0 or h <= 0:
        return None
    x1, y1 = x0 + w, y0 + h
    pool = within.terminal_ids if within is not None else range(len(layout.terminals))
    ids = []
    area = 0
    ts = layout.terminals
    for i in pool:
        t = ts[i]
        if t.x >= x1 or t.x2 <= x0 or t.y >= y1 or t.y2 <= y0:
            continue
        if t.x < x0 or t.x2 > x1 or t.y < y0 or t.y2 > y1:
            return None  # crosses the rect boundary
        ids.append(i)
        area += t.w * t.h
    if not ids or area != w * h:
        return None
    return Region(rect, tuple(ids))


# --- content signatures -----------------------------------------------------

# canonical content: terminals translated so the region's lower-left corner is
# the origin, sorted by (x, y, w, h, label)
Content = tuple[tuple[int, int, int, int, int], ...]


@dataclass(frozen=True)
class ContentSignature:
    """128-bit digest of a region's translation-normalized content."""

    digest: bytes

    @property
    def hex(self) -> str:
        return self.digest.hex()

    def __repr__(self) -> str:
        return f"ContentSignature({self.digest.hex()[:12]})"


def canonical_content(layout: Layout, region: Region) -> Content:
    rx, ry = region.rect[0], region.rect[1]
    ts = layout.terminals
    return tuple(sorted((ts[i].x - rx, ts[i].y - ry, ts[i].w, ts[i].h, ts[i].label) for i in region.terminal_ids))


def mirrored_content(content: Content, extent: int, axis: str = "x") -> Content:
    """Reflection of a canonical content across the given axis of its region."""
    if axis == "x":
        return tuple(sorted((extent - (x + w), y, w, h, label) for x, y, w, h, label in content))
    return tuple(sorted((x, extent - (y + h), w, h, label) for x, y, w, h, label in content))


def signature_of_content(content: Content) -> ContentSignature:
    blob = repr(content).encode("ascii")
    return ContentSignature(hashlib.blake2b(blob, digest_size=16).digest())


def signature(layout: Layout, region: Region) -> ContentSignature:
    """Translation-invariant digest of a region's terminal content."""
    return signature_of_content(canonical_content(layout, region))


def mirrored_signature(layout: Layout, region: Region, axis: str = "x") -> ContentSignature:
    extent = region.rect[2] if axis == "x" else region.rect[3]
    return signature_of_content(mirrored_content(canonical_content(layout, region), extent, axis))


def same_layout(a: Layout, b: Layout) -> bool:
    """Equality up to terminal ordering (groups metadata ignored)."""
    return (
        a.width == b.width
        and a.height == b.height
        and a.materials == b.materials
        and sorted(t.rect + (t.label,) for t in a.terminals) == sorted(t.rect + (t.label,) for t in b.terminals)
    )


# --- file format -------------------------------------------------------------
#
# JSON with top-level keys: version (must be 1), width, height, materials
# (array of strings, index 0 reserved), terminals (array of {x,y,w,h,label}),
# and an optional groups array of terminal-id arrays. Integers only.


def loads_layout(text: str, validate: bool = True) -> Layout:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise LayoutParseError(f"not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise LayoutParseError("top level must be an object")
    if doc.get("version") != 1:
        raise LayoutParseError("missing or unsupported 'version' (expected 1)")
    for key in ("width", "height", "materials", "terminals"):
        if key not in doc:
            raise LayoutParseError(f"missing key '{key}'")
    width, height = _require_int(doc, "width"), _require_int(doc, "height")
    materials = doc["materials"]
    if not isinstance(materials, list) or not all(isinstance(m, str) for m in materials) or len(materials) < 2:
        raise LayoutParseError("'materials' must be a list of at least two strings (index 0 is reserved)")
    raw = doc["terminals"]
    if not isinstance(raw, list):
        raise LayoutParseError("'terminals' must be a list")
    terminals = []
    for i, obj in enumerate(raw):
        if not isinstance(obj, dict):
            raise LayoutParseError(f"terminal {i} must be an object")
        vals = {}
        for key in ("x", "y", "w", "h", "label"):
            v = obj.get(key)
            if not isinstance(v, int) or isinstance(v, bool):
                raise LayoutParseError(f"terminal {i}: '{key}' must be an integer")
            vals[key] = v
        terminals.append(TerminalRect(**vals))
    groups = None
    if "groups" in doc:
        g = doc["groups"]
        if not isinstance(g, list) or not all(
            isinstance(grp, list) and all(isinstance(i, int) and not isinstance(i, bool) for i in grp) for grp in g
        ):
            raise LayoutParseError("'groups' must be a list of integer lists")
        groups = tuple(tuple(grp) for grp in g)
        for grp in groups:
            for i in grp:
                if not (0 <= i < len(terminals)):
                    raise LayoutParseError(f"group references unknown terminal {i}")
    layout = Layout(width, height, tuple(materials), tuple(terminals), groups)
    if validate:
        violations = validate_layout(layout)
        if violations:
            raise LayoutValidationError(violations)
    return layout


def _require_int(doc: dict, key: str) -> int:
    v = doc[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise LayoutParseError(f"'{key}' must be an integer")
    return v


def dumps_layout(layout: Layout) -> str:
    doc = {
        "version": 1,
        "width": layout.width,
        "height": layout.height,
        "materials": list(layout.materials),
        "terminals": [{"x": t.x, "y": t.y, "w": t.w, "h": t.h, "label": t.label} for t in layout.terminals],
    }
    if layout.groups is not None:
        doc["groups"] = [list(g) for g in layout.groups]
    return json.dumps(doc, indent=2) + "\n"


def load_layout(path, validate: bool = True) -> Layout:
    """Load and (by default) validate a layout file."""
    with open(path, "r", encoding="utf-8") as fh:
        return loads_layout(fh.read(), validate=validate)


def save_layout(layout: Layout, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_layout(layout))
