"""Translational symmetry detection over a layout.

Finds every repeated, exactly-tiled sub-rectangle reachable by growing from
repeated terminals: seed with each terminal profile occurring at least twice,
then repeatedly extend instances left/right/up/down to the nearest exactly
tiled superset and keep any grown content that occurs twice or more. The
instance list of a set always holds every congruent occurrence in the layout.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass

from .errors import FacadegramError
from .layout import (
    Content,
    ContentSignature,
    Layout,
    Region,
    canonical_content,
    region_at,
    signature,
    signature_of_content,
)

DIRECTIONS = ("left", "right", "top", "bottom")


@dataclass(frozen=True)
class RepeatedRegionSet:
    """All translationally congruent instances of one region content."""

    signature: ContentSignature
    content: Content
    instances: tuple[Region, ...]  # sorted bottom-to-top, then left-to-right

    @property
    def terminal_count(self) -> int:
        return len(self.content)

    @property
    def occurrence_count(self) -> int:
        return len(self.instances)


def importance_score(rset: RepeatedRegionSet) -> int:
    """(a - 1) * (o - 1): terminals per instance times occurrences, both less one."""
    return (rset.terminal_count - 1) * (rset.occurrence_count - 1)


class SymmetryIndex:
    """Hash index from content signature to its repeated-region set.

    Lookups verify canonical content on digest match, so hash collisions can
    never conflate two different contents.
    """

    def __init__(self):
        self._sets: dict[bytes, RepeatedRegionSet] = {}

    def __len__(self) -> int:
        return len(self._sets)

    def __contains__(self, sig: ContentSignature) -> bool:
        return sig.digest in self._sets

    def add(self, rset: RepeatedRegionSet) -> None:
        existing = self._sets.get(rset.signature.digest)
        if existing is not None and existing.content != rset.content:
            raise FacadegramError("content signature collision; digest size insufficient")
        self._sets[rset.signature.digest] = rset

    def remove(self, sig: ContentSignature) -> None:
        self._sets.pop(sig.digest, None)

    def get(self, sig: ContentSignature) -> RepeatedRegionSet | None:
        return self._sets.get(sig.digest)

    def query(self, layout: Layout, region: Region) -> RepeatedRegionSet | None:
        """The set congruent to ``region``, with exact content verification."""
        rset = self.get(signature(layout, region))
        if rset is None or rset.content != canonical_content(layout, region):
            return None
        return rset

    def sets(self) -> tuple[RepeatedRegionSet, ...]:
        return tuple(self._sets.values())


def grow_region(layout: Layout, region: Region, direction: str) -> Region | None:
    """Smallest exactly-tiled rectangular superset extending in one direction.

    Candidate far edges are the terminal boundaries overlapping the region's
    band; the first candidate whose rectangle is tiled by whole terminals
    wins. Returns None when blocked at the layout edge or when no candidate
    edge aligns (the staircase case).
    """
    x0, y0, w, h = region.rect
    x1, y1 = x0 + w, y0 + h
    ts = layout.terminals
    if direction == "right":
        cands = sorted({t.x2 for t in ts if t.x2 > x1 and t.y < y1 and t.y2 > y0})
        rects = [(x0, y0, c - x0, h) for c in cands]
    elif direction == "left":
        cands = sorted({t.x for t in ts if t.x < x0 and t.y < y1 and t.y2 > y0}, reverse=True)
        rects = [(c, y0, x1 - c, h) for c in cands]
    elif direction == "top":
        cands = sorted({t.y2 for t in ts if t.y2 > y1 and t.x < x1 and t.x2 > x0})
        rects = [(x0, y0, w, c - y0) for c in cands]
    elif direction == "bottom":
        cands = sorted({t.y for t in ts if t.y < y0 and t.x < x1 and t.x2 > x0}, reverse=True)
        rects = [(x0, c, w, y1 - c) for c in cands]
    else:
        raise ValueError(f"unknown direction {direction!r}")
    for rect in rects:
        grown = region_at(layout, rect)
        if grown is not None:
            return grown
    return None


def find_instances(layout: Layout, content: Content) -> tuple[Region, ...]:
    """Every exactly-tiled occurrence of a canonical content, sorted (y, x)."""
    ax, ay, aw, ah, alabel = content[0]
    ext_w = max(x + w for x, _, w, _, _ in content)
    ext_h = max(y + h for _, y, _, h, _ in content)
    found = []
    for t in layout.terminals:
        if (t.w, t.h, t.label) != (aw, ah, alabel):
            continue
        ox, oy = t.x - ax, t.y - ay
        if ox < 0 or oy < 0 or ox + ext_w > layout.width or oy + ext_h > layout.height:
            continue
        region = region_at(layout, (ox, oy, ext_w, ext_h))
        if region is not None and canonical_content(layout, region) == content:
            found.append(region)
    unique = {r.rect: r for r in found}
    return tuple(sorted(unique.values(), key=lambda r: (r.rect[1], r.rect[0])))


def build_symmetry_index(layout: Layout) -> SymmetryIndex:
    """Fixed point of growing from repeated-terminal seeds."""
    index = SymmetryIndex()
    rejected: set[bytes] = set()
    worklist: deque[RepeatedRegionSet] = deque()

    by_profile = defaultdict(list)
    for i, t in enumerate(layout.terminals):
        by_profile[(t.w, t.h, t.label)].append(i)
    seeds = []
    for (w, h, label), ids in by_profile.items():
        if len(ids) < 2:
            continue
        content = ((0, 0, w, h, label),)
        instances = tuple(
            sorted(
                (Region(layout.terminals[i].rect, (i,)) for i in ids),
                key=lambda r: (r.rect[1], r.rect[0]),
            )
        )
        seeds.append(RepeatedRegionSet(signature_of_content(content), content, instances))
    seeds.sort(key=lambda s: (s.instances[0].rect[1], s.instances[0].rect[0]))
    for seed in seeds:
        index.add(seed)
        worklist.append(seed)

    while worklist:
        rset = worklist.popleft()
        for instance in rset.instances:
            for direction in DIRECTIONS:
                grown = grow_region(layout, instance, direction)
                if grown is None:
                    continue
                content = canonical_content(layout, grown)
                sig = signature_of_content(content)
                if sig.digest in rejected or index.get(sig) is not None:
                    continue
                instances = find_instances(layout, content)
                if len(instances) >= 2:
                    new_set = RepeatedRegionSet(sig, content, instances)
                    index.add(new_set)
                    worklist.append(new_set)
                else:
                    rejected.add(sig.digest)
    return index


def dump_index(index: SymmetryIndex) -> str:
    """One line per set for golden-file tests: sig prefix, a, o, instance rects."""
    lines = []
    for rset in index.sets():
        rects = ";".join("({},{},{},{})".format(*r.rect) for r in rset.instances)
        lines.append(
            f"{rset.signature.hex[:12]} a={rset.terminal_count} o={rset.occurrence_count} {rects}"
        )
    return "\n".join(sorted(lines)) + ("\n" if lines else "")
