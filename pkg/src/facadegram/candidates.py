"""Candidate splitting rules for a region.

Exploration cannot visit every conceivable rule, so enumeration is limited to
a family that covers the structures the optimizer needs: the maximal split on
each axis, splits isolating repeated-region instances, repeats (including a
single-symbol compound pattern), alternating repeatABA blocks, palindromic
symsplits, and product-structured gridsplits. Each candidate is scored with
the cut-cost heuristic and sampled with a softmax over negated scores.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grammar import (
    GRIDSPLIT,
    OPERATORS,
    REPEAT,
    REPEAT_ABA,
    SPLIT,
    SYMSPLIT,
    CostModel,
)
from .layout import (
    Layout,
    Rect,
    Region,
    canonical_content,
    mirrored_content,
    region_at,
    signature_of_content,
)
from .symmetry import SymmetryIndex

_OP_RANK = {REPEAT: 0, REPEAT_ABA: 1, SYMSPLIT: 2, GRIDSPLIT: 3, SPLIT: 4}
_AXIS_RANK = {"x": 0, "y": 1, None: 0}


@dataclass(frozen=True)
class SplitLine:
    """A full-width/height cut at a region-relative coordinate."""

    axis: str
    coord: int


@dataclass(frozen=True)
class HeuristicConfig:
    lambda1: float = 1.0
    lambda2: float = 1.0
    max_candidates: int = 64

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda weights must be non-negative")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be at least 1")


@dataclass(frozen=True)
class CandidateRule:
    """A rule skeleton valid for one region; symbols are assigned later.

    ``alpha`` lists the rule's written successors as (absolute size,
    representative region-relative sub-rect). gridsplit uses ``grid`` =
    (x sizes, y sizes, rows of cell rects) instead.
    """

    op: str
    axis: str | None
    alpha: tuple[tuple[int, Rect], ...]
    grid: tuple[tuple[int, ...], tuple[int, ...], tuple[tuple[Rect, ...], ...]] | None
    lines: tuple[SplitLine, ...]
    cut_sum: float
    heuristic_value: float

    @property
    def successor_count(self) -> int:
        if self.grid is not None:
            return len(self.grid[0]) * len(self.grid[1])
        return len(self.alpha)


def valid_split_lines(layout: Layout, region: Region) -> list[SplitLine]:
    """All coordinates (region-relative, borders excluded) crossing no terminal."""
    if len(region.terminal_ids) < 2:
        raise ValueError("split lines are defined for regions with at least two terminals")
    out = [SplitLine("x", c) for c in _valid_line_coords(layout, region, "x")]
    out += [SplitLine("y", c) for c in _valid_line_coords(layout, region, "y")]
    return out


def _valid_line_coords(layout: Layout, region: Region, axis: str) -> list[int]:
    rx, ry, rw, rh = region.rect
    ts = layout.terminals
    if axis == "x":
        lo, ext = rx, rw
        spans = [(ts[i].x - lo, ts[i].x2 - lo) for i in region.terminal_ids]
    else:
        lo, ext = ry, rh
        spans = [(ts[i].y - lo, ts[i].y2 - lo) for i in region.terminal_ids]
    edges = sorted({c for span in spans for c in span if 0 < c < ext})
    return [c for c in edges if not any(a < c < b for a, b in spans)]


def cut_cost(line: SplitLine, region: Region, index: SymmetryIndex) -> float:
    """Coherence lost by cutting: terminals of every repeated instance the line
    crosses, normalized by the terminals in the region.

    Instances that overlap a sibling instance of their own set stem from
    periodic structure (the copies cannot all survive as derivation regions
    anyway), so they are not counted."""
    counted = _countable_instances(region, index)
    return _cut_total(line.axis, line.coord, region, counted) / len(region.terminal_ids)


def _countable_instances(region: Region, index: SymmetryIndex):
    rx, ry, rw, rh = region.rect
    counted = []
    for rset in index.sets():
        a = rset.terminal_count
        for inst in rset.instances:
            ix, iy, iw, ih = inst.rect
            if inst.rect == region.rect:
                continue  # the region itself keeps its rule either way
            if ix < rx or iy < ry or ix + iw > rx + rw or iy + ih > ry + rh:
                continue
            if any(inst is not other and _interiors_overlap(inst.rect, other.rect) for other in rset.instances):
                continue
            counted.append((inst.rect, a))
    return counted


def _cut_total(axis: str, coord: int, region: Region, counted) -> int:
    absolute = (region.rect[0] if axis == "x" else region.rect[1]) + coord
    total = 0
    for (ix, iy, iw, ih), a in counted:
        if axis == "x":
            if ix < absolute < ix + iw:
                total += a
        elif iy < absolute < iy + ih:
            total += a
    return total


def _interiors_overlap(a, b) -> bool:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah


def heuristic(candidate: CandidateRule, cost_model: CostModel, config: HeuristicConfig) -> float:
    """lambda1 * rule cost + lambda2 * summed cut cost of the introduced lines."""
    rule_cost = cost_model.op_symbol_cost(candidate.op, candidate.successor_count)
    return config.lambda1 * rule_cost + config.lambda2 * candidate.cut_sum


def softmax_probabilities(heuristic_values) -> np.ndarray:
    """P_i = exp(-H_i) / sum_j exp(-H_j), computed with a max shift."""
    v = np.asarray(heuristic_values, dtype=float)
    z = np.exp(-(v - v.min()))
    return z / z.sum()


def sample_candidate(candidates, rng) -> CandidateRule:
    probs = softmax_probabilities([c.heuristic_value for c in candidates])
    idx = int(np.searchsorted(np.cumsum(probs), rng.random(), side="right"))
    return candidates[min(idx, len(candidates) - 1)]


@dataclass(frozen=True)
class _Slab:
    rel: Rect
    size: int
    content: tuple
    digest: bytes


def enumerate_candidates(
    layout: Layout,
    region: Region,
    index: SymmetryIndex,
    config: HeuristicConfig | None = None,
    cost_model: CostModel | None = None,
    enabled_ops=OPERATORS,
    protected=(),
) -> list[CandidateRule]:
    """Scored candidate rules for the region, deduplicated, best-H first.

    Returns an empty list when no full line splits the region (a layout
    outside split-grammar expressivity, or one locked by protected regions).
    """
    config = config or HeuristicConfig()
    cost_model = cost_model or CostModel()
    enabled = set(enabled_ops)
    rx, ry, rw, rh = region.rect
    if len(region.terminal_ids) < 2:
        raise ValueError("candidate enumeration needs a region with at least two terminals")

    coords: dict[str, list[int]] = {}
    for axis in ("x", "y"):
        cs = _valid_line_coords(layout, region, axis)
        if protected:
            cs = [c for c in cs if not _crosses_protected(region, axis, c, protected)]
        coords[axis] = cs

    span_cache: dict = {}

    def span_content(axis, b0, b1):
        key = (axis, b0, b1)
        if key not in span_cache:
            if axis == "x":
                rect = (rx + b0, ry, b1 - b0, rh)
            else:
                rect = (rx, ry + b0, rw, b1 - b0)
            sub = region_at(layout, rect, within=region)
            span_cache[key] = canonical_content(layout, sub)
        return span_cache[key]

    counted_instances = _countable_instances(region, index)
    denom = len(region.terminal_ids)
    cut_cache: dict = {}

    def cut_of(axis, coord):
        if (axis, coord) not in cut_cache:
            cut_cache[(axis, coord)] = _cut_total(axis, coord, region, counted_instances) / denom
        return cut_cache[(axis, coord)]

    protos: dict = {}

    def add(op, axis, alpha, line_coords, grid=None):
        if op not in enabled:
            return
        alpha = tuple(alpha)
        key = (op, axis, alpha, grid)
        if key in protos:
            return
        lines = tuple(SplitLine(ax, c) for ax, c in sorted(line_coords))
        cut = sum(cut_of(l.axis, l.coord) for l in lines)
        protos[key] = CandidateRule(op, axis, alpha, grid, lines, cut, 0.0)

    slabs_by_axis: dict[str, list[_Slab]] = {}
    for axis in ("x", "y"):
        cs = coords[axis]
        if not cs:
            continue
        ext = rw if axis == "x" else rh
        bounds = [0] + cs + [ext]
        slabs = []
        for b0, b1 in zip(bounds, bounds[1:]):
            content = span_content(axis, b0, b1)
            rel = (b0, 0, b1 - b0, rh) if axis == "x" else (0, b0, rw, b1 - b0)
            slabs.append(_Slab(rel, b1 - b0, content, signature_of_content(content).digest))
        slabs_by_axis[axis] = slabs

        # (a) the maximal split
        add(SPLIT, axis, [(s.size, s.rel) for s in slabs], [(axis, c) for c in cs])

        # the maximal split that preserves repeated structure: keep only the
        # lines that cut no counted repeated instance
        free = [c for c in cs if cut_of(axis, c) == 0]
        if free:
            bounds = [0] + free + [ext]
            alpha = []
            for b0, b1 in zip(bounds, bounds[1:]):
                rel = (b0, 0, b1 - b0, rh) if axis == "x" else (0, b0, rw, b1 - b0)
                alpha.append((b1 - b0, rel))
            add(SPLIT, axis, alpha, [(axis, c) for c in free])

        _add_repeats(add, axis, slabs, cs, ext, rw, rh)
        _add_repeat_aba(add, axis, cs, ext, rw, rh, span_content)
        _add_symsplit(add, axis, slabs, cs)

    _add_isolating_splits(add, region, index, coords)

    if GRIDSPLIT in enabled and coords["x"] and coords["y"]:
        _add_gridsplit(add, coords, rw, rh, layout, region)

    out = []
    for cand in protos.values():
        h = heuristic(cand, cost_model, config)
        out.append(CandidateRule(cand.op, cand.axis, cand.alpha, cand.grid, cand.lines, cand.cut_sum, h))
    out.sort(key=_order_key)
    return out[: config.max_candidates]


def _order_key(c: CandidateRule):
    return (
        c.heuristic_value,
        _OP_RANK[c.op],
        c.successor_count,
        _AXIS_RANK[c.axis],
        tuple((l.axis, l.coord) for l in c.lines),
    )


def _crosses_protected(region: Region, axis: str, coord: int, protected) -> bool:
    rx, ry, rw, rh = region.rect
    absolute = (rx if axis == "x" else ry) + coord
    for p in protected:
        px, py, pw, ph = p.rect
        if p.rect == region.rect:
            continue
        if px < rx or py < ry or px + pw > rx + rw or py + ph > ry + rh:
            continue  # not strictly inside: already separated or already cut
        if axis == "x":
            if px < absolute < px + pw:
                return True
        elif py < absolute < py + ph:
            return True
    return False


def _add_repeats(add, axis, slabs, cs, ext, rw, rh):
    m = len(slabs)
    for period in range(1, m // 2 + 1):
        if m % period:
            continue
        if any(slabs[i].digest != slabs[i % period].digest or slabs[i].size != slabs[i % period].size for i in range(period, m)):
            continue
        add(REPEAT, axis, [(s.size, s.rel) for s in slabs[:period]], [(axis, c) for c in cs])
        if period >= 2:
            # the same periodicity with the whole pattern as one compound successor
            pattern = sum(s.size for s in slabs[:period])
            copies = ext // pattern
            rel = (0, 0, pattern, rh) if axis == "x" else (0, 0, rw, pattern)
            add(REPEAT, axis, [(pattern, rel)], [(axis, k * pattern) for k in range(1, copies)])


def _add_repeat_aba(add, axis, cs, ext, rw, rh, span_content):
    pos_set = set(cs)
    for a in cs:
        for ab in cs:
            if ab <= a:
                continue
            b = ab - a
            if (ext - a) % (a + b) or (ext - a) // (a + b) < 1:
                continue
            n = (ext - a) // (a + b)
            bounds = []
            ok = True
            for k in range(n + 1):
                start = k * (a + b)
                if k and start not in pos_set:
                    ok = False
                    break
                if start + a != ext and start + a not in pos_set:
                    ok = False
                    break
                bounds.append((start, start + a, "A"))
                if k < n:
                    bounds.append((start + a, start + a + b, "B"))
            if not ok:
                continue
            a_content = span_content(axis, 0, a)
            b_content = span_content(axis, a, a + b)
            if any(span_content(axis, u, v) != (a_content if tag == "A" else b_content) for u, v, tag in bounds):
                continue
            rel_a = (0, 0, a, rh) if axis == "x" else (0, 0, rw, a)
            rel_b = (a, 0, b, rh) if axis == "x" else (0, a, rw, b)
            lines = {u for u, _, _ in bounds} | {v for _, v, _ in bounds}
            lines -= {0, ext}
            add(REPEAT_ABA, axis, [(a, rel_a), (b, rel_b)], [(axis, c) for c in sorted(lines)])


def _add_symsplit(add, axis, slabs, cs):
    m = len(slabs)
    if m < 3 or m % 2 == 0:
        return
    for i in range(m // 2 + 1):
        j = m - 1 - i
        mirror = mirrored_content(slabs[i].content, slabs[i].size, axis)
        # translational congruence keeps derivation exact; the mirror test makes
        # it a genuine reflective symmetry
        if slabs[j].content != slabs[i].content or mirror != slabs[j].content:
            return
    listed = slabs[: m // 2 + 1]
    add(SYMSPLIT, axis, [(s.size, s.rel) for s in listed], [(axis, c) for c in cs])


def _add_isolating_splits(add, region, index, coords):
    rx, ry, rw, rh = region.rect
    for rset in index.sets():
        for inst in rset.instances:
            ix, iy, iw, ih = inst.rect
            if inst.rect == region.rect:
                continue
            if ix < rx or iy < ry or ix + iw > rx + rw or iy + ih > ry + rh:
                continue
            for axis, lo, ext, e0, e1 in (
                ("x", rx, rw, ix - rx, ix + iw - rx),
                ("y", ry, rh, iy - ry, iy + ih - ry),
            ):
                lines = [c for c in (e0, e1) if c in coords[axis]]
                if not lines:
                    continue
                bounds = [0] + sorted(set(lines)) + [ext]
                alpha = []
                for b0, b1 in zip(bounds, bounds[1:]):
                    rel = (b0, 0, b1 - b0, rh) if axis == "x" else (0, b0, rw, b1 - b0)
                    alpha.append((b1 - b0, rel))
                add(SPLIT, axis, alpha, [(axis, c) for c in sorted(set(lines))])


def _add_gridsplit(add, coords, rw, rh, layout, region):
    rx, ry = region.rect[0], region.rect[1]
    xb = [0] + coords["x"] + [rw]
    yb = [0] + coords["y"] + [rh]
    sig_rows = []
    rect_rows = []
    for r in range(len(yb) - 1):
        sig_row = []
        rect_row = []
        for c in range(len(xb) - 1):
            rect = (rx + xb[c], ry + yb[r], xb[c + 1] - xb[c], yb[r + 1] - yb[r])
            sub = region_at(layout, rect, within=region)
            sig_row.append(signature_of_content(canonical_content(layout, sub)).digest)
            rect_row.append((xb[c], yb[r], xb[c + 1] - xb[c], yb[r + 1] - yb[r]))
        sig_rows.append(tuple(sig_row))
        rect_rows.append(tuple(rect_row))

    # product structure: a cell's content must be determined by (row class,
    # column class) alone, so e.g. checkerboards are rejected
    classes_of_rows: dict[tuple, int] = {}
    row_class = [classes_of_rows.setdefault(row, len(classes_of_rows)) for row in sig_rows]
    cols = [tuple(sig_rows[r][c] for r in range(len(yb) - 1)) for c in range(len(xb) - 1)]
    classes_of_cols: dict[tuple, int] = {}
    col_class = [classes_of_cols.setdefault(col, len(classes_of_cols)) for col in cols]
    seen: dict[bytes, tuple] = {}
    for r in range(len(yb) - 1):
        for c in range(len(xb) - 1):
            klass = (row_class[r], col_class[c])
            if seen.setdefault(sig_rows[r][c], klass) != klass:
                return
    xs = tuple(xb[i + 1] - xb[i] for i in range(len(xb) - 1))
    ys = tuple(yb[i + 1] - yb[i] for i in range(len(yb) - 1))
    lines = [("x", c) for c in coords["x"]] + [("y", c) for c in coords["y"]]
    add(GRIDSPLIT, None, (), lines, grid=(xs, ys, tuple(rect_rows)))
