"""Independent reference implementations used as test oracles.

Everything here is deliberately written from first principles (enumeration,
direct formula evaluation) rather than by calling the code under test.
"""

from __future__ import annotations

import itertools
import math

from facadegram.layout import Layout, canonical_content, region_at

SPLIT_COST = 0.1
REPEAT_COST = 0.5
ABA_COST = 0.5
SYM_COST = 0.5


def brute_force_repeated_sets(layout: Layout) -> dict:
    """Every exactly-tiled rectangular sub-region occurring >= 2 times.

    Returns canonical content -> frozenset of instance rects. The full domain
    is skipped (it occurs once by definition).
    """
    xs = sorted({t.x for t in layout.terminals} | {t.x2 for t in layout.terminals})
    ys = sorted({t.y for t in layout.terminals} | {t.y2 for t in layout.terminals})
    groups: dict = {}
    for i, x0 in enumerate(xs):
        for x1 in xs[i + 1 :]:
            for j, y0 in enumerate(ys):
                for y1 in ys[j + 1 :]:
                    if (x1 - x0) * (y1 - y0) == layout.width * layout.height:
                        continue
                    region = region_at(layout, (x0, y0, x1 - x0, y1 - y0))
                    if region is not None:
                        groups.setdefault(canonical_content(layout, region), set()).add(region.rect)
    return {c: frozenset(rects) for c, rects in groups.items() if len(rects) >= 2}


# --- exhaustive smallest-grammar search on single-row layouts -----------------
#
# A row layout is a sequence of (width, label) cells. Regions are contiguous
# intervals; a grammar assigns one rule per distinct interval content. The
# search enumerates every expressible rule per content and minimizes the sum
# of rule costs over the assignment, sharing rules between congruent regions.


def _row_cells(layout: Layout):
    cells = sorted(((t.x, t.w, t.label) for t in layout.terminals))
    return tuple((w, label) for _, w, label in cells)


def _interval_content(cells):
    return tuple(cells)


def _compositions(cells, max_parts=None):
    """All ways to cut a cell sequence into consecutive non-empty parts."""
    n = len(cells)
    for mask in range(1 << max(0, n - 1)):
        parts = []
        start = 0
        for b in range(n - 1):
            if mask >> b & 1:
                parts.append(cells[start : b + 1])
                start = b + 1
        parts.append(cells[start:])
        if max_parts is None or len(parts) <= max_parts:
            yield parts


def _rules_for_interval(cells, ops):
    """Every expressible rule: (op, cost, successor contents)."""
    n = len(cells)
    out = []
    if n < 2:
        return out
    if "split" in ops:
        for parts in _compositions(cells):
            if len(parts) >= 2:
                out.append(("split", SPLIT_COST + len(parts), [tuple(p) for p in parts]))
    if "repeat" in ops:
        for parts in _compositions(cells):
            # pattern = any prefix of parts that tiles the rest by copies
            for plen in range(1, len(parts)):
                pattern = parts[:plen]
                if len(parts) % plen:
                    continue
                copies = len(parts) // plen
                if copies < 2:
                    continue
                if all(parts[k * plen + i] == pattern[i] for k in range(copies) for i in range(plen)):
                    out.append(("repeat", REPEAT_COST + plen, [tuple(p) for p in pattern]))
    if "repeatABA" in ops:
        for parts in _compositions(cells, max_parts=None):
            m = len(parts)
            if m < 3 or m % 2 == 0:
                continue
            a, b = parts[0], parts[1]
            if all(parts[i] == (a if i % 2 == 0 else b) for i in range(m)):
                out.append(("repeatABA", ABA_COST + 2, [tuple(a), tuple(b)]))
    if "symsplit" in ops:
        for parts in _compositions(cells):
            m = len(parts)
            if m < 3 or m % 2 == 0:
                continue
            # palindromic under mirroring; 1D cells are self-mirror, so this is
            # plain sequence palindromicity with reversed part contents
            if all(parts[m - 1 - i] == tuple(reversed(parts[i])) and parts[m - 1 - i] == parts[i] for i in range(m)):
                listed = parts[: m // 2 + 1]
                out.append(("symsplit", SYM_COST + len(listed), [tuple(p) for p in listed]))
    dedup = {}
    for op, cost, succ in out:
        dedup[(op, cost, tuple(map(tuple, succ)))] = (op, cost, succ)
    return list(dedup.values())


def min_row_grammar_cost(layout: Layout, ops=("split", "repeat", "repeatABA", "symsplit")) -> float:
    """Exhaustive minimum grammar cost for a single-row layout."""
    cells = _row_cells(layout)
    best = [math.inf]

    def search(assigned: dict, pending: list, cost: float):
        if cost >= best[0]:
            return
        if not pending:
            best[0] = cost
            return
        content = pending[-1]
        if content in assigned or len(content) < 2:
            search(assigned, pending[:-1], cost)
            return
        for op, rule_cost, successors in _rules_for_interval(content, ops):
            new_pending = pending[:-1] + [s for s in successors if len(s) >= 2 and s not in assigned]
            search({**assigned, content: op}, new_pending, cost + rule_cost)

    if len(cells) == 1:
        return SPLIT_COST + 1
    search({}, [_interval_content(cells)], 0.0)
    return best[0]


def softmax_reference(h_values):
    """Direct evaluation of P_i = exp(-H_i) / sum exp(-H_j)."""
    weights = [math.exp(-h) for h in h_values]
    total = sum(weights)
    return [w / total for w in weights]
