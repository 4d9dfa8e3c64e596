"""Size-independent grammars, resized/stochastic derivation, and alignment.

A deterministic grammar fixes every size in length units, so it derives only
its source layout. Converting sizes to relative weights (keeping thin
structures such as frames absolute) makes the grammar applicable to any
rectangle: repeats place as many pattern copies as fit and rescale, relative
successors share the remaining space in proportion, absolute successors keep
their exact size. Merging several grammars yields a stochastic grammar whose
derivations mix their rules; a constrained least-squares pass re-aligns the
produced layout afterwards.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from . import lsq
from .errors import FacadegramError, GrammarError, MaterialMismatchError, ResizeError
from .grammar import (
    ABSOLUTE,
    GRIDSPLIT,
    RELATIVE,
    REPEAT,
    REPEAT_ABA,
    SPLIT,
    SYMSPLIT,
    Grammar,
    GridSpec,
    Rule,
    SizeSpec,
    SplitNode,
    SplitTree,
    check_grammar,
    derive,
)
from .layout import Layout, TerminalRect, signature_of_content
from .regularize import regularize

# slabs at or below this extent (0.2 m) keep their absolute size
THIN_THRESHOLD = 200


def make_size_independent(grammar: Grammar, thin_threshold: int = THIN_THRESHOLD) -> Grammar:
    """Convert absolute sizes to relative weights, except thin slabs."""

    def convert(spec: SizeSpec) -> SizeSpec:
        if spec.kind == ABSOLUTE and spec.value > thin_threshold:
            return SizeSpec.relative(spec.value)
        return spec

    rules = {}
    for sym, alts in grammar.rules.items():
        new_alts = []
        for weight, rule in alts:
            if rule.op == GRIDSPLIT:
                grid = GridSpec(
                    tuple(convert(s) for s in rule.grid.xs),
                    tuple(convert(s) for s in rule.grid.ys),
                    rule.grid.cells,
                )
                new_alts.append((weight, replace(rule, grid=grid)))
            else:
                succ = tuple((convert(s), sym_) for s, sym_ in rule.successors)
                new_alts.append((weight, replace(rule, successors=succ)))
        rules[sym] = tuple(new_alts)
    return Grammar(grammar.materials, grammar.start, rules, grammar.extent)


def _allocate(specs, length: int, lhs: str) -> list[int]:
    """Integer sizes for the successor sequence over ``length``.

    Absolute sizes are preserved exactly; relative weights share the remaining
    space with cumulative rounding so the sizes always sum to ``length``.
    """
    abs_total = sum(s.value for s in specs if s.kind == ABSOLUTE)
    rel_total = sum(s.value for s in specs if s.kind == RELATIVE)
    free = length - abs_total
    if free < 0:
        raise ResizeError(f"rule {lhs}: absolute sizes exceed extent {length}", lhs)
    if rel_total == 0:
        if free != 0:
            raise ResizeError(f"rule {lhs}: absolute sizes sum to {abs_total}, extent is {length}", lhs)
        return [s.value for s in specs]
    sizes = []
    abs_prefix = 0
    rel_prefix = 0
    prev = 0
    for s in specs:
        if s.kind == ABSOLUTE:
            abs_prefix += s.value
        else:
            rel_prefix += s.value
        boundary = abs_prefix + round(free * rel_prefix / rel_total)
        sizes.append(boundary - prev)
        prev = boundary
    if any(sz <= 0 for sz in sizes):
        raise ResizeError(f"rule {lhs}: a successor collapsed to zero size at extent {length}", lhs)
    return sizes


def _elastic_cells(rule: Rule, extent):
    """Expansion with stretch semantics; mirrors expand_rule_slots output."""
    w, h = extent
    if rule.op == GRIDSPLIT:
        xs = _allocate(rule.grid.xs, w, rule.lhs)
        ys = _allocate(rule.grid.ys, h, rule.lhs)
        out = []
        ncols = len(xs)
        y = 0
        for r, row in enumerate(rule.grid.cells):
            x = 0
            for c, sym in enumerate(row):
                out.append(((x, y, xs[c], ys[r]), sym, r * ncols + c))
                x += xs[c]
            y += ys[r]
        return out

    length = w if rule.axis == "x" else h
    specs = [s for s, _ in rule.successors]
    symbols = [sym for _, sym in rule.successors]

    if rule.op == SPLIT:
        seq = list(zip(specs, symbols, range(len(specs))))
    elif rule.op == SYMSPLIT:
        idx = list(range(len(specs))) + list(reversed(range(len(specs) - 1)))
        seq = [(specs[i], symbols[i], i) for i in idx]
    elif rule.op == REPEAT:
        natural = sum(s.value for s in specs)
        copies = max(1, round(length / natural))
        out = []
        prev = 0
        for k in range(1, copies + 1):
            boundary = round(k * length / copies)
            sizes = _allocate(specs, boundary - prev, rule.lhs)
            pos = prev
            for i, sz in enumerate(sizes):
                rect = (pos, 0, sz, h) if rule.axis == "x" else (0, pos, w, sz)
                out.append((rect, symbols[i], i))
                pos += sz
            prev = boundary
        return out
    elif rule.op == REPEAT_ABA:
        va, vb = specs[0].value, specs[1].value
        copies = max(1, round((length - va) / (va + vb)))
        seq = []
        for _ in range(copies):
            seq.append((specs[0], symbols[0], 0))
            seq.append((specs[1], symbols[1], 1))
        seq.append((specs[0], symbols[0], 0))
    else:  # pragma: no cover
        raise AssertionError(rule.op)

    sizes = _allocate([s for s, _, _ in seq], length, rule.lhs)
    out = []
    pos = 0
    for sz, (_, sym, slot) in zip(sizes, seq):
        rect = (pos, 0, sz, h) if rule.axis == "x" else (0, pos, w, sz)
        out.append((rect, sym, slot))
        pos += sz
    return out


def derive_resized(grammar: Grammar, width: int, height: int, seed=None) -> tuple[Layout, SplitTree]:
    """Derive at arbitrary dimensions with stretch semantics.

    At the source dimensions this reproduces the plain derivation exactly.
    Stochastic grammars sample one alternative per rule occurrence using the
    seed.
    """
    check_grammar(grammar)
    rng = None if grammar.is_deterministic else random.Random(seed)
    label_of = {name: i for i, name in enumerate(grammar.materials)}
    terminals: list[TerminalRect] = []

    def expand(symbol, rect, depth, slot):
        if symbol not in grammar.rules:
            x, y, w, h = rect
            terminals.append(TerminalRect(x, y, w, h, label_of[symbol]))
            return SplitNode(rect, symbol, slot=slot)
        if depth > 64:
            raise ResizeError("derivation exceeded depth 64 (recursive grammar?)")
        alts = grammar.rules[symbol]
        if len(alts) == 1:
            rule = alts[0][1]
        else:
            rule = rng.choices([r for _, r in alts], weights=[wgt for wgt, _ in alts])[0]
        x, y, w, h = rect
        children = []
        for (cx, cy, cw, ch), sym, child_slot in _elastic_cells(rule, (w, h)):
            children.append(expand(sym, (x + cx, y + cy, cw, ch), depth + 1, child_slot))
        return SplitNode(rect, symbol, rule, tuple(children), slot)

    root = expand(grammar.start, (0, 0, width, height), 0, 0)
    layout = Layout(width, height, grammar.materials, tuple(terminals))
    return layout, SplitTree(root, grammar.materials)


# --- alignment ----------------------------------------------------------------


@dataclass
class AlignmentProblem:
    """Least-squares re-alignment of a derived layout.

    Variables are the terminal corner coordinates; the objective keeps them
    near the grammar-produced positions. Constraints keep shared edges shared
    and force terminals emitted by the same rule slot to one size.
    """

    layout: Layout
    groups: tuple[tuple[int, ...], ...]

    @property
    def constraints(self):
        return (
            lsq.pin_constraints(self.layout)
            + lsq.adjacency_constraints(self.layout)
            + lsq.group_size_constraints(self.groups)
        )


def build_alignment_problem(layout: Layout, tree: SplitTree) -> AlignmentProblem:
    """Group the layout's terminals by the (rule, successor slot) that emitted them."""
    groups: dict[tuple, list[int]] = {}
    counter = [0]

    def walk(node):
        if node.is_leaf:
            leaf_id = counter[0]
            counter[0] += 1
            return [(leaf_id, node)]
        leaves = []
        for child in node.children:
            child_leaves = walk(child)
            leaves.extend(child_leaves)
            if child.is_leaf:
                groups.setdefault((node.rule.lhs, child.slot), []).append(child_leaves[0][0])
        return leaves

    walk(tree.root)
    if counter[0] != len(layout.terminals):
        raise FacadegramError("tree does not match the layout (leaf count differs)")
    keep = tuple(tuple(ids) for ids in groups.values() if len(ids) >= 2)
    return AlignmentProblem(layout, keep)


def align_layout(problem: AlignmentProblem) -> Layout:
    """Unique minimizer of the constrained problem as a valid layout."""
    return regularize(problem.layout, problem.groups)


# --- merging ------------------------------------------------------------------


def merge_grammars(grammars, weights=None) -> Grammar:
    """Combine grammars into one stochastic grammar.

    Non-terminals deriving identical content (by translation-normalized
    signature) unify; a unified symbol that collects several distinct rules
    becomes a stochastic choice weighted by the owning grammar's weight.
    Differing start contents are bridged by a fresh stochastic start symbol.
    """
    grammars = list(grammars)
    if not grammars:
        raise ValueError("nothing to merge")
    if weights is None:
        weights = [1.0] * len(grammars)
    if len(weights) != len(grammars) or any(w <= 0 for w in weights):
        raise ValueError("one positive weight per grammar is required")
    materials = grammars[0].materials
    for g in grammars[1:]:
        if g.materials != materials:
            raise MaterialMismatchError("merged grammars must share the material table")
    for g in grammars:
        if not g.is_deterministic:
            raise GrammarError("merge_grammars expects deterministic inputs")
        if g.extent is None:
            raise GrammarError("merge_grammars needs grammars with a recorded extent")

    sig_maps = []
    for g in grammars:
        _, tree = derive(g, *g.extent)
        sig_maps.append(_symbol_signatures(tree))

    taken = set(materials)
    canon: dict[bytes, str] = {}
    renames: list[dict[str, str]] = []
    for gi, g in enumerate(grammars):
        ren = {}
        for sym in g.rules:
            digest = sig_maps[gi][sym]
            if digest in canon:
                ren[sym] = canon[digest]
            else:
                name = sym
                while name in taken:
                    name = f"{name}_m{gi}"
                canon[digest] = name
                taken.add(name)
                ren[sym] = name
        renames.append(ren)

    merged: dict[str, list[tuple[float, Rule]]] = {}
    for gi, g in enumerate(grammars):
        for sym, alts in g.rules.items():
            lhs = renames[gi][sym]
            bucket = merged.setdefault(lhs, [])
            for wgt, rule in alts:
                new_rule = _rename_rule(rule, lhs, renames[gi])
                for k, (w0, r0) in enumerate(bucket):
                    if r0 == new_rule:
                        bucket[k] = (w0 + weights[gi] * wgt, r0)
                        break
                else:
                    bucket.append((weights[gi] * wgt, new_rule))

    start_names = [renames[gi][g.start] for gi, g in enumerate(grammars)]
    if len(set(start_names)) == 1:
        start = start_names[0]
    else:
        start = "Start"
        while start in taken:
            start += "_"
        bucket = []
        for gi, g in enumerate(grammars):
            rule = _rename_rule(g.rules[g.start][0][1], start, renames[gi])
            for k, (w0, r0) in enumerate(bucket):
                if r0 == rule:
                    bucket[k] = (w0 + weights[gi], r0)
                    break
            else:
                bucket.append((weights[gi], rule))
        merged[start] = bucket

    reachable = _reachable_symbols(merged, start)
    rules = {sym: tuple(alts) for sym, alts in merged.items() if sym in reachable}
    extents = {g.extent for g in grammars}
    out = Grammar(materials, start, rules, extents.pop() if len(extents) == 1 else None)
    return check_grammar(out)


def _symbol_signatures(tree: SplitTree) -> dict[str, bytes]:
    label_of = {name: i for i, name in enumerate(tree.materials)}
    sigs: dict[str, bytes] = {}

    def walk(node):
        x, y = node.rect[0], node.rect[1]
        if node.is_leaf:
            return [(x, y, node.rect[2], node.rect[3], label_of[node.symbol])]
        leaves = []
        for child in node.children:
            leaves.extend(walk(child))
        if node.symbol not in sigs:
            content = tuple(sorted((lx - x, ly - y, lw, lh, lab) for lx, ly, lw, lh, lab in leaves))
            sigs[node.symbol] = signature_of_content(content).digest
        return leaves

    walk(tree.root)
    return sigs


def _rename_rule(rule: Rule, lhs: str, mapping: dict[str, str]) -> Rule:
    if rule.op == GRIDSPLIT:
        cells = tuple(tuple(mapping.get(sym, sym) for sym in row) for row in rule.grid.cells)
        return Rule(lhs, GRIDSPLIT, grid=GridSpec(rule.grid.xs, rule.grid.ys, cells))
    succ = tuple((s, mapping.get(sym, sym)) for s, sym in rule.successors)
    return Rule(lhs, rule.op, rule.axis, succ)


def _reachable_symbols(rules: dict, start: str) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        sym = stack.pop()
        for _, rule in rules.get(sym, ()):
            for succ in rule.symbols():
                if succ in rules and succ not in seen:
                    seen.add(succ)
                    stack.append(succ)
    return seen
