"""Search for the minimum-cost grammar explaining one or more layouts.

Each iteration derives a complete deterministic grammar top-down: unsplit
regions are processed bottom-to-top, left-to-right, and for each one the
engine either explores (samples a candidate rule, softmax-weighted by the
splitting heuristic) or exploits (replays the best known action for that
region content from the value table). The exploration probability decays
exponentially over iterations; the cheapest grammar seen wins.

Greedy (always take the best-scored candidate, one pass) and importance
sampling (always explore, keep the best of many passes) reuse the same
engine as baselines. Joint extraction runs the engine over several layouts
with one shared symbol table, value table and rule set.
"""

from __future__ import annotations

import heapq
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .candidates import HeuristicConfig, enumerate_candidates, softmax_probabilities
from .errors import MaterialMismatchError, UnexplainableLayoutError
from .grammar import (
    GRIDSPLIT,
    OPERATORS,
    SPLIT,
    CostModel,
    Grammar,
    GridSpec,
    Rule,
    SizeSpec,
    SplitTree,
    check_grammar,
    expand_rule,
)
from .layout import (
    ContentSignature,
    Layout,
    Region,
    canonical_content,
    full_region,
    region_at,
    signature_of_content,
)
from .symmetry import SymmetryIndex, build_symmetry_index, importance_score

ADP = "adp"
GREEDY = "greedy"
IMPORTANCE_SAMPLING = "is"


@dataclass
class SearchConfig:
    iterations: int = 2000
    seed: int = 0
    epsilon0: float = 0.9
    tau: float | None = None  # exploration decay time constant; default iterations / 5
    cost_model: CostModel = field(default_factory=CostModel)
    heuristic: HeuristicConfig = field(default_factory=HeuristicConfig)
    enabled_ops: tuple[str, ...] = OPERATORS
    protect_regions: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if not (0.0 <= self.epsilon0 <= 1.0):
            raise ValueError("epsilon0 must lie in [0, 1]")
        if self.tau is not None and self.tau <= 0:
            raise ValueError("tau must be positive")

    def epsilon(self, iteration: int) -> float:
        tau = self.tau if self.tau is not None else self.iterations / 5
        return self.epsilon0 * math.exp(-iteration / tau)


class ValueEntry(NamedTuple):
    value: float
    action: Rule


class ValueTable:
    """Best known subtree cost and action per region content signature."""

    def __init__(self):
        self._entries: dict[bytes, ValueEntry] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, sig: ContentSignature) -> ValueEntry | None:
        return self._entries.get(sig.digest)

    def update(self, sig: ContentSignature, value: float, action: Rule) -> bool:
        """Store iff strictly better; entries never increase."""
        return self._update_digest(sig.digest, value, action)

    def _update_digest(self, digest: bytes, value: float, action: Rule) -> bool:
        old = self._entries.get(digest)
        if old is not None and old.value <= value:
            return False
        self._entries[digest] = ValueEntry(value, action)
        return True

    def snapshot(self) -> dict[bytes, ValueEntry]:
        return dict(self._entries)


def update_value_table(table: ValueTable, tree: SplitTree, cost_model: CostModel) -> ValueTable:
    """Fold a finished splitting tree into the table, bottom-up.

    A node's subtree value is its rule cost plus the values of its distinct
    child contents (each distinct signature counted once, approximating rule
    reuse). Entries are replaced only by strictly smaller values.
    """
    label_of = {name: i for i, name in enumerate(tree.materials)}

    def walk(node):
        x, y = node.rect[0], node.rect[1]
        if node.is_leaf:
            content = ((0, 0, node.rect[2], node.rect[3], label_of[node.symbol]),)
            return 0.0, [(x, y, node.rect[2], node.rect[3], label_of[node.symbol])], signature_of_content(content)
        value = cost_model.rule_cost(node.rule)
        leaves = []
        seen = set()
        for child in node.children:
            child_value, child_leaves, child_sig = walk(child)
            leaves.extend(child_leaves)
            if child_sig.digest not in seen:
                seen.add(child_sig.digest)
                value += child_value
        content = tuple(sorted((lx - x, ly - y, lw, lh, lab) for lx, ly, lw, lh, lab in leaves))
        sig = signature_of_content(content)
        table.update(sig, value, node.rule)
        return value, leaves, sig

    walk(tree.root)
    return table


def select_protected_regions(index: SymmetryIndex, rng) -> list[Region]:
    """Non-overlapping instances sampled with probability proportional to
    importance + 1, greedily keeping each drawn instance that fits."""
    pool = []
    weights = []
    for rset in index.sets():
        w = importance_score(rset) + 1.0
        for inst in rset.instances:
            pool.append(inst)
            weights.append(w)
    if not pool:
        return []
    # weighted order without replacement (exponential-sort trick)
    keys = rng.random(len(pool)) ** (1.0 / np.asarray(weights))
    kept: list[Region] = []
    for i in np.argsort(-keys):
        rect = pool[i].rect
        if not any(_interiors_overlap(rect, k.rect) for k in kept):
            kept.append(pool[i])
    return kept


def _interiors_overlap(a, b) -> bool:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return ax < bx + bw and bx < ax + aw and ay < by + bh and by < ay + ah


@dataclass(frozen=True)
class IterationStat:
    iteration: int
    best_cost: float
    elapsed_ms: float


@dataclass
class SearchReport:
    grammar: Grammar
    cost: float
    rule_count: int
    iterations: list[IterationStat]
    iterations_run: int
    aborted: int
    method: str
    seed: int
    start_symbols: tuple[str, ...]

    def to_text(self) -> str:
        lines = [
            f"method: {self.method}",
            f"seed: {self.seed}",
            f"iterations: {self.iterations_run} (aborted: {self.aborted})",
            f"best cost: {self.cost:.6g}",
            f"rules: {self.rule_count}",
            f"start symbols: {', '.join(self.start_symbols)}",
            f"total time: {sum(s.elapsed_ms for s in self.iterations) / 1000.0:.3f} s",
        ]
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("iteration,best_cost,elapsed_ms\n")
            for s in self.iterations:
                fh.write(f"{s.iteration},{s.best_cost:.9g},{s.elapsed_ms:.3f}\n")


def infer(layout: Layout, index: SymmetryIndex, config: SearchConfig | None = None) -> SearchReport:
    """Approximate-dynamic-programming search over the layout."""
    return _Engine([layout], [index], config or SearchConfig(), ADP).run()


def infer_greedy(layout: Layout, index: SymmetryIndex, config: SearchConfig | None = None) -> SearchReport:
    """One deterministic pass always taking the best-scored candidate."""
    return _Engine([layout], [index], config or SearchConfig(), GREEDY).run()


def infer_importance_sampling(layout: Layout, index: SymmetryIndex, config: SearchConfig | None = None) -> SearchReport:
    """Best of many pure-exploration passes (no value table)."""
    return _Engine([layout], [index], config or SearchConfig(), IMPORTANCE_SAMPLING).run()


def infer_joint(layouts, config: SearchConfig | None = None) -> SearchReport:
    """Extract one shared rule set across several layouts.

    All layouts must carry identical material tables; congruent regions share
    symbols and rules across layouts, so the reported cost is the cost of the
    union rule set.
    """
    layouts = list(layouts)
    if len(layouts) < 2:
        raise ValueError("joint extraction needs at least two layouts")
    materials = layouts[0].materials
    for lay in layouts[1:]:
        if lay.materials != materials:
            raise MaterialMismatchError("joint extraction requires identical material tables")
    indexes = [build_symmetry_index(lay) for lay in layouts]
    return _Engine(layouts, indexes, config or SearchConfig(), ADP).run()


class _Engine:
    def __init__(self, layouts, indexes, config, mode):
        self.layouts = layouts
        self.indexes = indexes
        self.config = config
        self.mode = mode
        self.cost_model = config.cost_model
        self.materials = layouts[0].materials
        self.material_set = set(self.materials[1:])
        self.full_regions = [full_region(lay) for lay in layouts]

        self.regions: dict = {}  # (li, rect) -> Region
        self.sigs: dict = {}  # (li, rect) -> ContentSignature
        self.symbols: dict[bytes, str] = {}
        self.next_symbol = 1
        self.cands: dict = {}  # (li, digest) -> (candidates, rules, cumprobs)
        self.expansions: dict[Rule, list] = {}  # rule -> [(rel rect, symbol, compound)]
        self.vt = ValueTable()

    # --- caches ---------------------------------------------------------

    def region_of(self, li, rect, parent=None) -> Region:
        key = (li, rect)
        region = self.regions.get(key)
        if region is None:
            region = region_at(self.layouts[li], rect, within=parent)
            assert region is not None, f"rect {rect} is not exactly tiled"
            self.regions[key] = region
        return region

    def sig_of(self, li, rect, parent=None) -> ContentSignature:
        key = (li, rect)
        sig = self.sigs.get(key)
        if sig is None:
            content = canonical_content(self.layouts[li], self.region_of(li, rect, parent))
            sig = signature_of_content(content)
            self.sigs[key] = sig
        return sig

    def symbol_of(self, sig: ContentSignature) -> str:
        sym = self.symbols.get(sig.digest)
        if sym is None:
            sym = f"NT{self.next_symbol}"
            self.next_symbol += 1
            self.symbols[sig.digest] = sym
        return sym

    def child_symbol(self, li, rect, parent) -> str:
        region = self.region_of(li, rect, parent)
        if len(region.terminal_ids) == 1:
            t = self.layouts[li].terminals[region.terminal_ids[0]]
            return self.materials[t.label]
        return self.symbol_of(self.sig_of(li, rect, parent))

    def candidates_for(self, li, rect, digest, protected):
        if protected and any(_strictly_inside(p.rect, rect) for p in protected):
            entry = self._enumerate(li, rect, protected)
            if entry[0]:
                return entry
            # protection can lock a region entirely; fall back to unprotected
        key = (li, digest)
        entry = self.cands.get(key)
        if entry is None:
            entry = self._enumerate(li, rect, ())
            self.cands[key] = entry
        return entry

    def _enumerate(self, li, rect, protected):
        region = self.region_of(li, rect)
        cands = enumerate_candidates(
            self.layouts[li],
            region,
            self.indexes[li],
            self.config.heuristic,
            self.cost_model,
            self.config.enabled_ops,
            protected=protected,
        )
        rules = [self._materialize(li, rect, c) for c in cands]
        cum = None
        if cands and self.mode != GREEDY:
            cum = np.cumsum(softmax_probabilities([c.heuristic_value for c in cands]))
        return cands, rules, cum

    def _materialize(self, li, rect, cand) -> Rule:
        rx, ry = rect[0], rect[1]
        parent = self.region_of(li, rect)
        lhs = self.symbol_of(self.sig_of(li, rect))
        if cand.grid is not None:
            xs, ys, rows = cand.grid
            cells = tuple(
                tuple(self.child_symbol(li, (rx + cx, ry + cy, cw, ch), parent) for cx, cy, cw, ch in row)
                for row in rows
            )
            grid = GridSpec(tuple(map(SizeSpec.absolute, xs)), tuple(map(SizeSpec.absolute, ys)), cells)
            return Rule(lhs, GRIDSPLIT, grid=grid)
        succ = tuple(
            (SizeSpec.absolute(size), self.child_symbol(li, (rx + cx, ry + cy, cw, ch), parent))
            for size, (cx, cy, cw, ch) in cand.alpha
        )
        return Rule(lhs, cand.op, cand.axis, succ)

    def expansion_of(self, rule: Rule, extent) -> list:
        cells = self.expansions.get(rule)
        if cells is None:
            cells = [
                (rect, sym, sym not in self.material_set)
                for rect, sym in expand_rule(rule, extent)
            ]
            self.expansions[rule] = cells
        return cells

    # --- one iteration ----------------------------------------------------

    def _iterate(self, iteration, vt_lookup):
        rng = np.random.default_rng((self.config.seed, iteration))
        eps = 1.0 if self.mode == IMPORTANCE_SAMPLING else self.config.epsilon(iteration)
        protected = [[] for _ in self.layouts]
        if self.config.protect_regions and self.mode != GREEDY:
            protected = [select_protected_regions(ix, rng) for ix in self.indexes]

        rules: dict[str, Rule] = {}
        digest_of: dict[str, bytes] = {}
        starts = []
        heap = []
        for li, lay in enumerate(self.layouts):
            root = self.full_regions[li]
            sig = self.sig_of(li, root.rect)
            sym = self.symbol_of(sig)
            starts.append(sym)
            if len(root.terminal_ids) == 1:
                if sym not in rules:
                    t = lay.terminals[0]
                    rules[sym] = Rule(sym, SPLIT, "y", ((SizeSpec.absolute(lay.height), self.materials[t.label]),))
                    digest_of[sym] = sig.digest
            else:
                heapq.heappush(heap, (li, 0, 0, root.rect, None))

        while heap:
            li, _, _, rect, parent_rect = heapq.heappop(heap)
            parent = self.regions.get((li, parent_rect)) if parent_rect else None
            sig = self.sig_of(li, rect, parent)
            sym = self.symbols[sig.digest]
            if sym in rules:
                continue

            rule = None
            if self.mode == GREEDY:
                cands, mats, _ = self.candidates_for(li, rect, sig.digest, protected[li])
                if not cands:
                    return None, starts, []
                rule = mats[0]
            else:
                if rng.random() >= eps:
                    entry = vt_lookup(sig.digest)
                    if entry is not None:
                        rule = entry.action
                if rule is None:
                    cands, mats, cum = self.candidates_for(li, rect, sig.digest, protected[li])
                    if not cands:
                        return None, starts, []
                    if cum is None:
                        cum = np.cumsum(softmax_probabilities([c.heuristic_value for c in cands]))
                    idx = int(np.searchsorted(cum, rng.random(), side="right"))
                    rule = mats[min(idx, len(mats) - 1)]

            rules[sym] = rule
            digest_of[sym] = sig.digest
            rx, ry = rect[0], rect[1]
            extent = (rect[2], rect[3])
            for (cx, cy, cw, ch), child_sym, compound in self.expansion_of(rule, extent):
                if compound and child_sym not in rules:
                    heapq.heappush(heap, (li, ry + cy, rx + cx, (rx + cx, ry + cy, cw, ch), rect))

        cost = sum(self.cost_model.rule_cost(r) for r in rules.values())
        updates = []
        if self.mode == ADP:
            updates = self._value_updates(rules, digest_of)
        return (cost, dict(rules)), starts, updates

    def _value_updates(self, rules, digest_of):
        # subtree value: own rule cost plus the values of distinct child
        # contents, each counted once (approximates rule reuse)
        memo: dict[str, float] = {}

        def value(sym):
            if sym not in rules:
                return 0.0  # terminal
            if sym in memo:
                return memo[sym]
            rule = rules[sym]
            total = self.cost_model.rule_cost(rule)
            for child in set(rule.symbols()):
                total += value(child)
            memo[sym] = total
            return total

        return [(digest_of[sym], value(sym), rule) for sym, rule in rules.items()]

    # --- driver -----------------------------------------------------------

    def run(self) -> SearchReport:
        iterations = 1 if self.mode == GREEDY else self.config.iterations
        best_cost = math.inf
        best_rules = None
        best_starts = None
        stats = []
        aborted = 0

        def consume(iteration, outcome, elapsed_ms):
            nonlocal best_cost, best_rules, best_starts, aborted
            result, starts, updates = outcome
            for digest, val, action in sorted(updates, key=lambda u: u[0]):
                self.vt._update_digest(digest, val, action)
            if result is None:
                aborted += 1
            else:
                cost, rules = result
                if cost < best_cost:
                    best_cost = cost
                    best_rules = rules
                    best_starts = tuple(starts)
            stats.append(IterationStat(iteration, best_cost, elapsed_ms))

        if self.config.threads <= 1 or self.mode == GREEDY:
            for it in range(iterations):
                t0 = time.perf_counter()
                outcome = self._iterate(it, self.vt._entries.get)
                consume(it, outcome, (time.perf_counter() - t0) * 1000.0)
        else:
            with ThreadPoolExecutor(max_workers=self.config.threads) as pool:
                for base in range(0, iterations, self.config.threads):
                    batch = range(base, min(base + self.config.threads, iterations))
                    snap = self.vt.snapshot()

                    def timed(it):
                        t0 = time.perf_counter()
                        outcome = self._iterate(it, snap.get)
                        return outcome, (time.perf_counter() - t0) * 1000.0

                    for it, (outcome, ms) in zip(batch, pool.map(timed, batch)):
                        consume(it, outcome, ms)

        if best_rules is None:
            raise UnexplainableLayoutError(
                f"all {iterations} iterations aborted: some region admits no candidate rule"
            )
        grammar = Grammar(
            self.materials,
            best_starts[0],
            {sym: ((1.0, rule),) for sym, rule in best_rules.items()},
            extent=(self.layouts[0].width, self.layouts[0].height) if len(self.layouts) == 1 else None,
        )
        check_grammar(grammar)
        return SearchReport(
            grammar=grammar,
            cost=best_cost,
            rule_count=len(best_rules),
            iterations=stats,
            iterations_run=iterations,
            aborted=aborted,
            method=self.mode,
            seed=self.config.seed,
            start_symbols=best_starts,
        )


def _strictly_inside(inner, outer) -> bool:
    ix, iy, iw, ih = inner
    ox, oy, ow, oh = outer
    return inner != outer and ix >= ox and iy >= oy and ix + iw <= ox + ow and iy + ih <= oy + oh
