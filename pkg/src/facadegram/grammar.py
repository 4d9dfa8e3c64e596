"""Split grammars over rectangle tilings.

A grammar maps non-terminal symbols to splitting rules; terminal symbols are
material names. Deterministic grammars carry exactly one rule per symbol and
absolute sizes, so applying them to the start rectangle reproduces one layout
exactly. Stochastic grammars carry weighted alternatives.

Rule operators:

* ``split``     - cut a region into the listed slabs along one axis
* ``repeat``    - tile the region with copies of the listed pattern
* ``repeatABA`` - alternate two successors A B A ... A (ends with A)
* ``symsplit``  - listed successors plus their mirror completion (palindrome)
* ``gridsplit`` - cut along both axes at once into a cell matrix
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .errors import DerivationError, ExpansionError, GrammarError, GrammarParseError
from .layout import Layout, Rect, TerminalRect

SPLIT = "split"
REPEAT = "repeat"
REPEAT_ABA = "repeatABA"
SYMSPLIT = "symsplit"
GRIDSPLIT = "gridsplit"
OPERATORS = (SPLIT, REPEAT, REPEAT_ABA, SYMSPLIT, GRIDSPLIT)

ABSOLUTE = "abs"
RELATIVE = "rel"

MAX_DERIVE_DEPTH = 64

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class SizeSpec:
    """Successor size: absolute length-units or a relative weight."""

    kind: str
    value: int

    def __post_init__(self):
        if self.kind not in (ABSOLUTE, RELATIVE):
            raise ValueError(f"bad size kind {self.kind!r}")
        if self.value <= 0:
            raise ValueError("sizes must be positive")

    @staticmethod
    def absolute(value: int) -> "SizeSpec":
        return SizeSpec(ABSOLUTE, value)

    @staticmethod
    def relative(value: int) -> "SizeSpec":
        return SizeSpec(RELATIVE, value)


@dataclass(frozen=True)
class GridSpec:
    """Sizes along both axes plus the row-major cell matrix (bottom row first)."""

    xs: tuple[SizeSpec, ...]
    ys: tuple[SizeSpec, ...]
    cells: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not self.xs or not self.ys:
            raise ValueError("gridsplit needs sizes on both axes")
        if len(self.cells) != len(self.ys) or any(len(row) != len(self.xs) for row in self.cells):
            raise ValueError("gridsplit cell matrix does not match the size lists")


@dataclass(frozen=True)
class Rule:
    """One production: lhs -> op alpha."""

    lhs: str
    op: str
    axis: str | None = None
    successors: tuple[tuple[SizeSpec, str], ...] = ()
    grid: GridSpec | None = None

    def __post_init__(self):
        if self.op not in OPERATORS:
            raise ValueError(f"unknown operator {self.op!r}")
        if self.op == GRIDSPLIT:
            if self.grid is None or self.successors:
                raise ValueError("gridsplit carries a grid, not linear successors")
        else:
            if self.axis not in ("x", "y"):
                raise ValueError(f"{self.op} needs axis 'x' or 'y'")
            if not self.successors:
                raise ValueError("successors must be non-empty")
            if self.op == REPEAT_ABA and len(self.successors) != 2:
                raise ValueError("repeatABA lists exactly two successors")

    @property
    def successor_count(self) -> int:
        """|alpha|: listed successors only (cell count for gridsplit)."""
        if self.op == GRIDSPLIT:
            return len(self.grid.xs) * len(self.grid.ys)
        return len(self.successors)

    def symbols(self):
        if self.op == GRIDSPLIT:
            for row in self.grid.cells:
                yield from row
        else:
            for _, sym in self.successors:
                yield sym


DEFAULT_OP_COSTS = {SPLIT: 0.1, REPEAT: 0.5, REPEAT_ABA: 0.5, SYMSPLIT: 0.5, GRIDSPLIT: 0.1}


@dataclass
class CostModel:
    """Description-length model: rule cost = op cost + successors * unit cost."""

    op_costs: dict = field(default_factory=lambda: dict(DEFAULT_OP_COSTS))
    per_symbol_cost: float = 1.0
    use_op_cost: bool = True
    use_symbol_cost: bool = True

    def __post_init__(self):
        if self.per_symbol_cost < 0 or any(c < 0 for c in self.op_costs.values()):
            raise ValueError("costs must be non-negative")

    def op_symbol_cost(self, op: str, successor_count: int) -> float:
        cost = 0.0
        if self.use_op_cost:
            cost += self.op_costs[op]
        if self.use_symbol_cost:
            cost += self.per_symbol_cost * successor_count
        return cost

    def rule_cost(self, rule: Rule) -> float:
        return self.op_symbol_cost(rule.op, rule.successor_count)


@dataclass
class Grammar:
    """Symbol tables plus rules; terminal symbols are the material names.

    ``rules`` maps each non-terminal to a tuple of (weight, Rule) alternatives;
    deterministic grammars have exactly one alternative per symbol. ``extent``
    records the source layout dimensions when known.
    """

    materials: tuple[str, ...]
    start: str
    rules: dict[str, tuple[tuple[float, Rule], ...]]
    extent: tuple[int, int] | None = None

    @property
    def nonterminals(self) -> tuple[str, ...]:
        return tuple(self.rules)

    @property
    def is_deterministic(self) -> bool:
        return all(len(alts) == 1 for alts in self.rules.values())

    def is_terminal(self, symbol: str) -> bool:
        return symbol in self.materials[1:]

    def rule_for(self, symbol: str) -> Rule:
        alts = self.rules.get(symbol)
        if alts is None:
            raise GrammarError(f"no rule for symbol {symbol!r}")
        if len(alts) != 1:
            raise GrammarError(f"symbol {symbol!r} is stochastic; no single rule")
        return alts[0][1]

    def rule_count(self) -> int:
        return sum(len(alts) for alts in self.rules.values())


def grammar_cost(grammar: Grammar, cost_model: CostModel | None = None) -> float:
    """Total description length: each distinct rule counted exactly once."""
    cost_model = cost_model or CostModel()
    return sum(cost_model.rule_cost(rule) for alts in grammar.rules.values() for _, rule in alts)


def validate_grammar(grammar: Grammar) -> list[str]:
    """Return structural problems; empty list means the grammar is well-formed."""
    problems = []
    terminals = set(grammar.materials[1:])
    for sym, alts in grammar.rules.items():
        if sym in terminals:
            problems.append(f"symbol {sym!r} is both a material and a non-terminal")
        if not alts:
            problems.append(f"symbol {sym!r} has an empty rule list")
        for weight, rule in alts:
            if weight <= 0:
                problems.append(f"rule for {sym!r} has non-positive weight {weight}")
            if rule.lhs != sym:
                problems.append(f"rule under {sym!r} carries lhs {rule.lhs!r}")
            for succ in rule.symbols():
                if succ not in terminals and succ not in grammar.rules:
                    problems.append(f"rule for {sym!r} references undefined symbol {succ!r}")
    if grammar.start not in grammar.rules:
        problems.append(f"start symbol {grammar.start!r} has no rule")
    if not problems and grammar.is_deterministic:
        cycle = _find_cycle(grammar)
        if cycle:
            problems.append("cycle through " + " -> ".join(cycle))
    return problems


def check_grammar(grammar: Grammar) -> Grammar:
    problems = validate_grammar(grammar)
    if problems:
        raise GrammarError("; ".join(problems))
    return grammar


def _find_cycle(grammar: Grammar):
    state: dict[str, int] = {}  # 1 = on stack, 2 = done

    def visit(sym, stack):
        if sym not in grammar.rules:
            return None
        if state.get(sym) == 1:
            return stack[stack.index(sym) :] + [sym]
        if state.get(sym) == 2:
            return None
        state[sym] = 1
        stack.append(sym)
        for succ in grammar.rule_for(sym).symbols():
            found = visit(succ, stack)
            if found:
                return found
        stack.pop()
        state[sym] = 2
        return None

    return visit(grammar.start, [])


# --- expansion ---------------------------------------------------------------


def expand_rule(rule: Rule, extent: tuple[int, int]) -> list[tuple[Rect, str]]:
    """Deterministic expansion of one rule over a (w, h) extent.

    Returns (sub-rect, symbol) pairs in order along the axis (gridsplit: cells
    row-major, bottom row first). Sub-rects are relative to the region's
    lower-left corner. All sizes must be absolute and add up to the extent.
    """
    return [(rect, sym) for rect, sym, _ in expand_rule_slots(rule, extent)]


def expand_rule_slots(rule: Rule, extent: tuple[int, int]) -> list[tuple[Rect, str, int]]:
    """Like expand_rule but also reports the listed-successor slot of each cell."""
    w, h = extent
    if w <= 0 or h <= 0:
        raise ExpansionError(f"rule {rule.lhs}: extent {w}x{h} is not positive")

    if rule.op == GRIDSPLIT:
        xs = [_abs_value(rule, s) for s in rule.grid.xs]
        ys = [_abs_value(rule, s) for s in rule.grid.ys]
        _check_total(rule, sum(xs), w, "x")
        _check_total(rule, sum(ys), h, "y")
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
    sizes = [_abs_value(rule, s) for s, _ in rule.successors]
    symbols = [sym for _, sym in rule.successors]

    if rule.op == SPLIT:
        _check_total(rule, sum(sizes), length, rule.axis)
        seq = list(zip(sizes, symbols, range(len(sizes))))
    elif rule.op == REPEAT:
        pattern = sum(sizes)
        if length % pattern != 0:
            raise ExpansionError(
                f"rule {rule.lhs}: pattern extent {pattern} does not divide region extent {length}"
            )
        copies = length // pattern
        seq = [(sizes[i], symbols[i], i) for _ in range(copies) for i in range(len(sizes))]
    elif rule.op == REPEAT_ABA:
        a, b = sizes
        if length <= a or (length - a) % (a + b) != 0:
            raise ExpansionError(
                f"rule {rule.lhs}: extent {length} is not n*(A+B)+A for A={a}, B={b}"
            )
        n = (length - a) // (a + b)
        if n < 1:
            raise ExpansionError(f"rule {rule.lhs}: repeatABA needs at least one B block")
        seq = []
        for _ in range(n):
            seq.append((a, symbols[0], 0))
            seq.append((b, symbols[1], 1))
        seq.append((a, symbols[0], 0))
    elif rule.op == SYMSPLIT:
        idx = list(range(len(sizes))) + list(reversed(range(len(sizes) - 1)))
        _check_total(rule, sum(sizes[i] for i in idx), length, rule.axis)
        seq = [(sizes[i], symbols[i], i) for i in idx]
    else:  # pragma: no cover
        raise AssertionError(rule.op)

    out = []
    pos = 0
    for size, sym, slot in seq:
        rect = (pos, 0, size, h) if rule.axis == "x" else (0, pos, w, size)
        out.append((rect, sym, slot))
        pos += size
    return out


def _abs_value(rule: Rule, spec: SizeSpec) -> int:
    if spec.kind != ABSOLUTE:
        raise ExpansionError(
            f"rule {rule.lhs}: relative sizes need the resizing deriver (deterministic expansion only)"
        )
    return spec.value


def _check_total(rule: Rule, total: int, expected: int, axis: str) -> None:
    if total != expected:
        raise ExpansionError(
            f"rule {rule.lhs}: sizes along {axis} sum to {total}, region extent is {expected}"
        )


# --- derivation --------------------------------------------------------------


@dataclass(frozen=True)
class SplitNode:
    """One node of a splitting tree; leaves are terminal regions.

    ``slot`` is the index of the listed successor (in the parent rule's alpha)
    this node was emitted from; repeated pattern copies share a slot.
    """

    rect: Rect
    symbol: str
    rule: Rule | None = None
    children: tuple["SplitNode", ...] = ()
    slot: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.rule is None


@dataclass(frozen=True)
class SplitTree:
    """Derivation trace: which rule was applied to which rectangle."""

    root: SplitNode
    materials: tuple[str, ...]

    def nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def leaves(self):
        return (n for n in self.nodes() if n.is_leaf)

    def applied_rules(self) -> tuple[Rule, ...]:
        seen = {}
        for node in self.nodes():
            if node.rule is not None and node.symbol not in seen:
                seen[node.symbol] = node.rule
        return tuple(seen.values())


def derive(grammar: Grammar, width: int, height: int, seed=None) -> tuple[Layout, SplitTree]:
    """Apply the grammar to a width x height start rectangle.

    Deterministic grammars ignore the seed and always produce the same layout;
    stochastic grammars sample one alternative per rule occurrence.
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
        if depth > MAX_DERIVE_DEPTH:
            raise DerivationError(f"derivation exceeded depth {MAX_DERIVE_DEPTH} (recursive grammar?)")
        alts = grammar.rules[symbol]
        if len(alts) == 1:
            rule = alts[0][1]
        else:
            weights = [wgt for wgt, _ in alts]
            rule = rng.choices([r for _, r in alts], weights=weights)[0]
        x, y, w, h = rect
        children = []
        for (cx, cy, cw, ch), sym, child_slot in expand_rule_slots(rule, (w, h)):
            children.append(expand(sym, (x + cx, y + cy, cw, ch), depth + 1, child_slot))
        return SplitNode(rect, symbol, rule, tuple(children), slot)

    root = expand(grammar.start, (0, 0, width, height), 0, 0)
    layout = Layout(width, height, grammar.materials, tuple(terminals))
    return layout, SplitTree(root, grammar.materials)


# --- text format -------------------------------------------------------------
#
# Header lines (key: value): version (must be 1), materials (pipe-separated,
# index 0 first), start, and an optional extent "W H". Rule lines:
#
#   NT1 -> split(y){ 1000: Floor | 2000: Top }
#   NT2 -> [0.5] repeat(x){ 500: wall | 500r: window }
#   NT3 -> gridsplit(x: 500 | 500; y: 300 | 300){ wall | window / window | wall }
#
# An integer size is absolute (length units); an "r" suffix marks a relative
# weight. Stochastic alternatives repeat the lhs with a [weight] prefix.
# gridsplit rows are bottom-to-top, separated by "/". '#' starts a comment.


def dumps_grammar(grammar: Grammar) -> str:
    lines = ["version: 1", "materials: " + " | ".join(grammar.materials), f"start: {grammar.start}"]
    if grammar.extent is not None:
        lines.append(f"extent: {grammar.extent[0]} {grammar.extent[1]}")
    lines.append("")
    for sym, alts in grammar.rules.items():
        for weight, rule in alts:
            prefix = "" if len(alts) == 1 and weight == 1.0 else f"[{weight:g}] "
            lines.append(f"{sym} -> {prefix}{_format_body(rule)}")
    return "\n".join(lines) + "\n"


def _format_size(spec: SizeSpec) -> str:
    return f"{spec.value}r" if spec.kind == RELATIVE else str(spec.value)


def _format_body(rule: Rule) -> str:
    if rule.op == GRIDSPLIT:
        xs = " | ".join(_format_size(s) for s in rule.grid.xs)
        ys = " | ".join(_format_size(s) for s in rule.grid.ys)
        rows = " / ".join(" | ".join(row) for row in rule.grid.cells)
        return f"gridsplit(x: {xs}; y: {ys}){{ {rows} }}"
    body = " | ".join(f"{_format_size(s)}: {sym}" for s, sym in rule.successors)
    return f"{rule.op}({rule.axis}){{ {body} }}"


class _Scanner:
    def __init__(self, text: str, line_no: int):
        self.text = text
        self.line = line_no
        self.pos = 0

    def error(self, message: str):
        raise GrammarParseError(message, self.line, self.pos + 1)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, literal: str):
        self.skip_ws()
        if not self.text.startswith(literal, self.pos):
            self.error(f"expected {literal!r}")
        self.pos += len(literal)

    def try_take(self, literal: str) -> bool:
        self.skip_ws()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def name(self) -> str:
        self.skip_ws()
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a symbol name")
        self.pos = m.end()
        return m.group()

    def number(self) -> float:
        self.skip_ws()
        m = re.match(r"[0-9]+(\.[0-9]+)?", self.text[self.pos :])
        if not m:
            self.error("expected a number")
        self.pos += m.end()
        return float(m.group())

    def size(self) -> SizeSpec:
        self.skip_ws()
        m = re.match(r"([0-9]+)(r?)", self.text[self.pos :])
        if not m or m.group(1) == "":
            self.error("expected a size (integer, optional 'r' suffix)")
        self.pos += m.end()
        value = int(m.group(1))
        if value <= 0:
            self.error("sizes must be positive")
        return SizeSpec(RELATIVE if m.group(2) else ABSOLUTE, value)


def _parse_rule_line(text: str, line_no: int) -> tuple[str, float, Rule]:
    sc = _Scanner(text, line_no)
    lhs = sc.name()
    sc.take("->")
    weight = 1.0
    if sc.try_take("["):
        weight = sc.number()
        sc.take("]")
    op = sc.name()
    if op not in OPERATORS:
        sc.error(f"unknown operator {op!r}")
    if op == GRIDSPLIT:
        sc.take("(")
        sc.take("x")
        sc.take(":")
        xs = [sc.size()]
        while sc.try_take("|"):
            xs.append(sc.size())
        sc.take(";")
        sc.take("y")
        sc.take(":")
        ys = [sc.size()]
        while sc.try_take("|"):
            ys.append(sc.size())
        sc.take(")")
        sc.take("{")
        rows = []
        while True:
            row = [sc.name()]
            while sc.try_take("|"):
                row.append(sc.name())
            rows.append(tuple(row))
            if not sc.try_take("/"):
                break
        sc.take("}")
        if any(len(row) != len(xs) for row in rows) or len(rows) != len(ys):
            sc.error("cell matrix does not match the size lists")
        rule = Rule(lhs, GRIDSPLIT, grid=GridSpec(tuple(xs), tuple(ys), tuple(rows)))
    else:
        sc.take("(")
        axis = sc.name()
        if axis not in ("x", "y"):
            sc.error("axis must be x or y")
        sc.take(")")
        sc.take("{")
        succ = []
        while True:
            size = sc.size()
            sc.take(":")
            succ.append((size, sc.name()))
            if not sc.try_take("|"):
                break
        sc.take("}")
        if op == REPEAT_ABA and len(succ) != 2:
            sc.error("repeatABA lists exactly two successors")
        rule = Rule(lhs, op, axis, tuple(succ))
    if not sc.at_end():
        sc.error("trailing input after rule")
    return lhs, weight, rule


def loads_grammar(text: str) -> Grammar:
    header: dict[str, tuple[str, int]] = {}
    rules: dict[str, list[tuple[float, Rule]]] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if "->" in line:
            lhs, weight, rule = _parse_rule_line(line, line_no)
            rules.setdefault(lhs, []).append((weight, rule))
        else:
            if ":" not in line:
                raise GrammarParseError("expected 'key: value' or a rule", line_no, 1)
            key, _, value = line.partition(":")
            header[key.strip()] = (value.strip(), line_no)
    for key in ("version", "materials", "start"):
        if key not in header:
            raise GrammarParseError(f"missing header '{key}'", 1, 1)
    if header["version"][0] != "1":
        raise GrammarParseError("unsupported version (expected 1)", header["version"][1], 1)
    materials = tuple(m.strip() for m in header["materials"][0].split("|"))
    if len(materials) < 2 or any(not m for m in materials):
        raise GrammarParseError("materials must list the reserved entry plus at least one name", header["materials"][1], 1)
    extent = None
    if "extent" in header:
        parts = header["extent"][0].split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise GrammarParseError("extent must be 'W H'", header["extent"][1], 1)
        extent = (int(parts[0]), int(parts[1]))
    grammar = Grammar(materials, header["start"][0], {k: tuple(v) for k, v in rules.items()}, extent)
    return check_grammar(grammar)


def load_grammar(path) -> Grammar:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_grammar(fh.read())


def save_grammar(grammar: Grammar, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_grammar(grammar))
