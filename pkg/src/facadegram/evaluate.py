"""Grammar-to-grammar similarity and batch benchmarking."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

from .errors import DerivationError, ExpansionError, FacadegramError
from .grammar import Grammar, derive
from .layout import Layout, Rect, same_layout
from .optimizer import (
    ADP,
    GREEDY,
    IMPORTANCE_SAMPLING,
    SearchConfig,
    infer,
    infer_greedy,
    infer_importance_sampling,
)
from .symmetry import build_symmetry_index

METHODS = {ADP: infer, GREEDY: infer_greedy, IMPORTANCE_SAMPLING: infer_importance_sampling}


@dataclass(frozen=True)
class ComparisonResult:
    precision: float
    recall: float
    f_score: float
    common_regions: int
    regions_a: int
    regions_b: int


def nonterminal_regions(grammar: Grammar, layout: Layout) -> set[Rect]:
    """Distinct rectangles of internal derivation nodes, root domain excluded."""
    try:
        derived, tree = derive(grammar, layout.width, layout.height)
    except ExpansionError as e:
        raise DerivationError(f"grammar does not derive the given layout: {e}") from e
    if not same_layout(derived, layout):
        raise DerivationError("grammar does not derive the given layout")
    return {n.rect for n in tree.nodes() if not n.is_leaf and n.rect != layout.domain}


def compare(grammar_a: Grammar, grammar_b: Grammar, layout: Layout) -> ComparisonResult:
    """Precision/recall/F over shared internal regions; a is the candidate,
    b the reference. Common regions match by exact rectangle."""
    ra = nonterminal_regions(grammar_a, layout)
    rb = nonterminal_regions(grammar_b, layout)
    common = len(ra & rb)
    precision = common / len(ra) if ra else 1.0
    recall = common / len(rb) if rb else 1.0
    f_score = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return ComparisonResult(precision, recall, f_score, common, len(ra), len(rb))


@dataclass
class BenchmarkRow:
    layout_id: str
    method: str
    runs: int
    cost_min: float | None = None
    cost_mean: float | None = None
    rules_min: float | None = None
    rules_mean: float | None = None
    time_ms_min: float | None = None
    time_ms_mean: float | None = None
    failed: bool = False
    error: str = ""


def benchmark(layouts, methods, config: SearchConfig | None = None, runs: int = 10) -> list[BenchmarkRow]:
    """Min/mean of cost, rule count and wall time over n seeded runs per cell.

    ``layouts`` is an iterable of (id, Layout); failures are recorded in the
    row instead of propagating.
    """
    config = config or SearchConfig()
    rows = []
    for layout_id, layout in layouts:
        index = build_symmetry_index(layout)
        for method in methods:
            run = METHODS[method]
            costs, rules, times = [], [], []
            row = BenchmarkRow(layout_id, method, runs)
            try:
                for k in range(runs):
                    t0 = time.perf_counter()
                    report = run(layout, index, replace(config, seed=config.seed + k))
                    times.append((time.perf_counter() - t0) * 1000.0)
                    costs.append(report.cost)
                    rules.append(report.rule_count)
                row.cost_min, row.cost_mean = min(costs), sum(costs) / runs
                row.rules_min, row.rules_mean = min(rules), sum(rules) / runs
                row.time_ms_min, row.time_ms_mean = min(times), sum(times) / runs
            except FacadegramError as e:
                row.failed = True
                row.error = str(e)
            rows.append(row)
    return rows


def write_benchmark_csv(rows, path) -> None:
    def cell(v):
        return "" if v is None else f"{v:.6g}"

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("layout_id,method,runs,cost_min,cost_mean,rules_min,rules_mean,time_ms_min,time_ms_mean\n")
        for r in rows:
            fh.write(
                f"{r.layout_id},{r.method},{r.runs},{cell(r.cost_min)},{cell(r.cost_mean)},"
                f"{cell(r.rules_min)},{cell(r.rules_mean)},{cell(r.time_ms_min)},{cell(r.time_ms_mean)}\n"
            )
