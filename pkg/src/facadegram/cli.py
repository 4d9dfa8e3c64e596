"""Command-line interface.

Exit codes: 0 success, 1 input error (parse/validation/missing file),
2 model or expressivity error (unexplainable layout, infeasible resize),
3 internal error (a failed self-check is a bug, never silent).
Set FACADEGRAM_LOG=debug|info|warning to control logging.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .errors import (
    DerivationError,
    ExpansionError,
    FacadegramError,
    GrammarError,
    GrammarParseError,
    InfeasibleConstraintError,
    LayoutParseError,
    LayoutValidationError,
    MaterialMismatchError,
    ResizeError,
    UnexplainableLayoutError,
)
from .candidates import HeuristicConfig
from .evaluate import benchmark, compare, write_benchmark_csv
from .grammar import (
    OPERATORS,
    CostModel,
    Grammar,
    derive,
    grammar_cost,
    load_grammar,
    save_grammar,
)
from .layout import load_layout, same_layout, save_layout
from .optimizer import (
    SearchConfig,
    infer,
    infer_greedy,
    infer_importance_sampling,
    infer_joint,
)
from .regularize import regularize
from .svg import layout_svg, tree_svg
from .symmetry import build_symmetry_index
from .variation import align_layout, build_alignment_problem, derive_resized, make_size_independent, merge_grammars

log = logging.getLogger("facadegram")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_MODEL = 2
EXIT_INTERNAL = 3

_INPUT_ERRORS = (LayoutParseError, LayoutValidationError, GrammarParseError, GrammarError, FileNotFoundError, IsADirectoryError)
_MODEL_ERRORS = (
    UnexplainableLayoutError,
    ResizeError,
    MaterialMismatchError,
    InfeasibleConstraintError,
    ExpansionError,
    DerivationError,
)


def _add_cost_flags(p):
    p.add_argument("--cost-split", type=float, default=0.1)
    p.add_argument("--cost-repeat", type=float, default=0.5)
    p.add_argument("--cost-repeat-aba", type=float, default=0.5)
    p.add_argument("--cost-symsplit", type=float, default=0.5)
    p.add_argument("--cost-gridsplit", type=float, default=0.1)
    p.add_argument("--cost-symbol", type=float, default=1.0, help="cost per listed successor")
    p.add_argument("--no-op-cost", action="store_true", help="drop the per-operator term")
    p.add_argument("--no-symbol-cost", action="store_true", help="drop the per-successor term")


def _add_search_flags(p):
    p.add_argument("--iterations", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("adp", "greedy", "is"), default="adp")
    p.add_argument("--epsilon0", type=float, default=0.9)
    p.add_argument("--tau", type=float, default=None, help="epsilon decay constant (default iterations/5)")
    p.add_argument("--lambda1", type=float, default=1.0)
    p.add_argument("--lambda2", type=float, default=1.0)
    p.add_argument("--max-candidates", type=int, default=64)
    p.add_argument("--ops", default=",".join(OPERATORS), help="comma list of enabled operators")
    p.add_argument("--protect", action="store_true", help="protect sampled important regions from cuts")
    p.add_argument("--threads", type=int, default=1)


def _cost_model(args) -> CostModel:
    return CostModel(
        op_costs={
            "split": args.cost_split,
            "repeat": args.cost_repeat,
            "repeatABA": args.cost_repeat_aba,
            "symsplit": args.cost_symsplit,
            "gridsplit": args.cost_gridsplit,
        },
        per_symbol_cost=args.cost_symbol,
        use_op_cost=not args.no_op_cost,
        use_symbol_cost=not args.no_symbol_cost,
    )


def _search_config(args) -> SearchConfig:
    ops = tuple(op.strip() for op in args.ops.split(",") if op.strip())
    for op in ops:
        if op not in OPERATORS:
            raise GrammarError(f"unknown operator in --ops: {op!r}")
    return SearchConfig(
        iterations=args.iterations,
        seed=args.seed,
        epsilon0=args.epsilon0,
        tau=args.tau,
        cost_model=_cost_model(args),
        heuristic=HeuristicConfig(args.lambda1, args.lambda2, args.max_candidates),
        enabled_ops=ops,
        protect_regions=args.protect,
        threads=args.threads,
    )


_METHODS = {"adp": infer, "greedy": infer_greedy, "is": infer_importance_sampling}


def cmd_infer(args) -> int:
    layout = load_layout(args.layout)
    index = build_symmetry_index(layout)
    config = _search_config(args)
    report = _METHODS[args.method](layout, index, config)
    derived, _ = derive(report.grammar, layout.width, layout.height)
    if not same_layout(derived, layout):
        log.error("self-check failed: inferred grammar does not rederive the input")
        return EXIT_INTERNAL
    out = Path(args.output) if args.output else Path(args.layout).with_suffix(".grammar")
    save_grammar(report.grammar, out)
    report_path = Path(args.report) if args.report else out.with_suffix(".report.txt")
    report_path.write_text(report.to_text(), encoding="utf-8")
    if args.csv:
        report.write_csv(args.csv)
    print(f"cost={report.cost:.6g} rules={report.rule_count} -> {out}")
    return EXIT_OK


def cmd_derive(args) -> int:
    grammar = load_grammar(args.grammar)
    width, height = _target_extent(args, grammar)
    if _has_relative_sizes(grammar):
        layout, tree = derive_resized(grammar, width, height, seed=args.seed)
    else:
        layout, tree = derive(grammar, width, height, seed=args.seed)
    if args.align:
        layout = align_layout(build_alignment_problem(layout, tree))
    save_layout(layout, args.output)
    if args.svg:
        Path(args.svg).write_text(layout_svg(layout), encoding="utf-8")
    print(f"derived {layout.width}x{layout.height} with {len(layout.terminals)} terminals -> {args.output}")
    return EXIT_OK


def cmd_cost(args) -> int:
    grammar = load_grammar(args.grammar)
    cost = grammar_cost(grammar, _cost_model(args))
    print(f"cost={cost:.6g} rules={grammar.rule_count()}")
    return EXIT_OK


def cmd_compare(args) -> int:
    layout = load_layout(args.layout)
    a = load_grammar(args.grammar_a)
    b = load_grammar(args.grammar_b)
    r = compare(a, b, layout)
    print(
        f"precision={r.precision:.6g} recall={r.recall:.6g} f_score={r.f_score:.6g} "
        f"common={r.common_regions} regions_a={r.regions_a} regions_b={r.regions_b}"
    )
    return EXIT_OK


def cmd_render(args) -> int:
    path = Path(args.input)
    if path.suffix == ".grammar":
        grammar = load_grammar(path)
        width, height = _target_extent(args, grammar)
        if _has_relative_sizes(grammar):
            layout, tree = derive_resized(grammar, width, height, seed=args.seed)
        else:
            layout, tree = derive(grammar, width, height, seed=args.seed)
        svg = tree_svg(tree) if args.tree else layout_svg(layout)
    else:
        layout = load_layout(path)
        if args.tree:
            raise GrammarError("--tree needs a grammar input")
        svg = layout_svg(layout)
    Path(args.output).write_text(svg, encoding="utf-8")
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_regularize(args) -> int:
    layout = load_layout(args.layout, validate=False)
    # groups come from the layout file when present, else all-same-label
    out = regularize(layout, tol=args.tol)
    save_layout(out, args.output)
    moved = sum(
        1 for a, b in zip(layout.terminals, out.terminals)
        if (a.x, a.y, a.w, a.h) != (b.x, b.y, b.w, b.h)
    )
    print(f"regularized {len(out.terminals)} terminals ({moved} adjusted) -> {args.output}")
    return EXIT_OK


def cmd_joint(args) -> int:
    layouts = [load_layout(p) for p in args.layouts]
    config = _search_config(args)
    report = infer_joint(layouts, config)
    prefix = Path(args.output)
    for i, (layout, start) in enumerate(zip(layouts, report.start_symbols)):
        g = Grammar(report.grammar.materials, start, report.grammar.rules, (layout.width, layout.height))
        derived, _ = derive(g, layout.width, layout.height)
        if not same_layout(derived, layout):
            log.error("self-check failed for layout %d", i)
            return EXIT_INTERNAL
        save_grammar(g, Path(f"{prefix}.{i}.grammar"))
    Path(f"{prefix}.report.txt").write_text(report.to_text(), encoding="utf-8")
    print(f"joint cost={report.cost:.6g} rules={report.rule_count} -> {prefix}.*.grammar")
    return EXIT_OK


def cmd_variations(args) -> int:
    grammars = [load_grammar(p) for p in args.grammars]
    grammar = grammars[0] if len(grammars) == 1 else merge_grammars(grammars, args.weights)
    grammar = make_size_independent(grammar, thin_threshold=args.thin_threshold)
    width, height = _target_extent(args, grammar)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    for k in range(args.count):
        seed = args.seed + k
        layout, tree = derive_resized(grammar, width, height, seed=seed)
        if args.align:
            layout = align_layout(build_alignment_problem(layout, tree))
        stem = outdir / f"variation_{k:03d}"
        save_layout(layout, stem.with_suffix(".layout"))
        stem.with_suffix(".svg").write_text(layout_svg(layout), encoding="utf-8")
    print(f"wrote {args.count} variations to {outdir}")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    layouts = [(Path(p).stem, load_layout(p)) for p in args.layouts]
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in _METHODS:
            raise GrammarError(f"unknown method {m!r}")
    rows = benchmark(layouts, methods, _search_config(args), runs=args.runs)
    write_benchmark_csv(rows, args.output)
    for r in rows:
        if r.failed:
            print(f"{r.layout_id:<20} {r.method:<7} FAILED: {r.error}")
        else:
            print(
                f"{r.layout_id:<20} {r.method:<7} cost {r.cost_min:.6g}/{r.cost_mean:.6g} "
                f"rules {r.rules_min:.0f}/{r.rules_mean:.1f} time_ms {r.time_ms_min:.0f}/{r.time_ms_mean:.0f}"
            )
    print(f"wrote {args.output}")
    return EXIT_OK


def _has_relative_sizes(grammar: Grammar) -> bool:
    for alts in grammar.rules.values():
        for _, rule in alts:
            specs = [s for s, _ in rule.successors]
            if rule.grid is not None:
                specs = list(rule.grid.xs) + list(rule.grid.ys)
            if any(s.kind == "rel" for s in specs):
                return True
    return False


def _target_extent(args, grammar: Grammar):
    width = args.width if args.width else (grammar.extent[0] if grammar.extent else None)
    height = args.height if args.height else (grammar.extent[1] if grammar.extent else None)
    if not width or not height:
        raise GrammarError("grammar has no recorded extent; pass --width and --height")
    return width, height


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="facadegram", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="induce a grammar explaining a layout")
    p.add_argument("layout")
    p.add_argument("-o", "--output", default=None, help="grammar output path")
    p.add_argument("--report", default=None)
    p.add_argument("--csv", default=None, help="per-iteration best-cost CSV")
    _add_search_flags(p)
    _add_cost_flags(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("derive", help="apply a grammar to a rectangle")
    p.add_argument("grammar")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svg", default=None)
    p.add_argument("--align", action="store_true")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("cost", help="print a grammar's description length")
    p.add_argument("grammar")
    _add_cost_flags(p)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("compare", help="precision/recall/F between two grammars on one layout")
    p.add_argument("grammar_a")
    p.add_argument("grammar_b")
    p.add_argument("--layout", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("render", help="emit an SVG for a layout, grammar derivation, or split tree")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--tree", action="store_true", help="render the splitting tree")
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("regularize", help="equalize grouped terminal sizes")
    p.add_argument("layout")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--tol", type=int, default=0, help="adjacency snap tolerance in units")
    p.set_defaults(func=cmd_regularize)

    p = sub.add_parser("joint", help="extract one shared grammar from several layouts")
    p.add_argument("layouts", nargs="+")
    p.add_argument("-o", "--output", required=True, help="output prefix")
    _add_search_flags(p)
    _add_cost_flags(p)
    p.set_defaults(func=cmd_joint)

    p = sub.add_parser("variations", help="derive resized/stochastic layout variations")
    p.add_argument("grammars", nargs="+")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("-n", "--count", type=int, default=5)
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--weights", type=float, nargs="+", default=None)
    p.add_argument("--thin-threshold", type=int, default=200)
    p.add_argument("--align", action="store_true")
    p.set_defaults(func=cmd_variations)

    p = sub.add_parser("benchmark", help="min/mean cost, rules, time over seeded runs")
    p.add_argument("layouts", nargs="+")
    p.add_argument("-o", "--output", required=True, help="CSV output path")
    p.add_argument("--methods", default="adp,greedy,is")
    p.add_argument("--runs", type=int, default=10)
    _add_search_flags(p)
    _add_cost_flags(p)
    p.set_defaults(func=cmd_benchmark)

    return ap


def main(argv=None) -> int:
    level = os.environ.get("FACADEGRAM_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as e:
        log.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except _MODEL_ERRORS as e:
        log.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MODEL
    except FacadegramError as e:
        log.error("internal error: %s", e)
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
