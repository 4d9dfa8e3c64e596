"""Minimum-description-length split grammar induction for facade layouts."""

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
from .grammar import (
    CostModel,
    Grammar,
    GridSpec,
    Rule,
    SizeSpec,
    SplitNode,
    SplitTree,
    derive,
    dumps_grammar,
    expand_rule,
    grammar_cost,
    load_grammar,
    loads_grammar,
    save_grammar,
    validate_grammar,
)
from .layout import (
    ContentSignature,
    Layout,
    Region,
    TerminalRect,
    Violation,
    canonical_content,
    dumps_layout,
    full_region,
    load_layout,
    loads_layout,
    mirrored_signature,
    region_at,
    same_layout,
    save_layout,
    signature,
    validate_layout,
)
from .candidates import (
    CandidateRule,
    HeuristicConfig,
    SplitLine,
    cut_cost,
    enumerate_candidates,
    heuristic,
    sample_candidate,
    softmax_probabilities,
    valid_split_lines,
)
from .evaluate import ComparisonResult, benchmark, compare, nonterminal_regions, write_benchmark_csv
from .optimizer import (
    SearchConfig,
    SearchReport,
    ValueTable,
    infer,
    infer_greedy,
    infer_importance_sampling,
    infer_joint,
    select_protected_regions,
    update_value_table,
)
from .regularize import default_groups, regularize
from .symmetry import (
    RepeatedRegionSet,
    SymmetryIndex,
    build_symmetry_index,
    dump_index,
    grow_region,
    importance_score,
)
from .variation import (
    AlignmentProblem,
    align_layout,
    build_alignment_problem,
    derive_resized,
    make_size_independent,
    merge_grammars,
)

__version__ = "0.1.0"
