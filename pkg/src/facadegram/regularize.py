"""Least-squares regularization of measured layouts.

Repeated facade elements in traced or segmented inputs are rarely exactly
equal-sized. Regularization projects the rectangle coordinates onto the
nearest layout (in the sum-of-squared-deviations sense) in which all
terminals of a group share one size, every shared edge stays shared, and the
domain rectangle is unchanged.
"""

from __future__ import annotations

from collections import defaultdict

from . import lsq
from .errors import LayoutValidationError
from .layout import Layout, validate_layout


def default_groups(layout: Layout) -> tuple[tuple[int, ...], ...]:
    """All terminals sharing a label form one group (singletons dropped)."""
    by_label = defaultdict(list)
    for i, t in enumerate(layout.terminals):
        by_label[t.label].append(i)
    return tuple(tuple(ids) for _, ids in sorted(by_label.items()) if len(ids) >= 2)


def regularize(layout: Layout, groups=None, tol: int = 0) -> Layout:
    """Equalize grouped terminal sizes while preserving the tiling.

    Solved in two phases so the fixed-point output is exact: phase 1 finds the
    least-squares coordinates under group-equality constraints, phase 2 pins
    every group to the integer size chosen in phase 1 and re-projects. The
    result is idempotent and passes validation.
    """
    if groups is None:
        groups = layout.groups if layout.groups is not None else default_groups(layout)
    groups = [tuple(g) for g in groups if len(g) >= 2]
    for g in groups:
        for i in g:
            if not (0 <= i < len(layout.terminals)):
                raise ValueError(f"group references unknown terminal {i}")

    x0 = lsq.coords_vector(layout)
    base = lsq.pin_constraints(layout, tol) + lsq.adjacency_constraints(layout, tol)

    solved = lsq.solve_constrained(x0, base + lsq.group_size_constraints(groups))
    sizes = []
    for g in groups:
        i = g[0]
        w = lsq.round_half_up(float(solved[lsq.var(i, lsq.X1)] - solved[lsq.var(i, lsq.X0)]))
        h = lsq.round_half_up(float(solved[lsq.var(i, lsq.Y1)] - solved[lsq.var(i, lsq.Y0)]))
        sizes.append((w, h))

    final = lsq.solve_constrained(x0, base + lsq.size_pin_constraints(groups, sizes))
    out = lsq.rebuild_layout(layout, final)
    violations = validate_layout(out)
    if violations:
        raise LayoutValidationError(violations)
    return out
