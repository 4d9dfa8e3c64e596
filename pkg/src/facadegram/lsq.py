"""Equality-constrained least squares shared by regularization and alignment.

Layout coordinates are flattened to a vector with four variables per terminal
(x0, y0, x1, y1). The solver projects the input coordinates onto the affine
constraint set; callers then re-round to fixed-point integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleConstraintError
from .layout import Layout, TerminalRect

X0, Y0, X1, Y1 = 0, 1, 2, 3


@dataclass(frozen=True)
class Constraint:
    """One linear equality: sum(coeff * var) = rhs."""

    cid: str
    terms: tuple[tuple[int, float], ...]
    rhs: float


def var(terminal_id: int, which: int) -> int:
    return 4 * terminal_id + which


def coords_vector(layout: Layout) -> np.ndarray:
    x = np.empty(4 * len(layout.terminals))
    for i, t in enumerate(layout.terminals):
        x[4 * i : 4 * i + 4] = (t.x, t.y, t.x2, t.y2)
    return x


def solve_constrained(x0: np.ndarray, constraints: list[Constraint]) -> np.ndarray:
    """Minimize ||x - x0||^2 subject to the equality constraints.

    The minimizer is x0 plus the minimum-norm solution of A y = b - A x0,
    which is the stationarity solution of the KKT system. Inconsistent
    constraints raise InfeasibleConstraintError naming the offending ids.
    """
    x0 = np.asarray(x0, dtype=float)
    if not constraints:
        return x0.copy()
    A = np.zeros((len(constraints), x0.size))
    b = np.zeros(len(constraints))
    for r, c in enumerate(constraints):
        for idx, coeff in c.terms:
            A[r, idx] += coeff
        b[r] = c.rhs
    rhs = b - A @ x0
    y, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    residual = np.abs(A @ y - rhs)
    tol = 1e-6 * max(1.0, float(np.abs(x0).max(initial=0.0)))
    if residual.max(initial=0.0) > tol:
        bad = [constraints[i].cid for i in np.flatnonzero(residual > tol)]
        raise InfeasibleConstraintError(f"inconsistent constraints: {', '.join(bad)}", bad)
    return x0 + y


def pin_constraints(layout: Layout, tol: int = 0) -> list[Constraint]:
    """Pin coordinates lying on the domain boundary so the domain stays fixed."""
    out = []
    for i, t in enumerate(layout.terminals):
        if abs(t.x) <= tol:
            out.append(Constraint(f"pin:t{i}.x0", ((var(i, X0), 1.0),), 0.0))
        if abs(t.y) <= tol:
            out.append(Constraint(f"pin:t{i}.y0", ((var(i, Y0), 1.0),), 0.0))
        if abs(t.x2 - layout.width) <= tol:
            out.append(Constraint(f"pin:t{i}.x1", ((var(i, X1), 1.0),), float(layout.width)))
        if abs(t.y2 - layout.height) <= tol:
            out.append(Constraint(f"pin:t{i}.y1", ((var(i, Y1), 1.0),), float(layout.height)))
    return out


def adjacency_constraints(layout: Layout, tol: int = 0) -> list[Constraint]:
    """Tie coordinates of edges that coincide (within tol) with positive overlap.

    Keeping every such pair of edges equal preserves the tiling under any
    feasible motion of the coordinates.
    """
    out = []
    ts = layout.terminals
    n = len(ts)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            a, b = ts[i], ts[j]
            # right edge of a against left edge of b
            if abs(a.x2 - b.x) <= tol and _overlaps(a.y, a.y2, b.y, b.y2, tol):
                out.append(Constraint(f"adj:t{i}.x1=t{j}.x0", ((var(i, X1), 1.0), (var(j, X0), -1.0)), 0.0))
            # top edge of a against bottom edge of b
            if abs(a.y2 - b.y) <= tol and _overlaps(a.x, a.x2, b.x, b.x2, tol):
                out.append(Constraint(f"adj:t{i}.y1=t{j}.y0", ((var(i, Y1), 1.0), (var(j, Y0), -1.0)), 0.0))
    return out


def _overlaps(a0: int, a1: int, b0: int, b1: int, tol: int) -> bool:
    return min(a1, b1) - max(a0, b0) > tol


def group_size_constraints(groups, axis_vars=((X0, X1), (Y0, Y1))) -> list[Constraint]:
    """Equal width and equal height within each terminal group."""
    out = []
    for g, members in enumerate(groups):
        members = list(members)
        for k in range(1, len(members)):
            i, j = members[0], members[k]
            for name, (lo, hi) in zip(("w", "h"), axis_vars):
                out.append(
                    Constraint(
                        f"group{g}:{name}:t{i}=t{j}",
                        ((var(i, hi), 1.0), (var(i, lo), -1.0), (var(j, hi), -1.0), (var(j, lo), 1.0)),
                        0.0,
                    )
                )
    return out


def size_pin_constraints(groups, sizes) -> list[Constraint]:
    """Pin each group's width/height to the integer sizes chosen after phase 1."""
    out = []
    for g, members in enumerate(groups):
        w, h = sizes[g]
        for i in members:
            out.append(Constraint(f"size{g}:w:t{i}", ((var(i, X1), 1.0), (var(i, X0), -1.0)), float(w)))
            out.append(Constraint(f"size{g}:h:t{i}", ((var(i, Y1), 1.0), (var(i, Y0), -1.0)), float(h)))
    return out


def round_half_up(v: float) -> int:
    """Deterministic rounding with round(x + n) == round(x) + n for integer n.

    Banker's rounding breaks that identity at .5 boundaries, which would
    desynchronize coordinates pinned an integer size apart.
    """
    return math.floor(v + 0.5)


def rebuild_layout(layout: Layout, solution: np.ndarray) -> Layout:
    """Round solved coordinates back to integers and rebuild the terminals.

    Coincident coordinates solve to identical values and therefore round
    identically, so adjacency (and with it the tiling) survives rounding.
    """
    terminals = []
    for i, t in enumerate(layout.terminals):
        x0 = round_half_up(float(solution[var(i, X0)]))
        y0 = round_half_up(float(solution[var(i, Y0)]))
        x1 = round_half_up(float(solution[var(i, X1)]))
        y1 = round_half_up(float(solution[var(i, Y1)]))
        terminals.append(TerminalRect(x0, y0, x1 - x0, y1 - y0, t.label))
    return Layout(layout.width, layout.height, layout.materials, tuple(terminals), layout.groups)
