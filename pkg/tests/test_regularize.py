import itertools

import numpy as np
import pytest

from facadegram import corpus
from facadegram.errors import InfeasibleConstraintError
from facadegram.layout import Layout, TerminalRect, same_layout, validate_layout
from facadegram.regularize import default_groups, regularize

MATS = ("outside", "wall", "window")


def row(widths, labels, height=10, width=None):
    ts = []
    x = 0
    for w, lab in zip(widths, labels):
        ts.append(TerminalRect(x, 0, w, height, lab))
        x += w
    return Layout(width or x, height, MATS, tuple(ts))


def test_already_feasible_is_identity():
    lay = row([20, 10, 40, 10, 20], [1, 2, 1, 2, 1])
    out = regularize(lay, groups=[(1, 3)])
    assert out == lay


def test_two_windows_meet_in_the_middle():
    lay = row([20, 10, 30, 12, 28], [1, 2, 1, 2, 1])
    out = regularize(lay, groups=[(1, 3)])
    assert out.terminals[1].w == 11
    assert out.terminals[3].w == 11
    assert validate_layout(out) == []


def test_idempotent_exactly():
    lay = row([20, 10, 30, 12, 28], [1, 2, 1, 2, 1])
    once = regularize(lay, groups=[(1, 3)])
    assert regularize(once, groups=[(1, 3)]) == once


def _perturb_grid(base, xs_map, ys_map):
    ts = []
    for t in base.terminals:
        x0 = xs_map.get(t.x, t.x)
        y0 = ys_map.get(t.y, t.y)
        x1 = xs_map.get(t.x2, t.x2)
        y1 = ys_map.get(t.y2, t.y2)
        ts.append(TerminalRect(x0, y0, x1 - x0, y1 - y0, t.label))
    return Layout(base.width, base.height, base.materials, tuple(ts))


def test_perturbed_grid_recovers_uniform_grid():
    # oracle: the KKT stationarity system solved densely below must agree
    base = corpus.uniform_grid(3, 3, cell=1000)
    pert = _perturb_grid(base, {1000: 860, 2000: 2120}, {1000: 1090, 2000: 1940})
    assert validate_layout(pert) == []
    out = regularize(pert, groups=[tuple(range(9))])
    assert same_layout(out, base)

    # independent check on the x-boundary subproblem: variables are the two
    # interior grid lines; objective sum over 3 rows of (b - b0)^2 with the
    # equal-width constraint b2 - b1 = b1 - 0 = 3000 - b2
    b1, b2 = 860, 2120
    A = np.array([[2.0, -1.0], [-1.0, 2.0]])
    rhs = np.array([0.0, 3000.0])
    sol = np.linalg.solve(A, rhs)
    assert np.allclose(sol, [1000.0, 2000.0])


def test_objective_not_worse_than_grid_search():
    # <= 3 effective variables: one row, two grouped windows, walls absorb
    lay = row([20, 10, 30, 14, 26], [1, 2, 1, 2, 1])
    out = regularize(lay, groups=[(1, 3)])

    def objective(candidate):
        total = 0
        for a, b in zip(candidate.terminals, lay.terminals):
            total += (a.x - b.x) ** 2 + (a.y - b.y) ** 2
            total += (a.x2 - b.x2) ** 2 + (a.y2 - b.y2) ** 2
        return total

    best = None
    # brute force over integer boundary positions: window1 = [a, a+s), window2 = [b, b+s)
    for s in range(8, 17):
        for a in range(15, 26):
            for b in range(55, 66):
                if not (0 < a < a + s < b < b + s < 100):
                    continue
                cand = row([a, s, b - a - s, s, 100 - b - s], [1, 2, 1, 2, 1])
                if best is None or objective(cand) < objective(best):
                    best = cand
    assert objective(out) <= objective(best)


def test_default_groups_by_label():
    lay = row([20, 10, 30, 12, 28], [1, 2, 1, 2, 1])
    groups = default_groups(lay)
    assert set(map(frozenset, groups)) == {frozenset({0, 2, 4}), frozenset({1, 3})}


def test_infeasible_groups_report_constraints():
    # bottom row A|B sums to the domain width; tying each of A and B to the
    # full-width top terminal E forces 100 + 100 = 100
    lay = Layout(
        100, 20, MATS,
        (
            TerminalRect(0, 0, 60, 10, 1),    # A
            TerminalRect(60, 0, 40, 10, 2),   # B
            TerminalRect(0, 10, 100, 10, 1),  # E
        ),
    )
    with pytest.raises(InfeasibleConstraintError) as err:
        regularize(lay, groups=[(0, 2), (1, 2)])
    assert err.value.constraint_ids


def test_groups_from_layout_metadata():
    lay = Layout(
        100, 10, MATS,
        tuple(row([20, 10, 30, 12, 28], [1, 2, 1, 2, 1]).terminals),
        groups=((1, 3),),
    )
    out = regularize(lay)
    assert out.terminals[1].w == out.terminals[3].w == 11
