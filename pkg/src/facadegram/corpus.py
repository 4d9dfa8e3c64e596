"""Bundled synthetic layouts: grids, repeat rows, facades, shared pairs.

Every acceptance property runs over ``corpus()``; the layouts cover uniform
grids, ABAB/ABABA rows on both axes, asymmetric multi-floor facades,
palindromic fixtures, and facade pairs sharing whole rows (for joint
extraction). ``random_guillotine`` generates valid random tilings for the
symmetry oracle tests.
"""

from __future__ import annotations

from .errors import LayoutValidationError
from .layout import Layout, TerminalRect, validate_layout

MATERIALS = ("outside", "wall", "window", "door", "ledge")
WALL, WINDOW, DOOR, LEDGE = 1, 2, 3, 4


def rows_layout(width, rows, materials=MATERIALS) -> Layout:
    """Stack rows bottom-to-top; each row is (height, [(width, label), ...])."""
    terminals = []
    y = 0
    for height, segments in rows:
        x = 0
        for w, label in segments:
            terminals.append(TerminalRect(x, y, w, height, label))
            x += w
        if x != width:
            raise ValueError(f"row at y={y} sums to {x}, expected {width}")
        y += height
    layout = Layout(width, y, materials, tuple(terminals))
    violations = validate_layout(layout)
    if violations:
        raise LayoutValidationError(violations)
    return layout


def uniform_grid(nx, ny, cell=1000, label=WINDOW) -> Layout:
    rows = [(cell, [(cell, label)] * nx) for _ in range(ny)]
    return rows_layout(nx * cell, rows)


def abab_row(n, a=1000, b=2000, height=1000) -> Layout:
    segments = [(a, WINDOW) if i % 2 == 0 else (b, WALL) for i in range(n)]
    return rows_layout(sum(w for w, _ in segments), [(height, segments)])


def abab_column(n, a=1000, b=2000, width=1500) -> Layout:
    rows = [(a, [(width, WINDOW)]) if i % 2 == 0 else (b, [(width, WALL)]) for i in range(n)]
    return rows_layout(width, rows)


def sym_row(n, a=1000, b=1000, height=1000) -> Layout:
    """Odd palindromic row: window wall window ... (symsplit fixture)."""
    segments = [(a, WINDOW) if i % 2 == 0 else (b, WALL) for i in range(n)]
    return rows_layout(sum(w for w, _ in segments), [(height, segments)])


def window_grid(nx=3, ny=2) -> Layout:
    floor = [(500, WALL), (1000, WINDOW)] * nx + [(500, WALL)]
    width = 1500 * nx + 500
    rows = []
    for _ in range(ny):
        rows.append((500, [(width, WALL)]))
        rows.append((1500, floor))
    rows.append((500, [(width, WALL)]))
    return rows_layout(width, rows)


def facade_asym_a() -> Layout:
    floor = [(500, WALL), (1500, WINDOW), (1000, WALL), (1500, WINDOW), (1500, WALL), (1500, WINDOW), (1500, WALL)]
    rows = [
        (2500, [(1500, WALL), (1500, DOOR), (1500, WALL), (1500, WINDOW), (3000, WALL)]),
        (500, [(9000, LEDGE)]),
        (2000, floor),
        (2000, floor),
        (2000, floor),
        (1000, [(9000, WALL)]),
    ]
    return rows_layout(9000, rows)


def facade_asym_b() -> Layout:
    floor = [(1000, WALL), (1000, WINDOW), (500, WALL), (1000, WINDOW), (1000, WALL), (1000, WINDOW), (2500, WALL)]
    rows = [
        (2000, [(2000, DOOR), (2000, WALL), (2000, WINDOW), (2000, WALL)]),
        (1500, floor),
        (1500, floor),
        (1500, floor),
        (1500, floor),
        (1000, [(8000, WALL)]),
    ]
    return rows_layout(8000, rows)


def facade_palindrome() -> Layout:
    floor = [(1000, WALL), (1500, WINDOW), (2000, WALL), (1500, WINDOW), (1000, WALL)]
    rows = [
        (2000, [(2500, WALL), (2000, DOOR), (2500, WALL)]),
        (1500, floor),
        (1500, floor),
        (1500, floor),
        (500, [(7000, WALL)]),
    ]
    return rows_layout(7000, rows)


def facade_door() -> Layout:
    floor = [(750, WALL), (750, WINDOW)] * 4
    rows = [
        (2000, [(1000, WALL), (1500, DOOR), (3500, WALL)]),
        (1500, floor),
        (1500, floor),
        (1000, [(6000, WALL)]),
    ]
    return rows_layout(6000, rows)


_SHARED_FLOOR = [(500, WALL), (1000, WINDOW), (1000, WALL), (1000, WINDOW), (1000, WALL), (1000, WINDOW), (500, WALL)]


def pair_shared_a() -> Layout:
    rows = [
        (2000, [(2000, WALL), (2000, DOOR), (2000, WALL)]),
        (1500, _SHARED_FLOOR),
        (1500, _SHARED_FLOOR),
        (500, [(6000, LEDGE)]),
    ]
    return rows_layout(6000, rows)


def pair_shared_b() -> Layout:
    rows = [
        (1500, [(1000, DOOR), (5000, WALL)]),
        (1500, _SHARED_FLOOR),
        (1500, _SHARED_FLOOR),
        (1500, _SHARED_FLOOR),
        (1000, [(6000, WALL)]),
    ]
    return rows_layout(6000, rows)


_SHARED_ROW2 = [(2000, WINDOW), (1000, WALL), (2000, WINDOW), (1000, WALL)]


def pair_shared2_a() -> Layout:
    rows = [
        (1000, [(6000, WALL)]),
        (2000, _SHARED_ROW2),
        (2000, _SHARED_ROW2),
        (500, [(6000, WALL)]),
    ]
    return rows_layout(6000, rows)


def pair_shared2_b() -> Layout:
    rows = [
        (1500, [(3000, DOOR), (3000, WALL)]),
        (2000, _SHARED_ROW2),
        (2000, _SHARED_ROW2),
        (2000, _SHARED_ROW2),
        (1000, [(6000, LEDGE)]),
    ]
    return rows_layout(6000, rows)


def tall_tower(floors=10) -> Layout:
    floor = [(500, WALL), (1500, WINDOW)] * 4
    rows = [(2000, [(1000, WALL), (2000, DOOR), (2000, WALL), (2000, WINDOW), (1000, WALL)])]
    for _ in range(floors):
        rows.append((250, [(8000, LEDGE)]))
        rows.append((1500, floor))
    rows.append((750, [(8000, WALL)]))
    return rows_layout(8000, rows)


def wide_mixed() -> Layout:
    band = [(1000, WALL), (2000, WINDOW)] * 4
    rows = [
        (1000, band),
        (1000, [(12000, LEDGE)]),
        (1000, band),
        (1000, [(12000, LEDGE)]),
    ]
    return rows_layout(12000, rows)


def corpus() -> list[tuple[str, Layout]]:
    """All bundled layouts, name first. Stable order, deterministic content."""
    return [
        ("grid_2x2", uniform_grid(2, 2)),
        ("grid_3x3", uniform_grid(3, 3)),
        ("grid_4x3", uniform_grid(4, 3)),
        ("grid_5x4", uniform_grid(5, 4)),
        ("row_abab_4", abab_row(4)),
        ("row_abab_6", abab_row(6)),
        ("row_abab_8", abab_row(8)),
        ("row_ababa_5", abab_row(5)),
        ("row_ababa_7", abab_row(7)),
        ("row_ababa_9", abab_row(9)),
        ("col_abab_6", abab_column(6)),
        ("col_ababa_5", abab_column(5)),
        ("sym_row_3", sym_row(3)),
        ("sym_row_5", sym_row(5)),
        ("window_grid_3x2", window_grid(3, 2)),
        ("facade_asym_a", facade_asym_a()),
        ("facade_asym_b", facade_asym_b()),
        ("facade_palindrome", facade_palindrome()),
        ("facade_door", facade_door()),
        ("pair_shared_a", pair_shared_a()),
        ("pair_shared_b", pair_shared_b()),
        ("pair_shared2_a", pair_shared2_a()),
        ("pair_shared2_b", pair_shared2_b()),
        ("tall_tower", tall_tower()),
        ("wide_mixed", wide_mixed()),
    ]


def shared_pairs() -> list[tuple[str, tuple[Layout, Layout]]]:
    """Facade pairs sharing whole rows, for joint extraction."""
    return [
        ("pair_shared", (pair_shared_a(), pair_shared_b())),
        ("pair_shared2", (pair_shared2_a(), pair_shared2_b())),
    ]


LARGEST = "tall_tower"


def random_guillotine(rng, max_terminals=36, width=6000, height=6000, n_labels=3, grid=250) -> Layout:
    """Random valid tiling built by recursive guillotine cuts on a size grid.

    Few labels plus quantized cuts make repeated terminals (and grown repeated
    regions) common, which is what the symmetry tests need.
    """
    pending = [(0, 0, width, height)]
    final = []
    count = 1
    while pending:
        i = int(rng.integers(len(pending)))
        x, y, w, h = pending.pop(i)
        can_x = w >= 2 * grid
        can_y = h >= 2 * grid
        if count >= max_terminals or (not can_x and not can_y) or rng.random() < 0.15:
            final.append((x, y, w, h))
            continue
        if can_x and (not can_y or rng.random() < 0.5):
            c = grid * int(rng.integers(1, w // grid))
            pending.append((x, y, c, h))
            pending.append((x + c, y, w - c, h))
        else:
            c = grid * int(rng.integers(1, h // grid))
            pending.append((x, y, w, c))
            pending.append((x, y + c, w, h - c))
        count += 1
    materials = ("outside",) + tuple(f"m{i}" for i in range(1, n_labels + 1))
    terminals = tuple(
        TerminalRect(x, y, w, h, int(rng.integers(1, n_labels + 1))) for x, y, w, h in sorted(final)
    )
    layout = Layout(width, height, materials, terminals)
    violations = validate_layout(layout)
    if violations:  # pragma: no cover
        raise LayoutValidationError(violations)
    return layout
