import pytest

from valetplan.geometry import LotSpec
from valetplan.layout import (Layout, NoFit, Stall, boxes_overlap, candidate_coords,
                              canonicalize_unique, compact, make_layout, solve_max_packing,
                              validate_layout)

A, B = 3.0, 9.5


def grid_capacity(L, W, a=A, b=B, step=0.5):
    """Largest packing with corners on a uniform 0.5 m grid, by exhaustive search.

    Stall sides are multiples of 0.5 m, so this grid contains every origin the
    solver may use; it knows nothing of subset sums or cell masks.
    """
    c = []
    for dx, dy in ((b, a), (a, b)):
        nx = int((L - dx) / step + 1e-9) + 1
        ny = int((W - dy) / step + 1e-9) + 1
        c += [(i * step, j * step, i * step + dx, j * step + dy)
              for i in range(max(nx, 0)) for j in range(max(ny, 0))]
    n = len(c)
    comp = [{j for j in range(n) if j != i and not boxes_overlap(c[i], c[j])} for i in range(n)]
    cap = int(L * W / (a * b) + 1e-9)
    best = 0

    def dfs(k, cand):
        nonlocal best
        best = max(best, k)
        if k + len(cand) <= best:
            return
        for i in sorted(cand):
            if best >= cap:
                return
            dfs(k + 1, {j for j in cand & comp[i] if j > i})

    dfs(0, set(range(n)))
    return best


@pytest.mark.parametrize("L, W", [(10, 12), (12, 10), (13, 10), (9.5, 9.5), (12.5, 11), (15, 12)])
def test_capacity_matches_grid_search(L, W):
    packings = solve_max_packing(LotSpec.with_left_entrance(L, W), A, B)
    assert packings[0].capacity == grid_capacity(L, W)


def test_15x12_unique_layouts():
    packings = solve_max_packing(LotSpec.with_left_entrance(15, 12), A, B)
    assert len(packings) == 4
    uniq = canonicalize_unique(packings)
    got = [[(s.x, s.y, s.orient) for s in lay.stalls] for lay in uniq]
    assert got == [
        [(0, 0, "L"), (9.5, 0, "W"), (0, 3, "L"), (0, 6, "L"), (0, 9, "L")],
        [(0, 0, "W"), (3, 0, "L"), (3, 3, "L"), (3, 6, "L"), (3, 9, "L")],
        [(0, 0, "W"), (3, 0, "W"), (6, 0, "W"), (9, 0, "W"), (12, 0, "W")],
    ]


def test_every_packing_is_valid():
    lot = LotSpec.with_left_entrance(15, 12)
    for lay in solve_max_packing(lot, A, B):
        validate_layout(lay, lot)


def test_stall_indexing_by_y_then_x():
    lay = make_layout([(3, 0, "L"), (0, 0, "W"), (3, 3, "L")], A, B)
    assert [(s.index, s.x, s.y) for s in lay.stalls] == [(0, 0, 0), (1, 3, 0), (2, 3, 3)]


def test_compact_slides_down_then_left():
    lay = make_layout([(1.0, 2.0, "W"), (5.0, 0.5, "W")], A, B)
    c = compact(lay)
    assert [(s.x, s.y) for s in c.stalls] == [(0.0, 0.0), (3.0, 0.0)]
    assert compact(c) == c


def test_compact_stops_at_blocking_stall():
    lay = make_layout([(0, 0, "L"), (0, 4, "L")], A, B)
    assert [(s.x, s.y) for s in compact(lay).stalls] == [(0, 0), (0, 3)]


def test_canonicalize_merges_translates():
    a = make_layout([(0, 0, "W"), (3, 0, "W")], A, B)
    b = a.translated(0.5, 1.0)
    assert canonicalize_unique([a, b]) == [a]
    with pytest.raises(ValueError):
        canonicalize_unique([a, make_layout([(0, 0, "W")], A, B)])


def test_candidate_coords_are_subset_sums():
    assert candidate_coords(15, 9.5, (3.0, 9.5)) == [0, 3.0]
    assert candidate_coords(15, 3.0, (3.0, 9.5)) == [0, 3.0, 6.0, 9.0, 9.5, 12.0]


def test_no_fit():
    with pytest.raises(NoFit):
        solve_max_packing(LotSpec.with_left_entrance(9, 9), A, B)


def test_validate_layout_rejects_overlap_and_overflow():
    lot = LotSpec.with_left_entrance(15, 12)
    with pytest.raises(ValueError):
        validate_layout(make_layout([(0, 0, "W"), (2, 0, "W")], A, B), lot)
    with pytest.raises(ValueError):
        validate_layout(make_layout([(13, 0, "W")], A, B), lot)


def test_layout_invariants():
    with pytest.raises(ValueError):
        Layout((Stall(1, 0, 0, "L"),), A, B)
    with pytest.raises(ValueError):
        Stall(0, 0, 0, "X")
    lay = make_layout([(0, 0, "L")], A, B)
    assert lay.box(0) == (0, 0, 9.5, 3.0)
    assert lay.center(0) == (4.75, 1.5)
