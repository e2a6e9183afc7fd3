import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import REF_MATRIX, BINARY_SHIFT_AFTER, BINARY_SHIFT_BEFORE, TERNARY_SHIFT_AFTER, TERNARY_SHIFT_BEFORE
from qtomo.construct import (
    BuildStats,
    BuildTrace,
    ShiftStep,
    build,
    build_2d,
    build_traced,
    layer_box,
    level_length,
    peel_last_column,
    select_levels,
    switch_repair,
    verify,
)
from qtomo.errors import ExhaustionError, IncompatibleError, ShapeMismatchError
from qtomo.linesum import Compatible, LineSumArray, compatible_2d, maximal_matrix
from qtomo.tensor import LineId, Shape, Tensor, line_sums
from test_tensor import tensors


def test_level_lengths():
    assert level_length(6, 1, 9, 2) == 6
    assert level_length(12, 1, 9, 3) == 6 and level_length(12, 2, 9, 3) == 6
    assert level_length(11, 2, 9, 3) == 5
    assert level_length(0, 1, 5, 2) == 0
    assert level_length(20, 1, 5, 3) == 5


def test_binary_single_shift():
    col, rest = peel_last_column((3, 6, 6, 1), 1, 9, 2)
    assert col == [0, 1, 0, 0]
    assert rest == [3, 5, 6, 1]
    sel = select_levels((3, 6, 6, 1), 1, 9, 2)
    assert sel.pairs == frozenset({(2, 1)})


def test_ternary_single_shift():
    col, rest = peel_last_column((5, 12, 11, 2), 1, 9, 3)
    assert col == [0, 1, 0, 0]
    assert rest == [5, 11, 11, 2]


def _apply_shift(before, q, row, src, dst):
    S = LineSumArray.from_2d(before.sum(axis=1), [0] * before.shape[1], q)
    start = maximal_matrix(S, 2)
    assert np.array_equal(start.array, before)
    trace = BuildTrace((ShiftStep(LineId(2, (row,)), 1, src, dst),))
    return trace.replay(start).array


def test_shift_pictures():
    assert np.array_equal(_apply_shift(BINARY_SHIFT_BEFORE, 2, 2, 6, 9), BINARY_SHIFT_AFTER)
    assert np.array_equal(_apply_shift(TERNARY_SHIFT_BEFORE, 3, 2, 6, 9), TERNARY_SHIFT_AFTER)


def test_select_levels_bounds():
    with pytest.raises(ValueError, match="below"):
        select_levels((2, 0), 0, 2, 2)
    with pytest.raises(ValueError, match="above"):
        select_levels((1, 0), 2, 2, 2)


@given(st.lists(st.integers(0, 8), min_size=1, max_size=5), st.integers(2, 4), st.data())
def test_selection_is_contiguous(r, q, data):
    width = 3
    r = [min(x, width * (q - 1)) for x in r]
    full = sum(max(0, x - (width - 1) * (q - 1)) for x in r)
    nonempty = sum(min(x, q - 1) for x in r)
    t = data.draw(st.integers(full, nonempty))
    sel = select_levels(r, t, width, q)
    assert len(sel.pairs) == t
    assert sel.is_contiguous()


def test_build_2d_examples():
    M = build_2d((3, 3, 1, 1), (3, 3, 2, 0), 2)
    assert verify(M, LineSumArray.from_2d((3, 3, 1, 1), (3, 3, 2, 0), 2))
    assert build_2d((4, 1), (3, 2), 3).array.tolist() == [[2, 2], [1, 0]]
    with pytest.raises(IncompatibleError):
        build_2d((3, 3, 1, 1), (4, 4, 0, 0), 2)


def test_build_2d_exhaustive_small():
    for q in (2, 3):
        for n1, n2 in itertools.product(range(1, 4), repeat=2):
            for r in itertools.product(range(n2 * (q - 1) + 1), repeat=n1):
                for c in itertools.product(range(n1 * (q - 1) + 1), repeat=n2):
                    if sum(r) != sum(c) or not isinstance(compatible_2d(r, c, q), Compatible):
                        continue
                    M = build_2d(r, c, q)
                    assert verify(M, LineSumArray.from_2d(r, c, q))


def test_reference_sums_build():
    S = line_sums(Tensor.from_array(REF_MATRIX, 3))
    assert verify(build(S), S)


def test_verify_shape_mismatch():
    M = Tensor(Shape((2, 2), 2), [0] * 4)
    with pytest.raises(ShapeMismatchError):
        verify(M, LineSumArray.from_2d((0, 0, 0), (0, 0), 2))


@given(tensors())
def test_build_round_trip(M):
    S = line_sums(M)
    assert verify(build(S), S)


@given(tensors(max_d=3, max_n=3))
def test_trace_replays_to_result(M):
    S = line_sums(M)
    R, trace = build_traced(S)
    start = maximal_matrix(S, S.shape.d)
    assert trace.replay(start) == R


def test_build_is_deterministic(rng):
    M = Tensor(Shape((3, 3, 3), 3), rng.integers(0, 3, size=(3, 3, 3)))
    S = line_sums(M)
    assert build(S) == build(S)


def test_switch_repair_restores_box(rng):
    repaired = 0
    for _ in range(50):
        dims = (3, 4)
        q = 3
        target = rng.integers(0, q, size=dims)
        lo = np.maximum(target - rng.integers(0, 2, size=dims), 0)
        hi = np.minimum(target + rng.integers(0, 2, size=dims), q - 1)
        arr = target.copy()
        for _ in range(4):
            a, b = rng.choice(3, 2, replace=False)
            c, d = rng.choice(4, 2, replace=False)
            if arr[a, c] < q - 1 and arr[b, d] < q - 1 and arr[a, d] > 0 and arr[b, c] > 0:
                arr[a, c] += 1
                arr[b, d] += 1
                arr[a, d] -= 1
                arr[b, c] -= 1
        M1 = Tensor(Shape(dims, q), arr)
        try:
            R = switch_repair(M1, lo, hi)
        except ExhaustionError:
            continue
        assert ((R.array >= lo) & (R.array <= hi)).all()
        assert line_sums(R) == line_sums(M1)
        repaired += 1
    assert repaired >= 40, repaired


def test_switch_repair_reports_exhaustion():
    M1 = Tensor(Shape((2, 2), 2), [1, 0, 0, 1])
    lo = np.array([[0, 1], [1, 1]])
    hi = np.ones((2, 2), dtype=int)
    with pytest.raises(ExhaustionError):
        switch_repair(M1, lo, hi)


def test_layer_box():
    lo, hi = layer_box(np.array([0, 3, 8]), 4, 3)
    assert lo.tolist() == [0, 0, 2] and hi.tolist() == [0, 2, 2]


def test_stats_record_greedy_path(rng):
    stats = BuildStats()
    S = line_sums(Tensor(Shape((3, 3), 2), rng.integers(0, 2, size=(3, 3))))
    build(S, stats=stats)
    assert stats.greedy_only
