import itertools

import numpy as np
import pytest
from hypothesis import given

from conftest import CUBE_COUNTEREXAMPLE, REF_MATRIX
from qtomo.errors import BudgetExceeded, GuardExceeded
from qtomo.linesum import Compatible, LineSumArray, compatible
from qtomo.oracle import (
    SearchBudget,
    count_solutions,
    enumerate_structural,
    enumerate_valid,
    orbit_representatives,
    solve,
)
from qtomo.tensor import Shape, Tensor, line_sums
from test_tensor import tensors


def cube_counterexample(q=2):
    a = np.array(CUBE_COUNTEREXAMPLE).reshape(2, 2)
    return LineSumArray(Shape((2, 2, 2), q), [a, a, a])


def test_reference_sums_have_a_realization():
    S = line_sums(Tensor.from_array(REF_MATRIX, 3))
    M = solve(S)
    assert M is not None and line_sums(M) == S


def test_incompatible_2d_has_no_realization():
    assert solve(LineSumArray.from_2d((3, 3, 1, 1), (4, 4, 0, 0), 2)) is None


@given(tensors(max_d=3, max_n=3, max_q=3))
def test_solve_finds_realization(M):
    S = line_sums(M)
    R = solve(S)
    assert R is not None and line_sums(R) == S


def test_achievable_counts():
    assert len(enumerate_valid(Shape((2, 2), 2))) == 15
    assert len(enumerate_valid(Shape((2, 2, 2), 2))) == 255


def test_achievable_set_matches_tensor_sums():
    shape = Shape((2, 2, 2), 2)
    want = {line_sums(Tensor(shape, bits)) for bits in itertools.product((0, 1), repeat=8)}
    assert enumerate_valid(shape) == want


def test_structural_count_two_by_one():
    # axis-2 sums r1, r2 in {0, 1}; the single axis-1 sum must equal r1 + r2
    count = sum(1 for r1 in (0, 1) for r2 in (0, 1) for c in range(3) if c == r1 + r2)
    out = enumerate_structural(Shape((2, 1), 2))
    assert len(out) == count == 4
    for S in out:
        assert S.flat(1)[0] == sum(S.flat(2))


def test_structural_counts():
    assert len(enumerate_structural(Shape((2, 2), 2))) == 19
    assert len(enumerate_structural(Shape((2, 2, 2), 2))) == 495


def test_structural_matches_nested_loops():
    shape = Shape((2, 3), 2)
    ours = {S.key() for S in enumerate_structural(shape)}
    ref = set()
    for c in itertools.product(range(3), repeat=3):
        for r in itertools.product(range(4), repeat=2):
            if sum(r) == sum(c):
                ref.add(LineSumArray.from_2d(r, c, 2).key())
    assert ours == ref


def test_guards():
    with pytest.raises(GuardExceeded):
        enumerate_valid(Shape((5, 5), 2))
    with pytest.raises(GuardExceeded):
        enumerate_structural(Shape((4, 4, 4), 2))


def test_two_dimensional_equivalence():
    for dims, q in (((3, 3), 2), ((2, 3), 3), ((3, 2), 3)):
        valid = enumerate_valid(Shape(dims, q))
        for S in enumerate_structural(Shape(dims, q)):
            realizable = solve(S) is not None
            assert realizable == (S in valid)
            assert realizable == isinstance(compatible(S), Compatible)


def test_cube_counterexample():
    S = cube_counterexample()
    assert isinstance(compatible(S), Compatible)
    assert solve(S) is None
    assert S not in enumerate_valid(S.shape)


def test_ternary_twin_is_also_unrealizable():
    S = cube_counterexample(q=3)
    assert isinstance(compatible(S), Compatible)
    assert solve(S) is None


def test_budget_exceeded():
    rng = np.random.default_rng(3)
    M = Tensor(Shape((5, 5, 5), 3), rng.integers(0, 3, size=(5, 5, 5)))
    with pytest.raises(BudgetExceeded):
        solve(line_sums(M), SearchBudget(max_nodes=10))


def test_count_solutions():
    S = LineSumArray.from_2d((1, 1), (1, 1), 2)
    assert count_solutions(S) == 2
    assert count_solutions(S, SearchBudget(symmetric=True)) == 2


def test_symmetric_mode_returns_symmetric():
    S = LineSumArray.from_2d((2, 2, 2), (2, 2, 2), 2)
    M = solve(S, SearchBudget(symmetric=True))
    assert M is not None and np.array_equal(M.array, M.array.T)


def test_symmetric_mode_rejects_unequal_sides():
    assert solve(LineSumArray.from_2d((1, 0), (1, 0, 0), 2), SearchBudget(symmetric=True)) is None


def test_orbit_representatives():
    reps = orbit_representatives(3, 2)
    assert reps == [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]
    assert len(orbit_representatives(3, 3)) == 10


def test_entry_bounds():
    S = LineSumArray.from_2d((1, 1), (1, 1), 2)
    lo = np.array([[1, 0], [0, 0]])
    M = solve(S, SearchBudget(entry_bounds=(lo, np.ones((2, 2), dtype=int))))
    assert M.array.tolist() == [[1, 0], [0, 1]]
