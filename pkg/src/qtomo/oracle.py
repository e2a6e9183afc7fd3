"""Exhaustive ground truth for desk-scale instances.

``solve`` is a complete backtracking search: it either returns a realizing
tensor, returns ``None`` after exhausting the pruned tree, or raises
:class:`BudgetExceeded`. ``enumerate_valid`` materializes every achievable
line sum array by brute force over all tensors of a shape and shares no
code with ``solve``.
"""
from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernel
from .errors import BudgetExceeded, GuardExceeded
from .linesum import Compatible, LineSumArray, check_structure
from .tensor import Shape, Tensor

log = logging.getLogger(__name__)

DEFAULT_MAX_NODES = 10**8
ENUMERATE_GUARD = 2**24
STRUCTURAL_GUARD = 27


@dataclass(frozen=True)
class SearchBudget:
    """Search limits and constraints.

    ``entry_bounds`` is an optional ``(lo, hi)`` pair of integer arrays with
    the tensor's dims; every entry is confined to its ``[lo, hi]``.
    """

    max_nodes: int = DEFAULT_MAX_NODES
    symmetric: bool = False
    entry_bounds: Optional[tuple] = None

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be >= 1")


def _line_offsets(shape: Shape):
    offsets, total = [], 0
    for axis in range(1, shape.d + 1):
        offsets.append(total)
        total += int(np.prod(shape.reduced_dims(axis), dtype=np.int64))
    return offsets, total


def _cell_lines(shape: Shape) -> np.ndarray:
    """(size, d) array: global line index of every cell along every axis."""
    dims = shape.dims
    coords = np.indices(dims).reshape(shape.d, -1)
    offsets, _ = _line_offsets(shape)
    out = np.empty((coords.shape[1], shape.d), dtype=np.int64)
    for j in range(shape.d):
        red = np.delete(coords, j, axis=0)
        red_dims = dims[:j] + dims[j + 1:]
        out[:, j] = offsets[j] + np.ravel_multi_index(tuple(red), red_dims)
    return out


def orbit_representatives(n: int, d: int) -> list:
    """Non-decreasing 1-based d-tuples over [n], lexicographic."""
    return list(itertools.combinations_with_replacement(range(1, n + 1), d))


class SearchProblem:
    """Kernel input for realizing ``S``, cells or orbit representatives as variables."""

    def __init__(self, S: LineSumArray, budget: SearchBudget):
        shape = S.shape
        self.shape = shape
        self.budget = budget
        q = shape.q
        size = shape.size
        cell_lines = _cell_lines(shape)
        lo = np.zeros(size, dtype=np.int64)
        hi = np.full(size, q - 1, dtype=np.int64)
        if budget.entry_bounds is not None:
            blo, bhi = budget.entry_bounds
            lo = np.maximum(lo, np.asarray(blo, dtype=np.int64).reshape(-1))
            hi = np.minimum(hi, np.asarray(bhi, dtype=np.int64).reshape(-1))
        self.target = np.concatenate(
            [S.axis(j).reshape(-1) for j in range(1, shape.d + 1)]
        ).astype(np.int64)

        if budget.symmetric:
            if len(set(shape.dims)) != 1:
                self.feasible = False
                return
            n = shape.dims[0]
            coords = np.indices(shape.dims).reshape(shape.d, -1).T
            reps = orbit_representatives(n, shape.d)
            rep_index = {r: k for k, r in enumerate(reps)}
            cell_var = np.array(
                [rep_index[tuple(sorted(int(c) + 1 for c in row))] for row in coords],
                dtype=np.int64,
            )
            nvars = len(reps)
            vlo = np.zeros(nvars, dtype=np.int64)
            vhi = np.full(nvars, q - 1, dtype=np.int64)
            np.maximum.at(vlo, cell_var, lo)
            np.minimum.at(vhi, cell_var, hi)
            counts = Counter()
            for cell in range(size):
                v = int(cell_var[cell])
                for ell in cell_lines[cell]:
                    counts[(v, int(ell))] += 1
            per_var = [[] for _ in range(nvars)]
            for (v, ell), m in sorted(counts.items()):
                per_var[v].append((ell, m))
            self.cell_var = cell_var
        else:
            nvars = size
            vlo, vhi = lo, hi
            per_var = [[(int(ell), 1) for ell in cell_lines[c]] for c in range(size)]
            self.cell_var = np.arange(size, dtype=np.int64)

        self.feasible = bool((vlo <= vhi).all())
        self.lo, self.hi = vlo, vhi
        ptr = [0]
        lines, mults = [], []
        for entries in per_var:
            for ell, m in entries:
                lines.append(ell)
                mults.append(m)
            ptr.append(len(lines))
        self.ptr = np.array(ptr, dtype=np.int64)
        self.lines = np.array(lines, dtype=np.int64)
        self.mults = np.array(mults, dtype=np.int64)

    def to_tensor(self, values) -> Tensor:
        vals = np.asarray(values, dtype=np.int64)
        return Tensor(self.shape, vals[self.cell_var])

    def run(self, on_tensor: Callable[[Tensor], bool], search=None) -> bool:
        """Feed realizations to ``on_tensor`` until it returns True.

        Returns True if stopped by the callback, False if the tree was
        exhausted; raises :class:`BudgetExceeded` on the node cap.
        """
        if not self.feasible:
            return False
        search = search or _kernel.search
        status, nodes = search(
            self.lo, self.hi, self.ptr, self.lines, self.mults, self.target,
            self.budget.max_nodes, lambda vals: bool(on_tensor(self.to_tensor(vals))),
        )
        if status == _kernel.BUDGET:
            raise BudgetExceeded(nodes)
        return status == _kernel.STOPPED


def solve(S: LineSumArray, budget: SearchBudget = SearchBudget(), search=None) -> Optional[Tensor]:
    """A realizing tensor, or None when none exists.

    ``search`` overrides the kernel backend (see ``qtomo._kernel``).
    """
    found = []

    def take(M):
        found.append(M)
        return True

    SearchProblem(S, budget).run(take, search=search)
    return found[0] if found else None


def for_each_solution(S: LineSumArray, budget: SearchBudget, callback) -> bool:
    """Call ``callback(M)`` on realizations in search order until it returns True."""
    return SearchProblem(S, budget).run(callback)


def count_solutions(S: LineSumArray, budget: SearchBudget = SearchBudget()) -> int:
    n = 0

    def tally(_):
        nonlocal n
        n += 1
        return False

    SearchProblem(S, budget).run(tally)
    return n


def enumerate_valid_keys(shape: Shape, chunk: int = 1 << 16) -> set:
    """Flat line sum tuples of every tensor of ``shape`` (brute force)."""
    q, size = shape.q, shape.size
    total = q**size
    if total > ENUMERATE_GUARD:
        raise GuardExceeded(f"{q}^{size} tensors exceed the enumeration guard")
    powers = q ** np.arange(size - 1, -1, -1, dtype=np.int64)
    seen = set()
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        cells = (codes[:, None] // powers) % q
        tens = cells.reshape((-1,) + shape.dims)
        parts = [tens.sum(axis=j + 1).reshape(len(codes), -1) for j in range(shape.d)]
        rows = np.concatenate(parts, axis=1)
        seen.update(map(tuple, np.unique(rows, axis=0).tolist()))
    return seen


def enumerate_valid(shape: Shape) -> set:
    """Every achievable line sum array of ``shape``, deduplicated."""
    sizes = [int(np.prod(shape.reduced_dims(a), dtype=np.int64)) for a in range(1, shape.d + 1)]
    cuts = np.cumsum([0] + sizes)
    return {
        LineSumArray(shape, [row[cuts[a]:cuts[a + 1]] for a in range(shape.d)])
        for row in enumerate_valid_keys(shape)
    }


def enumerate_structural(shape: Shape, max_nodes: int = DEFAULT_MAX_NODES) -> list:
    """Every line sum array meeting the bounds and cross-direction identities.

    The identities are posed to the search kernel as signed equalities over
    the line sums; output is sorted by the axis-major flat entry vector.
    """
    q = shape.q
    offsets, nentries = _line_offsets(shape)
    if nentries > STRUCTURAL_GUARD:
        raise GuardExceeded(f"{nentries} line sums exceed the structural enumeration guard")
    hi = np.concatenate([
        np.full(int(np.prod(shape.reduced_dims(a))), shape.line_length(a) * (q - 1))
        for a in range(1, shape.d + 1)
    ]).astype(np.int64)
    lo = np.zeros_like(hi)

    # one equality per (axis pair, slice): sum of axis-j1 sums == sum of axis-j2 sums
    per_var = [[] for _ in range(nentries)]
    ncons = 0
    for j1, j2 in itertools.combinations(range(1, shape.d + 1), 2):
        others = [k for k in range(1, shape.d + 1) if k not in (j1, j2)]
        for fixed in itertools.product(*(range(shape.dims[k - 1]) for k in others)):
            fx = dict(zip(others, fixed))
            for axis, sign, free in ((j1, 1, j2), (j2, -1, j1)):
                red_axes = [k for k in range(1, shape.d + 1) if k != axis]
                red_dims = shape.reduced_dims(axis)
                for i in range(shape.dims[free - 1]):
                    idx = tuple(i if k == free else fx[k] for k in red_axes)
                    var = offsets[axis - 1] + int(np.ravel_multi_index(idx, red_dims))
                    per_var[var].append((ncons, sign))
            ncons += 1
    ptr, lines, mults = [0], [], []
    for entries in per_var:
        for c, s in entries:
            lines.append(c)
            mults.append(s)
        ptr.append(len(lines))

    sizes = [int(np.prod(shape.reduced_dims(a))) for a in range(1, shape.d + 1)]
    cuts = np.cumsum([0] + sizes)
    out = []

    def keep(vals):
        out.append(tuple(vals))
        return False

    status, nodes = _kernel.search(
        lo, hi, np.array(ptr, dtype=np.int64), np.array(lines, dtype=np.int64),
        np.array(mults, dtype=np.int64), np.zeros(ncons, dtype=np.int64), max_nodes, keep,
    )
    if status == _kernel.BUDGET:
        raise BudgetExceeded(nodes)
    out.sort()
    arrays = [LineSumArray(shape, [list(v[cuts[a]:cuts[a + 1]]) for a in range(shape.d)]) for v in out]
    for S in arrays:
        assert isinstance(check_structure(S), Compatible), S
    return arrays
