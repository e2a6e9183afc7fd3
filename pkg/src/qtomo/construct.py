"""Constructive realization of compatible line sum arrays.

Two dimensions: start from the maximal matrix of the row sums and peel
columns right to left. Peeling a column of sum ``t`` shifts the last one of
the ``t`` longest level lines of the binary representation into the
column, which leaves a maximal matrix one column narrower.

Higher dimensions: peel the last layer ``i_d = n_d``. The layer is built
recursively from the layer's own line sums, pushed into the per-entry
budget box that keeps the remaining axis-``d`` sums feasible, and the
reduced array is realized recursively. When that greedy path dead-ends the
layer is searched exhaustively, so a realizable input is always realized.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    BudgetExceeded,
    ExhaustionError,
    IncompatibleError,
    InternalError,
    NotRealizable,
    ShapeMismatchError,
)
from .linesum import (
    Compatible,
    LineSumArray,
    compatible,
    compatible_2d,
)
from .oracle import SearchBudget, solve
from .tensor import LineId, Shape, Tensor, line_sums

log = logging.getLogger(__name__)


def level_length(s: int, v: int, width: int, q: int) -> int:
    """Ones on level ``v`` of a maximal line of length ``width`` and sum ``s``."""
    if s < v:
        return 0
    return min(width, (s - v) // (q - 1) + 1)


@dataclass(frozen=True)
class SelectionSet:
    """Chosen ``(index, level)`` pairs; 1-based index into the peeled rows."""

    pairs: frozenset

    def counts(self, n: int) -> list:
        m = [0] * n
        for i, _ in self.pairs:
            m[i - 1] += 1
        return m

    def is_contiguous(self) -> bool:
        by_row = {}
        for i, v in self.pairs:
            by_row.setdefault(i, set()).add(v)
        return all(levels == set(range(1, len(levels) + 1)) for levels in by_row.values())


def select_levels(r, t: int, width: int, q: int) -> SelectionSet:
    """The ``t`` longest nonempty level lines; ties go to the smaller level, then row."""
    r = [int(x) for x in r]
    cap = width * (q - 1)
    for i, x in enumerate(r, start=1):
        if not 0 <= x <= cap:
            raise ValueError(f"row {i} sum {x} outside [0, {cap}] for width {width}")
    cands = []
    full = 0
    for i, x in enumerate(r, start=1):
        for v in range(1, q):
            L = level_length(x, v, width, q)
            if L:
                cands.append((-L, v, i))
                full += L == width
    if t < full:
        raise ValueError(
            f"column sum {t} below the maximal profile's last term {full}"
        )
    if t > len(cands):
        raise ValueError(
            f"column sum {t} above the maximal profile's first term {len(cands)}"
        )
    cands.sort()
    return SelectionSet(frozenset((i, v) for _, v, i in cands[:t]))


def peel_last_column(r, t: int, width: int, q: int) -> tuple:
    """Split off a last column of sum ``t``; return ``(column, reduced_r)``."""
    sel = select_levels(r, t, width, q)
    col = sel.counts(len(r))
    return col, [int(x) - m for x, m in zip(r, col)]


def build_2d(r, c, q: int) -> Tensor:
    """A q-ary matrix with row sums ``r`` and column sums ``c``."""
    verdict = compatible_2d(r, c, q)
    if not isinstance(verdict, Compatible):
        raise IncompatibleError(verdict)
    r, c = [int(x) for x in r], [int(x) for x in c]
    n2 = len(c)
    cols = [None] * n2
    cur = r
    for w in range(n2, 1, -1):
        try:
            cols[w - 1], cur = peel_last_column(cur, c[w - 1], w, q)
        except ValueError as exc:
            raise InternalError("peel-bounds", f"column {w}: {exc}") from exc
        reduced = compatible_2d(cur, c[: w - 1], q)
        if not isinstance(reduced, Compatible):
            raise InternalError("reduced-2d-incompatible", f"after column {w}: {reduced}")
    if any(x > q - 1 for x in cur) or sum(cur) != c[0]:
        raise InternalError("base-column", f"residual {cur} cannot be column 1 with sum {c[0]}")
    cols[0] = cur
    M = Tensor(Shape((len(r), n2), q), np.array(cols, dtype=np.int64).T)
    if not verify(M, LineSumArray.from_2d(r, c, q)):
        raise InternalError("verify-2d", "constructed matrix has wrong line sums")
    return M


def verify(M: Tensor, S: LineSumArray) -> bool:
    if M.shape != S.shape:
        raise ShapeMismatchError(
            f"tensor {M.shape.dims}/q={M.shape.q} vs line sums {S.shape.dims}/q={S.shape.q}"
        )
    return line_sums(M) == S


def _violation(arr, lo, hi):
    return int(np.maximum(lo - arr, 0).sum() + np.maximum(arr - hi, 0).sum())


def _switches(dims, x):
    """Rectangles with ``x`` as a corner: ``(opposite, corner_a, corner_b)``; scan order."""
    for a, b in itertools.combinations(range(len(dims)), 2):
        for ya in range(dims[a]):
            if ya == x[a]:
                continue
            for yb in range(dims[b]):
                if yb == x[b]:
                    continue
                opp, ca, cb = list(x), list(x), list(x)
                opp[a], opp[b] = ya, yb
                ca[a] = ya
                cb[b] = yb
                yield tuple(opp), tuple(ca), tuple(cb)


def switch_repair(M1: Tensor, lo, hi) -> Tensor:
    """Move ``M1`` into the box ``[lo, hi]`` by planar 2x2 switches.

    A switch adds ``s`` at two opposite corners of an axis-aligned rectangle
    and ``-s`` at the other two, so every line sum is unchanged. Each
    accepted switch strictly lowers the total box violation; the first
    improving switch in scan order (violating entry, then donor) is taken.
    """
    q = M1.shape.q
    dims = M1.shape.dims
    arr = np.array(M1.array)
    lo = np.asarray(lo, dtype=np.int64).reshape(dims)
    hi = np.asarray(hi, dtype=np.int64).reshape(dims)
    if lo.sum() > arr.sum() or arr.sum() > hi.sum():
        raise ExhaustionError("box totals cannot match the slice total")

    def cost(cell, val):
        return max(0, int(lo[cell]) - val) + max(0, val - int(hi[cell]))

    def improving_switch():
        for xb in np.argwhere((arr < lo) | (arr > hi)):
            x = tuple(int(v) for v in xb)
            s = -1 if arr[x] > hi[x] else 1
            for opp, ca, cb in _switches(dims, x):
                move = ((x, s), (opp, s), (ca, -s), (cb, -s))
                delta = 0
                for cell, ds in move:
                    cur = int(arr[cell])
                    if not 0 <= cur + ds <= q - 1:
                        break
                    delta += cost(cell, cur + ds) - cost(cell, cur)
                else:
                    if delta < 0:
                        return move
        return None

    for _ in range(int(np.prod(dims)) * q):
        if not _violation(arr, lo, hi):
            return Tensor(M1.shape, arr)
        move = improving_switch()
        if move is None:
            raise ExhaustionError(
                f"no improving switch; violation {_violation(arr, lo, hi)} remains"
            )
        for cell, ds in move:
            arr[cell] += ds
    if _violation(arr, lo, hi):
        raise ExhaustionError("switch bound reached before the box was met")
    return Tensor(M1.shape, arr)


def favor_long_lines(layer: np.ndarray, Sd: np.ndarray, n_last: int, q: int, lo, hi) -> np.ndarray:
    """Shift layer mass toward the axis-d lines with the longest level lines.

    The layer's entry at ``i`` counts the selected levels of the line through
    ``i``; the objective sums the lengths of all selected level lines, so
    improving switches trade short level lines for longer ones. Line sums
    and the box ``[lo, hi]`` are preserved.
    """
    arr = np.array(layer)
    dims = arr.shape

    def up(c):
        return level_length(int(Sd[c]), int(arr[c]) + 1, n_last, q)

    def down(c):
        return level_length(int(Sd[c]), int(arr[c]), n_last, q)

    def improving():
        for x in np.ndindex(*dims):
            if arr[x] >= hi[x]:
                continue
            for opp, ca, cb in _switches(dims, x):
                if arr[opp] >= hi[opp] or arr[ca] <= lo[ca] or arr[cb] <= lo[cb]:
                    continue
                if up(x) + up(opp) > down(ca) + down(cb):
                    return x, opp, ca, cb
        return None

    # each switch raises an integer objective bounded by size * (q - 1) * n_last
    for _ in range(arr.size * (q - 1) * n_last):
        move = improving()
        if move is None:
            break
        x, opp, ca, cb = move
        arr[x] += 1
        arr[opp] += 1
        arr[ca] -= 1
        arr[cb] -= 1
    return arr


@dataclass
class BuildStats:
    """Counters describing how often the greedy path needed help."""

    repairs: int = 0
    repair_failures: int = 0
    greedy_gaps: int = 0
    dead_ends: int = 0
    fallbacks: int = 0

    @property
    def greedy_only(self) -> bool:
        return not (self.repair_failures or self.greedy_gaps or self.dead_ends
                    or self.fallbacks)


def layer_box(Sd: np.ndarray, n_last: int, q: int) -> tuple:
    """Bounds on the last-layer entries keeping each axis-d remainder feasible."""
    lo = np.maximum(0, Sd - (q - 1) * (n_last - 1))
    hi = np.minimum(q - 1, Sd)
    return lo, hi


def last_layer(S: LineSumArray) -> LineSumArray:
    """Line sums of the layer ``i_d = n_d`` as a (d-1)-dimensional array."""
    d = S.shape.d
    return LineSumArray(Shape(S.shape.dims[:-1], S.shape.q),
                        [S.axis(j)[..., -1] for j in range(1, d)])


def peel_layer(S: LineSumArray, layer: np.ndarray) -> LineSumArray:
    """The array left for ``i_d < n_d`` once the last layer is fixed to ``layer``."""
    d = S.shape.d
    dims = S.shape.dims[:-1] + (S.shape.dims[-1] - 1,)
    arrays = [S.axis(j)[..., :-1] for j in range(1, d)] + [S.axis(d) - layer]
    return LineSumArray(Shape(dims, S.shape.q), arrays)


def check_shift_bounds(T: LineSumArray, lo, hi):
    """Each layer line sum must lie between the box floor's and ceiling's sums."""
    for j in range(1, T.shape.d + 1):
        t = T.axis(j)
        if (t < lo.sum(axis=j - 1)).any() or (t > hi.sum(axis=j - 1)).any():
            raise InternalError(
                "shift-bounds", f"axis-{j} layer sums leave the maximal-matrix bounds"
            )


LOCAL_FALLBACK_NODES = 10**5


class _Undecided(Exception):
    """A capped sub-level search ran out of nodes; the parent must decide."""


class _Builder:
    def __init__(self, budget: SearchBudget, stats: BuildStats):
        self.budget = budget
        self.stats = stats
        self.dead = set()

    def build(self, S: LineSumArray, top: bool = False) -> np.ndarray:
        key = S.key()
        if key in self.dead:
            raise NotRealizable("sub-instance already shown unrealizable")
        try:
            return self._build(S, top)
        except NotRealizable:
            self.dead.add(key)
            raise

    def _build(self, S, top):
        q, d = S.shape.q, S.shape.d
        if d == 2:
            if not isinstance(compatible_2d(S.rows, S.cols, q), Compatible):
                raise NotRealizable("2-D sub-instance is incompatible")
            return np.array(build_2d(S.rows, S.cols, q).array)
        if S.shape.dims[-1] == 1:
            arr = np.array(S.axis(d))[..., None]
            if arr.min() < 0 or arr.max() > q - 1 or line_sums(Tensor(S.shape, arr)) != S:
                raise InternalError("base-layer", "length-1 lines do not pin a consistent layer")
            return arr
        T = last_layer(S)
        lo, hi = layer_box(S.axis(d), S.shape.dims[-1], q)
        check_shift_bounds(T, lo, hi)
        try:
            layer = self.build(T)
            if ((layer < lo) | (layer > hi)).any():
                self.stats.repairs += 1
                layer = np.array(switch_repair(Tensor(T.shape, layer), lo, hi).array)
            layer = favor_long_lines(layer, S.axis(d), S.shape.dims[-1], q, lo, hi)
            rest = peel_layer(S, layer)
            if isinstance(compatible(rest), Compatible):
                return np.concatenate([self.build(rest), layer[..., None]], axis=-1)
            self.stats.greedy_gaps += 1
            log.info("greedy layer leaves an incompatible remainder for %s", S.shape.dims)
        except ExhaustionError:
            self.stats.repair_failures += 1
            log.info("switch repair exhausted for layer of %s", S.shape.dims)
        except (NotRealizable, _Undecided):
            self.stats.dead_ends += 1
            log.info("greedy layer leads to an unrealizable remainder for %s", S.shape.dims)
        return self._fallback(S, lo, hi, top)

    def _fallback(self, S, lo, hi, top):
        """Complete search over ``S`` with the last layer held to its box.

        Below the top level the search gets a small node cap: a sub-instance
        the greedy path produced may be unrealizable, and proving that can
        cost far more than searching the parent directly.
        """
        self.stats.fallbacks += 1
        q = S.shape.q
        blo = np.zeros(S.shape.dims, dtype=np.int64)
        bhi = np.full(S.shape.dims, q - 1, dtype=np.int64)
        blo[..., -1] = lo
        bhi[..., -1] = hi
        nodes = self.budget.max_nodes if top else min(self.budget.max_nodes, LOCAL_FALLBACK_NODES)
        try:
            M = solve(S, SearchBudget(nodes, entry_bounds=(blo, bhi)))
        except BudgetExceeded:
            if top:
                raise
            raise _Undecided()
        if M is None:
            raise NotRealizable(f"no tensor of shape {S.shape.dims} has these line sums")
        return np.array(M.array)


def build(S: LineSumArray, budget: Optional[SearchBudget] = None,
          stats: Optional[BuildStats] = None) -> Tensor:
    """A tensor whose line sum array is ``S``.

    Wherever the greedy peel gets stuck, a search bounded to the last-layer
    box completes that sub-instance. Raises :class:`IncompatibleError` if
    ``S`` fails the compatibility check, :class:`NotRealizable` if it is
    compatible but the complete search proves that no tensor realizes it,
    and :class:`BudgetExceeded` if that search runs out of nodes.
    """
    verdict = compatible(S)
    if not isinstance(verdict, Compatible):
        raise IncompatibleError(verdict)
    budget = budget or SearchBudget()
    stats = stats if stats is not None else BuildStats()
    arr = _Builder(budget, stats).build(S, top=True)
    M = Tensor(S.shape, arr)
    if not verify(M, S):
        raise InternalError("verify", "constructed tensor has wrong line sums")
    return M


class ShiftStep(NamedTuple):
    """Move one unit of ``level`` on ``line`` from ``source`` to ``target``."""

    line: LineId
    level: int
    source: int
    target: int


@dataclass(frozen=True)
class BuildTrace:
    """Shift operations that turn the axis-d maximal matrix into the result."""

    steps: tuple = field(default_factory=tuple)

    def replay(self, start: Tensor) -> Tensor:
        arr = np.array(start.array)
        for step in self.steps:
            if step.source == step.target:
                continue
            src = tuple(c - 1 for c in step.line.cell(step.source))
            dst = tuple(c - 1 for c in step.line.cell(step.target))
            arr[src] -= 1
            arr[dst] += 1
        return Tensor(start.shape, arr)


def trace_of(M: Tensor) -> BuildTrace:
    """Shift log that regenerates ``M`` from the maximal matrix of its axis-d sums.

    Every peeled layer must lie in its budget box; that is what makes it
    expressible as shifts of the longest level lines.
    """
    q, d = M.shape.q, M.shape.d
    arr = M.array
    resid = arr.sum(axis=-1).astype(np.int64)
    steps = []
    for w in range(M.shape.dims[-1], 1, -1):
        for idx in np.ndindex(*M.shape.dims[:-1]):
            s, m = int(resid[idx]), int(arr[idx + (w - 1,)])
            if m < max(0, s - (q - 1) * (w - 1)) or m > min(q - 1, s):
                raise InternalError("trace-box", f"layer {w} entry at {idx} leaves its box")
            line = LineId(d, tuple(i + 1 for i in idx))
            for v in range(1, m + 1):
                steps.append(ShiftStep(line, v, level_length(s, v, w, q), w))
        resid -= arr[..., w - 1]
    return BuildTrace(tuple(steps))


def build_traced(S: LineSumArray, budget: Optional[SearchBudget] = None) -> tuple:
    """``build`` plus the shift trace that replays it from ``maximal_matrix(S, d)``."""
    M = build(S, budget)
    return M, trace_of(M)

