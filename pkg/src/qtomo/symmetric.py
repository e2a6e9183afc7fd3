"""Symmetric line sum arrays and symmetric realizations.

A tensor on ``[n]^d`` is symmetric when it is invariant under every
permutation of its coordinates. Its line sum array then has one symmetric
function of the d-1 fixed coordinates shared by all axes; that is what
:func:`check_symmetric` tests and what :class:`SymmetricProfile` stores.

The builder peels the border ``{i : max(i) = n}``. The border is fixed by one
symmetric (d-1)-dimensional layer ``M1`` through the orbit rule
``M(sigma(x, n)) = M1(x)``, and the core ``[n-1]^d`` is realized recursively
from the reduced sums.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .construct import BuildStats, last_layer, layer_box, select_levels, verify
from .errors import (
    BorderInconsistency,
    ExhaustionError,
    IncompatibleError,
    InternalError,
    NotRealizable,
)
from .linesum import Compatible, LineSumArray, compatible, compatible_2d
from .oracle import SearchBudget, orbit_representatives, solve
from .tensor import Shape, Tensor, line_sums


@dataclass(frozen=True)
class SymmetricProfile:
    """Symmetric line sum data: one value per multiset of d-1 coordinates over [n]."""

    n: int
    d: int
    q: int
    values: dict

    def expand(self) -> LineSumArray:
        shape = Shape((self.n,) * self.d, self.q)
        red = (self.n,) * (self.d - 1)
        arr = np.empty(red, dtype=np.int64)
        for idx in np.ndindex(*red):
            arr[idx] = self.values[tuple(sorted(i + 1 for i in idx))]
        return LineSumArray(shape, [arr] * self.d)

    @classmethod
    def from_linesums(cls, S: LineSumArray) -> "SymmetricProfile":
        if not check_symmetric(S):
            raise ValueError("line sum array is not symmetric")
        base = S.axis(1)
        n, d = S.shape.dims[0], S.shape.d
        return cls(n, d, S.shape.q, {
            rep: int(base[tuple(i - 1 for i in rep)])
            for rep in orbit_representatives(n, d - 1)
        })

    def within_bounds(self) -> bool:
        return all(0 <= v <= self.n * (self.q - 1) for v in self.values.values())


def is_symmetric_tensor(arr) -> bool:
    """Invariant under all d! coordinate permutations."""
    arr = np.asarray(arr.array if isinstance(arr, Tensor) else arr)
    if len(set(arr.shape)) > 1:
        return False
    return all(np.array_equal(arr, np.transpose(arr, p))
               for p in itertools.permutations(range(arr.ndim)))


def check_symmetric(S: LineSumArray) -> bool:
    if len(set(S.shape.dims)) != 1:
        return False
    base = S.axis(1)
    if base.ndim > 1 and not is_symmetric_tensor(base):
        return False
    return all(np.array_equal(S.axis(j), base) for j in range(2, S.shape.d + 1))


def symmetrize(reps: dict, n: int, d: int, q: int) -> Tensor:
    """Tensor with ``M(i) = reps[sorted(i)]`` for every 1-based index ``i``."""
    arr = np.empty((n,) * d, dtype=np.int64)
    for idx in np.ndindex(*arr.shape):
        arr[idx] = reps[tuple(sorted(i + 1 for i in idx))]
    return Tensor(Shape((n,) * d, q), arr)


def _sym_2d_greedy(r: tuple, q: int, memo: dict):
    """Symmetric matrix with row sums ``r`` by peeling index n, or None."""
    if r in memo:
        return memo[r]
    n = len(r)
    out = None
    if n == 1:
        out = np.array([[r[0]]]) if r[0] <= q - 1 else None
    else:
        rows, rn = list(r[:-1]), r[-1]
        for corner in range(min(q - 1, rn), -1, -1):
            try:
                sel = select_levels(rows, rn - corner, n, q)
            except ValueError:
                continue
            b = sel.counts(n - 1)
            rest = tuple(x - m for x, m in zip(rows, b))
            if not isinstance(compatible_2d(rest, rest, q), Compatible):
                continue
            core = _sym_2d_greedy(rest, q, memo)
            if core is None:
                continue
            out = np.zeros((n, n), dtype=np.int64)
            out[:-1, :-1] = core
            out[:-1, -1] = b
            out[-1, :-1] = b
            out[-1, -1] = corner
            break
    memo[r] = out
    return out


def build_symmetric_2d(r, q: int, budget: Optional[SearchBudget] = None) -> Tensor:
    """A symmetric q-ary matrix with row (and column) sums ``r``."""
    r = tuple(int(x) for x in r)
    verdict = compatible_2d(r, r, q)
    if not isinstance(verdict, Compatible):
        raise IncompatibleError(verdict)
    arr = _sym_2d_greedy(r, q, {})
    S = LineSumArray.from_2d(r, r, q)
    if arr is None:
        b = budget or SearchBudget()
        M = solve(S, SearchBudget(b.max_nodes, symmetric=True))
        if M is None:
            raise NotRealizable(f"no symmetric matrix has row sums {r}", stage=(2, len(r)))
        return M
    M = Tensor(S.shape, arr)
    if not verify(M, S) or not is_symmetric_tensor(M):
        raise InternalError("verify-sym-2d", "greedy symmetric matrix is wrong")
    return M


@lru_cache(maxsize=None)
def _symmetric_moves(n: int, d: int) -> tuple:
    """Orbit sums of planar switches on [n]^d, gcd-reduced and deduplicated."""
    dims = (n,) * d
    seen = set()
    moves = []
    perms = list(itertools.permutations(range(d)))
    for x in np.ndindex(*dims):
        for a, b in itertools.combinations(range(d), 2):
            for ya in range(x[a] + 1, n):
                for yb in range(x[b] + 1, n):
                    opp, ca, cb = list(x), list(x), list(x)
                    opp[a], opp[b] = ya, yb
                    ca[a] = ya
                    cb[b] = yb
                    acc = {}
                    for p in perms:
                        for cell, s in ((x, 1), (tuple(opp), 1), (tuple(ca), -1), (tuple(cb), -1)):
                            pc = tuple(cell[k] for k in p)
                            acc[pc] = acc.get(pc, 0) + s
                    acc = {c: v for c, v in acc.items() if v}
                    if not acc:
                        continue
                    g = math.gcd(*acc.values())
                    move = tuple(sorted((c, v // g) for c, v in acc.items()))
                    if move not in seen:
                        seen.add(move)
                        moves.append(move)
    return tuple(moves)


def symmetric_switch_repair(M1: Tensor, lo, hi) -> Tensor:
    """Box repair through symmetrized switches, so the output stays symmetric."""
    q = M1.shape.q
    n, d = M1.shape.dims[0], M1.shape.d
    arr = np.array(M1.array)
    lo = np.asarray(lo)
    hi = np.asarray(hi)

    def violation(a):
        return int(np.maximum(lo - a, 0).sum() + np.maximum(a - hi, 0).sum())

    moves = _symmetric_moves(n, d)
    for _ in range(arr.size * q):
        v0 = violation(arr)
        if not v0:
            return Tensor(M1.shape, arr)
        for move in moves:
            done = False
            for sign in (1, -1):
                trial = arr.copy()
                for cell, s in move:
                    trial[cell] += sign * s
                if trial.min() >= 0 and trial.max() <= q - 1 and violation(trial) < v0:
                    arr = trial
                    done = True
                    break
            if done:
                break
        else:
            raise ExhaustionError(f"no improving symmetric switch; violation {v0} remains")
    if violation(arr):
        raise ExhaustionError("symmetric switch bound reached before the box was met")
    return Tensor(M1.shape, arr)


def _layer_bounds(S: LineSumArray):
    """Box for the border layer: only lines meeting the core constrain it."""
    n, q, d = S.shape.dims[0], S.shape.q, S.shape.d
    lo = np.zeros((n,) * (d - 1), dtype=np.int64)
    hi = np.full((n,) * (d - 1), q - 1, dtype=np.int64)
    core = (slice(0, n - 1),) * (d - 1)
    clo, chi = layer_box(S.axis(d)[core], n, q)
    lo[core] = clo
    hi[core] = chi
    return lo, hi


def peel_border(S: LineSumArray, layer: np.ndarray) -> LineSumArray:
    """Reduced symmetric array on the core ``[n-1]^d``."""
    n, d = S.shape.dims[0], S.shape.d
    core = (slice(0, n - 1),) * (d - 1)
    arrays = [S.axis(j)[core] - layer[core] for j in range(1, d + 1)]
    return LineSumArray(Shape((n - 1,) * d, S.shape.q), arrays)


def assemble_border(core: np.ndarray, layer: np.ndarray, n: int, d: int) -> np.ndarray:
    """Fill ``[n]^d`` from the core and the orbit rule ``M(sigma(x, n)) = layer(x)``."""
    out = np.zeros((n,) * d, dtype=np.int64)
    if n > 1:
        out[(slice(0, n - 1),) * d] = core
    for idx in np.ndindex(*out.shape):
        if n - 1 in idx:
            rest = list(idx)
            rest.remove(n - 1)
            out[idx] = layer[tuple(sorted(rest))]
    return out


def _check_border_lines(M: np.ndarray, S: LineSumArray):
    n, d = S.shape.dims[0], S.shape.d
    for j in range(1, d + 1):
        sums = M.sum(axis=j - 1)
        want = S.axis(j)
        for idx in np.ndindex(*sums.shape):
            if n - 1 in idx and sums[idx] != want[idx]:
                raise BorderInconsistency(
                    f"axis-{j} border line at {tuple(i + 1 for i in idx)} sums to "
                    f"{int(sums[idx])}, expected {int(want[idx])}",
                    stage=(d, n),
                )


class _SymBuilder:
    def __init__(self, budget: SearchBudget, stats: BuildStats):
        self.budget = budget
        self.stats = stats
        self.dead = set()
        self.memo2d = {}

    def build(self, S: LineSumArray) -> np.ndarray:
        key = S.key()
        if key in self.dead:
            raise NotRealizable("sub-instance already shown unrealizable")
        try:
            return self._build(S)
        except NotRealizable:
            self.dead.add(key)
            raise

    def _build(self, S):
        n, d, q = S.shape.dims[0], S.shape.d, S.shape.q
        if d == 2:
            r = S.rows
            if not isinstance(compatible_2d(r, r, q), Compatible):
                raise NotRealizable("2-D symmetric sub-instance is incompatible", stage=(2, n))
            arr = _sym_2d_greedy(r, q, self.memo2d)
            return arr if arr is not None else self._fallback(S)
        if n == 1:
            v = int(S.axis(d).ravel()[0])
            if not 0 <= v <= q - 1:
                raise InternalError("sym-base", f"single entry {v} outside [0, {q - 1}]")
            return np.full((1,) * d, v, dtype=np.int64)
        T = last_layer(S)
        lo, hi = _layer_bounds(S)
        layer = np.array(self.build(T))
        try:
            if ((layer < lo) | (layer > hi)).any():
                self.stats.repairs += 1
                layer = np.array(symmetric_switch_repair(Tensor(T.shape, layer), lo, hi).array)
            found = self._extend(S, layer)
            if found is not None:
                return found
        except ExhaustionError:
            self.stats.repair_failures += 1
        except NotRealizable:
            self.stats.dead_ends += 1
        return self._fallback(S)

    def _extend(self, S, layer):
        """Realize ``S`` with border layer ``layer``; None if the core is incompatible."""
        n, d = S.shape.dims[0], S.shape.d
        rest = peel_border(S, layer)
        if not isinstance(compatible(rest), Compatible):
            self.stats.greedy_gaps += 1
            return None
        M = assemble_border(self.build(rest), layer, n, d)
        _check_border_lines(M, S)
        return M

    def _fallback(self, S):
        """Complete symmetric search over ``S``."""
        self.stats.fallbacks += 1
        M = solve(S, SearchBudget(self.budget.max_nodes, symmetric=True))
        if M is None:
            raise NotRealizable(
                f"no symmetric tensor of shape {S.shape.dims} has these line sums",
                stage=(S.shape.d, S.shape.dims[0]),
            )
        return np.array(M.array)


def build_symmetric(S: LineSumArray, budget: Optional[SearchBudget] = None,
                    stats: Optional[BuildStats] = None) -> Tensor:
    """A symmetric tensor whose line sum array is the symmetric array ``S``."""
    if not check_symmetric(S):
        raise ValueError("line sum array is not symmetric")
    verdict = compatible(S)
    if not isinstance(verdict, Compatible):
        raise IncompatibleError(verdict)
    builder = _SymBuilder(budget or SearchBudget(), stats if stats is not None else BuildStats())
    M = Tensor(S.shape, builder.build(S))
    if not is_symmetric_tensor(M):
        raise InternalError("sym-orbit", "constructed tensor is not symmetric")
    if line_sums(M) != S:
        raise InternalError("verify-sym", "constructed tensor has wrong line sums")
    return M
