"""Line sum arrays: structural validation, maximal matrices, compatibility.

A line sum array stores, for every axis ``j``, an integer array over the
reduced index (all coordinates except ``j``, ascending axis order). For a
2-D array the axis-2 sums are the row sums ``r`` (indexed by ``i_1``) and
the axis-1 sums are the column sums ``c`` (indexed by ``i_2``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import MalformedError, ShapeMismatchError
from .tensor import LineId, Shape, Tensor


class LineSumArray:
    """Prescribed line sums for every line of a shape; immutable.

    Entries must be integers. Bounds (including nonnegativity) are left to
    :func:`check_structure` so that bad input can be reported as a verdict.
    """

    __slots__ = ("shape", "_arrays", "_key")

    def __init__(self, shape: Shape, arrays):
        arrays = list(arrays)
        if len(arrays) != shape.d:
            raise ShapeMismatchError(f"need {shape.d} axis arrays, got {len(arrays)}")
        out = []
        for axis, a in enumerate(arrays, start=1):
            red = shape.reduced_dims(axis)
            arr = np.asarray(a)
            if arr.size and not np.issubdtype(arr.dtype, np.integer):
                raise MalformedError(f"axis-{axis} line sums must be integers")
            arr = np.array(arr, dtype=np.int64)
            want = int(np.prod(red, dtype=np.int64))
            if arr.size != want:
                raise ShapeMismatchError(
                    f"axis-{axis} array has {arr.size} entries, expected {want}"
                )
            arr = arr.reshape(red)
            arr.flags.writeable = False
            out.append(arr)
        self.shape = shape
        self._arrays = tuple(out)
        self._key = None

    @classmethod
    def from_2d(cls, r, c, q: int) -> "LineSumArray":
        """Row sums ``r`` (length n1) and column sums ``c`` (length n2)."""
        r, c = list(r), list(c)
        return cls(Shape((len(r), len(c)), q), [c, r])

    def axis(self, j: int) -> np.ndarray:
        """Axis-``j`` sums as a read-only array over the reduced dims."""
        self.shape._check_axis(j)
        return self._arrays[j - 1]

    def flat(self, j: int) -> tuple:
        return tuple(int(v) for v in self.axis(j).ravel())

    def get(self, line: LineId) -> int:
        return int(self.axis(line.axis)[tuple(c - 1 for c in line.reduced)])

    @property
    def rows(self) -> tuple:
        """Row sums of a 2-D array (axis-2 lines)."""
        return self.flat(2)

    @property
    def cols(self) -> tuple:
        """Column sums of a 2-D array (axis-1 lines)."""
        return self.flat(1)

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.shape.dims, self.shape.q) + tuple(
                self.flat(j) for j in range(1, self.shape.d + 1)
            )
        return self._key

    def __eq__(self, other):
        if not isinstance(other, LineSumArray):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        parts = ", ".join(f"S{j}={list(self.flat(j))}" for j in range(1, self.shape.d + 1))
        return f"LineSumArray(dims={self.shape.dims}, q={self.shape.q}, {parts})"


@dataclass(frozen=True)
class Witness:
    """Failing prefix inequality in one planar slice.

    In the slice where the coordinates ``fixed_coords`` (pairs ``(axis,
    coord)``) are frozen, ``lhs_sum`` is the total of the ``prefix_size``
    largest axis-``j1`` line sums and ``rhs_sum`` the first ``prefix_size``
    terms of the maximal profile built from the axis-``j2`` line sums, where
    ``(j1, j2) = axis_pair``.
    """

    axis_pair: tuple
    fixed_coords: tuple
    prefix_size: int
    lhs_sum: int
    rhs_sum: int

    def recompute(self, S: LineSumArray) -> tuple:
        """Re-derive ``(lhs_sum, rhs_sum)`` from ``S``."""
        j1, j2 = self.axis_pair
        fixed = dict(self.fixed_coords)
        c = _plane_vector(S, j1, j2, fixed)
        r = _plane_vector(S, j2, j1, fixed)
        a = self.prefix_size
        lhs = int(np.sort(c)[::-1][:a].sum())
        rhs = int(sum(maximal_profile(r, len(c), S.shape.q)[:a]))
        return lhs, rhs

    def describe(self) -> str:
        fixed = ", ".join(f"i{ax}={v}" for ax, v in self.fixed_coords) or "none"
        return (
            f"axes {self.axis_pair}, fixed ({fixed}), "
            f"a={self.prefix_size}: {self.lhs_sum} > {self.rhs_sum}"
        )


@dataclass(frozen=True)
class Compatible:
    kind = "compatible"

    def __str__(self):
        return "Compatible"


@dataclass(frozen=True)
class Incompatible:
    witness: Witness
    kind = "incompatible"

    def __str__(self):
        return f"Incompatible: {self.witness.describe()}"


@dataclass(frozen=True)
class Malformed:
    reason: str
    location: object = None
    kind = "malformed"

    def __str__(self):
        return f"Malformed: {self.reason}"


Verdict = Union[Compatible, Incompatible, Malformed]


def _plane_vector(S, axis, free_axis, fixed):
    """Axis-``axis`` sums along ``free_axis`` with every other coordinate fixed."""
    idx = []
    for k in range(1, S.shape.d + 1):
        if k == axis:
            continue
        idx.append(slice(None) if k == free_axis else fixed[k] - 1)
    return np.asarray(S.axis(axis)[tuple(idx)])


def _plane_stack(S, axis, free_axis, others):
    """Axis-``axis`` sums reordered to dims ``(others..., free_axis)``."""
    axes = [k for k in range(1, S.shape.d + 1) if k != axis]
    order = [axes.index(k) for k in others] + [axes.index(free_axis)]
    return np.transpose(S.axis(axis), order)


def check_structure(S: LineSumArray) -> Verdict:
    """Bounds ``0 <= S(L) <= n_j (q-1)`` and the cross-direction identities.

    Returns :class:`Compatible` when no structural condition is violated
    (which says nothing yet about the compatibility inequalities) and
    :class:`Malformed` naming the first violation otherwise.
    """
    shape, q = S.shape, S.shape.q
    for axis in range(1, shape.d + 1):
        arr = S.axis(axis)
        cap = shape.line_length(axis) * (q - 1)
        bad = np.argwhere((arr < 0) | (arr > cap))
        if len(bad):
            reduced = tuple(int(v) + 1 for v in bad[0])
            val = int(arr[tuple(bad[0])])
            return Malformed(
                f"axis-{axis} line at {reduced} has sum {val} outside [0, {cap}]",
                LineId(axis, reduced),
            )
    for j1, j2 in itertools.combinations(range(1, shape.d + 1), 2):
        others = [k for k in range(1, shape.d + 1) if k not in (j1, j2)]
        t1 = _plane_stack(S, j1, j2, others).sum(axis=-1)
        t2 = _plane_stack(S, j2, j1, others).sum(axis=-1)
        bad = np.argwhere(t1 != t2)
        if len(bad):
            fixed = tuple(zip(others, (int(v) + 1 for v in bad[0])))
            i = tuple(bad[0])
            return Malformed(
                f"slice of axes ({j1}, {j2}) at {fixed or 'the whole array'}: "
                f"axis-{j1} sums total {int(t1[i])} but axis-{j2} sums total {int(t2[i])}",
                ((j1, j2), fixed),
            )
    return Compatible()


def maximal_profile(r, n2: int, q: int) -> list:
    """Cross sums of the maximal matrix whose lines have sums ``r`` and length ``n2``.

    Term ``t`` (1-based) is ``sum_i clamp(r_i - (t-1)(q-1), 0, q-1)``.
    """
    r = np.asarray(r, dtype=np.int64)
    if r.size and (r.min() < 0 or r.max() > n2 * (q - 1)):
        raise MalformedError(f"line sums must lie in [0, {n2 * (q - 1)}]")
    steps = (q - 1) * np.arange(n2, dtype=np.int64)
    return [int(v) for v in np.clip(r[:, None] - steps, 0, q - 1).sum(axis=0)]


def maximal_matrix(S: LineSumArray, axis: int) -> Tensor:
    """Pack every axis-``axis`` line with ``q-1`` from the front, one residue, then zeros."""
    shape, q = S.shape, S.shape.q
    sums = S.axis(axis)
    n = shape.line_length(axis)
    if sums.size and (sums.min() < 0 or sums.max() > n * (q - 1)):
        bad = np.argwhere((sums < 0) | (sums > n * (q - 1)))[0]
        raise MalformedError(
            f"axis-{axis} line at {tuple(int(v) + 1 for v in bad)} has sum "
            f"{int(sums[tuple(bad)])} outside [0, {n * (q - 1)}]"
        )
    steps = (q - 1) * np.arange(n, dtype=np.int64)
    packed = np.clip(sums[..., None] - steps, 0, q - 1)
    return Tensor(shape, np.moveaxis(packed, -1, axis - 1))


def _first_dominance_failure(c, r, q):
    """Batched prefix check; ``c`` is (F, n2) sums to dominate, ``r`` is (F, n1).

    Returns a boolean (F, n2) mask of failing prefixes and both prefix sums.
    """
    n2 = c.shape[-1]
    lhs = np.cumsum(-np.sort(-c, axis=-1), axis=-1)
    steps = (q - 1) * np.arange(n2, dtype=np.int64)
    prof = np.clip(r[..., :, None] - steps, 0, q - 1).sum(axis=-2)
    rhs = np.cumsum(prof, axis=-1)
    return lhs > rhs, lhs, rhs


def compatible_2d(r, c, q: int) -> Verdict:
    """Compatibility of row sums ``r`` and column sums ``c`` for q-ary matrices.

    Compatible iff for every ``a`` the ``a`` largest column sums total at
    most the first ``a`` terms of the maximal profile of ``r``.
    """
    S = LineSumArray.from_2d(r, c, q)
    verdict = check_structure(S)
    if not isinstance(verdict, Compatible):
        return verdict
    cv = np.asarray(S.axis(1))[None, :]
    rv = np.asarray(S.axis(2))[None, :]
    fail, lhs, rhs = _first_dominance_failure(cv, rv, q)
    hits = np.flatnonzero(fail[0])
    if len(hits):
        a = int(hits[0])
        return Incompatible(Witness((1, 2), (), a + 1, int(lhs[0, a]), int(rhs[0, a])))
    return Compatible()


def compatible(S: LineSumArray) -> Verdict:
    """Check every planar slice of every axis pair in both orientations."""
    verdict = check_structure(S)
    if not isinstance(verdict, Compatible):
        return verdict
    d, q = S.shape.d, S.shape.q
    for j1, j2 in itertools.combinations(range(1, d + 1), 2):
        others = [k for k in range(1, d + 1) if k not in (j1, j2)]
        fixed_dims = [S.shape.dims[k - 1] for k in others]
        # c: axis-j1 sums indexed by i_j2; r: axis-j2 sums indexed by i_j1
        c = _plane_stack(S, j1, j2, others).reshape(-1, S.shape.dims[j2 - 1])
        r = _plane_stack(S, j2, j1, others).reshape(-1, S.shape.dims[j1 - 1])
        fail_a, lhs_a, rhs_a = _first_dominance_failure(c, r, q)
        fail_b, lhs_b, rhs_b = _first_dominance_failure(r, c, q)
        bad = np.flatnonzero(fail_a.any(axis=1) | fail_b.any(axis=1))
        if not len(bad):
            continue
        f = int(bad[0])
        coords = np.unravel_index(f, fixed_dims) if fixed_dims else ()
        fixed = tuple((k, int(v) + 1) for k, v in zip(others, coords))
        if fail_a[f].any():
            a = int(np.flatnonzero(fail_a[f])[0])
            w = Witness((j1, j2), fixed, a + 1, int(lhs_a[f, a]), int(rhs_a[f, a]))
        else:
            a = int(np.flatnonzero(fail_b[f])[0])
            w = Witness((j2, j1), fixed, a + 1, int(lhs_b[f, a]), int(rhs_b[f, a]))
        return Incompatible(w)
    return Compatible()


def compatible_2d_by_permutations(r, c, q: int) -> bool:
    """The defining family of inequalities, one per column order.

    For every permutation ``sigma`` of the columns, the permuted column sums
    must be dominated prefix-wise by the column sums of the maximal matrix
    with row sums ``r``. The maximal matrix is packed row by row here rather
    than through :func:`maximal_profile`, so this serves as an independent
    reference. Exponential in ``len(c)``.
    """
    r, c = [int(x) for x in r], [int(x) for x in c]
    S = LineSumArray.from_2d(r, c, q)
    if not isinstance(check_structure(S), Compatible):
        return False
    n2 = len(c)
    bar = [0] * n2
    for x in r:
        full, res = divmod(x, q - 1)
        for t in range(full):
            bar[t] += q - 1
        if res:
            bar[full] += res
    bar_prefix = list(itertools.accumulate(bar))
    for sigma in itertools.permutations(range(n2)):
        if any(p > b for p, b in zip(itertools.accumulate(c[s] for s in sigma), bar_prefix)):
            return False
    return True
