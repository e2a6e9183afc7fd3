"""Index geometry and dense q-ary tensors.

Coordinates are 1-based everywhere in the public API: a multi-index of a
shape ``(n_1, ..., n_d)`` is a tuple ``(i_1, ..., i_d)`` with
``1 <= i_j <= n_j``. Flat storage is row-major with axis 1 outermost.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import MalformedError, ShapeMismatchError

MAX_CELLS = 2**31

MultiIndex = tuple


@dataclass(frozen=True)
class Shape:
    """Box ``[n_1] x ... x [n_d]`` together with the alphabet size ``q``."""

    dims: tuple
    q: int

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "q", int(self.q))
        if len(dims) < 2:
            raise ValueError(f"need d >= 2 axes, got {len(dims)}")
        if any(n < 1 for n in dims):
            raise ValueError(f"every side length must be >= 1, got {dims}")
        if self.q < 2:
            raise ValueError(f"alphabet size q must be >= 2, got {self.q}")
        if self.size > MAX_CELLS:
            raise ValueError(f"{self.size} cells exceed the dense storage guard")

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def reduced_dims(self, axis: int) -> tuple:
        """Dims of the axis-``axis`` line sum array (1-based axis)."""
        self._check_axis(axis)
        return self.dims[: axis - 1] + self.dims[axis:]

    def line_length(self, axis: int) -> int:
        self._check_axis(axis)
        return self.dims[axis - 1]

    def _check_axis(self, axis):
        if not 1 <= axis <= self.d:
            raise ValueError(f"axis {axis} outside [1, {self.d}]")

    def indices(self) -> Iterator[MultiIndex]:
        """Every multi-index in row-major order."""
        return itertools.product(*(range(1, n + 1) for n in self.dims))


class LineId(NamedTuple):
    """Line along ``axis`` through the cells whose other coordinates are ``reduced``.

    ``reduced`` lists the d-1 fixed coordinates in ascending axis order.
    """

    axis: int
    reduced: tuple

    def cell(self, position: int) -> MultiIndex:
        """Multi-index of the ``position``-th cell of the line."""
        k = self.axis - 1
        return self.reduced[:k] + (position,) + self.reduced[k:]


def _check_line(shape: Shape, line: LineId):
    shape._check_axis(line.axis)
    red = shape.reduced_dims(line.axis)
    if len(line.reduced) != len(red) or any(
        not 1 <= c <= n for c, n in zip(line.reduced, red)
    ):
        raise ValueError(f"line {line} out of bounds for shape {shape.dims}")


def iter_lines(shape: Shape) -> Iterator[LineId]:
    """All lines, axis-major, then lexicographic in the reduced coordinates."""
    for axis in range(1, shape.d + 1):
        red = shape.reduced_dims(axis)
        for reduced in itertools.product(*(range(1, n + 1) for n in red)):
            yield LineId(axis, reduced)


def line_entries(shape: Shape, line: LineId) -> list:
    """The cells of ``line`` in ascending order of the varying coordinate."""
    _check_line(shape, line)
    return [line.cell(p) for p in range(1, shape.line_length(line.axis) + 1)]


class Tensor:
    """Immutable dense q-ary d-dimensional matrix."""

    __slots__ = ("shape", "_data")

    def __init__(self, shape: Shape, entries):
        arr = np.array(entries, dtype=np.int64)
        if arr.size != shape.size:
            raise ShapeMismatchError(
                f"{arr.size} entries given for shape {shape.dims} ({shape.size} cells)"
            )
        arr = arr.reshape(shape.dims)
        if arr.size and (arr.min() < 0 or arr.max() > shape.q - 1):
            raise MalformedError(f"entries must lie in [0, {shape.q - 1}]")
        arr.flags.writeable = False
        self.shape = shape
        self._data = arr

    @classmethod
    def from_array(cls, arr, q: int) -> "Tensor":
        arr = np.asarray(arr)
        return cls(Shape(arr.shape, q), arr)

    @classmethod
    def zeros(cls, shape: Shape) -> "Tensor":
        return cls(shape, np.zeros(shape.dims, dtype=np.int64))

    @property
    def array(self) -> np.ndarray:
        """Read-only ndarray view, axis ``j`` of the tensor is ndarray axis ``j-1``."""
        return self._data

    @property
    def entries(self) -> tuple:
        """Flat row-major entries."""
        return tuple(int(v) for v in self._data.ravel())

    def at(self, *coords) -> int:
        if len(coords) == 1 and isinstance(coords[0], tuple):
            coords = coords[0]
        if len(coords) != self.shape.d or any(
            not 1 <= c <= n for c, n in zip(coords, self.shape.dims)
        ):
            raise IndexError(f"{coords} outside shape {self.shape.dims}")
        return int(self._data[tuple(c - 1 for c in coords)])

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._data, other._data)

    def __hash__(self):
        return hash((self.shape, self._data.tobytes()))

    def __repr__(self):
        return f"Tensor(dims={self.shape.dims}, q={self.shape.q}, entries={list(self.entries)})"


def line_sum(M: Tensor, line: LineId) -> int:
    _check_line(M.shape, line)
    idx = tuple(c - 1 for c in line.reduced)
    k = line.axis - 1
    return int(M.array[idx[:k] + (slice(None),) + idx[k:]].sum())


def line_sums(M: Tensor):
    """The line sum array of ``M``."""
    from .linesum import LineSumArray

    return LineSumArray(M.shape, [M.array.sum(axis=j) for j in range(M.shape.d)])


@dataclass(frozen=True, eq=False)
class BinaryRep:
    """0/1 unrolling of a q-ary tensor: level ``v`` flags entries ``>= v``.

    ``data`` has dims ``(n_1, ..., n_d, q-1)``; ``data[..., v-1]`` is level v.
    """

    base_shape: Shape
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.int64)
        want = self.base_shape.dims + (self.base_shape.q - 1,)
        if data.shape != want:
            raise ShapeMismatchError(f"binary representation needs dims {want}, got {data.shape}")
        if data.size and not np.isin(data, (0, 1)).all():
            raise MalformedError("binary representation entries must be 0 or 1")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    def is_level_monotone(self) -> bool:
        return bool((np.diff(self.data, axis=-1) <= 0).all())

    def level_line_length(self, line: LineId, level: int) -> int:
        """Number of ones on ``line`` at binary level ``level``."""
        _check_line(self.base_shape, line)
        idx = tuple(c - 1 for c in line.reduced)
        k = line.axis - 1
        return int(self.data[idx[:k] + (slice(None),) + idx[k:] + (level - 1,)].sum())


def binary_representation(M: Tensor) -> BinaryRep:
    levels = np.arange(1, M.shape.q, dtype=np.int64)
    data = (M.array[..., None] >= levels).astype(np.int64)
    return BinaryRep(M.shape, data)


def from_binary_representation(B: BinaryRep) -> Tensor:
    if not B.is_level_monotone():
        raise MalformedError("binary representation is not level-monotone")
    return Tensor(B.base_shape, B.data.sum(axis=-1))


def format_grid(M: Tensor) -> str:
    """Space-separated digit grid, one row per line; 2-D tensors only."""
    if M.shape.d != 2:
        raise ValueError("grid printing needs a 2-dimensional tensor")
    return "\n".join(" ".join(str(int(v)) for v in row) for row in M.array)
