"""Line sum arrays of q-ary multidimensional matrices."""
from ._kernel import BACKEND
from .construct import BuildStats, BuildTrace, build, build_2d, build_traced, peel_last_column, switch_repair, verify
from .linesum import (
    Compatible,
    Incompatible,
    LineSumArray,
    Malformed,
    Witness,
    check_structure,
    compatible,
    compatible_2d,
    maximal_matrix,
    maximal_profile,
)
from .oracle import SearchBudget, enumerate_structural, enumerate_valid, solve
from .symmetric import SymmetricProfile, build_symmetric, build_symmetric_2d, check_symmetric, is_symmetric_tensor
from .tensor import LineId, Shape, Tensor, binary_representation, from_binary_representation, iter_lines, line_entries, line_sum, line_sums

__version__ = "0.1.0"
