"""Command-line workflow over JSON instance and tensor files.

Instance file::

    {"shape": [n1, ..., nd], "q": q,
     "line_sums": [{"axis": 1, "sums": [...]}, ..., {"axis": d, "sums": [...]}]}

Each ``sums`` array is flat in lexicographic order of the reduced index
(the coordinates of the other axes, ascending axis order).

Tensor file::

    {"shape": [n1, ..., nd], "q": q, "entries": [...]}

with entries row-major, axis 1 outermost.

Exit codes: 0 ok, 1 verify failed, 2 incompatible or unrealizable,
3 malformed, 64 bad input or arguments, 65 shape mismatch, 70 internal
error, 75 search budget exhausted.

``gen`` draws from PCG64 seeded with ``--seed``: raw 64-bit outputs are
reduced modulo q after rejecting the top partial range, so the stream is
fixed by the seed alone and does not depend on NumPy's sampling routines.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional

import numpy as np

from .construct import build
from .errors import (
    BudgetExceeded,
    IncompatibleError,
    InternalError,
    MalformedError,
    NotRealizable,
    ShapeMismatchError,
)
from .linesum import Compatible, Incompatible, LineSumArray, compatible, maximal_matrix
from .oracle import SearchBudget, orbit_representatives, solve
from .symmetric import build_symmetric, check_symmetric, symmetrize
from .tensor import Shape, Tensor, format_grid, iter_lines, line_sums

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INCOMPATIBLE = 2
EXIT_MALFORMED = 3
EXIT_USAGE = 64
EXIT_SHAPE = 65
EXIT_INTERNAL = 70
EXIT_BUDGET = 75

log = logging.getLogger("qtomo")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(EXIT_USAGE, f"{self.prog}: {message}")


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _int_list(obj, what: str) -> list:
    if not isinstance(obj, list) or not all(_is_int(v) for v in obj):
        raise CliError(EXIT_USAGE, f"{what} must be a list of integers")
    return obj


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as e:
        raise CliError(EXIT_USAGE, f"cannot read {path}: {e.strerror}")
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise CliError(EXIT_USAGE, f"{path}: invalid JSON ({e})")
    if not isinstance(obj, dict):
        raise CliError(EXIT_USAGE, f"{path}: top level must be an object")
    return obj


def _shape_of(obj: dict, path: str) -> Shape:
    for key in ("shape", "q"):
        if key not in obj:
            raise CliError(EXIT_USAGE, f"{path}: missing field {key!r}")
    dims = _int_list(obj["shape"], f"{path}: shape")
    if not _is_int(obj["q"]):
        raise CliError(EXIT_USAGE, f"{path}: q must be an integer")
    try:
        return Shape(tuple(dims), obj["q"])
    except ValueError as e:
        raise CliError(EXIT_USAGE, f"{path}: {e}")


def parse_instance(obj: dict, path: str = "<instance>") -> LineSumArray:
    shape = _shape_of(obj, path)
    entries = obj.get("line_sums")
    if not isinstance(entries, list):
        raise CliError(EXIT_USAGE, f"{path}: line_sums must be a list")
    by_axis = {}
    for e in entries:
        if not isinstance(e, dict) or not _is_int(e.get("axis")) or "sums" not in e:
            raise CliError(EXIT_USAGE, f"{path}: each line_sums entry needs axis and sums")
        if e["axis"] in by_axis or not 1 <= e["axis"] <= shape.d:
            raise CliError(EXIT_USAGE, f"{path}: axis {e['axis']} repeated or outside [1, {shape.d}]")
        by_axis[e["axis"]] = _int_list(e["sums"], f"{path}: axis-{e['axis']} sums")
    if len(by_axis) != shape.d:
        raise CliError(EXIT_USAGE, f"{path}: need one line_sums entry per axis")
    try:
        return LineSumArray(shape, [by_axis[j] for j in range(1, shape.d + 1)])
    except ShapeMismatchError as e:
        raise CliError(EXIT_USAGE, f"{path}: {e}")


def parse_tensor(obj: dict, path: str = "<tensor>") -> Tensor:
    shape = _shape_of(obj, path)
    entries = _int_list(obj.get("entries"), f"{path}: entries")
    try:
        return Tensor(shape, entries)
    except ShapeMismatchError as e:
        raise CliError(EXIT_USAGE, f"{path}: {e}")
    except MalformedError as e:
        raise CliError(EXIT_MALFORMED, f"{path}: {e}")


def instance_to_json(S: LineSumArray) -> dict:
    return {
        "shape": list(S.shape.dims),
        "q": S.shape.q,
        "line_sums": [{"axis": j, "sums": list(S.flat(j))} for j in range(1, S.shape.d + 1)],
    }


def tensor_to_json(M: Tensor) -> dict:
    return {"shape": list(M.shape.dims), "q": M.shape.q, "entries": list(M.entries)}


def dumps(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


def _emit(text: str, path: Optional[str]):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def uniform_digits(seed: int, count: int, q: int) -> np.ndarray:
    """``count`` uniform values in ``[0, q)`` from PCG64 raw output."""
    bits = np.random.PCG64(seed)
    limit = (1 << 64) - ((1 << 64) % q)
    out = []
    while len(out) < count:
        for v in bits.random_raw(max(count - len(out), 16)).tolist():
            if v < limit:
                out.append(v % q)
                if len(out) == count:
                    break
    return np.array(out, dtype=np.int64)


def generate(dims, q: int, seed: int, symmetric: bool = False) -> Tensor:
    shape = Shape(tuple(dims), q)
    if not symmetric:
        return Tensor(shape, uniform_digits(seed, shape.size, q))
    if len(set(shape.dims)) != 1:
        raise ValueError("symmetric generation needs equal side lengths")
    n, d = shape.dims[0], shape.d
    reps = orbit_representatives(n, d)
    vals = uniform_digits(seed, len(reps), q)
    return symmetrize(dict(zip(reps, vals.tolist())), n, d, q)


def cmd_check(args) -> int:
    S = parse_instance(_load_json(args.instance), args.instance)
    verdict = compatible(S)
    print(verdict)
    if isinstance(verdict, Compatible):
        return EXIT_OK
    return EXIT_INCOMPATIBLE if isinstance(verdict, Incompatible) else EXIT_MALFORMED


def _verdict_exit(verdict) -> int:
    print(verdict, file=sys.stderr)
    return EXIT_INCOMPATIBLE if isinstance(verdict, Incompatible) else EXIT_MALFORMED


def cmd_build(args) -> int:
    S = parse_instance(_load_json(args.instance), args.instance)
    budget = SearchBudget(args.max_nodes)
    try:
        if args.symmetric:
            if not check_symmetric(S):
                print("line sum array is not symmetric", file=sys.stderr)
                return EXIT_INCOMPATIBLE
            M = build_symmetric(S, budget)
        else:
            M = build(S, budget)
    except IncompatibleError as e:
        return _verdict_exit(e.verdict)
    if line_sums(M) != S:
        raise InternalError("verify", "built tensor failed verification")
    _emit(dumps(tensor_to_json(M)), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    M = parse_tensor(_load_json(args.tensor), args.tensor)
    S = parse_instance(_load_json(args.instance), args.instance)
    if M.shape != S.shape:
        print(f"tensor shape {M.shape.dims} q={M.shape.q} does not match instance "
              f"shape {S.shape.dims} q={S.shape.q}", file=sys.stderr)
        return EXIT_SHAPE
    got = line_sums(M)
    for line in iter_lines(M.shape):
        have, want = got.get(line), S.get(line)
        if have != want:
            print(f"axis-{line.axis} line at {line.reduced} sums to {have}, expected {want}")
            return EXIT_VERIFY
    print("ok")
    return EXIT_OK


def cmd_linesums(args) -> int:
    M = parse_tensor(_load_json(args.tensor), args.tensor)
    _emit(dumps(instance_to_json(line_sums(M))), args.output)
    return EXIT_OK


def cmd_gen(args) -> int:
    try:
        M = generate(args.shape, args.q, args.seed, args.symmetric)
    except ValueError as e:
        raise CliError(EXIT_USAGE, str(e))
    _emit(dumps(instance_to_json(line_sums(M))), args.output)
    return EXIT_OK


def cmd_oracle(args) -> int:
    S = parse_instance(_load_json(args.instance), args.instance)
    M = solve(S, SearchBudget(args.max_nodes, symmetric=args.symmetric))
    if M is None:
        print("no realization exists", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    _emit(dumps(tensor_to_json(M)), args.output)
    return EXIT_OK


def cmd_maximal(args) -> int:
    S = parse_instance(_load_json(args.instance), args.instance)
    if not 1 <= args.axis <= S.shape.d:
        raise CliError(EXIT_USAGE, f"axis {args.axis} outside [1, {S.shape.d}]")
    try:
        M = maximal_matrix(S, args.axis)
    except MalformedError as e:
        print(f"Malformed: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    _emit(dumps(tensor_to_json(M)), args.output)
    return EXIT_OK


def cmd_show(args) -> int:
    M = parse_tensor(_load_json(args.tensor), args.tensor)
    if M.shape.d != 2:
        raise CliError(EXIT_USAGE, "show needs a 2-dimensional tensor")
    print(format_grid(M))
    return EXIT_OK


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {v}")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qtomo", description="Line sum arrays of q-ary d-dimensional matrices.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="decide compatibility of an instance")
    c.add_argument("instance")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("build", help="construct a tensor realizing an instance")
    b.add_argument("instance")
    b.add_argument("-o", "--output")
    b.add_argument("--symmetric", action="store_true")
    b.add_argument("--max-nodes", type=_positive, default=SearchBudget().max_nodes)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="check a tensor against an instance")
    v.add_argument("tensor")
    v.add_argument("instance")
    v.set_defaults(func=cmd_verify)

    ls = sub.add_parser("linesums", help="write the line sum array of a tensor")
    ls.add_argument("tensor")
    ls.add_argument("-o", "--output")
    ls.set_defaults(func=cmd_linesums)

    g = sub.add_parser("gen", help="line sums of a seeded random tensor")
    g.add_argument("--shape", type=_positive, nargs="+", required=True)
    g.add_argument("--q", type=_positive, required=True)
    g.add_argument("--seed", type=_nonneg, required=True)
    g.add_argument("--symmetric", action="store_true")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("oracle", help="exhaustive search for a realization")
    o.add_argument("instance")
    o.add_argument("--symmetric", action="store_true")
    o.add_argument("--max-nodes", type=_positive, default=SearchBudget().max_nodes)
    o.add_argument("-o", "--output")
    o.set_defaults(func=cmd_oracle)

    m = sub.add_parser("maximal", help="maximal tensor for one axis of an instance")
    m.add_argument("instance")
    m.add_argument("--axis", type=int, required=True)
    m.add_argument("-o", "--output")
    m.set_defaults(func=cmd_maximal)

    s = sub.add_parser("show", help="print a 2-D tensor as a digit grid")
    s.add_argument("tensor")
    s.set_defaults(func=cmd_show)
    return p


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
    except CliError as e:
        print(e, file=sys.stderr)
        return e.code
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as e:
        print(e, file=sys.stderr)
        return e.code
    except NotRealizable as e:
        print(f"not realizable: {e}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except BudgetExceeded as e:
        print(e, file=sys.stderr)
        return EXIT_BUDGET
    except InternalError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
