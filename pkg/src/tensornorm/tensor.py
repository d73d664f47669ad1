"""Sparse coordinate storage and multilinear contraction kernels.

An order-m tensor f assigns a real value to every index tuple
(j_1, ..., j_m) with 1 <= j_k <= d_k.  Only nonzero entries are stored,
sorted lexicographically so that every contraction sums in a fixed,
reproducible order.  Modes and indices are 1-based throughout the public
surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError, TensorFormatError

__all__ = [
    "SparseTensor",
    "TupleVector",
    "ReducedTupleVector",
    "evaluate",
    "grad_mode",
    "grad_mode_substituted",
    "read_tensor",
    "write_tensor",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SparseTensor:
    """Immutable order-m tensor in coordinate (COO) form.

    Parameters
    ----------
    dims : sequence of int
        Extent d_k of each mode, k = 1..m.
    entries : iterable of ((j_1, ..., j_m), value)
        Nonzero cells with 1-based integer indices.  Exact zeros are
        dropped; duplicate index tuples and non-finite values are errors.
    """

    dims: tuple[int, ...]
    subs: np.ndarray = field(repr=False)  # (nnz, m) 0-based, lex-sorted
    vals: np.ndarray = field(repr=False)  # (nnz,)

    def __init__(self, dims, entries):
        dims = tuple(int(d) for d in dims)
        if len(dims) < 1 or any(d < 1 for d in dims):
            raise TensorFormatError(f"invalid dims {dims}")
        idx_rows, val_rows = [], []
        for index, value in entries:
            index = tuple(int(j) for j in index)
            if len(index) != len(dims):
                raise ShapeError(f"index {index} has wrong length for dims {dims}")
            if any(j < 1 or j > d for j, d in zip(index, dims)):
                raise TensorFormatError(f"index {index} out of range for dims {dims}")
            value = float(value)
            if not math.isfinite(value):
                raise TensorFormatError(f"non-finite value at {index}")
            if value == 0.0:
                continue
            idx_rows.append(index)
            val_rows.append(value)
        if len(set(idx_rows)) != len(idx_rows):
            seen, dup = set(), None
            for row in idx_rows:
                if row in seen:
                    dup = row
                    break
                seen.add(row)
            raise TensorFormatError(f"duplicate index {dup}")
        subs = np.asarray(idx_rows, dtype=np.int64).reshape(len(idx_rows), len(dims)) - 1
        vals = np.asarray(val_rows, dtype=np.float64)
        if len(vals):
            order = np.lexsort(subs.T[::-1])
            subs, vals = subs[order], vals[order]
        subs.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "subs", subs)
        object.__setattr__(self, "vals", vals)

    @property
    def order(self) -> int:
        return len(self.dims)

    @property
    def nnz(self) -> int:
        return len(self.vals)

    @property
    def is_zero(self) -> bool:
        return self.nnz == 0

    @property
    def is_nonnegative(self) -> bool:
        return bool(np.all(self.vals >= 0.0))

    @property
    def entries(self) -> list[tuple[tuple[int, ...], float]]:
        """Stored entries as 1-based index tuples, in sorted order."""
        return [
            (tuple(int(j) + 1 for j in row), float(v))
            for row, v in zip(self.subs, self.vals)
        ]

    def abs(self) -> "SparseTensor":
        """Tensor of absolute values |f|."""
        return SparseTensor(self.dims, [(i, abs(v)) for i, v in self.entries])

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dims)
        for row, v in zip(self.subs, self.vals):
            dense[tuple(row)] = v
        return dense

    @classmethod
    def from_dense(cls, array) -> "SparseTensor":
        array = np.asarray(array, dtype=np.float64)
        entries = [
            (tuple(int(j) + 1 for j in idx), array[idx])
            for idx in np.ndindex(*array.shape)
            if array[idx] != 0.0
        ]
        return cls(array.shape, entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseTensor):
            return NotImplemented
        return self.dims == other.dims and self.entries == other.entries


@dataclass(frozen=True, eq=False)
class TupleVector:
    """A tuple (x_1, ..., x_m) of one real vector per mode."""

    parts: tuple[np.ndarray, ...]

    def __init__(self, parts):
        object.__setattr__(self, "parts", tuple(_frozen(p) for p in parts))

    @property
    def order(self) -> int:
        return len(self.parts)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.parts)

    def part(self, k: int) -> np.ndarray:
        """Vector of mode k (1-based)."""
        return self.parts[k - 1]

    def concat(self) -> np.ndarray:
        return np.concatenate(self.parts)

    def drop_mode(self, i: int) -> "ReducedTupleVector":
        """Remove mode i, keeping the remaining parts in mode order."""
        if not 1 <= i <= self.order:
            raise ShapeError(f"mode {i} out of range 1..{self.order}")
        return ReducedTupleVector(i, self.parts[: i - 1] + self.parts[i:])

    def with_part(self, k: int, vec) -> "TupleVector":
        parts = list(self.parts)
        parts[k - 1] = vec
        return TupleVector(parts)

    @classmethod
    def ones(cls, dims) -> "TupleVector":
        return cls([np.ones(d) for d in dims])


@dataclass(frozen=True, eq=False)
class ReducedTupleVector:
    """A tuple of vectors for every mode except ``omitted_mode``."""

    omitted_mode: int
    parts: tuple[np.ndarray, ...]

    def __init__(self, omitted_mode: int, parts):
        object.__setattr__(self, "omitted_mode", int(omitted_mode))
        object.__setattr__(self, "parts", tuple(_frozen(p) for p in parts))
        if not 1 <= self.omitted_mode <= len(self.parts) + 1:
            raise ShapeError(
                f"omitted mode {omitted_mode} out of range for {len(self.parts)} parts"
            )

    @property
    def order(self) -> int:
        """Order m of the underlying tensor (the omitted mode included)."""
        return len(self.parts) + 1

    @property
    def modes(self) -> tuple[int, ...]:
        """The 1-based modes actually present, in increasing order."""
        return tuple(k for k in range(1, self.order + 1) if k != self.omitted_mode)

    def part(self, k: int) -> np.ndarray:
        if k == self.omitted_mode:
            raise ShapeError(f"mode {k} is omitted")
        if not 1 <= k <= self.order:
            raise ShapeError(f"mode {k} out of range 1..{self.order}")
        return self.parts[k - 1 if k < self.omitted_mode else k - 2]

    def concat(self) -> np.ndarray:
        return np.concatenate(self.parts)

    def insert(self, vec) -> TupleVector:
        """Reinstate the omitted mode with ``vec``."""
        i = self.omitted_mode
        return TupleVector(self.parts[: i - 1] + (np.asarray(vec, float),) + self.parts[i - 1 :])


def _part_lookup(f: SparseTensor, x, required_mode: int | None = None):
    """Return a mode -> vector accessor for x, validating shapes.

    ``required_mode`` names a mode whose part x need not provide (its slot
    is substituted or ignored by the caller).
    """
    if isinstance(x, TupleVector):
        if x.dims != f.dims:
            raise ShapeError(f"vector dims {x.dims} != tensor dims {f.dims}")
        return x.part
    if isinstance(x, ReducedTupleVector):
        if x.order != f.order:
            raise ShapeError(f"vector spans {x.order} modes, tensor has {f.order}")
        if required_mode is not None and x.omitted_mode != required_mode:
            raise ShapeError(
                f"reduced vector omits mode {x.omitted_mode}, expected {required_mode}"
            )
        for k in x.modes:
            if len(x.part(k)) != f.dims[k - 1]:
                raise ShapeError(f"part for mode {k} has wrong length")
        return x.part
    raise ShapeError(f"expected TupleVector or ReducedTupleVector, got {type(x)!r}")


def _ordered_sum(terms: np.ndarray) -> float:
    """Sequential sum in array order (no pairwise regrouping)."""
    acc = np.zeros(1)
    np.add.at(acc, np.zeros(len(terms), dtype=np.intp), terms)
    return float(acc[0])


def evaluate(f: SparseTensor, x: TupleVector) -> float:
    """Multilinear form f(x_1, ..., x_m), summed over stored entries."""
    part = _part_lookup(f, x)
    if isinstance(x, ReducedTupleVector):
        raise ShapeError("evaluate needs a full TupleVector")
    if f.nnz == 0:
        return 0.0
    terms = f.vals.copy()
    for k in range(1, f.order + 1):
        terms *= part(k)[f.subs[:, k - 1]]
    return _ordered_sum(terms)


def grad_mode(f: SparseTensor, i: int, x) -> np.ndarray:
    """Gradient of f with respect to mode i.

    Component j equals f evaluated with the mode-i slot replaced by the
    j-th canonical basis vector.  ``x`` may be a full TupleVector (its
    mode-i part is ignored) or a ReducedTupleVector omitting mode i.
    """
    if not 1 <= i <= f.order:
        raise ShapeError(f"mode {i} out of range 1..{f.order}")
    part = _part_lookup(f, x, required_mode=i)
    out = np.zeros(f.dims[i - 1])
    if f.nnz == 0:
        return out
    terms = f.vals.copy()
    for k in range(1, f.order + 1):
        if k != i:
            terms *= part(k)[f.subs[:, k - 1]]
    np.add.at(out, f.subs[:, i - 1], terms)
    return out


def grad_mode_substituted(f: SparseTensor, k: int, i: int, x, y_i) -> np.ndarray:
    """Gradient in mode k with the mode-i slot holding ``y_i``.

    All slots other than i and k are taken from ``x`` (a
    ReducedTupleVector omitting i, or a full TupleVector whose mode-i
    part is ignored).
    """
    if k == i:
        raise ShapeError("modes k and i must differ")
    for mode in (k, i):
        if not 1 <= mode <= f.order:
            raise ShapeError(f"mode {mode} out of range 1..{f.order}")
    part = _part_lookup(f, x, required_mode=i)
    y_i = np.asarray(y_i, dtype=np.float64)
    if len(y_i) != f.dims[i - 1]:
        raise ShapeError(f"substituted part for mode {i} has wrong length")
    out = np.zeros(f.dims[k - 1])
    if f.nnz == 0:
        return out
    terms = f.vals * y_i[f.subs[:, i - 1]]
    for l in range(1, f.order + 1):
        if l not in (i, k):
            terms *= part(l)[f.subs[:, l - 1]]
    np.add.at(out, f.subs[:, k - 1], terms)
    return out


# --- text format -----------------------------------------------------------
#
#   tensor v1
#   dims d1 d2 ... dm
#   j1 j2 ... jm value        (one entry per line, 1-based indices)
#
# '#' starts a comment, blank lines are ignored, unlisted cells are zero.


def _content_lines(stream):
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def read_tensor(stream) -> SparseTensor:
    """Parse the text format; zero-valued entries are dropped."""
    if isinstance(stream, (str, bytes)):
        import io

        stream = io.StringIO(stream if isinstance(stream, str) else stream.decode())
    lines = _content_lines(stream)
    try:
        _, header = next(lines)
    except StopIteration:
        raise TensorFormatError("empty file") from None
    if header != "tensor v1":
        raise TensorFormatError(f"bad header {header!r}, expected 'tensor v1'")
    try:
        _, dims_line = next(lines)
    except StopIteration:
        raise TensorFormatError("missing dims line") from None
    tokens = dims_line.split()
    if tokens[0] != "dims" or len(tokens) < 3:
        raise TensorFormatError(f"bad dims line {dims_line!r} (need m >= 2)")
    try:
        dims = [int(t) for t in tokens[1:]]
    except ValueError:
        raise TensorFormatError(f"bad dims line {dims_line!r}") from None
    if any(d < 1 for d in dims):
        raise TensorFormatError(f"dims must be positive, got {dims}")
    entries = []
    for lineno, line in lines:
        tokens = line.split()
        if len(tokens) != len(dims) + 1:
            raise TensorFormatError(f"line {lineno}: expected {len(dims)} indices and a value")
        try:
            index = tuple(int(t) for t in tokens[:-1])
            value = float(tokens[-1])
        except ValueError:
            raise TensorFormatError(f"line {lineno}: malformed entry {line!r}") from None
        entries.append((index, value))
    if len(set(i for i, _ in entries)) != len(entries):
        seen = set()
        for index, _ in entries:
            if index in seen:
                raise TensorFormatError(f"duplicate index {index}")
            seen.add(index)
    return SparseTensor(dims, entries)


def write_tensor(f: SparseTensor, stream) -> None:
    """Write the text format; round-trips through :func:`read_tensor`."""
    stream.write("tensor v1\n")
    stream.write("dims " + " ".join(str(d) for d in f.dims) + "\n")
    for index, value in f.entries:
        stream.write(" ".join(str(j) for j in index) + f" {value!r}\n")
