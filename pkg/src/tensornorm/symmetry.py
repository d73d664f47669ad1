"""Reductions between partially symmetric eigenproblems and the singular
problem.

A tensor that is invariant under index permutations within prescribed
mode blocks admits an eigensystem in block coordinates: one vector per
block, repeated across the block's modes.  The lift ``xi`` repeats block
vectors, the projection ``zeta`` extracts the leading mode of each
block, and the block eigenproblem is solved by running the bracketing
solver on the lifted instance (whose iterates stay block-constant) and
projecting back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NotPartiallySymmetricError, NumericalBreakdownError, ShapeError
from .maps import PVector, SingularPair, psi
from .solver import SolveResult, SolverConfig, solve_hgpm
from .tensor import SparseTensor, TupleVector, grad_mode

__all__ = [
    "SymmetryStructure",
    "check_partial_symmetry",
    "lift_xi",
    "project_zeta",
    "solve_eigenproblem",
    "eigen_residuals",
    "admissibility_note",
]

#: allowed drift of lifted iterates away from block-constancy
BLOCK_DRIFT_TOL = 1e-12


@dataclass(frozen=True)
class SymmetryStructure:
    """Mode blocks (q_1, ..., q_k) with per-block dims and exponents.

    Block j covers q_j consecutive modes, all of extent block_dims[j]
    and exponent block_exponents[j]; the q_j sum to the tensor order m.
    """

    block_sizes: tuple[int, ...]
    block_dims: tuple[int, ...]
    block_exponents: tuple[float, ...]

    def __init__(self, block_sizes, block_dims, block_exponents):
        block_sizes = tuple(int(q) for q in block_sizes)
        block_dims = tuple(int(d) for d in block_dims)
        block_exponents = tuple(float(q) for q in block_exponents)
        if any(q < 1 for q in block_sizes):
            raise ValueError("block sizes must be positive")
        if not (len(block_sizes) == len(block_dims) == len(block_exponents)):
            raise ValueError("block_sizes, block_dims, block_exponents must align")
        if any(d < 1 for d in block_dims):
            raise ValueError("block dims must be positive")
        for q in block_exponents:
            if not (1.0 < q < np.inf):
                raise ValueError(f"block exponent {q} outside (1, inf)")
        object.__setattr__(self, "block_sizes", block_sizes)
        object.__setattr__(self, "block_dims", block_dims)
        object.__setattr__(self, "block_exponents", block_exponents)

    @property
    def k(self) -> int:
        return len(self.block_sizes)

    @property
    def m(self) -> int:
        return sum(self.block_sizes)

    @property
    def lifted_dims(self) -> tuple[int, ...]:
        return tuple(
            d for q, d in zip(self.block_sizes, self.block_dims) for _ in range(q)
        )

    @property
    def lifted_p(self) -> PVector:
        return PVector(
            tuple(
                e
                for q, e in zip(self.block_sizes, self.block_exponents)
                for _ in range(q)
            )
        )

    def first_mode(self, j: int) -> int:
        """Leading (1-based) mode of block j (1-based)."""
        return 1 + sum(self.block_sizes[: j - 1])

    def block_of(self, mode: int) -> int:
        """Block number (1-based) containing the given mode."""
        upto = 0
        for j, q in enumerate(self.block_sizes, start=1):
            upto += q
            if mode <= upto:
                return j
        raise ShapeError(f"mode {mode} out of range 1..{self.m}")

    def modes_of(self, j: int) -> range:
        start = self.first_mode(j)
        return range(start, start + self.block_sizes[j - 1])


def _check_dims(f: SparseTensor, structure: SymmetryStructure) -> None:
    if f.dims != structure.lifted_dims:
        raise ShapeError(
            f"tensor dims {f.dims} inconsistent with block layout "
            f"{structure.lifted_dims}"
        )


def check_partial_symmetry(f: SparseTensor, structure: SymmetryStructure) -> bool:
    """True iff every entry is invariant under all within-block index
    permutations (absent cells count as zero)."""
    _check_dims(f, structure)
    table = {index: value for index, value in f.entries}
    block_slices = [
        (structure.first_mode(j) - 1, structure.first_mode(j) - 1 + q)
        for j, q in enumerate(structure.block_sizes, start=1)
    ]
    for index, value in f.entries:
        per_block_perms = [
            set(itertools.permutations(index[a:b])) for a, b in block_slices
        ]
        for combo in itertools.product(*per_block_perms):
            permuted = tuple(j for chunk in combo for j in chunk)
            if table.get(permuted, 0.0) != value:
                return False
    return True


def lift_xi(structure: SymmetryStructure, ys) -> TupleVector:
    """Repeat block vector j across its q_j modes."""
    ys = [np.asarray(y, dtype=np.float64) for y in ys]
    if len(ys) != structure.k:
        raise ShapeError(f"expected {structure.k} block vectors, got {len(ys)}")
    for y, d in zip(ys, structure.block_dims):
        if len(y) != d:
            raise ShapeError(f"block vector of length {len(y)} does not match dim {d}")
    parts = [y for y, q in zip(ys, structure.block_sizes) for _ in range(q)]
    return TupleVector(parts)


def project_zeta(structure: SymmetryStructure, z: TupleVector) -> list[np.ndarray]:
    """Leading part of each block; inverse of :func:`lift_xi` on its image."""
    if z.order != structure.m:
        raise ShapeError(f"vector spans {z.order} modes, layout has {structure.m}")
    return [z.part(structure.first_mode(j)) for j in range(1, structure.k + 1)]


def eigen_residuals(f: SparseTensor, structure: SymmetryStructure, lam: float, ys) -> np.ndarray:
    """Per-block norms ||grad_{first mode of block j} f(xi(y)) -
    lam * psi_{p_j}(y_j)||_2."""
    lifted = lift_xi(structure, ys)
    out = []
    for j in range(1, structure.k + 1):
        g = grad_mode(f, structure.first_mode(j), lifted)
        target = lam * psi(structure.block_exponents[j - 1], lifted.part(structure.first_mode(j)))
        out.append(float(np.linalg.norm(g - target)))
    return np.asarray(out)


def admissibility_note(structure: SymmetryStructure) -> str | None:
    """Reduced-form wording of the exponent condition for two-block
    layouts where one block is a single mode."""
    if structure.k != 2:
        return None
    m = structure.m
    p1, p2 = structure.block_exponents
    if structure.block_sizes[0] == 1:
        return (
            f"two-block layout with a singleton first block: the condition "
            f"reduces to {m - 1} <= (p1 - 1)(p2 - {m - 1}) with p1 = {p1}, p2 = {p2}"
        )
    if structure.block_sizes[0] == m - 1:
        return (
            f"two-block layout with a singleton last block: the condition "
            f"reduces to {m - 1} <= (p2 - 1)(p1 - {m - 1}) with p1 = {p1}, p2 = {p2}"
        )
    return None


def _assert_block_constant(structure: SymmetryStructure, trace, i: int) -> None:
    for rec in trace:
        x = rec.x
        if x is None:
            continue
        for j in range(1, structure.k + 1):
            modes = [l for l in structure.modes_of(j) if l != i]
            if len(modes) < 2:
                continue
            ref = x.part(modes[0])
            for l in modes[1:]:
                if float(np.max(np.abs(x.part(l) - ref))) > BLOCK_DRIFT_TOL:
                    raise NumericalBreakdownError(
                        f"lifted iterate {rec.k} drifted off block-constancy "
                        f"in block {j}"
                    )


def solve_eigenproblem(
    f: SparseTensor,
    structure: SymmetryStructure,
    epsilon: float = 1e-10,
    max_iter: int = 10000,
) -> SolveResult:
    """Maximal positive solution of the block eigensystem
    grad_{first mode of block j} f(xi(y)) = lam * psi_{p_j}(y_j), all parts
    unit-normed.

    Solves the lifted singular problem (block-constant start keeps the
    iterates block-constant; drift beyond BLOCK_DRIFT_TOL is escalated
    as numerical breakdown) and projects the vector back to block
    coordinates.  For admissible exponents the strictly positive
    solution is unique.
    """
    _check_dims(f, structure)
    if not check_partial_symmetry(f, structure):
        raise NotPartiallySymmetricError(
            "entries are not invariant under within-block permutations"
        )
    config = SolverConfig(epsilon=epsilon, max_iter=max_iter, keep_iterates=True)
    result = solve_hgpm(f, structure.lifted_p, config)
    if result.vector is None:
        return result
    _assert_block_constant(structure, result.trace, result.index)
    ys = project_zeta(structure, result.vector.vector)
    block_pair = SingularPair(
        result.lam, TupleVector(ys), PVector(structure.block_exponents)
    )
    return SolveResult(
        lam=result.lam,
        bracket=result.bracket,
        vector=block_pair,
        trace=result.trace,
        status=result.status,
        method=result.method,
        index=result.index,
        q_value=result.q_value,
    )
