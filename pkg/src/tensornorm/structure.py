"""Structural classification of nonnegative tensors.

The support graph G(f) is an undirected m-partite graph on the mode
slots: (k, j_k) and (l, j_l) are adjacent iff some positive entry of f
carries both indices.  Connectivity of G(f) (weak irreducibility) is
what the fixed-point solvers require; irreducibility is the stronger
property that no proper slot subset blocks support propagation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import NegativeEntryError
from .maps import PVector, sigma
from .tensor import SparseTensor, TupleVector

__all__ = [
    "ModeGraph",
    "StructureReport",
    "build_graph",
    "is_weakly_irreducible",
    "is_irreducible",
    "t_alpha_step",
    "admissible_indices",
    "chosen_index",
    "analyze_structure",
]

Vertex = tuple[int, int]  # (mode, index), both 1-based


def _require_nonnegative(f: SparseTensor) -> None:
    if not f.is_nonnegative:
        raise NegativeEntryError("structure analysis requires f >= 0")


@dataclass(frozen=True)
class ModeGraph:
    """Support graph of a nonnegative tensor.

    Vertices are all slots (k, j_k); the edge set never joins two slots
    of the same mode.
    """

    dims: tuple[int, ...]
    edges: frozenset[tuple[Vertex, Vertex]]

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        return tuple(
            (k, j) for k, d in enumerate(self.dims, start=1) for j in range(1, d + 1)
        )

    def adjacency(self) -> dict[Vertex, set[Vertex]]:
        adj: dict[Vertex, set[Vertex]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def is_connected(self) -> bool:
        vertices = self.vertices
        if len(vertices) <= 1:
            return True
        adj = self.adjacency()
        seen = {vertices[0]}
        queue = deque([vertices[0]])
        while queue:
            for w in adj[queue.popleft()]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(vertices)


def build_graph(f: SparseTensor) -> ModeGraph:
    """Support graph of f; every positive entry contributes a clique over
    its m slots (one per mode)."""
    _require_nonnegative(f)
    edges = set()
    for index, value in f.entries:
        if value <= 0.0:
            continue
        slots = [(k, j) for k, j in enumerate(index, start=1)]
        for a in range(len(slots)):
            for b in range(a + 1, len(slots)):
                edges.add((slots[a], slots[b]))
    return ModeGraph(f.dims, frozenset(edges))


def is_weakly_irreducible(f: SparseTensor) -> bool:
    """True iff the support graph is connected."""
    return build_graph(f).is_connected()


def is_irreducible(f: SparseTensor) -> bool:
    """Exhaustive subset test on the zero pattern.

    f is irreducible iff for every nonempty slot subset J whose
    complement keeps at least one slot in every mode, some positive
    entry has exactly one of its slots in J (support can always
    propagate across the cut).  Cuts swallowing a whole mode class are
    excluded: every support arising from a unit-norm tuple retains a
    slot per mode, so such cuts witness nothing.  Cost grows as
    2**(sum of dims); intended for desk-scale tensors.
    """
    _require_nonnegative(f)
    n = sum(f.dims)
    offsets = np.concatenate([[0], np.cumsum(f.dims)])[:-1]
    mode_masks = [
        ((1 << d) - 1) << int(off) for d, off in zip(f.dims, offsets)
    ]
    entry_masks = []
    for row, value in zip(f.subs, f.vals):
        if value > 0.0:
            mask = 0
            for k, j in enumerate(row):
                mask |= 1 << int(offsets[k] + j)
            entry_masks.append(mask)
    if not entry_masks:
        return False
    for subset in range(1, (1 << n) - 1):
        if any(subset & mm == mm for mm in mode_masks):
            continue
        if not any((mask & subset).bit_count() == 1 for mask in entry_masks):
            return False
    return True


def t_alpha_step(f: SparseTensor, p: PVector, alpha, z: TupleVector) -> TupleVector:
    """One application of z -> alpha_0 z + (alpha_1 sigma_1(z), ...,
    alpha_m sigma_m(z)).

    For f >= 0 the output dominates alpha_0 z componentwise on the
    nonnegative sphere; iterating the support of this map from every
    minimal support reaches all slots iff f is irreducible.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    if len(alpha) != f.order + 1:
        raise ValueError(f"alpha must have length m+1 = {f.order + 1}")
    if not np.all(alpha > 0):
        raise ValueError("alpha must be strictly positive")
    parts = [
        alpha[0] * z.part(k) + alpha[k] * sigma(f, p, k, z)
        for k in range(1, f.order + 1)
    ]
    return TupleVector(parts)


def admissible_indices(p: PVector) -> list[int]:
    """Modes i with (m-1) p'_i <= p_k for every k != i.

    The comparison uses the multiplied-out form (m-1) p_i <= p_k (p_i - 1)
    so the equality case p = (m, ..., m) is admissible exactly in binary
    floating point.  For m = 2 the indices are ordered smaller exponent
    first (the preferred elimination mode); otherwise ascending.
    """
    m = p.m
    out = []
    for i in range(1, m + 1):
        pi = p.p(i)
        if all((m - 1) * pi <= p.p(k) * (pi - 1.0) for k in range(1, m + 1) if k != i):
            out.append(i)
    if m == 2:
        out.sort(key=lambda i: (p.p(i), i))
    return out


def _slack(p: PVector, i: int) -> float:
    m = p.m
    other = min(p.p(k) for k in range(1, m + 1) if k != i)
    return (p.p(i) - 1.0) * (other - (m - 1.0)) - (m - 1.0)


def chosen_index(p: PVector, admissible: list[int] | None = None) -> int | None:
    """Preferred elimination mode: the admissible index of maximal slack
    (p_i - 1)(min_{k != i} p_k - (m-1)) - (m-1), earliest on ties."""
    if admissible is None:
        admissible = admissible_indices(p)
    if not admissible:
        return None
    return max(admissible, key=lambda i: (_slack(p, i), -admissible.index(i)))


@dataclass(frozen=True)
class StructureReport:
    """Solvability verdicts for a (tensor, exponents) instance."""

    weakly_irreducible: bool
    irreducible: bool
    admissible_indices: tuple[int, ...]
    chosen_index: int | None
    notes: tuple[str, ...] = ()

    @property
    def solvable(self) -> bool:
        return self.weakly_irreducible and bool(self.admissible_indices)


def analyze_structure(f: SparseTensor, p: PVector, notes: tuple[str, ...] = ()) -> StructureReport:
    adm = admissible_indices(p)
    return StructureReport(
        weakly_irreducible=is_weakly_irreducible(f),
        irreducible=is_irreducible(f),
        admissible_indices=tuple(adm),
        chosen_index=chosen_index(p, adm),
        notes=notes,
    )
