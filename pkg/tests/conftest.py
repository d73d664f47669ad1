"""Shared builders for the test suite."""

import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tensornorm import (
    PVector,
    ReducedTupleVector,
    SparseTensor,
    TupleVector,
    is_weakly_irreducible,
    normalized,
)

settings.register_profile(
    "suite",
    derandomize=True,
    max_examples=50,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


# --- fixed tensors ----------------------------------------------------------

BENCH_ENTRIES = {
    (1, 2, 1): 806.0,
    (1, 3, 1): 761.0,
    (1, 3, 4): 3.0,
    (2, 1, 1): 833.0,
    (2, 2, 2): 285.0,
    (2, 3, 3): 176.0,
}


def bench_tensor() -> SparseTensor:
    """Sparse weakly irreducible 2x3x4 sample with integer entries."""
    return SparseTensor((2, 3, 4), list(BENCH_ENTRIES.items()))


def ones_tensor(dims) -> SparseTensor:
    entries = [(idx, 1.0) for idx in itertools.product(*[range(1, d + 1) for d in dims])]
    return SparseTensor(dims, entries)


def diag_tensor() -> SparseTensor:
    """Two diagonal cells; support graph is two disjoint triangles."""
    return SparseTensor((2, 2, 2), [((1, 1, 1), 1.0), ((2, 2, 2), 1.0)])


def bridged_tensor() -> SparseTensor:
    """Weakly irreducible but reducible: cell (1,2,1) bridges the diagonal."""
    return SparseTensor(
        (2, 2, 2), [((1, 1, 1), 1.0), ((1, 2, 1), 1.0), ((2, 2, 2), 1.0)]
    )


def asym_tensor() -> SparseTensor:
    """All ones except cells (1,2,2) and (2,1,2); breaks (1,2)-block symmetry."""
    entries = [
        (idx, 1.0)
        for idx in itertools.product((1, 2), repeat=3)
        if idx not in ((1, 2, 2), (2, 1, 2))
    ]
    return SparseTensor((2, 2, 2), entries)


def signed_matrix() -> SparseTensor:
    """The 2x2 matrix with entries (1,2) -> 1 and (2,1) -> -1."""
    return SparseTensor((2, 2), [((1, 2), 1.0), ((2, 1), -1.0)])


def signed_matrix_pair(p1: float, p2: float):
    """Known critical pair of :func:`signed_matrix` for exponents (p1, p2)."""
    lam = 2.0 ** (1.0 - 1.0 / p1 - 1.0 / p2)
    x1 = np.array([2.0 ** (-1.0 / p1), -(2.0 ** (-1.0 / p1))])
    x2 = np.array([2.0 ** (-1.0 / p2), 2.0 ** (-1.0 / p2)])
    return lam, TupleVector([x1, x2])


# --- random builders --------------------------------------------------------


def random_tensor(rng, dims, density=0.5, low=0.1, high=1.0, decades=None) -> SparseTensor:
    """Random sparse tensor; ``decades`` switches the values to a
    log-uniform spread over that many orders of magnitude (wide spreads
    make the fixed-point iteration converge slowly)."""
    entries = []
    for idx in itertools.product(*[range(1, d + 1) for d in dims]):
        if rng.random() < density:
            if decades is None:
                value = float(rng.uniform(low, high))
            else:
                value = float(10.0 ** rng.uniform(-decades, 0.0))
            entries.append((idx, value))
    return SparseTensor(dims, entries)


def random_weakly_irreducible(rng, dims, density=0.5, decades=None) -> SparseTensor:
    for _ in range(200):
        f = random_tensor(rng, dims, density, decades=decades)
        if not f.is_zero and is_weakly_irreducible(f):
            return f
    raise RuntimeError(f"no weakly irreducible draw for dims {dims}")


def random_admissible_p(rng, m) -> PVector:
    # p_k >= m always satisfies the coupling condition; mix the equality
    # case in to keep it exercised.
    if rng.random() < 0.25:
        return PVector((float(m),) * m)
    return PVector(tuple(float(m) + float(rng.uniform(0.0, 2.0)) for _ in range(m)))


def random_positive_reduced(rng, dims, p: PVector, i: int) -> ReducedTupleVector:
    parts = [
        normalized(rng.uniform(0.1, 1.0, size=d), p.p(k))
        for k, d in enumerate(dims, start=1)
        if k != i
    ]
    return ReducedTupleVector(i, parts)


def random_positive_full(rng, dims, p: PVector) -> TupleVector:
    parts = [
        normalized(rng.uniform(0.1, 1.0, size=d), p.p(k))
        for k, d in enumerate(dims, start=1)
    ]
    return TupleVector(parts)


def symmetric_tensor(rng, d, m, density=0.8) -> SparseTensor:
    """Fully symmetric nonnegative tensor: one value per index multiset."""
    values = {}
    for combo in itertools.combinations_with_replacement(range(1, d + 1), m):
        if rng.random() < density:
            values[combo] = float(rng.uniform(0.1, 1.0))
    entries = {}
    for combo, value in values.items():
        for perm in itertools.permutations(combo):
            entries[perm] = value
    return SparseTensor((d,) * m, list(entries.items()))


@pytest.fixture
def bench():
    return bench_tensor()


@pytest.fixture
def p333():
    return PVector((3.0, 3.0, 3.0))
