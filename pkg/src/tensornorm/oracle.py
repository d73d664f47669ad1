"""Independent brute-force references for desk-scale verification.

Everything here recomputes from a dense copy of the tensor with its own
gradient, power-map, and norm code (dense tensordot contractions rather
than the sparse scatter kernels), so agreement with the solvers is a
genuine cross-check and not a tautology.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError, ZeroTensorError
from .tensor import SparseTensor, TupleVector

__all__ = ["oracle_norm", "oracle_matrix_2norm"]

#: total-dimension cap; multistart ascent is only trustworthy at desk scale
DIMENSION_GUARD = 64

#: stop a local ascent once the quotient improves by less than this
STAGNATION_TOL = 1e-13


def _signed_power(v: np.ndarray, e: float) -> np.ndarray:
    return np.sign(v) * np.abs(v) ** e


def _hoelder_norm(v: np.ndarray, q: float) -> float:
    return float(np.sum(np.abs(v) ** q) ** (1.0 / q))


def _dense_grad(dense: np.ndarray, parts: list[np.ndarray], axis: int) -> np.ndarray:
    """Contract every mode except ``axis`` (0-based) with the given parts."""
    g = dense
    for ax in reversed(range(dense.ndim)):
        if ax != axis:
            g = np.tensordot(g, parts[ax], axes=([ax], [0]))
    return g


def _quotient(dense, parts, exps) -> float:
    value = float(np.dot(_dense_grad(dense, parts, 0), parts[0]))
    denom = 1.0
    for v, q in zip(parts, exps):
        denom *= _hoelder_norm(v, q)
    return abs(value) / denom


def _ascend(dense, parts, exps, max_sweeps: int = 500):
    """Alternating dual-gradient ascent of the quotient to stagnation."""
    conjugates = [q / (q - 1.0) for q in exps]
    best = _quotient(dense, parts, exps)
    for _ in range(max_sweeps):
        for ax in range(dense.ndim):
            g = _dense_grad(dense, parts, ax)
            update = _signed_power(g, conjugates[ax] - 1.0)
            norm = _hoelder_norm(update, exps[ax])
            if norm == 0.0:
                return best, parts
            parts[ax] = update / norm
        current = _quotient(dense, parts, exps)
        if current - best < STAGNATION_TOL:
            return max(current, best), parts
        best = current
    return best, parts


def oracle_norm(
    f: SparseTensor,
    p,
    restarts: int = 100,
    seed: int = 0,
) -> tuple[float, TupleVector]:
    """Multistart maximization of the quotient Q over the product sphere.

    Each restart runs alternating ascent (mode k updated to the
    normalized dual power of its gradient, a direct fixed point of the
    singular system) from a random strictly positive start; for
    nonnegative tensors positive starts suffice to reach the maximum.
    Deterministic for a fixed seed.

    Returns the best (quotient, maximizer) found.
    """
    if f.is_zero:
        raise ZeroTensorError("the zero tensor has no singular values")
    if sum(f.dims) > DIMENSION_GUARD:
        raise ValueError(
            f"total dimension {sum(f.dims)} exceeds the guard {DIMENSION_GUARD}"
        )
    exps = [float(q) for q in getattr(p, "exponents", p)]
    if len(exps) != f.order:
        raise ShapeError("exponent count does not match tensor order")
    dense = f.to_dense()
    nonneg = f.is_nonnegative
    rng = np.random.default_rng(seed)
    best_q, best_parts = -np.inf, None
    for _ in range(max(1, int(restarts))):
        if nonneg:
            parts = [rng.uniform(0.1, 1.0, size=d) for d in f.dims]
        else:
            parts = [rng.standard_normal(d) for d in f.dims]
            while abs(float(np.dot(_dense_grad(dense, parts, 0), parts[0]))) == 0.0:
                parts = [rng.standard_normal(d) for d in f.dims]
        parts = [v / _hoelder_norm(v, q) for v, q in zip(parts, exps)]
        q_val, parts = _ascend(dense, parts, exps)
        if q_val > best_q:
            best_q, best_parts = q_val, [v.copy() for v in parts]
    return best_q, TupleVector(best_parts)


def oracle_matrix_2norm(a) -> float:
    """Largest singular value of a nonnegative matrix.

    Plain power iteration on the Gram matrix A^T A with a Rayleigh
    quotient readout, written directly on dense arrays.
    """
    if isinstance(a, SparseTensor):
        if a.order != 2:
            raise ShapeError(f"expected a matrix, got order {a.order}")
        a = a.to_dense()
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got ndim {a.ndim}")
    gram = a.T @ a
    if not np.any(gram):
        return 0.0
    v = np.ones(gram.shape[0]) / np.sqrt(gram.shape[0])
    rho = float(v @ gram @ v)
    for _ in range(100000):
        w = gram @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0
        v = w / norm
        rho_new = float(v @ gram @ v)
        if abs(rho_new - rho) <= 1e-15 * max(rho_new, 1.0):
            rho = rho_new
            break
        rho = rho_new
    return float(np.sqrt(rho))
