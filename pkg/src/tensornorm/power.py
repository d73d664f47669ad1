"""Baseline power method for the equal-exponent case.

The classical comparison iteration: apply the dual-gradient map in every
mode at once, then rescale the whole tuple by a fixed linear functional.
It has no bracket certificates; convergence is detected by the distance
between successive iterates, and the singular value is read off as the
quotient Q of the (scale-invariant) iterate.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalBreakdownError
from .maps import PVector, SingularPair, normalized, psi, quotient_Q
from .solver import (
    IterationRecord,
    SolveResult,
    _require_weakly_irreducible,
    _validate_instance,
)
from .tensor import SparseTensor, TupleVector, grad_mode

__all__ = ["solve_pm"]


def solve_pm(
    f: SparseTensor,
    p: float,
    normalizer: TupleVector | None = None,
    start: TupleVector | None = None,
    epsilon: float = 1e-10,
    max_iter: int = 10000,
    keep_iterates: bool = False,
) -> SolveResult:
    """Power method with one exponent p shared by all modes.

    Defaults: normalizer n = all ones and the constant positive start
    with every component 1/(d_1 + ... + d_m).  Each sweep computes
    w_k = psi_{p'}(grad_k f(v)) for all k and sets v = w / <n, w>.
    Stops when ||v_new - v||_2 < epsilon.  The result carries no bracket
    (``bracket`` is None): this method certifies nothing.
    """
    pvec = PVector.uniform(p, f.order)
    _validate_instance(f, pvec)
    _require_weakly_irreducible(f)
    if normalizer is None:
        normalizer = TupleVector.ones(f.dims)
    if any(not np.all(part > 0) for part in normalizer.parts):
        raise ValueError("normalizer must be strictly positive")
    if start is None:
        total = float(sum(f.dims))
        v = TupleVector([np.full(d, 1.0 / total) for d in f.dims])
    else:
        if any(not np.all(part > 0) for part in start.parts):
            raise ValueError("start must be strictly positive")
        v = start

    trace: list[IterationRecord] = []
    status = "max_iter"
    for k in range(1, max_iter + 1):
        w_parts = [
            psi(pvec.conjugate(mode), grad_mode(f, mode, v))
            for mode in range(1, f.order + 1)
        ]
        scale = sum(
            float(np.dot(normalizer.part(mode), w))
            for mode, w in enumerate(w_parts, start=1)
        )
        if not scale > 0.0:
            raise NumericalBreakdownError("normalizing functional vanished")
        v_new = TupleVector([w / scale for w in w_parts])
        estimate = quotient_Q(f, pvec, v_new)
        trace.append(
            IterationRecord(k, estimate, estimate, v_new if keep_iterates else None)
        )
        dist = float(np.linalg.norm(v_new.concat() - v.concat()))
        v = v_new
        if dist < epsilon:
            status = "converged"
            break

    unit = TupleVector(
        [normalized(v.part(mode), p) for mode in range(1, f.order + 1)]
    )
    lam = quotient_Q(f, pvec, unit)
    return SolveResult(
        lam=lam,
        bracket=None,
        vector=SingularPair(lam, unit, pvec),
        trace=tuple(trace),
        status=status,
        method="pm",
        q_value=lam,
    )
