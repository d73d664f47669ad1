"""Nonlinear maps and functionals of the singular-value system.

The maximal singular value of f with respect to Hoelder exponents
(p_1, ..., p_m) is the maximum of the quotient

    Q(x) = |f(x_1, ..., x_m)| / (||x_1||_{p_1} * ... * ||x_m||_{p_m}),

and a pair (lambda, x) on the product unit sphere solves the system
sigma_i(x) = lambda**(p'_i - 1) * x_i for every mode i.  Eliminating one
mode i gives the reduced quotient Q_i and the two-pass maps s_{i,k};
``lift_phi`` and ``drop_mode`` convert between reduced and full critical
pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateGradientError,
    DualResidualError,
    ShapeError,
    ZeroPartError,
    ZeroTensorError,
)
from .tensor import (
    ReducedTupleVector,
    SparseTensor,
    TupleVector,
    evaluate,
    grad_mode,
    grad_mode_substituted,
)

__all__ = [
    "PVector",
    "SingularPair",
    "ReducedSingularPair",
    "psi",
    "pnorm",
    "normalized",
    "quotient_Q",
    "sigma",
    "s_map",
    "s_map_all",
    "quotient_Qi",
    "lift_phi",
    "drop_mode",
    "residual_check",
    "dual_residuals",
    "spectrum_upper_bound",
]

#: relative tolerance on the reduced-system residual accepted by lift_phi
LIFT_RESIDUAL_RTOL = 1e-6

#: tolerance on unit-norm validation of singular pairs
UNIT_NORM_TOL = 1e-10


@dataclass(frozen=True)
class PVector:
    """Hoelder exponents (p_1, ..., p_m), each in (1, inf).

    The conjugate p'_k = p_k / (p_k - 1) is derived on demand, never
    stored, so 1/p + 1/p' = 1 holds as computed.
    """

    exponents: tuple[float, ...]

    def __init__(self, exponents):
        exponents = tuple(float(q) for q in exponents)
        for q in exponents:
            if not (1.0 < q < np.inf):
                raise ValueError(f"exponent {q} outside (1, inf)")
        object.__setattr__(self, "exponents", exponents)

    @property
    def m(self) -> int:
        return len(self.exponents)

    def p(self, k: int) -> float:
        """Exponent of mode k (1-based)."""
        return self.exponents[k - 1]

    def conjugate(self, k: int) -> float:
        """Conjugate exponent p'_k = p_k / (p_k - 1)."""
        q = self.exponents[k - 1]
        return q / (q - 1.0)

    @classmethod
    def uniform(cls, p: float, m: int) -> "PVector":
        return cls((float(p),) * m)


def psi(q: float, v) -> np.ndarray:
    """Signed power map: component j maps to |v_j|**(q-1) * sign(v_j).

    The duality map between the p and p' unit spheres; 0 maps to 0
    exactly, with no regularization.
    """
    if not q > 1.0:
        raise ValueError(f"psi needs q > 1, got {q}")
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.abs(v) ** (q - 1.0)


def pnorm(v, p: float) -> float:
    """The p-norm (sum |v_j|**p)**(1/p) for finite p > 0."""
    v = np.asarray(v, dtype=np.float64)
    return float(np.sum(np.abs(v) ** p) ** (1.0 / p))


def normalized(v, p: float) -> np.ndarray:
    n = pnorm(v, p)
    if n == 0.0:
        raise ZeroPartError("cannot normalize a zero vector")
    return np.asarray(v, dtype=np.float64) / n


def _unit_parts(parts, exps, where: str) -> None:
    for vec, q in zip(parts, exps):
        if abs(pnorm(vec, q) - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"{where}: part norm {pnorm(vec, q)} not within "
                             f"{UNIT_NORM_TOL} of 1")


@dataclass(frozen=True, eq=False)
class SingularPair:
    """A candidate (lambda, x) with every part on its unit p_k-sphere."""

    lam: float
    vector: TupleVector
    p: PVector

    def __init__(self, lam: float, vector: TupleVector, p: PVector):
        lam = float(lam)
        if not lam > 0.0:
            raise ValueError(f"singular value must be positive, got {lam}")
        if vector.order != p.m:
            raise ShapeError("vector and exponent counts differ")
        _unit_parts(vector.parts, p.exponents, "SingularPair")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "vector", vector)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True, eq=False)
class ReducedSingularPair:
    """A candidate (lambda, x) with mode i removed and unit remaining parts."""

    lam: float
    vector: ReducedTupleVector
    p: PVector

    def __init__(self, lam: float, vector: ReducedTupleVector, p: PVector):
        lam = float(lam)
        if not lam > 0.0:
            raise ValueError(f"singular value must be positive, got {lam}")
        if vector.order != p.m:
            raise ShapeError("vector and exponent counts differ")
        exps = [p.p(k) for k in vector.modes]
        _unit_parts(vector.parts, exps, "ReducedSingularPair")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "vector", vector)
        object.__setattr__(self, "p", p)

    @property
    def omitted_mode(self) -> int:
        return self.vector.omitted_mode


def quotient_Q(f: SparseTensor, p: PVector, x: TupleVector) -> float:
    """|f(x)| divided by the product of the part p_k-norms.

    Invariant under positive rescaling of any part.
    """
    denom = 1.0
    for k in range(1, p.m + 1):
        n = pnorm(x.part(k), p.p(k))
        if n == 0.0:
            raise ZeroPartError(f"part {k} has zero norm")
        denom *= n
    return abs(evaluate(f, x)) / denom


def sigma(f: SparseTensor, p: PVector, i: int, x) -> np.ndarray:
    """sign(f(x)) * psi_{p'_i}(grad_i f(x)).

    For f >= 0 and x >= 0 the sign factor is +1, also where f(x) = 0
    (the quotient is one-sided there and the map must stay monotone on
    the cone).  For a ReducedTupleVector omitting i the sign factor is
    likewise +1; the reduced form is only used in that regime.
    """
    g = psi(p.conjugate(i), grad_mode(f, i, x))
    if isinstance(x, TupleVector):
        if f.is_nonnegative and all(np.all(part >= 0.0) for part in x.parts):
            return g
        return np.sign(evaluate(f, x)) * g
    return g


def s_map(f: SparseTensor, p: PVector, i: int, k: int, x) -> np.ndarray:
    """Two-pass map: psi_{p'_k} of grad_k f with slot i holding
    psi_{p'_i}(grad_i f(x)).

    Strictly positive for weakly irreducible f >= 0 and x > 0.
    """
    y = psi(p.conjugate(i), grad_mode(f, i, x))
    return psi(p.conjugate(k), grad_mode_substituted(f, k, i, x, y))


def s_map_all(f: SparseTensor, p: PVector, i: int, x) -> ReducedTupleVector:
    """All maps s_{i,k}, k != i, sharing the inner gradient pass."""
    y = psi(p.conjugate(i), grad_mode(f, i, x))
    parts = [
        psi(p.conjugate(k), grad_mode_substituted(f, k, i, x, y))
        for k in range(1, f.order + 1)
        if k != i
    ]
    return ReducedTupleVector(i, parts)


def quotient_Qi(f: SparseTensor, p: PVector, i: int, x) -> float:
    """||grad_i f(x)||_{p'_i} divided by the product of the other part norms.

    Its maximum over the reduced unit sphere equals the maximum of Q.
    """
    denom = 1.0
    for k in range(1, p.m + 1):
        if k == i:
            continue
        n = pnorm(x.part(k), p.p(k))
        if n == 0.0:
            raise ZeroPartError(f"part {k} has zero norm")
        denom *= n
    return pnorm(grad_mode(f, i, x), p.conjugate(i)) / denom


def dual_residuals(f: SparseTensor, p: PVector, pair: ReducedSingularPair) -> np.ndarray:
    """Per-mode norms ||s_{i,k}(x) - lam**(p'_i (p'_k - 1)) x_k||_2, k != i."""
    i = pair.omitted_mode
    x, lam = pair.vector, pair.lam
    qi = p.conjugate(i)
    out = []
    for k in x.modes:
        target = lam ** (qi * (p.conjugate(k) - 1.0)) * x.part(k)
        out.append(float(np.linalg.norm(s_map(f, p, i, k, x) - target)))
    return np.asarray(out)


def _phi_insert(f, p, i, x, lam) -> np.ndarray:
    """The reinstated mode-i part psi_{p'_i}(sign * lam**-1 * grad_i f(x))."""
    g = grad_mode(f, i, x)
    if pnorm(g, p.conjugate(i)) == 0.0:
        raise DegenerateGradientError(
            f"grad in mode {i} vanishes; reducible structure at this point"
        )
    candidate = psi(p.conjugate(i), g / lam)
    if f.is_nonnegative and all(np.all(part >= 0) for part in x.parts):
        sign = 1.0
    else:
        sign = float(np.sign(evaluate(f, x.insert(candidate))))
        if sign == 0.0:
            raise DegenerateGradientError("reinstated form vanishes")
    return sign * candidate


def lift_phi(
    f: SparseTensor,
    p: PVector,
    i: int,
    pair: ReducedSingularPair,
    check_residual: bool = True,
) -> SingularPair:
    """Reinstate mode i of a reduced critical pair.

    The inserted part is psi_{p'_i}(sign * lam**-1 * grad_i f(x)),
    renormalized to its exact unit p_i-norm so the result stays on the
    product sphere under inexact input.  With ``check_residual`` the pair
    must satisfy the reduced system within LIFT_RESIDUAL_RTOL (relative
    to the lambda power on each mode); lifting an unconverged pair would
    silently mask solver failure.
    """
    if pair.omitted_mode != i:
        raise ShapeError(f"pair omits mode {pair.omitted_mode}, expected {i}")
    if check_residual:
        res = dual_residuals(f, p, pair)
        qi = p.conjugate(i)
        scales = np.asarray(
            [pair.lam ** (qi * (p.conjugate(k) - 1.0)) for k in pair.vector.modes]
        )
        worst = float(np.max(res / scales))
        if worst > LIFT_RESIDUAL_RTOL:
            raise DualResidualError(
                f"reduced-system residual {worst:.3e} exceeds {LIFT_RESIDUAL_RTOL:.0e}"
            )
    part_i = normalized(_phi_insert(f, p, i, pair.vector, pair.lam), p.p(i))
    return SingularPair(pair.lam, pair.vector.insert(part_i), p)


def drop_mode(pair: SingularPair, i: int) -> ReducedSingularPair:
    """Restriction of a full pair to the modes other than i."""
    return ReducedSingularPair(pair.lam, pair.vector.drop_mode(i), pair.p)


def residual_check(f: SparseTensor, p: PVector, candidate: SingularPair) -> np.ndarray:
    """Per-mode norms ||sigma_i(x) - lam**(p'_i - 1) x_i||_2.

    All entries vanish exactly when (lam, x) solves the singular system.
    """
    x, lam = candidate.vector, candidate.lam
    out = []
    for i in range(1, p.m + 1):
        target = lam ** (p.conjugate(i) - 1.0) * x.part(i)
        out.append(float(np.linalg.norm(sigma(f, p, i, x) - target)))
    return np.asarray(out)


def spectrum_upper_bound(f: SparseTensor, p: PVector) -> float:
    """A-priori bound: every singular value lies in
    (0, min_i max_j d_i**(1/p'_i) * grad_{i,j} |f|(ones)].
    """
    if f.is_zero:
        raise ZeroTensorError("the zero tensor has no singular values")
    best = np.inf
    for i in range(1, f.order + 1):
        grad_abs = np.zeros(f.dims[i - 1])
        np.add.at(grad_abs, f.subs[:, i - 1], np.abs(f.vals))
        bound = f.dims[i - 1] ** (1.0 / p.conjugate(i)) * float(np.max(grad_abs))
        best = min(best, bound)
    return best
