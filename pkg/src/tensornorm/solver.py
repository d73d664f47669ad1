"""Fixed-point solver with certified bracketing of the maximal singular value.

One sweep maps a strictly positive reduced vector x to the normalized
two-pass contractions z_k = s_{i,k}(x); the componentwise ratios z/x
yield a lower and an upper bound whose brackets tighten monotonically
and enclose the maximal singular value at every iteration.  The sweep
map is non-expansive in a product Hilbert-type metric, which gives
global convergence from any positive start, with an asymptotically
linear rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConditionViolatedError,
    NegativeEntryError,
    NotWeaklyIrreducibleError,
    NumericalBreakdownError,
    ZeroPartError,
    ZeroTensorError,
)
from .maps import (
    PVector,
    SingularPair,
    normalized,
    pnorm,
    psi,
    quotient_Q,
    s_map_all,
)
from .structure import admissible_indices, chosen_index, is_weakly_irreducible
from .tensor import ReducedTupleVector, SparseTensor, TupleVector, grad_mode

__all__ = [
    "SolverConfig",
    "IterationRecord",
    "SolveResult",
    "uniform_start",
    "g_step",
    "cw_bounds",
    "hilbert_metric",
    "solve_hgpm",
    "estimate_rate",
]


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for :func:`solve_hgpm`.

    ``start`` is a strictly positive ReducedTupleVector or "uniform";
    ``underflow_floor`` is the relative component size below which an
    s-map part is treated as floating-point underflow rather than math
    (clamping instead would silently void the bracket guarantee).
    """

    epsilon: float = 1e-10
    max_iter: int = 10000
    index_override: int | None = None
    start: ReducedTupleVector | str = "uniform"
    underflow_floor: float = 1e-250
    keep_iterates: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.underflow_floor > 0:
            raise ValueError("underflow_floor must be positive")


@dataclass(frozen=True)
class IterationRecord:
    """Bracket (and optionally the iterate) after sweep k (1-based)."""

    k: int
    lambda_minus: float
    lambda_plus: float
    x: ReducedTupleVector | TupleVector | None = None


@dataclass(frozen=True)
class SolveResult:
    """Outcome of a solve.

    ``lam`` is the midpoint of the final bracket (for bracketing
    methods) and ``q_value`` the quotient Q of the assembled vector,
    kept for cross-checking.  ``status`` is one of "converged",
    "max_iter", "numerical_breakdown".
    """

    lam: float
    bracket: tuple[float, float] | None
    vector: SingularPair | None
    trace: tuple[IterationRecord, ...]
    status: str
    method: str = "hgpm"
    index: int | None = None
    q_value: float | None = None

    @property
    def iterations(self) -> int:
        return len(self.trace)


def uniform_start(dims, p: PVector, i: int) -> ReducedTupleVector:
    """Constant positive parts, each normalized to its unit p_k-norm."""
    parts = [
        np.full(d, d ** (-1.0 / p.p(k)))
        for k, d in enumerate(dims, start=1)
        if k != i
    ]
    return ReducedTupleVector(i, parts)


def _check_positive(x: ReducedTupleVector, what: str, omitting: int | None = None) -> None:
    if omitting is not None and x.omitted_mode != omitting:
        raise ValueError(
            f"{what}: vector omits mode {x.omitted_mode}, expected {omitting}"
        )
    for part in x.parts:
        if not np.all(part > 0.0):
            raise ZeroPartError(f"{what} requires strictly positive parts")


def _underflowed(parts, floor: float) -> bool:
    for part in parts:
        top = float(np.max(part))
        if top <= 0.0 or np.any(part < floor * top):
            return True
    return False


def g_step(
    f: SparseTensor,
    p: PVector,
    i: int,
    x: ReducedTupleVector,
    underflow_floor: float = SolverConfig.underflow_floor,
) -> ReducedTupleVector:
    """One normalized sweep: part k of the result is
    s_{i,k}(x) / ||s_{i,k}(x)||_{p_k}.

    Strictly positive input stays strictly positive for weakly
    irreducible f; a component collapsing below ``underflow_floor``
    relative to its part maximum signals underflow and raises.
    """
    _check_positive(x, "g_step", omitting=i)
    z = s_map_all(f, p, i, x)
    if _underflowed(z.parts, underflow_floor):
        raise NumericalBreakdownError(
            "s-map component underflowed relative to its part maximum"
        )
    parts = [normalized(z.part(k), p.p(k)) for k in z.modes]
    return ReducedTupleVector(i, parts)


def _bracket(z: ReducedTupleVector, x: ReducedTupleVector, p: PVector, i: int):
    """Bracket from componentwise ratios:
    prod_l (min_j or max_j of z_{l,j}/x_{l,j}) ** ((p_l-1)/(p'_i (m-1)))."""
    m = p.m
    denom = p.conjugate(i) * (m - 1.0)
    lo, hi = 1.0, 1.0
    for k in x.modes:
        ratio = z.part(k) / x.part(k)
        e = (p.p(k) - 1.0) / denom
        lo *= float(np.min(ratio)) ** e
        hi *= float(np.max(ratio)) ** e
    return lo, hi


def cw_bounds(f: SparseTensor, p: PVector, i: int, x: ReducedTupleVector):
    """Certified bracket (lambda_minus, lambda_plus) around the maximal
    singular value, evaluated at any strictly positive x.

    Parts are projected to their unit p_k-spheres first; the ratio
    bounds are only valid on the product sphere.
    """
    _check_positive(x, "cw_bounds", omitting=i)
    unit = ReducedTupleVector(i, [normalized(x.part(k), p.p(k)) for k in x.modes])
    z = s_map_all(f, p, i, unit)
    return _bracket(z, unit, p, i)


def hilbert_metric(p: PVector, i: int, x: ReducedTupleVector, y: ReducedTupleVector) -> float:
    """Product Hilbert-type metric:
    sum_l (p_l - 1) * (log max_j x_{l,j}/y_{l,j} - log min_j x_{l,j}/y_{l,j}).

    Zero exactly on equal points of the product sphere; the sweep map of
    :func:`g_step` is non-expansive in this metric.
    """
    _check_positive(x, "hilbert_metric", omitting=i)
    _check_positive(y, "hilbert_metric", omitting=i)
    total = 0.0
    for k in x.modes:
        log_ratio = np.log(x.part(k)) - np.log(y.part(k))
        total += (p.p(k) - 1.0) * float(np.max(log_ratio) - np.min(log_ratio))
    return total


def _pick_index(f: SparseTensor, p: PVector, override: int | None) -> int:
    adm = admissible_indices(p)
    if override is not None:
        if override not in adm:
            raise ConditionViolatedError(
                f"mode {override} does not satisfy the exponent condition"
            )
        return override
    if not adm:
        raise ConditionViolatedError(
            f"no mode satisfies (m-1) p'_i <= p_k for p = {p.exponents}"
        )
    return chosen_index(p, adm)


def _validate_instance(f: SparseTensor, p: PVector) -> None:
    if not f.is_nonnegative:
        raise NegativeEntryError("solver requires a nonnegative tensor")
    if f.is_zero:
        raise ZeroTensorError("solver requires f != 0")
    if f.order != p.m:
        raise ValueError(f"tensor order {f.order} != exponent count {p.m}")


def _require_weakly_irreducible(f: SparseTensor) -> None:
    if not is_weakly_irreducible(f):
        raise NotWeaklyIrreducibleError("support graph is disconnected")


def solve_hgpm(f: SparseTensor, p: PVector, config: SolverConfig | None = None) -> SolveResult:
    """Higher-order generalized power method.

    Repeats the normalized sweep from a strictly positive start and
    stops once the bracket width drops below ``config.epsilon`` (or at
    ``max_iter``).  The reported ``lam`` is the final bracket midpoint;
    the full vector is assembled by reinstating the eliminated mode with
    the normalized dual gradient.  The lower/upper bracket sequences are
    monotone up to roundoff, and every bracket encloses the maximal
    singular value.
    """
    config = config or SolverConfig()
    _validate_instance(f, p)
    # the exponent condition outranks connectivity: inadmissible exponents
    # are rejected regardless of the tensor's structure
    i = _pick_index(f, p, config.index_override)
    _require_weakly_irreducible(f)

    if isinstance(config.start, str):
        if config.start != "uniform":
            raise ValueError(f"unknown start {config.start!r}")
        x = uniform_start(f.dims, p, i)
    else:
        start = config.start
        if start.omitted_mode != i:
            raise ValueError(f"start omits mode {start.omitted_mode}, solver uses {i}")
        _check_positive(start, "start")
        x = ReducedTupleVector(i, [normalized(start.part(k), p.p(k)) for k in start.modes])

    trace: list[IterationRecord] = []
    status = "max_iter"
    lo = hi = math.nan
    for k in range(1, config.max_iter + 1):
        z = s_map_all(f, p, i, x)
        if _underflowed(z.parts, config.underflow_floor):
            status = "numerical_breakdown"
            break
        lo, hi = _bracket(z, x, p, i)
        x = ReducedTupleVector(i, [normalized(z.part(l), p.p(l)) for l in z.modes])
        trace.append(
            IterationRecord(k, lo, hi, x if config.keep_iterates else None)
        )
        if hi - lo < config.epsilon:
            status = "converged"
            break

    if status == "numerical_breakdown" or not trace:
        lam = 0.5 * (lo + hi) if trace else math.nan
        return SolveResult(
            lam=lam,
            bracket=(lo, hi) if trace else None,
            vector=None,
            trace=tuple(trace),
            status="numerical_breakdown",
            index=i,
        )

    lam = 0.5 * (lo + hi)
    sigma_part = psi(p.conjugate(i), grad_mode(f, i, x))
    if pnorm(sigma_part, p.p(i)) == 0.0:
        return SolveResult(
            lam=lam,
            bracket=(lo, hi),
            vector=None,
            trace=tuple(trace),
            status="numerical_breakdown",
            index=i,
        )
    full = x.insert(normalized(sigma_part, p.p(i)))
    return SolveResult(
        lam=lam,
        bracket=(lo, hi),
        vector=SingularPair(lam, full, p),
        trace=tuple(trace),
        status=status,
        index=i,
        q_value=quotient_Q(f, p, full),
    )


def _distance(a, b) -> float:
    return float(np.linalg.norm(a.concat() - b.concat()))


def estimate_rate(trace, reference) -> float:
    """Observed linear contraction factor of the iterate errors.

    Errors e_k = ||x_k - reference||_2 count as signal only while they
    stay above 100x machine epsilon (below that the sequence is roundoff
    noise).  The estimate is the geometric mean of consecutive error
    ratios over the last quartile of the signal window; a run whose very
    first retained error is already in the noise floor converged in one
    step and reports 0.
    """
    iterates = [rec.x for rec in trace if rec.x is not None]
    if len(iterates) < 2:
        raise ValueError("trace too short: need at least two retained iterates")
    errors = [_distance(x, reference) for x in iterates]
    cutoff = 100.0 * np.finfo(float).eps
    if errors[0] < cutoff:
        return 0.0
    window = len(errors)
    for k, e in enumerate(errors):
        if e < cutoff:
            window = k
            break
    signal = errors[:window]
    ratios = [b / a for a, b in zip(signal, signal[1:])]
    if not ratios:
        if window < len(errors):
            return errors[window] / errors[window - 1]
        raise ValueError("trace too short: no usable error ratios")
    quartile = ratios[-max(1, math.ceil(len(ratios) / 4)):]
    if any(r == 0.0 for r in quartile):
        return 0.0
    return float(np.exp(np.mean(np.log(quartile))))
