"""Exception types shared across the package."""


class TensorNormError(Exception):
    """Base class for all errors raised by this package."""


class TensorFormatError(TensorNormError):
    """Malformed tensor file or vector JSON."""


class ShapeError(TensorNormError, ValueError):
    """Vector parts do not match the tensor dimensions."""


class ZeroPartError(TensorNormError, ValueError):
    """A quotient was requested at a point with a zero-norm part."""


class ZeroTensorError(TensorNormError):
    """The all-zero tensor has no singular pairs and is rejected by solvers."""


class NegativeEntryError(TensorNormError):
    """Operation requires a nonnegative tensor."""


class NotWeaklyIrreducibleError(TensorNormError):
    """The support graph of the tensor is disconnected."""


class ConditionViolatedError(TensorNormError):
    """No admissible mode satisfies the exponent condition."""


class NumericalBreakdownError(TensorNormError):
    """Floating-point underflow or drift invalidated the iteration."""


class NotPartiallySymmetricError(TensorNormError):
    """Tensor entries are not invariant under the block permutations."""


class DegenerateGradientError(TensorNormError):
    """A mode gradient vanished; the structure is reducible at this point."""


class DualResidualError(TensorNormError):
    """Candidate pair violates the reduced singular system beyond tolerance."""
