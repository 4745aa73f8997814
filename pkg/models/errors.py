"""
Domain errors.

Every error is a ValueError so callers that only know the plain
"invalid input -> ValueError" contract keep working. The CLI maps
NumericalPreconditionError to exit code 3.
"""


class NumericalPreconditionError(ValueError):
    """A numerical precondition of an operation does not hold for the given data."""


class NonZeroMean(NumericalPreconditionError):
    """A periodic antiderivative was requested for an integrand with a non-zero mean."""

    def __init__(self, mean_modulus: float, scale: float):
        self.mean_modulus = mean_modulus
        self.scale = scale
        super().__init__(
            f"integrand has non-zero mean: |f̂_0| = {mean_modulus:.3e} "
            f"(largest mode {scale:.3e}); a periodic antiderivative does not exist"
        )


class ZeroWaveFunction(NumericalPreconditionError):
    """The wave function is identically zero and cannot be normalized."""


class PacketTooWide(NumericalPreconditionError):
    """A wave packet (plus its spreading over the run) does not fit in the periodic box."""


class NotNormalized(NumericalPreconditionError):
    """A density does not integrate to one."""


class GridMismatch(NumericalPreconditionError):
    """Fields combined in one operation live on different grids."""


class BlowUp(NumericalPreconditionError):
    """An explicit time integration became unstable (norm grew past the allowed factor)."""

    def __init__(self, step: int, t: float, growth: float):
        self.step = step
        self.t = t
        self.growth = growth
        super().__init__(
            f"solution norm grew by {growth:.3e}x at step {step} (t = {t:.6g})"
        )
