"""Exception types shared across the package."""


class PrimeMismatchError(ValueError):
    """Operands live over different primes."""


class NotAdmissibleError(ValueError):
    """The admissibility integral diverges (nonzero mean)."""

    def __init__(self, msg: str = "not admissible: nonzero mean"):
        super().__init__(msg)


class DegenerateWaveletError(ValueError):
    """A candidate wavelet is identically zero."""


class GridError(ValueError):
    """A scale/translation grid is too coarse for exact evaluation."""


class IncompleteGridError(GridError):
    """A grid misses scales on which the transform is nonzero."""


class UnboundedScaleError(ValueError):
    """Scale range cannot be bounded (nonzero-mean signal, no explicit bounds)."""


class FingerprintMismatchError(ValueError):
    """A scalogram was produced with a different wavelet."""


class MalformedInputError(ValueError):
    """Serialized input could not be parsed into the expected structure."""
