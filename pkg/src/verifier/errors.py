class VerifierError(Exception):
    """Base class for every error raised by the verifier package."""


class RangeError(VerifierError):
    """A value left the representable or supported range (logmag overflow, k beyond k_max)."""


class ConfigurationError(VerifierError):
    """Invalid parameters: epsilon, delta, preset, grid, or no admissible k0."""


class NumericalError(VerifierError):
    """A numerical routine did not reach its tolerance."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(f"{message} (achieved residual {residual:.3e})")
        self.residual = residual


class StencilError(VerifierError):
    """Finite-difference step underflow or a stencil reaching across a band seam."""


class UsageError(VerifierError):
    """Bad command-line invocation."""
