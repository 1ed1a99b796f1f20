"""Exception types shared across the package."""


class AclabError(Exception):
    """Base class for all package-specific errors."""


class OutOfDomain(AclabError):
    """Coordinate argument outside [0, L]."""


class NoBracket(AclabError):
    """Root bracketing failed; usually signals a quadrature bug."""


class UnsupportedWell(AclabError):
    """Closed-form expression only known for the quartic well."""


class AsymmetricGrid(AclabError):
    """Operation needs a center node; requires an odd node count."""


class AllZero(AclabError):
    """Profile has no nodes above the sign tolerance."""


class TrivialMinimizer(AclabError):
    """Constrained minimizer collapsed to zero (epsilon too large)."""


class NoConvergence(AclabError):
    """Newton iteration exhausted its budget."""


class SingularJacobian(AclabError):
    """Tridiagonal linearization broke down."""


class StepTooLarge(AclabError):
    """Time step violates the explicit-reaction stability bound."""


class StableInput(AclabError):
    """Eigenfunction perturbation needs an unstable base solution."""


class MonotonicityViolated(AclabError):
    """Flow from a subsolution failed to increase pointwise."""


class InterfaceLost(AclabError):
    """Layer annihilated during a flow (profile became single-signed)."""


class PreconditionViolated(AclabError):
    """Comparison-check input fails its sign hypotheses."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NotMinimal(AclabError):
    """Slice outside the plateau is not a minimal hypersurface."""


class NotComputed(AclabError):
    """Requested eigenfunction was not part of the computed spectrum."""


class InsufficientData(AclabError):
    """Width report needs at least three energy samples."""


class ResolutionTooCoarse(AclabError):
    """Critical-point scan cannot separate adjacent roots."""


class ModeTruncationWarning(UserWarning):
    """Highest harmonic mode still carries negative or near-zero spectrum."""


class ConfigError(AclabError):
    """Invalid run configuration."""


class ParseError(ConfigError):
    """Config file line could not be parsed."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class ValidationError(ConfigError):
    """Config field failed validation."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ExperimentFailed(AclabError):
    """An embedded experiment check did not meet its requirement."""
