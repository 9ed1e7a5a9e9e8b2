"""Exception types shared across the package."""


class PureJumpError(Exception):
    """Base class for all package errors."""


class InvalidRegion(PureJumpError):
    """A jump-size region contains 0 or is otherwise malformed."""


class EmptyRegion(PureJumpError):
    """A sampling region carries zero mass."""


class QuadratureFailure(PureJumpError):
    """An integral could be certified neither finite nor divergent within budget."""


class UnknownAsymptotics(PureJumpError):
    """A kernel cannot certify the small-jump atom limsup analytically."""


class ShellOverflow(PureJumpError):
    """Expected event count in a retained shell exceeds the per-path budget."""


class InvalidScheme(PureJumpError):
    """A truncation scheme violates its invariants."""


class SchemeMismatch(PureJumpError):
    """A path and a truncation scheme do not belong together."""


class NotSigmaIntegrable(PureJumpError):
    """An integrand fails a sigma-integrability condition; carries the witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotIntegrable(PureJumpError):
    """An integrand is not integrable against a path; carries the divergence witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class TransformDivergence(PureJumpError):
    """The compensated small part of a smooth transform fails its certificate."""


class UncoupledEnsembles(PureJumpError):
    """Two ensembles do not share seeds, so pathwise differences are meaningless."""


class DecompositionUnavailable(PureJumpError):
    """A path lacks the drift metadata needed for a martingale/drift split."""


class DriftMismatch(PureJumpError):
    """A stored drift disagrees with the compensator truncated mean beyond tolerance."""


class HypothesisViolation(PureJumpError):
    """A constructive lemma's hypothesis fails; carries which one and a witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class RootFindFailure(PureJumpError):
    """A monotone root-find did not bracket or converge."""


class BudgetExceeded(PureJumpError):
    """An exact enumeration was requested beyond its size budget."""


class UnknownScenario(PureJumpError):
    """Scenario id not in the registry."""


class SpecFileError(PureJumpError):
    """A compensator specification file failed to parse or validate."""
