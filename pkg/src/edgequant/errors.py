"""Exception hierarchy shared by the edgequant modules."""


class EdgeQuantError(Exception):
    """Base class for all package errors."""


class GraphError(EdgeQuantError, ValueError):
    """Invalid digraph or malformed edge-list file."""


class NotQuasiStronglyConnected(GraphError):
    """The digraph has no directed spanning tree."""


class EigenFailure(EdgeQuantError, ArithmeticError):
    pass


class SingularTransform(EdgeQuantError, ArithmeticError):
    pass


class NotPositiveStable(EdgeQuantError, ArithmeticError):
    """A matrix expected to have spectrum in the open right half-plane does not."""


class InfeasibleCertificate(EdgeQuantError):
    """Base class for the certificate feasibility failures."""


class InfeasibleGain(InfeasibleCertificate):
    pass


class InfeasibleMargin(InfeasibleCertificate):
    pass


class InfeasibleDelta(InfeasibleCertificate):
    pass


class RadiusTooLarge(EdgeQuantError, ValueError):
    pass


class DimensionMismatch(EdgeQuantError, ValueError):
    pass


class NonFiniteState(EdgeQuantError, FloatingPointError):
    """Integration produced a non-finite state; ``time`` holds the instant."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class InsufficientSamples(EdgeQuantError, ValueError):
    pass


class ConfigError(EdgeQuantError, ValueError):
    pass
