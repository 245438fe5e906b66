"""Exception hierarchy shared by all normbridge modules."""


class NormBridgeError(Exception):
    """Base class for all library errors."""


class DomainError(NormBridgeError):
    """An argument lies outside the domain of the density."""


class CapacityError(NormBridgeError):
    """The requested computation exceeds the hard size cutoffs."""


class InfeasibleError(NormBridgeError):
    """The model is infeasible: non-monotone weights or a density whose
    integrability condition fails at the requested index p."""


class MembershipError(NormBridgeError):
    """A tensor function carries a nonzero coefficient on a subset with
    zero weight, so it does not belong to the weighted space."""


class UsageError(NormBridgeError):
    """Bad user input (CLI flags, malformed config files)."""
