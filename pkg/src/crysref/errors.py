"""Exception types shared across the library."""


class CrysrefError(Exception):
    """Base class for all library errors."""


class DivisionByZero(CrysrefError, ZeroDivisionError):
    pass


class IncompatibleFieldOrders(CrysrefError):
    """Two scalars live in cyclotomic fields with no configured common embedding."""


class DimensionMismatch(CrysrefError):
    pass


class ZeroRoot(CrysrefError):
    """A reflection root with <e|e> = 0 was supplied."""


class OrderCapExceeded(CrysrefError):
    """No finite order found below the configured cap."""


class CapExceeded(CrysrefError):
    """Group closure passed the configured element cap."""

    def __init__(self, cap: int):
        super().__init__(f"closure exceeded cap of {cap} elements")
        self.cap = cap


class NoStabilization(CrysrefError):
    """A module closure kept growing past the ambient rank (indicates a bug)."""


class IndexOutOfRange(CrysrefError):
    pass


class DisconnectedOverlapGraph(CrysrefError):
    """Rescaling factors requested for a line system whose overlap graph is disconnected."""


class StructureMismatch(CrysrefError):
    """Lattice operation on operands with different ambient real structures."""


class NotASublattice(CrysrefError):
    pass


class EmptyConstraintSet(CrysrefError):
    pass


class QuotientTooLarge(CrysrefError):
    pass


class DegenerateLattice(CrysrefError):
    """The two generators supplied for a rank-2 lattice in C are R-dependent."""


class NotInvariant(CrysrefError):
    """A lattice that must be invariant under the group is not."""


class SingularS(CrysrefError):
    """Root lines of the generating system do not span the space."""


class PathConditionViolated(CrysrefError):
    """Case 1 entry condition (unit-weight paths from node 1) fails."""


class DeltaNotStable(CrysrefError):
    """The seed lattice is not stable under the trace ring."""


class ChainConditionViolated(CrysrefError):
    """Case 2 entry condition (chain graph) fails."""


class SubsystemReducible(CrysrefError):
    """The first n generators of an s = n+1 system do not generate an irreducible group."""


class SearchBudgetExceeded(CrysrefError):
    pass


class NotRootLattice(CrysrefError):
    pass


class WrongGeneratorCount(CrysrefError):
    pass


class InvalidCartanData(CrysrefError):
    pass


class UnknownGroup(CrysrefError, KeyError):
    pass


class SpecFileError(CrysrefError):
    """A group spec file failed to parse or validate."""
