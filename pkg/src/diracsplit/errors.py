"""Exception types shared across the package."""


class DiracSplitError(Exception):
    """Base class for all package errors."""


class SingularTransform(DiracSplitError):
    """Similarity matrix is numerically singular."""


class UnknownBuiltin(DiracSplitError):
    """Requested potential builtin does not exist."""


class ArityMismatch(DiracSplitError):
    """Builtin called with the wrong number of parameters."""


class ExpressionParseError(DiracSplitError):
    """Inline potential expression could not be parsed."""


class EmptyProbeSet(DiracSplitError):
    """Commutator check called with no probe fields."""


class CoordinateMismatch(DiracSplitError):
    """Operator coordinate does not belong to the grid's subspace."""


class GridMismatch(DiracSplitError):
    """Fields or operators defined on different grids."""


class UnsupportedField(DiracSplitError):
    """Requested operation cannot be represented in the field's closed form."""


class ZeroMass(DiracSplitError):
    """Splitting or ladder relations require m > 0."""


class ZeroNorm(DiracSplitError):
    """Residual of an identically zero field is undefined."""


class NonHermitian(DiracSplitError):
    """Assembled operator failed its Hermiticity guard."""


class ConvergenceFailure(DiracSplitError):
    """Eigensolver did not converge or was asked for too many modes."""


class TachyonicMode(DiracSplitError):
    """Effective mass squared m^2 + lambda^2 is not positive."""


class IncompatibleParameters(DiracSplitError):
    """Separated solutions do not share mass, charge, or potential."""


class ConfigError(DiracSplitError):
    """Config file missing, unreadable, or containing unknown/invalid keys."""


class ToleranceExceeded(DiracSplitError):
    """A requested residual bound was not met (numerical failure)."""
