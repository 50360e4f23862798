"""Exception types raised across the toolkit."""


class RoiLabError(Exception):
    """Base class for all toolkit errors."""


class NotHermitian(RoiLabError):
    """Matrix is not Hermitian within tolerance."""


class NotPSD(RoiLabError):
    """Matrix has an eigenvalue below the PSD slack tolerance."""


class NotEffect(RoiLabError):
    """Operator is not an effect (eigenvalues outside [0, 1])."""


class NotState(RoiLabError):
    """Operator is not a density matrix (PSD, unit trace)."""


class DimensionMismatch(RoiLabError):
    """Operands have incompatible dimensions."""


class OutOfRange(RoiLabError):
    """Scalar parameter outside its allowed interval."""


class UnknownOutcome(RoiLabError):
    """Outcome label not present in the instrument/POVM."""


class NoConvergence(RoiLabError):
    """Feasibility iteration hit its cap without an analytic fallback."""


class MissingSetting(RoiLabError):
    """Probability table lacks a required setting combination."""


class InvalidModel(RoiLabError):
    """Hidden-variable model violates a construction precondition."""


class UndefinedCorrelation(RoiLabError):
    """Correlation requested where a marginal variance vanishes."""


class EmptyGrid(RoiLabError):
    """Scan grid has too few points."""


class InvalidBranch(RoiLabError):
    """Interferometer branch angle is not one of the two supported values."""


class ConfigError(RoiLabError):
    """Scenario configuration is invalid."""


class IoError(RoiLabError):
    """Output file could not be written."""


class UnknownDataset(RoiLabError):
    """Requested reference dataset id is not shipped."""
