"""
Exception types for spectrasphere.
"""


class SpectraSphereError(Exception):
    """Base class for all spectrasphere errors."""


# MAT container parsing

class MatParseError(SpectraSphereError):
    """Raised when a MAT-file cannot be parsed."""


class TruncatedFile(MatParseError):
    """The buffer ends inside a declared element."""


class BadMagic(MatParseError):
    """The 128-byte MAT-v5 header check failed."""


class UnsupportedElementKind(MatParseError):
    """A numeric matrix uses an element kind outside the supported set."""


# Datasets

class DataError(SpectraSphereError, ValueError):
    """Raised for invalid or inconsistent datasets."""


class EmptyDataset(DataError):
    pass


class MissingClass(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class TooFewTargetSamples(DataError):
    pass


# Numeric failures while fitting or scoring models

class SsvddError(SpectraSphereError):
    """Raised when a model cannot be fitted or scored."""


class InfeasiblePenalty(SsvddError):
    """C < 1/N: the constraints sum(alpha) = 1 and alpha <= C cannot both hold."""

    def __init__(self, C, n_samples):
        self.C = C
        self.n_samples = n_samples
        self.min_C = 1.0 / n_samples
        super().__init__(
            f"Penalty C={C} is infeasible for {n_samples} samples; "
            f"the minimum feasible C is 1/N = {self.min_C:.6g}"
        )


class DegenerateKernel(SsvddError):
    pass


class RankDeficient(SsvddError):
    pass


class NonFiniteProjection(SsvddError):
    pass


class NoPositiveSpectrum(SsvddError):
    pass


class InvalidHyperparams(SsvddError, ValueError):
    pass


class NoViableHyperparams(SsvddError):
    """Every grid point failed during cross-validation."""


class UndefinedRate(SsvddError, ValueError):
    """TPR or TNR has an empty denominator."""


class ConfigError(SpectraSphereError, ValueError):
    """Raised for invalid run configuration files."""


class DidNotConverge(RuntimeWarning):
    """The dual solver hit its iteration cap. Issued as a warning, never raised."""
