"""
Target-class standardisation.
Band statistics are fitted on the training rows of the target class only.
"""
import logging
from dataclasses import dataclass

import numpy as np

from spectrasphere.exceptions import DimensionMismatch

logger = logging.getLogger(__name__)

STD_FLOOR = 1e-12


@dataclass(frozen=True)
class StandardizationStats:
    """Per-band mean and population standard deviation (floored)."""
    mean: np.ndarray
    std: np.ndarray

    @property
    def n_bands(self):
        return self.mean.shape[0]

    @classmethod
    def identity(cls, n_bands):
        """Stats that leave data unchanged."""
        return cls(mean=np.zeros(n_bands), std=np.ones(n_bands))

    def to_dict(self):
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, payload):
        return cls(mean=np.asarray(payload["mean"], dtype=np.float64),
                   std=np.asarray(payload["std"], dtype=np.float64))


def fit_standardizer(train, target_class):
    """
    Fit band statistics on the target-class rows of a training set.

    Args:
        train: Training Dataset
        target_class: Label of the target class

    Returns:
        StandardizationStats

    Raises:
        MissingClass: If the target class has no training rows
    """
    rows = train.rows_of(target_class)
    mean = rows.mean(axis=0)
    std = np.maximum(rows.std(axis=0), STD_FLOOR)

    floored = int(np.sum(std <= STD_FLOOR))
    if floored:
        logger.warning(f"{floored} constant bands in class {target_class}; their std is floored at {STD_FLOOR}")
    logger.debug(f"Fitted standardiser on {rows.shape[0]} rows of class {target_class}")
    return StandardizationStats(mean=mean, std=std)


def apply_standardizer(stats, X):
    """
    Standardise rows of ``X`` with fitted statistics.

    Args:
        stats: StandardizationStats
        X: Array of shape (M, D)

    Returns:
        Standardised array of the same shape

    Raises:
        DimensionMismatch: If D differs from the fitted band count
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != stats.n_bands:
        raise DimensionMismatch(
            f"Expected rows with {stats.n_bands} bands, got array of shape {X.shape}"
        )
    return (X - stats.mean) / stats.std
