"""
One-class scoring: confusion counts, true positive/negative rates and their
geometric mean.
"""
import math
from dataclasses import dataclass

import numpy as np
from sklearn.metrics import confusion_matrix

from spectrasphere.exceptions import UndefinedRate
from spectrasphere.models.svdd import OUTLIER, TARGET


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fn: int
    tn: int
    fp: int

    @property
    def n_target(self):
        return self.tp + self.fn

    @property
    def n_outlier(self):
        return self.tn + self.fp

    @property
    def tpr(self):
        if self.n_target == 0:
            raise UndefinedRate("True positive rate is undefined without target samples")
        return self.tp / self.n_target

    @property
    def tnr(self):
        if self.n_outlier == 0:
            raise UndefinedRate("True negative rate is undefined without outlier samples")
        return self.tn / self.n_outlier

    @property
    def gm(self):
        return geometric_mean(self.tp, self.fn, self.tn, self.fp)

    def to_dict(self):
        return {"tp": self.tp, "fn": self.fn, "tn": self.tn, "fp": self.fp}


def geometric_mean(tp, fn, tn, fp):
    """
    Geometric mean of the true positive and true negative rates.

    Raises:
        UndefinedRate: If tp + fn == 0 or tn + fp == 0
        ValueError: If a count is negative
    """
    if min(tp, fn, tn, fp) < 0:
        raise ValueError(f"Counts must be non-negative, got tp={tp} fn={fn} tn={tn} fp={fp}")
    if tp + fn == 0:
        raise UndefinedRate("True positive rate is undefined without target samples")
    if tn + fp == 0:
        raise UndefinedRate("True negative rate is undefined without outlier samples")
    return math.sqrt((tp / (tp + fn)) * (tn / (tn + fp)))


def confusion_counts(is_target, predicted):
    """
    Count one-class outcomes.

    Args:
        is_target: Boolean array, True where the sample belongs to the target class
        predicted: Array of predicted labels, TARGET (1) or OUTLIER (-1)

    Returns:
        ConfusionCounts
    """
    truth = np.where(np.asarray(is_target, dtype=bool), TARGET, OUTLIER)
    matrix = confusion_matrix(truth, np.asarray(predicted), labels=[OUTLIER, TARGET])
    (tn, fp), (fn, tp) = matrix
    return ConfusionCounts(tp=int(tp), fn=int(fn), tn=int(tn), fp=int(fp))


def gm_score(is_target, predicted):
    """GM of predictions against a target mask."""
    return confusion_counts(is_target, predicted).gm
