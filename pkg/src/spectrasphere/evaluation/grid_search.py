"""
Cross-validated hyperparameter search for S-SVDD.

Folds are stratified over the whole training set (targets and non-targets);
each fold trains on the target rows of the remaining folds and scores GM on
the held-out fold with every non-target row counted as an outlier.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.model_selection import ParameterGrid, StratifiedKFold

from spectrasphere.evaluation.metrics import gm_score
from spectrasphere.exceptions import (
    NoViableHyperparams, SsvddError, TooFewTargetSamples, UndefinedRate
)
from spectrasphere.models.ssvdd import Hyperparams, train

logger = logging.getLogger(__name__)

DEFAULT_BETA = [1e-2, 1e-1, 1e0, 1e1, 1e2]
DEFAULT_C = [0.1, 0.2, 0.3, 0.4, 0.5]
DEFAULT_SIGMA = [1e-1, 1e0, 1e1, 1e2, 1e3]
DEFAULT_D = [1, 2, 3, 4, 5, 10, 20]
DEFAULT_ETA = [1e-1, 1e0, 1e1, 1e2, 1e3]


@dataclass
class HyperparamGrid:
    """Candidate values per hyperparameter. ``sigma`` only spans kernelised variants."""
    beta: List[float] = field(default_factory=lambda: list(DEFAULT_BETA))
    C: List[float] = field(default_factory=lambda: list(DEFAULT_C))
    sigma: List[float] = field(default_factory=lambda: list(DEFAULT_SIGMA))
    d: List[int] = field(default_factory=lambda: list(DEFAULT_D))
    eta: List[float] = field(default_factory=lambda: list(DEFAULT_ETA))

    def axes(self, kernelized):
        axes = {"beta": self.beta, "C": self.C, "d": self.d, "eta": self.eta}
        if kernelized:
            axes["sigma"] = self.sigma
        return axes

    def size(self, kernelized):
        return len(ParameterGrid(self.axes(kernelized)))

    def expand(self, variant, subsample=None, subsample_seed=0, **fixed):
        """
        Enumerate the grid for one variant.

        Args:
            variant: Variant (linear/nonlinear and regulariser)
            subsample: Keep a seeded random subset of this many points
            subsample_seed: Seed of the subset draw
            **fixed: Hyperparams fields shared by every point (max_iter, seed, ...)

        Returns:
            List of Hyperparams in grid order
        """
        points = list(ParameterGrid(self.axes(variant.kernelized)))
        if subsample is not None and subsample < len(points):
            rng = np.random.default_rng(subsample_seed)
            chosen = np.sort(rng.choice(len(points), size=subsample, replace=False))
            points = [points[i] for i in chosen]
        return [
            Hyperparams(psi=variant.psi, kernelized=variant.kernelized, **point, **fixed)
            for point in points
        ]

    def to_dict(self):
        return {"beta": self.beta, "C": self.C, "sigma": self.sigma, "d": self.d, "eta": self.eta}


@dataclass
class PointResult:
    """Cross-validation outcome of one grid point."""
    hp: Hyperparams
    fold_scores: List[float]
    error: Optional[str] = None

    @property
    def failed(self):
        return self.error is not None

    @property
    def mean_gm(self):
        if self.failed:
            return -math.inf
        scores = np.asarray(self.fold_scores, dtype=np.float64)
        if np.all(np.isnan(scores)):
            return -math.inf
        return float(np.nanmean(scores))

    @property
    def std_gm(self):
        scores = np.asarray(self.fold_scores, dtype=np.float64)
        if self.failed or np.all(np.isnan(scores)):
            return math.nan
        return float(np.nanstd(scores))


@dataclass
class GridSearchResult:
    results: List[PointResult]

    @property
    def best_result(self):
        ranked = sorted(self.results, key=lambda r: (-r.mean_gm, r.hp.sort_key()))
        best = ranked[0]
        if best.mean_gm == -math.inf:
            reasons = sorted({r.error for r in self.results if r.error})
            raise NoViableHyperparams(
                f"All {len(self.results)} grid points failed during cross-validation: {reasons}"
            )
        return best

    @property
    def best(self):
        return self.best_result.hp

    @property
    def n_failed(self):
        return sum(1 for r in self.results if r.failed)

    def to_frame(self):
        """One row per grid point with its hyperparameters and CV scores."""
        rows = []
        for r in self.results:
            row = r.hp.to_dict()
            row["mean_gm"] = r.mean_gm
            row["std_gm"] = r.std_gm
            row["folds_scored"] = int(np.sum(~np.isnan(np.asarray(r.fold_scores, dtype=np.float64))))
            row["error"] = r.error or ""
            rows.append(row)
        return pd.DataFrame(rows)


def make_folds(train_ds, target_class, folds, seed):
    """
    Stratified fold indices over the full training set.

    Returns:
        List of (fit indices, held-out indices) pairs

    Raises:
        TooFewTargetSamples: If the target class has fewer than ``folds`` rows
    """
    is_target = train_ds.y == target_class
    n_target = int(np.sum(is_target))
    if n_target < folds:
        raise TooFewTargetSamples(
            f"Class {target_class} has {n_target} training samples; {folds}-fold CV needs at least {folds}"
        )
    splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    return list(splitter.split(train_ds.X, is_target))


def _score_point(hp, X, is_target, folds):
    scores = []
    try:
        for fit_idx, held_idx in folds:
            fit_target = X[fit_idx][is_target[fit_idx]]
            model = train(fit_target.T, hp)
            predicted = model.predict(X[held_idx]).labels
            try:
                scores.append(gm_score(is_target[held_idx], predicted))
            except UndefinedRate:
                scores.append(math.nan)
    except SsvddError as e:
        return PointResult(hp=hp, fold_scores=scores, error=f"{type(e).__name__}: {e}")
    return PointResult(hp=hp, fold_scores=scores)


def run_grid_search(train_ds, target_class, grid, folds=5, seed=0, workers=1):
    """
    Score every grid point by cross-validated GM.

    Args:
        train_ds: Standardised training Dataset
        target_class: Label of the target class
        grid: List of Hyperparams
        folds: Number of CV folds
        seed: Seed of the fold assignment
        workers: Number of parallel workers

    Returns:
        GridSearchResult
    """
    if not grid:
        raise ValueError("Hyperparameter grid is empty")
    train_ds.rows_of(target_class)  # raises MissingClass
    fold_indices = make_folds(train_ds, target_class, folds, seed)
    is_target = train_ds.y == target_class
    logger.info(
        f"Cross-validating {len(grid)} grid points over {folds} folds for class {target_class} "
        f"({int(np.sum(is_target))} target / {int(np.sum(~is_target))} other training samples)"
    )

    results = Parallel(n_jobs=workers)(
        delayed(_score_point)(hp, train_ds.X, is_target, fold_indices) for hp in grid
    )
    search = GridSearchResult(results=list(results))
    for r in search.results:
        if r.failed:
            logger.warning(f"Grid point {r.hp.to_dict()} failed: {r.error}")
    if search.n_failed:
        logger.info(f"{search.n_failed} of {len(grid)} grid points failed")
    return search


def cross_validate(train_ds, target_class, grid, folds=5, seed=0, workers=1):
    """
    Pick the grid point with the highest mean CV GM.

    Ties go to the simpler model: smaller d, then C, beta, eta and sigma.

    Returns:
        Hyperparams

    Raises:
        TooFewTargetSamples: If the target class cannot fill every fold
        NoViableHyperparams: If every grid point failed
    """
    search = run_grid_search(train_ds, target_class, grid, folds=folds, seed=seed, workers=workers)
    best = search.best_result
    logger.info(f"Best hyperparameters for class {target_class}: {best.hp.to_dict()} (CV GM {best.mean_gm:.4f})")
    return best.hp
