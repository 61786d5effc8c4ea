"""
Per-class one-class experiments.

Each cell of an experiment treats one class as the target, splits the scene
30/70 per class, standardises on the training target rows, picks
hyperparameters by cross-validation, retrains on every training target row
and scores the held-out set with all other classes counted as outliers.
"""
import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import List, Optional

import pandas as pd
from joblib import Parallel, delayed

from spectrasphere.data.scene import stratified_split
from spectrasphere.data.standardizer import apply_standardizer, fit_standardizer
from spectrasphere.evaluation.grid_search import HyperparamGrid, cross_validate
from spectrasphere.evaluation.metrics import confusion_counts
from spectrasphere.exceptions import SpectraSphereError
from spectrasphere.models.npt import DEFAULT_CUTOFF_RATIO
from spectrasphere.models.ssvdd import ALL_VARIANTS, Hyperparams, Variant, train

logger = logging.getLogger(__name__)


@dataclass
class ExperimentSettings:
    """Protocol settings shared by every cell of an experiment."""
    train_fraction: float = 0.3
    folds: int = 5
    seed: int = 0
    workers: int = 1
    grid_subsample: Optional[int] = None
    max_iter: int = 10
    orthonormalize_each_step: bool = True
    npt_cutoff: float = DEFAULT_CUTOFF_RATIO

    def fixed_hyperparams(self):
        return {
            "max_iter": self.max_iter,
            "seed": self.seed,
            "orthonormalize_each_step": self.orthonormalize_each_step,
            "npt_cutoff": self.npt_cutoff,
        }


@dataclass(frozen=True)
class EvalReport:
    """Test-set outcome of one (target class, variant) experiment."""
    target_class: int
    variant: Variant
    tp: int
    fn: int
    tn: int
    fp: int
    tpr: float
    tnr: float
    gm: float
    chosen_hp: Hyperparams
    wallclock: float

    def to_dict(self):
        return {
            "target_class": self.target_class,
            "variant": self.variant.label,
            "tp": self.tp,
            "fn": self.fn,
            "tn": self.tn,
            "fp": self.fp,
            "tpr": self.tpr,
            "tnr": self.tnr,
            "gm": self.gm,
            "chosen_hp": self.chosen_hp.to_dict(),
            "wallclock": self.wallclock,
        }


def run_class_experiment(ds, target_class, variant, grid, split_seed, settings=None):
    """
    Run the full protocol for one target class and one variant.

    Args:
        ds: Dataset of raw spectra
        target_class: Label treated as the target
        variant: Variant to evaluate
        grid: HyperparamGrid
        split_seed: Seed of the train/test split, the folds and the projection init
        settings: ExperimentSettings (defaults if omitted)

    Returns:
        EvalReport

    Raises:
        MissingClass: If the target class is absent from ``ds``
    """
    settings = settings or ExperimentSettings()
    started = time.perf_counter()
    ds.rows_of(target_class)  # raises MissingClass

    train_ds, test_ds = stratified_split(ds, settings.train_fraction, split_seed)
    stats = fit_standardizer(train_ds, target_class)
    train_std = train_ds.with_features(apply_standardizer(stats, train_ds.X))

    fixed = dict(settings.fixed_hyperparams(), seed=split_seed)
    points = grid.expand(variant, subsample=settings.grid_subsample, subsample_seed=split_seed, **fixed)
    best = cross_validate(train_std, target_class, points, folds=settings.folds, seed=split_seed,
                          workers=settings.workers)

    model = train(train_std.rows_of(target_class).T, best, stats=stats, target_class=target_class)
    prediction = model.predict(test_ds.X)
    counts = confusion_counts(test_ds.y == target_class, prediction.labels)

    report = EvalReport(
        target_class=target_class,
        variant=variant,
        tp=counts.tp,
        fn=counts.fn,
        tn=counts.tn,
        fp=counts.fp,
        tpr=counts.tpr,
        tnr=counts.tnr,
        gm=counts.gm,
        chosen_hp=best,
        wallclock=time.perf_counter() - started,
    )
    logger.info(f"Class {target_class} / {variant.label}: GM {report.gm:.3f} "
                f"(TPR {report.tpr:.3f}, TNR {report.tnr:.3f}, {report.wallclock:.1f}s)")
    return report


@dataclass
class CellResult:
    target_class: int
    variant: Variant
    report: Optional[EvalReport] = None
    error: Optional[str] = None

    @property
    def gm(self):
        return self.report.gm if self.report is not None else math.nan

    def to_dict(self):
        payload = {"target_class": self.target_class, "variant": self.variant.label, "error": self.error}
        if self.report is not None:
            payload.update(self.report.to_dict())
        return payload


@dataclass
class ExperimentResult:
    """Every cell of a (variant x class) experiment."""
    classes: List[int]
    variants: List[Variant]
    cells: List[CellResult] = field(default_factory=list)
    class_names: Optional[dict] = None

    @property
    def n_succeeded(self):
        return sum(1 for cell in self.cells if cell.report is not None)

    def cell(self, target_class, variant):
        for c in self.cells:
            if c.target_class == target_class and c.variant == variant:
                return c
        raise KeyError((target_class, variant))

    def gm_table(self):
        """
        GM per variant (rows, labelled ``linear-psi0`` ...) and class (columns).

        Failed cells are NaN.
        """
        table = pd.DataFrame(
            [[self.cell(c, v).gm for c in self.classes] for v in self.variants],
            index=[v.label for v in self.variants],
            columns=list(self.classes),
            dtype=float,
        )
        table.index.name = "variant"
        return table

    def to_records(self):
        return [cell.to_dict() for cell in self.cells]


def _run_cell(ds, target_class, variant, grid, settings):
    try:
        report = run_class_experiment(ds, target_class, variant, grid, settings.seed, settings)
        return CellResult(target_class=target_class, variant=variant, report=report)
    except SpectraSphereError as e:
        logger.error(f"Class {target_class} / {variant.label} failed: {type(e).__name__}: {e}")
        return CellResult(target_class=target_class, variant=variant, error=f"{type(e).__name__}: {e}")
    except Exception as e:
        # Unexpected errors fail only their own cell
        logger.exception(f"Class {target_class} / {variant.label} failed unexpectedly")
        return CellResult(target_class=target_class, variant=variant, error=f"{type(e).__name__}: {e}")


def run_full_experiment(ds, variants=None, grid=None, seed=0, settings=None, classes=None):
    """
    Run every (class, variant) cell.

    Cells run in parallel over ``settings.workers``; a failing cell is
    recorded with its error and never stops the sweep.

    Args:
        ds: Dataset of raw spectra
        variants: Variants to evaluate (all eight when omitted)
        grid: HyperparamGrid (published defaults when omitted)
        seed: Seed shared by every cell
        settings: ExperimentSettings
        classes: Target classes to evaluate (every class in ``ds`` when omitted)

    Returns:
        ExperimentResult
    """
    variants = list(variants) if variants else list(ALL_VARIANTS)
    grid = grid or HyperparamGrid()
    settings = settings or ExperimentSettings()
    settings = replace(settings, seed=seed)
    classes = list(classes) if classes else ds.classes

    cells = [(c, v) for v in variants for c in classes]
    logger.info(f"Running {len(cells)} cells ({len(variants)} variants x {len(classes)} classes)")

    # cells run in the pool; each cell's grid search stays sequential
    cell_settings = replace(settings, workers=1)
    results = Parallel(n_jobs=settings.workers)(
        delayed(_run_cell)(ds, c, v, grid, cell_settings) for c, v in cells
    )

    experiment = ExperimentResult(classes=classes, variants=variants, cells=list(results),
                                  class_names=ds.class_names)
    logger.info(f"Experiment finished: {experiment.n_succeeded}/{len(cells)} cells succeeded")
    return experiment
