"""
Scene and dataset containers for spectrasphere.
Turns a hyperspectral cube with its ground truth into labelled spectra and
splits them for training and testing.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np
import pandas as pd

from spectrasphere.exceptions import DataError, EmptyDataset, MissingClass

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HsiCube:
    """
    A hyperspectral scene.

    Attributes:
        reflectance: Array of shape (height, width, bands)
        labels: Integer array of shape (height, width); 0 marks unlabelled background
    """
    reflectance: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if self.reflectance.ndim != 3:
            raise DataError(f"Reflectance must be 3-D (height, width, bands), got shape {self.reflectance.shape}")
        if self.labels.shape != self.reflectance.shape[:2]:
            raise DataError(
                f"Ground truth shape {self.labels.shape} does not match scene shape {self.reflectance.shape[:2]}"
            )
        if np.any(self.labels < 0):
            raise DataError("Ground truth labels must be non-negative")

    @property
    def height(self):
        return self.reflectance.shape[0]

    @property
    def width(self):
        return self.reflectance.shape[1]

    @property
    def bands(self):
        return self.reflectance.shape[2]

    @classmethod
    def from_mat_arrays(cls, cube, ground_truth):
        """
        Build a cube from two MAT arrays.

        Args:
            cube: MatArray with dims (height, width, bands)
            ground_truth: MatArray with dims (height, width)

        Returns:
            HsiCube
        """
        reflectance = np.ascontiguousarray(cube.to_numpy(), dtype=np.float64)
        if reflectance.ndim == 2:
            # single-band scenes come through as 2-D
            reflectance = reflectance[:, :, np.newaxis]
        labels = ground_truth.to_numpy()
        if not np.all(np.equal(np.mod(labels, 1), 0)):
            raise DataError(f"Ground truth '{ground_truth.name}' holds non-integer labels")
        return cls(reflectance=reflectance, labels=np.ascontiguousarray(labels, dtype=np.int64))


@dataclass(frozen=True)
class Dataset:
    """
    Labelled spectra in pixel-wise form.

    Attributes:
        X: Array of shape (N, D); row i is the spectrum of sample i
        y: Integer labels of length N, all >= 1
        class_names: Optional mapping from label to a readable name
    """
    X: np.ndarray
    y: np.ndarray
    class_names: Optional[Dict[int, str]] = field(default=None)

    def __post_init__(self):
        if self.X.ndim != 2:
            raise DataError(f"X must be 2-D, got shape {self.X.shape}")
        if self.X.shape[0] != len(self.y):
            raise DataError(f"X has {self.X.shape[0]} rows but y has {len(self.y)} labels")
        if len(self.y) and np.any(self.y < 1):
            raise DataError("Dataset labels must be >= 1; label 0 is reserved for background")

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_bands(self):
        return self.X.shape[1]

    @property
    def classes(self):
        return [int(c) for c in np.unique(self.y)]

    def class_counts(self):
        """
        Count samples per class.

        Returns:
            pandas Series indexed by label, sorted by label
        """
        return pd.Series(self.y).value_counts().sort_index()

    def class_name(self, label):
        if self.class_names and label in self.class_names:
            return self.class_names[label]
        return str(label)

    def subset(self, indices):
        """Return a new Dataset holding the given rows."""
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(X=self.X[indices], y=self.y[indices], class_names=self.class_names)

    def rows_of(self, label):
        """
        Return the rows of one class.

        Raises:
            MissingClass: If no sample carries the label
        """
        mask = self.y == label
        if not np.any(mask):
            raise MissingClass(f"Class {label} is not present in the dataset (classes: {self.classes})")
        return self.X[mask]

    def with_features(self, X):
        """Return a copy with the feature matrix replaced, labels kept."""
        return Dataset(X=X, y=self.y, class_names=self.class_names)

    def relabel_consecutive(self):
        """
        Map the sorted labels to 1..K, carrying class names along.

        Returns:
            Tuple of (new Dataset, mapping from old label to new label)
        """
        mapping = {old: new for new, old in enumerate(self.classes, start=1)}
        y = np.array([mapping[int(label)] for label in self.y], dtype=np.int64)
        names = None
        if self.class_names:
            names = {mapping[old]: name for old, name in self.class_names.items() if old in mapping}
        logger.info(f"Relabelled classes {list(mapping)} to 1..{len(mapping)}")
        return Dataset(X=self.X, y=y, class_names=names), mapping


def vectorize(cube, class_names=None):
    """
    Flatten a cube into one row per labelled pixel.

    Pixels are taken in row-major order; background (label 0) is dropped.

    Args:
        cube: HsiCube
        class_names: Optional mapping from label to name

    Returns:
        Dataset

    Raises:
        EmptyDataset: If the cube has no labelled pixel
    """
    labels = cube.labels.reshape(-1)
    mask = labels != 0
    if not np.any(mask):
        raise EmptyDataset(f"Scene of {cube.height}x{cube.width} pixels has no labelled pixels")

    X = cube.reflectance.reshape(-1, cube.bands)[mask].astype(np.float64)
    y = labels[mask].astype(np.int64)
    logger.info(f"Vectorised scene into {len(y)} labelled pixels with {cube.bands} bands")
    return Dataset(X=X, y=y, class_names=class_names)


def train_count(n_samples, train_fraction):
    """
    Number of training samples taken from a class of ``n_samples``.

    Round half up, with at least one training sample when the class has two
    or more samples.
    """
    count = int(math.floor(train_fraction * n_samples + 0.5))
    if n_samples >= 2:
        count = max(count, 1)
    return min(count, n_samples)


def stratified_split_indices(y, train_fraction, seed):
    """
    Per-class seeded split of sample indices.

    Args:
        y: Label vector
        train_fraction: Fraction of each class assigned to training, in (0, 1)
        seed: Seed of the shuffling generator

    Returns:
        Tuple of (train indices, test indices), each sorted ascending
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")

    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for label in np.unique(y):
        members = rng.permutation(np.flatnonzero(y == label))
        n_train = train_count(len(members), train_fraction)
        train_idx.append(members[:n_train])
        test_idx.append(members[n_train:])

    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    return train_idx, test_idx


def stratified_split(ds, train_fraction, seed):
    """
    Split a dataset keeping per-class proportions.

    Args:
        ds: Dataset to split
        train_fraction: Fraction of each class assigned to training
        seed: Seed of the shuffling generator

    Returns:
        Tuple of (train Dataset, test Dataset)
    """
    train_idx, test_idx = stratified_split_indices(ds.y, train_fraction, seed)
    logger.info(
        f"Stratified split ({train_fraction:.0%} train): {len(train_idx)} train / {len(test_idx)} test samples"
    )
    return ds.subset(train_idx), ds.subset(test_idx)
