"""
Tests for scenes, datasets and the stratified split.
"""
import os
import tempfile
import unittest

import numpy as np
from scipy.io import savemat

from spectrasphere.connectors.mat_connector import MatArray
from spectrasphere.data.scene import (
    Dataset, HsiCube, stratified_split, stratified_split_indices, train_count, vectorize
)
from spectrasphere.data.scenes import PRESETS, SceneConfig, load_scene
from spectrasphere.data.synthetic import make_disc_dataset, make_halo_dataset
from spectrasphere.exceptions import ConfigError, DataError, EmptyDataset, MissingClass


class TestHsiCube(unittest.TestCase):
    """Test cases for HsiCube and vectorize."""

    def setUp(self):
        """Set up test fixtures."""
        self.reflectance = np.arange(2 * 3 * 2, dtype=np.float64).reshape(2, 3, 2)
        self.labels = np.array([[1, 0, 2], [0, 2, 1]])

    def test_vectorize_row_major_without_background(self):
        """Labelled pixels become rows in row-major order; background is dropped."""
        ds = vectorize(HsiCube(self.reflectance, self.labels))
        self.assertEqual(ds.n_samples, 4)
        self.assertEqual(ds.n_bands, 2)
        np.testing.assert_array_equal(ds.y, [1, 2, 2, 1])
        np.testing.assert_array_equal(ds.X[0], self.reflectance[0, 0])
        np.testing.assert_array_equal(ds.X[1], self.reflectance[0, 2])
        np.testing.assert_array_equal(ds.X[3], self.reflectance[1, 2])

    def test_all_background(self):
        """A cube without labelled pixels cannot be vectorised."""
        with self.assertRaises(EmptyDataset):
            vectorize(HsiCube(self.reflectance, np.zeros((2, 3), dtype=int)))

    def test_shape_mismatch(self):
        """Ground truth must match the spatial shape."""
        with self.assertRaises(DataError):
            HsiCube(self.reflectance, np.zeros((3, 2), dtype=int))

    def test_from_mat_arrays(self):
        """Cubes are built from column-major MAT arrays."""
        cube = MatArray("c", "float64", (2, 3, 2), self.reflectance.ravel(order='F'))
        gt = MatArray("g", "uint8", (2, 3), self.labels.ravel(order='F').astype(np.uint8))
        hsi = HsiCube.from_mat_arrays(cube, gt)
        np.testing.assert_array_equal(hsi.reflectance, self.reflectance)
        np.testing.assert_array_equal(hsi.labels, self.labels)


class TestDataset(unittest.TestCase):
    """Test cases for Dataset."""

    def setUp(self):
        """Set up test fixtures."""
        self.ds = Dataset(
            X=np.arange(12, dtype=np.float64).reshape(6, 2),
            y=np.array([10, 1, 10, 14, 1, 10]),
            class_names={1: "a", 10: "b", 14: "c"},
        )

    def test_labels_must_be_positive(self):
        """Label 0 is reserved for background."""
        with self.assertRaises(DataError):
            Dataset(X=np.zeros((2, 2)), y=np.array([0, 1]))

    def test_class_counts(self):
        """Counts are indexed by label in sorted order."""
        counts = self.ds.class_counts()
        self.assertEqual(list(counts.index), [1, 10, 14])
        self.assertEqual(list(counts.values), [2, 3, 1])

    def test_rows_of_missing_class(self):
        """Asking for an absent class raises MissingClass."""
        with self.assertRaises(MissingClass):
            self.ds.rows_of(7)

    def test_relabel_consecutive(self):
        """Sorted labels map to 1..K and names follow."""
        relabelled, mapping = self.ds.relabel_consecutive()
        self.assertEqual(mapping, {1: 1, 10: 2, 14: 3})
        np.testing.assert_array_equal(relabelled.y, [2, 1, 2, 3, 1, 2])
        self.assertEqual(relabelled.class_names, {1: "a", 2: "b", 3: "c"})


class TestStratifiedSplit(unittest.TestCase):
    """Test cases for the stratified split."""

    def setUp(self):
        """Set up test fixtures."""
        self.y = np.repeat([1, 2, 3, 4], [391, 47, 2, 10])

    def test_train_count(self):
        """Round half up, at least one training sample for classes of two or more."""
        self.assertEqual(train_count(10, 0.3), 3)
        self.assertEqual(train_count(5, 0.3), 2)
        self.assertEqual(train_count(2, 0.3), 1)
        self.assertEqual(train_count(1, 0.3), 0)

    def test_proportions_per_class(self):
        """Each class contributes within 1/n_c of the requested fraction."""
        train_idx, test_idx = stratified_split_indices(self.y, 0.3, seed=0)
        for label in np.unique(self.y):
            n_c = int(np.sum(self.y == label))
            frac = np.sum(self.y[train_idx] == label) / n_c
            self.assertLessEqual(abs(frac - 0.3), 1.0 / n_c + 1e-12)

    def test_partition(self):
        """Train and test indices partition the samples."""
        train_idx, test_idx = stratified_split_indices(self.y, 0.3, seed=4)
        self.assertEqual(len(np.intersect1d(train_idx, test_idx)), 0)
        np.testing.assert_array_equal(np.union1d(train_idx, test_idx), np.arange(len(self.y)))

    def test_deterministic_and_seed_dependent(self):
        """The same seed gives the same split; another seed moves it."""
        a, _ = stratified_split_indices(self.y, 0.3, seed=1)
        b, _ = stratified_split_indices(self.y, 0.3, seed=1)
        c, _ = stratified_split_indices(self.y, 0.3, seed=2)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_bad_fraction(self):
        """The fraction must lie strictly between 0 and 1."""
        with self.assertRaises(ValueError):
            stratified_split_indices(self.y, 1.0, seed=0)

    def test_split_datasets(self):
        """Dataset splits keep features and labels aligned."""
        ds = make_halo_dataset(n_target=20, n_outlier=30, n_bands=3, seed=0)
        train, test = stratified_split(ds, 0.3, seed=0)
        self.assertEqual(train.n_samples + test.n_samples, ds.n_samples)
        self.assertEqual(int(np.sum(train.y == 1)), 6)
        self.assertEqual(int(np.sum(train.y == 2)), 9)


class TestScenes(unittest.TestCase):
    """Test cases for scene loading."""

    def setUp(self):
        """Set up test fixtures."""
        self.tmpdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmpdir.cleanup)

    def test_salinas_a_preset(self):
        """The Salinas-A preset relabels to six classes with the published counts."""
        preset = PRESETS["salinas_a"]
        self.assertTrue(preset.relabel)
        self.assertEqual(list(preset.class_counts.values()), [391, 1343, 616, 1525, 674, 799])
        self.assertEqual(PRESETS["indian_pines"].bands, 200)
        self.assertEqual(len(PRESETS["indian_pines"].class_counts), 16)

    def test_load_mat_scene_with_separate_ground_truth(self):
        """Cube and ground truth can live in separate files; labels are relabelled."""
        rng = np.random.default_rng(0)
        cube = rng.random((4, 5, 3))
        gt = np.zeros((4, 5), dtype=np.uint8)
        gt[0, :] = 10
        gt[1, :2] = 14
        gt[3, :] = 1
        cube_path = os.path.join(self.tmpdir.name, "cube.mat")
        gt_path = os.path.join(self.tmpdir.name, "gt.mat")
        savemat(cube_path, {"cube": cube})
        savemat(gt_path, {"gt": gt})

        scene = SceneConfig(path=cube_path, gt_path=gt_path, cube_var="cube", gt_var="gt", relabel=True)
        ds = load_scene(scene)
        self.assertEqual(ds.classes, [1, 2, 3])
        self.assertEqual(list(ds.class_counts().values), [5, 5, 2])
        np.testing.assert_allclose(ds.X[0], cube[0, 0])

    def test_mat_scene_needs_variables(self):
        """Without variable names or a preset the scene is rejected."""
        with self.assertRaises(ConfigError):
            load_scene(SceneConfig(path="x.mat"))

    def test_unknown_preset(self):
        """Unknown presets are configuration errors."""
        with self.assertRaises(ConfigError):
            SceneConfig(preset="pavia").resolved_preset()

    def test_synthetic_scene(self):
        """Synthetic scenes forward their options to the generator."""
        ds = load_scene(SceneConfig(source="synthetic", synthetic={"kind": "disc", "n_target": 30,
                                                                    "n_outlier": 20, "n_bands": 5}))
        self.assertEqual(ds.n_samples, 50)
        self.assertEqual(ds.n_bands, 5)
        with self.assertRaises(ConfigError):
            load_scene(SceneConfig(source="synthetic", synthetic={"kind": "spiral"}))


class TestSynthetic(unittest.TestCase):
    """Test cases for the synthetic generators."""

    def test_disc_structure(self):
        """Only the first two bands separate disc and ring."""
        ds = make_disc_dataset(n_target=300, n_outlier=300, n_bands=6, seed=1)
        disc = ds.rows_of(1)
        ring = ds.rows_of(2)
        self.assertLess(np.linalg.norm(disc[:, :2], axis=1).mean(), 0.2)
        np.testing.assert_allclose(np.linalg.norm(ring[:, :2], axis=1), 1.0, atol=0.1)

    def test_deterministic(self):
        """Generators are deterministic given the seed."""
        a = make_halo_dataset(seed=5)
        b = make_halo_dataset(seed=5)
        np.testing.assert_array_equal(a.X, b.X)


if __name__ == '__main__':
    unittest.main()
