"""
Tests for per-class experiments and the GM table.
"""
import math
import os
import tempfile
import unittest
from unittest import mock

import numpy as np

from spectrasphere.data.scene import Dataset
from spectrasphere.data.synthetic import make_halo_dataset
from spectrasphere.evaluation import experiment as experiment_module
from spectrasphere.evaluation.experiment import ExperimentSettings, run_class_experiment, run_full_experiment
from spectrasphere.evaluation.grid_search import HyperparamGrid
from spectrasphere.exceptions import MissingClass
from spectrasphere.models.ssvdd import PsiVariant, Variant
from spectrasphere.reporting.report_generator import GM_CSV, ReportGenerator

LINEAR_PSI0 = Variant(False, PsiVariant.PSI0)
NONLINEAR_PSI1 = Variant(True, PsiVariant.PSI1)

SMALL_GRID = HyperparamGrid(beta=[0.1], C=[0.5, 1.0], sigma=[5.0], d=[1, 2], eta=[0.1])
FAST = ExperimentSettings(folds=3, max_iter=2)


def three_cluster_dataset(seed=0, per_class=60, n_bands=6):
    """Three well separated Gaussian clusters."""
    rng = np.random.default_rng(seed)
    centres = [np.zeros(n_bands), np.full(n_bands, 8.0), np.r_[np.full(3, -8.0), np.full(n_bands - 3, 8.0)]]
    X = np.vstack([rng.normal(c, 1.0, size=(per_class, n_bands)) for c in centres])
    y = np.repeat([1, 2, 3], per_class)
    return Dataset(X=X, y=y, class_names={1: "a", 2: "b", 3: "c"})


class TestClassExperiment(unittest.TestCase):
    """Test cases for run_class_experiment."""

    def test_huge_margin(self):
        """A target far from its only outlier class is recovered almost perfectly."""
        ds = make_halo_dataset(n_target=2000, n_outlier=300, n_bands=8, halo_scale=1.0, offset=500.0, seed=0)
        grid = HyperparamGrid(beta=[0.1], C=[1.0], d=[2], eta=[0.01])
        report = run_class_experiment(ds, 1, LINEAR_PSI0, grid, split_seed=0,
                                      settings=ExperimentSettings(max_iter=2))
        self.assertEqual(report.tp + report.fn, 1400)
        self.assertEqual(report.tn + report.fp, 210)
        self.assertEqual(report.fp, 0)
        self.assertGreaterEqual(report.gm, 0.99)
        self.assertEqual(report.chosen_hp.d, 2)

    def test_missing_class(self):
        """An absent target class raises MissingClass."""
        with self.assertRaises(MissingClass):
            run_class_experiment(three_cluster_dataset(), 9, LINEAR_PSI0, SMALL_GRID, 0, FAST)

    def test_report_fields(self):
        """Counts, rates and GM agree with each other."""
        report = run_class_experiment(three_cluster_dataset(), 2, LINEAR_PSI0, SMALL_GRID, 1, FAST)
        self.assertEqual(report.tp + report.fn, 42)
        self.assertEqual(report.tn + report.fp, 84)
        self.assertAlmostEqual(report.gm, math.sqrt(report.tpr * report.tnr))
        self.assertEqual(report.to_dict()["variant"], "linear-psi0")
        self.assertGreaterEqual(report.wallclock, 0.0)


class TestFullExperiment(unittest.TestCase):
    """Test cases for run_full_experiment and the GM table."""

    def setUp(self):
        """Set up test fixtures."""
        self.ds = three_cluster_dataset()
        self.tmpdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmpdir.cleanup)

    def run_experiment(self, workers=1, classes=None):
        settings = ExperimentSettings(folds=3, max_iter=2, workers=workers)
        return run_full_experiment(self.ds, variants=[LINEAR_PSI0, NONLINEAR_PSI1], grid=SMALL_GRID,
                                   seed=3, settings=settings, classes=classes)

    def test_gm_table_shape(self):
        """Rows are variants, columns are classes, every cell scored."""
        table = self.run_experiment().gm_table()
        self.assertEqual(list(table.index), ["linear-psi0", "nonlinear-psi1"])
        self.assertEqual(list(table.columns), [1, 2, 3])
        self.assertEqual(table.index.name, "variant")
        values = table.to_numpy()
        self.assertTrue(np.all(np.isfinite(values)))
        self.assertTrue(np.all((values >= 0.0) & (values <= 1.0)))

    def test_csv_is_deterministic(self):
        """Two runs with the same seed write byte-identical GM tables."""
        contents = []
        for run in range(2):
            out = os.path.join(self.tmpdir.name, f"run{run}")
            ReportGenerator(out).write_gm_table(self.run_experiment().gm_table())
            with open(os.path.join(out, GM_CSV), 'rb') as f:
                contents.append(f.read())
        self.assertEqual(contents[0], contents[1])
        self.assertTrue(contents[0].startswith(b"variant,1,2,3\n"))

    def test_workers_do_not_change_results(self):
        """Parallel cells give the same table as sequential ones."""
        sequential = self.run_experiment(workers=1).gm_table()
        parallel = self.run_experiment(workers=2).gm_table()
        np.testing.assert_array_equal(sequential.to_numpy(), parallel.to_numpy())

    def test_failed_cell_is_recorded(self):
        """A failing cell becomes NaN with its error and the rest still run."""
        experiment = self.run_experiment(classes=[1, 9])
        failed = experiment.cell(9, LINEAR_PSI0)
        self.assertIsNone(failed.report)
        self.assertIn("MissingClass", failed.error)
        self.assertTrue(math.isnan(failed.gm))
        self.assertEqual(experiment.n_succeeded, 2)
        self.assertTrue(experiment.gm_table()[9].isna().all())
        csv = ReportGenerator(self.tmpdir.name).format_gm_table(experiment.gm_table())
        self.assertIn("linear-psi0,", csv)
        self.assertTrue(csv.splitlines()[1].endswith(","))

    def test_unexpected_error_fails_only_its_cell(self):
        """Errors outside the package hierarchy are recorded, not raised."""
        def flaky(ds, target_class, *args, **kwargs):
            if target_class == 2:
                raise TypeError("'>=' not supported between instances of 'str' and 'int'")
            return run_class_experiment(ds, target_class, *args, **kwargs)

        with mock.patch.object(experiment_module, "run_class_experiment", side_effect=flaky):
            experiment = self.run_experiment(workers=1, classes=[1, 2])
        self.assertEqual(experiment.n_succeeded, 2)
        failed = experiment.cell(2, LINEAR_PSI0)
        self.assertTrue(failed.error.startswith("TypeError"))
        self.assertTrue(experiment.gm_table()[2].isna().all())
        self.assertFalse(experiment.gm_table()[1].isna().any())

    def test_records(self):
        """Records carry the chosen hyperparameters of successful cells."""
        records = self.run_experiment(classes=[1]).to_records()
        self.assertEqual(len(records), 2)
        self.assertIsNone(records[0]["error"])
        self.assertIn("chosen_hp", records[0])


if __name__ == '__main__':
    unittest.main()
