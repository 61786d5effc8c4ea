"""
Statistical analyser for spectrasphere.
Describes a labelled scene: class balance, band ranges and constant bands.
"""
import logging
import pandas as pd
import numpy as np

from spectrasphere.data.scene import Dataset

logger = logging.getLogger(__name__)


class StatisticalAnalyser:
    """
    Computes the dataset summary printed by ``inspect``.
    """

    def __init__(self, constant_tolerance=0.0):
        """
        Initialise the analyser.

        Args:
            constant_tolerance: Bands whose standard deviation is at or below this are constant
        """
        self.constant_tolerance = constant_tolerance

    def analyse_dataset(self, ds, expected_counts=None):
        """
        Analyse a Dataset.

        Args:
            ds: The Dataset to analyse
            expected_counts: Optional mapping label -> published sample count

        Returns:
            dict with 'n_samples', 'n_bands', 'n_classes', 'imbalance_ratio',
            'classes' (a DataFrame), 'bands' (a DataFrame) and 'constant_bands'
        """
        if not isinstance(ds, Dataset):
            logger.error("Input is not a Dataset")
            raise TypeError("Input must be a spectrasphere Dataset")

        logger.info(f"Analysing dataset with {ds.n_samples} samples and {ds.n_bands} bands")

        classes = self.class_table(ds, expected_counts)
        bands = self.band_table(ds)
        constant = [int(b) for b in bands.index[bands["std"] <= self.constant_tolerance]]
        if constant:
            logger.warning(f"{len(constant)} constant bands found: {constant[:10]}{'...' if len(constant) > 10 else ''}")

        counts = classes["count"]
        results = {
            "n_samples": ds.n_samples,
            "n_bands": ds.n_bands,
            "n_classes": len(classes),
            "imbalance_ratio": round(float(counts.max() / counts.min()), 2) if len(counts) else 0.0,
            "classes": classes,
            "bands": bands,
            "constant_bands": constant,
        }
        logger.info(f"Completed analysis of {len(classes)} classes")
        return results

    def class_table(self, ds, expected_counts=None):
        """
        Per-class counts with names and percentages.

        When ``expected_counts`` is given, an ``expected`` column and a
        ``matches`` flag are added.
        """
        counts = ds.class_counts()
        table = pd.DataFrame({
            "name": [ds.class_name(int(label)) for label in counts.index],
            "count": counts.values,
            "percentage": np.round(counts.values / max(ds.n_samples, 1) * 100, 2),
        }, index=pd.Index([int(label) for label in counts.index], name="class"))

        if expected_counts:
            table["expected"] = [expected_counts.get(label) for label in table.index]
            table["matches"] = table["count"] == table["expected"]
            mismatched = table.index[~table["matches"]].tolist()
            if mismatched:
                logger.warning(f"Class counts differ from the published counts for classes {mismatched}")
        return table

    def band_table(self, ds):
        """Min, max, mean and population std per band."""
        X = ds.X
        return pd.DataFrame({
            "min": X.min(axis=0),
            "max": X.max(axis=0),
            "mean": X.mean(axis=0),
            "std": X.std(axis=0),
        }, index=pd.RangeIndex(ds.n_bands, name="band"))
