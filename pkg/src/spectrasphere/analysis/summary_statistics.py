"""
Summary statistics module for spectrasphere.
Condenses a (variant x class) GM table into per-variant and per-class figures.
"""
import logging
import pandas as pd
import numpy as np

logger = logging.getLogger(__name__)


class SummaryStatistics:
    """
    Generates summary statistics for an experiment's GM table
    """

    def calculate_summary(self, gm_table):
        """
        Calculate summary statistics from a GM table.

        Args:
            gm_table: DataFrame with variants as rows and classes as columns; NaN marks failed cells

        Returns:
            Dictionary of summary statistics
        """
        logger.info("Calculating experiment summary statistics")

        if gm_table is None or gm_table.empty:
            logger.warning("No GM table provided for summary calculation")
            return {}

        variant_stats = {}
        for variant, row in gm_table.iterrows():
            scored = row.dropna()
            variant_stats[variant] = {
                "mean_gm": round(float(scored.mean()), 3) if len(scored) else None,
                "min_gm": round(float(scored.min()), 3) if len(scored) else None,
                "failed_cells": int(row.isna().sum()),
            }

        best_per_class = {}
        for target_class in gm_table.columns:
            column = gm_table[target_class].dropna()
            if len(column):
                # idxmax keeps the first variant on ties
                best_per_class[target_class] = {"variant": column.idxmax(), "gm": round(float(column.max()), 3)}
            else:
                best_per_class[target_class] = {"variant": None, "gm": None}

        total_cells = gm_table.size
        failed = int(gm_table.isna().sum().sum())
        summary = {
            "experiment_statistics": {
                "variants": len(gm_table.index),
                "classes": len(gm_table.columns),
                "total_cells": total_cells,
                "failed_cells": failed,
                "overall_mean_gm": round(float(np.nanmean(gm_table.values)), 3) if failed < total_cells else None,
            },
            "variant_statistics": variant_stats,
            "best_per_class": best_per_class,
            "kernel_comparison": self.compare_kernelization(gm_table),
        }

        logger.info("Summary statistics calculation complete")
        return summary

    def compare_kernelization(self, gm_table):
        """
        Compare each linear variant with its nonlinear counterpart.

        Returns:
            Dictionary regulariser -> {'linear', 'nonlinear', 'nonlinear_wins'} where
            'nonlinear_wins' counts the classes in which the nonlinear GM is higher
        """
        comparison = {}
        for label in gm_table.index:
            kind, _, psi = str(label).partition("-")
            partner = f"nonlinear-{psi}"
            if kind != "linear" or partner not in gm_table.index:
                continue
            linear = gm_table.loc[label]
            nonlinear = gm_table.loc[partner]
            both = linear.notna() & nonlinear.notna()
            comparison[psi] = {
                "linear": round(float(linear[both].mean()), 3) if both.any() else None,
                "nonlinear": round(float(nonlinear[both].mean()), 3) if both.any() else None,
                "nonlinear_wins": int((nonlinear[both] > linear[both]).sum()),
                "classes_compared": int(both.sum()),
            }
        return comparison

    def cv_summary(self, cv_table):
        """
        Summarise a grid-search results table.

        Args:
            cv_table: DataFrame from GridSearchResult.to_frame()

        Returns:
            Dictionary with point counts and the spread of mean CV GM
        """
        scored = cv_table[np.isfinite(cv_table["mean_gm"])]
        return {
            "grid_points": len(cv_table),
            "failed_points": int((cv_table["error"] != "").sum()),
            "best_mean_gm": round(float(scored["mean_gm"].max()), 4) if len(scored) else None,
            "median_mean_gm": round(float(scored["mean_gm"].median()), 4) if len(scored) else None,
            "failure_reasons": pd.Series(
                [e.split(":")[0] for e in cv_table["error"] if e]
            ).value_counts().to_dict(),
        }
