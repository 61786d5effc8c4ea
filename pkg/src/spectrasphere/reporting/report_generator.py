"""
Report generation module for spectrasphere.
Writes experiment, grid-search and prediction results as CSV, JSON and text.
"""
import json
import logging
import math
import os
from datetime import datetime

import numpy as np
import pandas as pd

from spectrasphere import __version__
from spectrasphere.analysis.summary_statistics import SummaryStatistics

logger = logging.getLogger(__name__)

GM_CSV = "gm_table.csv"
HYPERPARAMS_JSON = "hyperparams.json"
TEXT_REPORT = "report.txt"
CV_RESULTS_CSV = "cv_results.csv"


def _json_safe(value):
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return None if not math.isfinite(value) else float(value)
    return value


class ReportGenerator:
    """
    Generates formatted reports from experiment and grid-search results.
    """

    def __init__(self, output_dir):
        """
        Initialise the report generator

        Args:
            output_dir: Directory the reports are written to; created if missing
        """
        self.output_dir = output_dir
        if not os.path.exists(self.output_dir):
            os.makedirs(self.output_dir)
            logger.info(f"Created reports directory: {self.output_dir}")

    def _path(self, filename):
        return os.path.join(self.output_dir, filename)

    def format_gm_table(self, gm_table):
        """
        Render a GM table as CSV text: header row of class labels, one row per
        variant, three decimals, empty cells for failures.
        """
        return gm_table.to_csv(float_format="%.3f", na_rep="", lineterminator="\n")

    def write_gm_table(self, gm_table):
        path = self._path(GM_CSV)
        with open(path, 'w', newline='') as f:
            f.write(self.format_gm_table(gm_table))
        logger.info(f"GM table saved to: {path}")
        return path

    def write_json(self, filename, payload):
        path = self._path(filename)
        with open(path, 'w') as f:
            json.dump(_json_safe(payload), f, indent=2)
        logger.info(f"JSON results saved to: {path}")
        return path

    def write_experiment(self, dataset_name, experiment):
        """
        Write the GM table CSV, the hyperparameter sidecar and the text report.

        Args:
            dataset_name: Name of the scene
            experiment: ExperimentResult

        Returns:
            dict of output kind -> path
        """
        gm_table = experiment.gm_table()
        paths = {
            "csv": self.write_gm_table(gm_table),
            "json": self.write_json(HYPERPARAMS_JSON, {
                "dataset": dataset_name,
                "version": __version__,
                "cells": experiment.to_records(),
            }),
        }
        report_text = self.generate_text_report(dataset_name, gm_table, experiment)
        paths["report"] = self._path(TEXT_REPORT)
        with open(paths["report"], 'w') as f:
            f.write(report_text)
        logger.info(f"Report saved to: {paths['report']}")
        return paths

    def write_cv_results(self, search, summary_filename=None):
        """
        Write one row per grid point (hyperparameters, mean/std GM, failure reason).

        Returns:
            Path of the CSV file
        """
        table = search.to_frame()
        path = self._path(CV_RESULTS_CSV)
        table.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
        logger.info(f"CV results saved to: {path}")
        if summary_filename:
            self.write_json(summary_filename, {
                "best": search.best.to_dict(),
                "summary": SummaryStatistics().cv_summary(table),
            })
        return path

    def write_predictions(self, prediction, filename="predictions.csv", truth=None):
        """
        Write per-sample predictions.

        Args:
            prediction: Prediction from SsvddModel.predict
            filename: Name of the CSV inside the output directory
            truth: Optional boolean target mask added as a column

        Returns:
            Path of the CSV file
        """
        table = pd.DataFrame({
            "label": prediction.labels,
            "dist_sq": prediction.dist_sq,
            "radius_sq": prediction.radius_sq,
            "decision": np.where(prediction.labels == 1, "target", "outlier"),
        })
        if truth is not None:
            table["is_target"] = np.asarray(truth, dtype=bool)
        table.index.name = "sample"
        path = self._path(filename)
        table.to_csv(path, float_format="%.10g", lineterminator="\n")
        logger.info(f"Predictions saved to: {path}")
        return path

    def generate_text_report(self, dataset_name, gm_table, experiment=None):
        """
        Generate a text report of experiment results.

        Args:
            dataset_name: Name or identifier of the scene
            gm_table: DataFrame of GM values (variants x classes)
            experiment: Optional ExperimentResult for class names and failures

        Returns:
            str: Formatted report text
        """
        logger.info(f"Generating text report for dataset: {dataset_name}")
        now = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        summary = SummaryStatistics().calculate_summary(gm_table)
        stats = summary.get("experiment_statistics", {})

        report = [
            "= spectrasphere Experiment Report =",
            f"Dataset: {dataset_name}",
            f"Generated: {now}",
            f"Variants: {stats.get('variants', 0)}, classes: {stats.get('classes', 0)}",
            f"Cells: {stats.get('total_cells', 0)} ({stats.get('failed_cells', 0)} failed)",
            "",
            "== GM Table ==",
            gm_table.to_string(float_format=lambda v: f"{v:.3f}", na_rep="-"),
            "",
        ]

        report.append("== Variant Summary ==")
        for variant, values in summary.get("variant_statistics", {}).items():
            mean_gm = "-" if values["mean_gm"] is None else f"{values['mean_gm']:.3f}"
            min_gm = "-" if values["min_gm"] is None else f"{values['min_gm']:.3f}"
            report.append(f"  {variant}: mean {mean_gm}, min {min_gm}, failed {values['failed_cells']}")
        report.append("")

        report.append("== Best Variant per Class ==")
        class_names = experiment.class_names if experiment is not None else None
        for target_class, best in summary.get("best_per_class", {}).items():
            name = (class_names or {}).get(target_class, str(target_class))
            if best["variant"] is None:
                report.append(f"  {target_class} ({name}): no successful variant")
            else:
                report.append(f"  {target_class} ({name}): {best['variant']} ({best['gm']:.3f})")
        report.append("")

        comparison = summary.get("kernel_comparison", {})
        if comparison:
            report.append("== Linear vs Nonlinear ==")
            for psi, values in comparison.items():
                if values["classes_compared"] == 0:
                    report.append(f"  {psi}: no class scored by both")
                    continue
                report.append(
                    f"  {psi}: linear {values['linear']:.3f}, nonlinear {values['nonlinear']:.3f}, "
                    f"nonlinear better in {values['nonlinear_wins']}/{values['classes_compared']} classes"
                )
            report.append("")

        if experiment is not None:
            failures = [c for c in experiment.cells if c.error]
            if failures:
                report.append("== Failed Cells ==")
                for cell in failures:
                    report.append(f"  class {cell.target_class} / {cell.variant.label}: {cell.error}")
                report.append("")

        return "\n".join(report)
