"""
Main entry point for the spectrasphere command-line tool.
"""
import os
import argparse
import json
import sys
import logging

import numpy as np
import pandas as pd

from spectrasphere import __version__

from spectrasphere.analysers.statistical_analyser import StatisticalAnalyser
from spectrasphere.config.run_config import load_run_config
from spectrasphere.data.scene import stratified_split
from spectrasphere.data.scenes import load_scene
from spectrasphere.data.standardizer import apply_standardizer, fit_standardizer
from spectrasphere.evaluation.experiment import run_full_experiment
from spectrasphere.evaluation.grid_search import run_grid_search
from spectrasphere.evaluation.metrics import confusion_counts, gm_score
from spectrasphere.exceptions import (
    ConfigError, DataError, MatParseError, SsvddError, UndefinedRate
)
from spectrasphere.models.serialization import load_model, save_model
from spectrasphere.models.ssvdd import Hyperparams, Variant, train
from spectrasphere.reporting.report_generator import ReportGenerator
from spectrasphere.utils.logging import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    """Invalid command-line usage."""


class ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; this CLI reserves 2 for input errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = ArgumentParser(prog="spectrasphere", description="spectrasphere - Subspace SVDD for hyperspectral scenes")
    parser.add_argument('--version', action='version', version=f'spectrasphere v{__version__}')

    # shared flags, accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Path to the run configuration (YAML or JSON)")
    common.add_argument("--seed", type=int, help="Override the configured seed")
    common.add_argument("--workers", type=int, help="Override the worker count")
    common.add_argument("--grid-subsample", type=int, help="Evaluate a seeded random subset of this many grid points")
    common.add_argument("--out", help="Output directory (overrides output_dir)")
    common.add_argument("--verbose", action="store_true", help="Log at DEBUG level")

    hyper = argparse.ArgumentParser(add_help=False)
    hyper.add_argument("--variant", default="linear-psi0", help="Variant label, e.g. linear-psi0 or nonlinear-psi2")
    hyper.add_argument("--beta", type=float, default=Hyperparams.beta, help="Regulariser weight")
    hyper.add_argument("--C", dest="C", type=float, default=Hyperparams.C, help="SVDD penalty")
    hyper.add_argument("--sigma", type=float, default=Hyperparams.sigma, help="RBF width (nonlinear variants)")
    hyper.add_argument("--d", type=int, default=Hyperparams.d, help="Subspace dimension")
    hyper.add_argument("--eta", type=float, default=Hyperparams.eta, help="Learning rate")

    subparsers = parser.add_subparsers(dest="command", help="Command to run", parser_class=ArgumentParser)

    subparsers.add_parser("inspect", parents=[common], help="Summarise the scene of a run configuration")

    train_parser = subparsers.add_parser("train", parents=[common, hyper], help="Train one model on a target class")
    train_parser.add_argument("--target", type=int, required=True, help="Target class label")
    train_parser.add_argument("--model", help="Model file path (default: <out>/model_class<target>.json)")

    predict_parser = subparsers.add_parser("predict", parents=[common], help="Classify the scene with a trained model")
    predict_parser.add_argument("--model", required=True, help="Model file written by 'train'")
    predict_parser.add_argument("--test-split", action="store_true",
                                help="Predict only the held-out part of the configured split")

    grid_parser = subparsers.add_parser("gridsearch", parents=[common], help="Cross-validate the grid for one class")
    grid_parser.add_argument("--target", type=int, required=True, help="Target class label")
    grid_parser.add_argument("--variant", default="linear-psi0", help="Variant label")

    subparsers.add_parser("experiment", parents=[common], help="Run every (class, variant) cell and write the GM table")
    return parser


def main(argv=None):
    """Main entry point for the spectrasphere CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    setup_logging(logging.DEBUG if args.verbose else None)

    commands = {
        "inspect": cmd_inspect,
        "train": cmd_train,
        "predict": cmd_predict,
        "gridsearch": cmd_gridsearch,
        "experiment": cmd_experiment,
    }
    try:
        config = load_run_config(args.config)
        config.apply_overrides(seed=args.seed, workers=args.workers,
                               grid_subsample=args.grid_subsample, output_dir=args.out)
        return commands[args.command](config, args)
    except UsageError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (MatParseError, DataError, ConfigError, FileNotFoundError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SsvddError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_NUMERIC


def _parse_variant(label):
    try:
        return Variant.parse(label)
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_inspect(config, args):
    """Print per-class counts and band statistics of the configured scene."""
    ds = load_scene(config.scene)
    preset = config.scene.resolved_preset()
    analyser = StatisticalAnalyser()
    results = analyser.analyse_dataset(ds, expected_counts=preset.class_counts if preset else None)

    print(f"Scene: {config.scene.display_name}")
    print(f"Labelled samples: {results['n_samples']}")
    print(f"Bands: {results['n_bands']}")
    print(f"Classes: {results['n_classes']} (imbalance ratio {results['imbalance_ratio']})")
    if preset:
        print(f"Preset scene size: {preset.height}x{preset.width}, {preset.bands} bands")
        if preset.bands != results["n_bands"]:
            print(f"Warning: preset lists {preset.bands} bands, the file has {results['n_bands']}")
    print("-" * 50)
    with pd.option_context("display.width", 120):
        print(results["classes"].to_string())
    print("-" * 50)
    if results["constant_bands"]:
        print(f"Constant bands: {results['constant_bands']}")
    bands = results["bands"]
    print(f"Band value range: {bands['min'].min():.6g} to {bands['max'].max():.6g}")
    return EXIT_OK


def _hyperparams_from_args(config, args, variant):
    try:
        return Hyperparams(
            beta=args.beta, C=args.C, sigma=args.sigma, d=args.d, eta=args.eta,
            psi=variant.psi, kernelized=variant.kernelized,
            max_iter=config.max_iter, seed=config.seed,
            orthonormalize_each_step=config.orthonormalize_each_step,
            npt_cutoff=config.npt_cutoff,
        )
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_train(config, args):
    """Train on the training split of the target class and write the model file."""
    variant = _parse_variant(args.variant)
    hp = _hyperparams_from_args(config, args, variant)

    ds = load_scene(config.scene)
    train_ds, test_ds = stratified_split(ds, config.train_fraction, config.seed)
    stats = fit_standardizer(train_ds, args.target)
    X_target = apply_standardizer(stats, train_ds.rows_of(args.target)).T
    model = train(X_target, hp, stats=stats, target_class=args.target)

    for iteration, (objective, psi) in enumerate(zip(model.diagnostics.dual_objective, model.diagnostics.psi), 1):
        logger.info(f"Iteration {iteration}: dual objective {objective:.6g}, psi {psi:.6g}")

    reporter = ReportGenerator(config.output_dir)
    model_path = args.model or os.path.join(config.output_dir, f"model_class{args.target}.json")
    save_model(model, model_path)
    diagnostics = pd.DataFrame({
        "iteration": np.arange(1, len(model.diagnostics.dual_objective) + 1),
        "dual_objective": model.diagnostics.dual_objective,
        "psi": model.diagnostics.psi,
        "solver_iterations": model.diagnostics.solver_iterations,
        "solver_converged": model.diagnostics.solver_converged,
    })
    diagnostics_path = os.path.join(reporter.output_dir, f"diagnostics_class{args.target}.csv")
    diagnostics.to_csv(diagnostics_path, index=False, float_format="%.10g", lineterminator="\n")
    logger.info(f"Diagnostics saved to: {diagnostics_path}")

    prediction = model.predict(test_ds.X)
    counts = confusion_counts(test_ds.y == args.target, prediction.labels)
    try:
        print(f"Test GM for class {args.target} ({variant.label}): {counts.gm:.4f} "
              f"(TPR {counts.tpr:.4f}, TNR {counts.tnr:.4f})")
    except UndefinedRate as e:
        print(f"Test GM undefined: {e}")
    print(f"Model written to {model_path}")
    return EXIT_OK


def cmd_predict(config, args):
    """Classify the configured scene (or its held-out split) with a model file."""
    model = load_model(args.model)
    ds = load_scene(config.scene)
    if args.test_split:
        _, ds = stratified_split(ds, config.train_fraction, config.seed)

    prediction = model.predict(ds.X)
    truth = ds.y == model.target_class if model.target_class is not None else None
    reporter = ReportGenerator(config.output_dir)
    path = reporter.write_predictions(prediction, truth=truth)

    print(f"{prediction.n_targets} of {len(prediction.labels)} samples classified as target")
    if truth is not None:
        try:
            gm = gm_score(truth, prediction.labels)
            print(f"GM for class {model.target_class}: {gm:.4f}")
        except UndefinedRate as e:
            print(f"GM undefined: {e}")
    print(f"Predictions written to {path}")
    return EXIT_OK


def cmd_gridsearch(config, args):
    """Cross-validate the configured grid for one class and variant."""
    variant = _parse_variant(args.variant)
    ds = load_scene(config.scene)
    train_ds, _ = stratified_split(ds, config.train_fraction, config.seed)
    stats = fit_standardizer(train_ds, args.target)
    train_std = train_ds.with_features(apply_standardizer(stats, train_ds.X))

    settings = config.experiment_settings()
    points = config.grid.expand(variant, subsample=config.grid_subsample, subsample_seed=config.seed,
                                **settings.fixed_hyperparams())
    search = run_grid_search(train_std, args.target, points, folds=config.folds, seed=config.seed,
                             workers=config.workers)

    reporter = ReportGenerator(config.output_dir)
    path = reporter.write_cv_results(search, summary_filename=f"best_class{args.target}.json")
    best = search.best_result
    print(f"Best hyperparameters for class {args.target} ({variant.label}): "
          f"{json.dumps(best.hp.to_dict())} (CV GM {best.mean_gm:.4f})")
    print(f"CV results written to {path}")
    return EXIT_OK


def cmd_experiment(config, args):
    """Run the per-class experiment for every configured variant."""
    ds = load_scene(config.scene)
    experiment = run_full_experiment(
        ds,
        variants=config.parsed_variants(),
        grid=config.grid,
        seed=config.seed,
        settings=config.experiment_settings(),
    )
    reporter = ReportGenerator(config.output_dir)
    paths = reporter.write_experiment(config.scene.display_name, experiment)

    print(reporter.format_gm_table(experiment.gm_table()), end="")
    print(f"{experiment.n_succeeded}/{len(experiment.cells)} cells succeeded; "
          f"results written to {paths['csv']}, {paths['json']} and {paths['report']}")
    return EXIT_OK if experiment.n_succeeded else EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
