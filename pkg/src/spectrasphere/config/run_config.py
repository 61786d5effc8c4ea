"""
Run configuration module for spectrasphere.
Loads the scene, protocol and hyperparameter grid from a YAML or JSON file.
"""
import os
import json
import yaml
import logging
from dataclasses import dataclass, field
from typing import List, Optional

from spectrasphere.data.scenes import SceneConfig
from spectrasphere.evaluation.experiment import ExperimentSettings
from spectrasphere.evaluation.grid_search import HyperparamGrid
from spectrasphere.exceptions import ConfigError
from spectrasphere.models.npt import DEFAULT_CUTOFF_RATIO
from spectrasphere.models.ssvdd import ALL_VARIANTS, Variant

logger = logging.getLogger(__name__)

WORKERS_ENV = "SPECTRASPHERE_WORKERS"

SCENE_KEYS = {"source", "name", "path", "gt_path", "cube_var", "gt_var", "relabel", "class_names",
              "preset", "synthetic"}
GRID_KEYS = {"beta", "C", "sigma", "d", "eta"}
TOP_KEYS = {"scene", "train_fraction", "seed", "folds", "variants", "grid", "output_dir", "workers",
            "grid_subsample", "orthonormalize_each_step", "npt_cutoff", "max_iter"}
INT_GRID_KEYS = {"d"}
FLOAT_OPTIONS = {"train_fraction", "npt_cutoff"}
INT_OPTIONS = {"seed", "folds", "workers", "grid_subsample", "max_iter"}


def default_workers():
    return os.cpu_count() or 1


@dataclass
class RunConfig:
    scene: SceneConfig = field(default_factory=SceneConfig)
    train_fraction: float = 0.3
    seed: int = 0
    folds: int = 5
    variants: List[str] = field(default_factory=lambda: [v.label for v in ALL_VARIANTS])
    grid: HyperparamGrid = field(default_factory=HyperparamGrid)
    output_dir: str = "results"
    workers: int = field(default_factory=default_workers)
    grid_subsample: Optional[int] = None
    orthonormalize_each_step: bool = True
    npt_cutoff: float = DEFAULT_CUTOFF_RATIO
    max_iter: int = 10

    def parsed_variants(self):
        return [Variant.parse(label) for label in self.variants]

    def experiment_settings(self):
        return ExperimentSettings(
            train_fraction=self.train_fraction,
            folds=self.folds,
            seed=self.seed,
            workers=self.workers,
            grid_subsample=self.grid_subsample,
            max_iter=self.max_iter,
            orthonormalize_each_step=self.orthonormalize_each_step,
            npt_cutoff=self.npt_cutoff,
        )

    def apply_overrides(self, seed=None, workers=None, grid_subsample=None, output_dir=None):
        """Apply command-line overrides; ``None`` leaves a field unchanged."""
        if seed is not None:
            self.seed = seed
        if workers is not None:
            self.workers = workers
        if grid_subsample is not None:
            self.grid_subsample = grid_subsample
        if output_dir is not None:
            self.output_dir = output_dir
        self.validate(check_paths=False)
        return self

    def validate(self, check_paths=True):
        """
        Check the invariants of a run configuration.

        Raises:
            ConfigError: On the first violated invariant
            FileNotFoundError: If a scene file is missing (``check_paths``)
        """
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        if int(self.folds) != self.folds or self.folds < 2:
            raise ConfigError(f"folds must be an integer >= 2, got {self.folds}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers}")
        if self.grid_subsample is not None and (int(self.grid_subsample) != self.grid_subsample
                                                or self.grid_subsample < 1):
            raise ConfigError(f"grid_subsample must be a positive integer, got {self.grid_subsample}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError(f"max_iter must be a positive integer, got {self.max_iter}")
        if not 0.0 < self.npt_cutoff < 1.0:
            raise ConfigError(f"npt_cutoff must lie in (0, 1), got {self.npt_cutoff}")
        if not isinstance(self.orthonormalize_each_step, bool):
            raise ConfigError(f"orthonormalize_each_step must be true or false, got {self.orthonormalize_each_step!r}")
        if not self.variants:
            raise ConfigError("variants must not be empty")
        for label in self.variants:
            try:
                Variant.parse(label)
            except ValueError as e:
                raise ConfigError(str(e)) from None
        for name, values in self.grid.to_dict().items():
            if not values:
                raise ConfigError(f"Grid list '{name}' must not be empty")

        if check_paths and self.scene.source == "mat":
            for path in (self.scene.path, self.scene.gt_path):
                if path and not os.path.exists(path):
                    raise FileNotFoundError(f"Scene file not found: {path}")


def _check_keys(section, allowed, where):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"Unknown keys in {where}: {sorted(unknown)}")


def _to_number(value, name, integer=False):
    """
    Convert a config value to float or int.

    YAML 1.1 reads exponent literals without a dot (``1e-2``) as strings,
    so numeric strings are accepted too.
    """
    if isinstance(value, bool) or value is None:
        raise ConfigError(f"'{name}' must be a number, got {value!r}")
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{name}' must be a number, got {value!r}") from None
    if not integer:
        return number
    if not number.is_integer():
        raise ConfigError(f"'{name}' must be an integer, got {value!r}")
    return int(number)


def _coerce_grid(grid_section):
    grid = {}
    for name, values in grid_section.items():
        if isinstance(values, (str, bytes)) or not hasattr(values, "__iter__"):
            raise ConfigError(f"Grid entry '{name}' must be a list, got {values!r}")
        grid[name] = [_to_number(v, f"grid.{name}", integer=name in INT_GRID_KEYS) for v in values]
    return grid


def create_run_config(config, base_dir=None):
    """
    Build a RunConfig from a parsed configuration dictionary.

    Args:
        config: Dictionary loaded from YAML or JSON
        base_dir: Directory that relative scene paths are resolved against

    Returns:
        RunConfig (not yet validated)
    """
    if not isinstance(config, dict):
        raise ConfigError("Invalid configuration format: expected a mapping at the top level")
    _check_keys(config, TOP_KEYS, "run configuration")

    scene_section = dict(config.get("scene") or {})
    _check_keys(scene_section, SCENE_KEYS, "'scene'")
    if scene_section.get("class_names"):
        scene_section["class_names"] = {int(k): str(v) for k, v in scene_section["class_names"].items()}
    for key in ("path", "gt_path"):
        if scene_section.get(key) and base_dir and not os.path.isabs(scene_section[key]):
            scene_section[key] = os.path.join(base_dir, scene_section[key])
    scene = SceneConfig(**scene_section)
    scene.resolved_preset()

    grid_section = dict(config.get("grid") or {})
    _check_keys(grid_section, GRID_KEYS, "'grid'")
    grid = HyperparamGrid(**_coerce_grid(grid_section))

    options = {k: v for k, v in config.items() if k not in ("scene", "grid")}
    for key in FLOAT_OPTIONS & options.keys():
        options[key] = _to_number(options[key], key)
    for key in INT_OPTIONS & options.keys():
        if key == "grid_subsample" and options[key] is None:
            continue
        options[key] = _to_number(options[key], key, integer=True)
    if "variants" in options:
        options["variants"] = list(options["variants"])
    return RunConfig(scene=scene, grid=grid, **options)


def load_run_config(file_path, check_paths=True):
    """
    Load a run configuration from a YAML or JSON file.

    The environment variable SPECTRASPHERE_WORKERS overrides the worker
    count of the file.

    Args:
        file_path: Path to the configuration file

    Returns:
        RunConfig
    """
    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Run configuration file not found: {file_path}")

    # Determine file type based on extension
    file_ext = os.path.splitext(file_path)[1].lower()

    try:
        if file_ext == '.yaml' or file_ext == '.yml':
            with open(file_path, 'r') as f:
                config = yaml.safe_load(f)
        elif file_ext == '.json':
            with open(file_path, 'r') as f:
                config = json.load(f)
        else:
            raise ConfigError(f"Unsupported file extension: {file_ext}. Use .yaml, .yml, or .json")

        run_config = create_run_config(config or {}, base_dir=os.path.dirname(os.path.abspath(file_path)))

        env_workers = os.environ.get(WORKERS_ENV)
        if env_workers:
            try:
                run_config.workers = int(env_workers)
            except ValueError:
                raise ConfigError(f"{WORKERS_ENV} must be an integer, got '{env_workers}'") from None

        run_config.validate(check_paths=check_paths)
        logger.info(f"Loaded run configuration from {file_path} (scene {run_config.scene.display_name})")
        return run_config

    except (yaml.YAMLError, json.JSONDecodeError, TypeError) as e:
        logger.error(f"Error loading run configuration from {file_path}: {e}")
        raise ConfigError(f"Invalid run configuration {file_path}: {e}") from e
    except Exception as e:
        logger.error(f"Error loading run configuration from {file_path}: {e}")
        raise
