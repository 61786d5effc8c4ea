"""
JSON model files.
"""
import json
import logging
import os

import numpy as np

from spectrasphere.data.standardizer import StandardizationStats
from spectrasphere.exceptions import ConfigError
from spectrasphere.models.npt import NptState
from spectrasphere.models.ssvdd import Hyperparams, SsvddModel, TrainingDiagnostics
from spectrasphere.models.svdd import SvddSolution

logger = logging.getLogger(__name__)

FORMAT_TAG = "spectrasphere-model"
FORMAT_VERSION = 1


def model_to_dict(model):
    """Convert a model into a JSON-compatible dictionary."""
    return {
        "format": FORMAT_TAG,
        "version": FORMAT_VERSION,
        "target_class": model.target_class,
        "hyperparams": model.hp.to_dict(),
        "Q": model.Q.tolist(),
        "svdd": model.svdd.to_dict(),
        "stats": model.stats.to_dict(),
        "npt": model.npt.to_dict() if model.npt is not None else None,
        "train_projections": model.train_projections.tolist(),
        "diagnostics": model.diagnostics.to_dict(),
    }


def model_from_dict(payload):
    """
    Rebuild a model from ``model_to_dict`` output.

    Raises:
        ConfigError: If the document is not a model file of a known version
    """
    if payload.get("format") != FORMAT_TAG:
        raise ConfigError(f"Not a model file: format tag is {payload.get('format')!r}")
    if payload.get("version") != FORMAT_VERSION:
        raise ConfigError(f"Unsupported model file version {payload.get('version')!r}")

    target_class = payload.get("target_class")
    return SsvddModel(
        Q=np.asarray(payload["Q"], dtype=np.float64),
        svdd=SvddSolution.from_dict(payload["svdd"]),
        stats=StandardizationStats.from_dict(payload["stats"]),
        npt=NptState.from_dict(payload["npt"]) if payload.get("npt") else None,
        hp=Hyperparams.from_dict(payload["hyperparams"]),
        train_projections=np.asarray(payload["train_projections"], dtype=np.float64).reshape(
            len(payload["Q"]), -1
        ),
        diagnostics=TrainingDiagnostics.from_dict(payload["diagnostics"]),
        target_class=int(target_class) if target_class is not None else None,
    )


def save_model(model, path):
    """
    Write a model as JSON.

    Args:
        model: SsvddModel
        path: Output file path; parent directories are created
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(model_to_dict(model), f, indent=2)
    logger.info(f"Model written to {path}")


def load_model(path):
    """
    Read a model written by ``save_model``.

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigError: If the file is not a valid model file
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Model file not found: {path}")
    try:
        with open(path, 'r') as f:
            payload = json.load(f)
        return model_from_dict(payload)
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        logger.error(f"Error loading model file {path}: {e}")
        raise ConfigError(f"Invalid model file {path}: {e}") from e
