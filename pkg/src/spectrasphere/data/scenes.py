"""
Scene descriptions and loading.

Presets describe the public AVIRIS benchmark scenes as they are usually
distributed (separate cube and ground-truth MAT-files).
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional

from spectrasphere.connectors.mat_connector import MatConnector
from spectrasphere.data.scene import Dataset, HsiCube, vectorize
from spectrasphere.data.synthetic import make_disc_dataset, make_halo_dataset
from spectrasphere.exceptions import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScenePreset:
    name: str
    cube_var: str
    gt_var: str
    height: int
    width: int
    bands: int
    class_names: Dict[int, str]
    class_counts: Dict[int, int]
    relabel: bool = False


SALINAS_A = ScenePreset(
    name="salinas_a",
    cube_var="salinasA_corrected",
    gt_var="salinasA_gt",
    height=86,
    width=83,
    bands=204,
    class_names={
        1: "Brocoli Green Weeds",
        2: "Corn Senesced Green Weeds",
        3: "Lettuce Romaine 4 wk.",
        4: "Lettuce Romaine 5 wk.",
        5: "Lettuce Romaine 6 wk.",
        6: "Lettuce Romaine 7 wk.",
    },
    class_counts={1: 391, 2: 1343, 3: 616, 4: 1525, 5: 674, 6: 799},
    # the ground truth reuses the full-scene labels {1, 10, 11, 12, 13, 14}
    relabel=True,
)

INDIAN_PINES = ScenePreset(
    name="indian_pines",
    cube_var="indian_pines_corrected",
    gt_var="indian_pines_gt",
    height=145,
    width=145,
    bands=200,
    class_names={
        1: "Alfalfa",
        2: "Corn (notill)",
        3: "Corn (mintill)",
        4: "Corn",
        5: "Grass (pasture)",
        6: "Grass (trees)",
        7: "Grass Pasture Mowed",
        8: "Hay (windrowed)",
        9: "Oats",
        10: "Soybean (notill)",
        11: "Soybean (mintill)",
        12: "Soybean (clean)",
        13: "Wheat",
        14: "Woods",
        15: "Buildings Grass Trees Drives",
        16: "Stone Steel Towers",
    },
    class_counts={
        1: 46, 2: 1428, 3: 830, 4: 237, 5: 483, 6: 730, 7: 28, 8: 478,
        9: 20, 10: 972, 11: 2455, 12: 593, 13: 205, 14: 1265, 15: 386, 16: 93,
    },
)

SALINAS = ScenePreset(
    name="salinas",
    cube_var="salinas_corrected",
    gt_var="salinas_gt",
    height=512,
    width=217,
    bands=204,
    class_names={
        1: "Brocoli Green Weeds 1",
        2: "Brocoli Green Weeds 2",
        3: "Fallow",
        4: "Fallow Rough Plow",
        5: "Fallow Smooth",
        6: "Stubble",
        7: "Celery",
        8: "Grapes Untrained",
        9: "Soil Vineyard Develop",
        10: "Corn Senesced Green Weeds",
        11: "Lettuce Romaine 4 wk.",
        12: "Lettuce Romaine 5 wk.",
        13: "Lettuce Romaine 6 wk.",
        14: "Lettuce Romaine 7 wk.",
        15: "Vineyard Untrained",
        16: "Vineyard Vertical Trellis",
    },
    class_counts={
        1: 2009, 2: 3726, 3: 1976, 4: 1394, 5: 2678, 6: 3959, 7: 3579, 8: 11271,
        9: 6203, 10: 3278, 11: 1068, 12: 1927, 13: 916, 14: 1070, 15: 7268, 16: 1807,
    },
)

PRESETS = {preset.name: preset for preset in (SALINAS_A, INDIAN_PINES, SALINAS)}


@dataclass
class SceneConfig:
    """
    Where a scene comes from.

    ``source`` is either "mat" (cube and ground truth read from MAT-files) or
    "synthetic" (generated, for desk runs and tests).
    """
    source: str = "mat"
    name: Optional[str] = None
    path: Optional[str] = None
    gt_path: Optional[str] = None
    cube_var: Optional[str] = None
    gt_var: Optional[str] = None
    relabel: bool = False
    class_names: Optional[Dict[int, str]] = None
    preset: Optional[str] = None
    synthetic: Dict = field(default_factory=dict)

    def resolved_preset(self):
        if self.preset is None:
            return None
        if self.preset not in PRESETS:
            raise ConfigError(f"Unknown scene preset '{self.preset}'. Known presets: {sorted(PRESETS)}")
        return PRESETS[self.preset]

    @property
    def display_name(self):
        if self.name:
            return self.name
        if self.preset:
            return self.preset
        if self.path:
            return self.path
        return f"synthetic-{self.synthetic.get('kind', 'halo')}"


def load_scene(scene, connector=None):
    """
    Load a scene described by a SceneConfig as a pixel-wise Dataset.

    Args:
        scene: SceneConfig
        connector: Optional MatConnector (one is created if omitted)

    Returns:
        Dataset
    """
    if scene.source == "synthetic":
        return _load_synthetic(scene.synthetic)
    if scene.source != "mat":
        raise ConfigError(f"Unknown scene source '{scene.source}'; use 'mat' or 'synthetic'")

    preset = scene.resolved_preset()
    cube_var = scene.cube_var or (preset.cube_var if preset else None)
    gt_var = scene.gt_var or (preset.gt_var if preset else None)
    if not scene.path or not cube_var or not gt_var:
        raise ConfigError("A MAT scene needs 'path', 'cube_var' and 'gt_var' (or a preset)")

    connector = connector or MatConnector()
    cube_array = connector.read_array(scene.path, cube_var)
    gt_array = connector.read_array(scene.gt_path or scene.path, gt_var)
    cube = HsiCube.from_mat_arrays(cube_array, gt_array)
    logger.info(f"Loaded scene {scene.display_name}: {cube.height}x{cube.width} pixels, {cube.bands} bands")

    relabel = scene.relabel or (preset.relabel if preset else False)
    ds = vectorize(cube)
    if relabel:
        ds, _ = ds.relabel_consecutive()

    class_names = scene.class_names or (preset.class_names if preset else None)
    if class_names:
        ds = Dataset(X=ds.X, y=ds.y, class_names=dict(class_names))
    return ds


def _load_synthetic(options):
    options = dict(options)
    kind = options.pop("kind", "halo")
    generators = {"disc": make_disc_dataset, "halo": make_halo_dataset}
    if kind not in generators:
        raise ConfigError(f"Unknown synthetic scene kind '{kind}'; use 'disc' or 'halo'")
    try:
        return generators[kind](**options)
    except TypeError as e:
        raise ConfigError(f"Invalid options for synthetic scene '{kind}': {e}") from None
