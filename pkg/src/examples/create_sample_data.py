"""
Create a small synthetic scene as MAT-files for spectrasphere demos.
"""
import os

import numpy as np
from scipy.io import savemat


def create_sample_scene(output_dir="data", height=40, width=40, bands=30, seed=42):
    """
    Write a cube and its ground truth as two MAT-files.

    Three materials with distinct spectral shapes are painted into vertical
    stripes; a border of unlabelled background surrounds them.
    """
    os.makedirs(output_dir, exist_ok=True)
    rng = np.random.default_rng(seed)

    wavelengths = np.linspace(0.0, 1.0, bands)
    signatures = np.stack([
        1.0 + 0.5 * wavelengths,
        1.5 - 0.8 * wavelengths,
        1.0 + 0.3 * np.sin(6 * np.pi * wavelengths),
    ])

    labels = np.zeros((height, width), dtype=np.uint8)
    stripe = (width - 4) // 3
    for k in range(3):
        labels[2:height - 2, 2 + k * stripe:2 + (k + 1) * stripe] = k + 1

    cube = 0.05 * rng.standard_normal((height, width, bands))
    for k in range(3):
        cube[labels == k + 1] += signatures[k] * rng.uniform(0.9, 1.1, size=(int(np.sum(labels == k + 1)), 1))

    cube_path = os.path.join(output_dir, "stripes.mat")
    gt_path = os.path.join(output_dir, "stripes_gt.mat")
    savemat(cube_path, {"stripes": cube}, do_compression=True)
    savemat(gt_path, {"stripes_gt": labels})

    print(f"Scene written to {cube_path} and {gt_path}")
    print(f"Labelled pixels per class: {dict(zip(*np.unique(labels[labels > 0], return_counts=True)))}")
    return cube_path, gt_path


if __name__ == "__main__":
    create_sample_scene()
