"""
Synthetic scenes with a known structure, for demos and tests.
"""
import numpy as np

from spectrasphere.data.scene import Dataset

TARGET_LABEL = 1
OUTLIER_LABEL = 2


def make_disc_dataset(n_target=200, n_outlier=200, n_bands=20, disc_std=0.1,
                      ring_radius=1.0, ring_jitter=0.02, noise_std=1.0, seed=0):
    """
    Target class concentrated in a 2-D disc, outliers on a surrounding ring.

    Bands 0 and 1 carry the disc (Gaussian, ``disc_std``) and the ring
    (radius ``ring_radius``); the remaining bands are the same noise for both
    classes, so only the first two bands separate them.

    Returns:
        Dataset with labels 1 (target) and 2 (outlier)
    """
    rng = np.random.default_rng(seed)
    target = rng.normal(0.0, noise_std, size=(n_target, n_bands))
    target[:, :2] = rng.normal(0.0, disc_std, size=(n_target, 2))

    outlier = rng.normal(0.0, noise_std, size=(n_outlier, n_bands))
    angles = rng.uniform(0.0, 2 * np.pi, size=n_outlier)
    radii = ring_radius + rng.normal(0.0, ring_jitter, size=n_outlier)
    outlier[:, 0] = radii * np.cos(angles)
    outlier[:, 1] = radii * np.sin(angles)

    X = np.vstack([target, outlier])
    y = np.concatenate([np.full(n_target, TARGET_LABEL), np.full(n_outlier, OUTLIER_LABEL)])
    return Dataset(X=X, y=y.astype(np.int64), class_names={TARGET_LABEL: "disc", OUTLIER_LABEL: "ring"})


def make_halo_dataset(n_target=150, n_outlier=150, n_bands=10, halo_scale=10.0,
                      offset=0.0, seed=0):
    """
    Standard-normal target class against a wide Gaussian halo.

    The outliers are N(offset, halo_scale^2 I). Both classes are isotropic, so
    every orthonormal projection sees the same separation problem.

    Returns:
        Dataset with labels 1 (target) and 2 (outlier)
    """
    rng = np.random.default_rng(seed)
    target = rng.normal(0.0, 1.0, size=(n_target, n_bands))
    outlier = offset + rng.normal(0.0, halo_scale, size=(n_outlier, n_bands))

    X = np.vstack([target, outlier])
    y = np.concatenate([np.full(n_target, TARGET_LABEL), np.full(n_outlier, OUTLIER_LABEL)])
    return Dataset(X=X, y=y.astype(np.int64), class_names={TARGET_LABEL: "core", OUTLIER_LABEL: "halo"})
