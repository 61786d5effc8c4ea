"""
Nonlinear projection trick.

Maps samples to the explicit coordinates of a centred RBF kernel matrix's
eigenspace so that the linear subspace learner can act nonlinearly.
Samples are columns (D x N), as everywhere in the model code.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from sklearn.metrics.pairwise import rbf_kernel as sk_rbf_kernel
from sklearn.preprocessing import KernelCenterer

from spectrasphere.exceptions import DimensionMismatch, NoPositiveSpectrum

logger = logging.getLogger(__name__)

DEFAULT_CUTOFF_RATIO = 1e-9
# absolute floor on the leading eigenvalue; below it the centred kernel is treated as zero
EIGENVALUE_FLOOR = 1e-10


def rbf_kernel(A, B, sigma):
    """
    RBF kernel between the columns of A and B.

    K_ij = exp(-||a_i - b_j||^2 / (2 sigma^2))

    Args:
        A: Array of shape (D, m)
        B: Array of shape (D, n); pass the same object as A for a training kernel
        sigma: Kernel width, > 0

    Returns:
        Array of shape (m, n)
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    gamma = 1.0 / (2.0 * sigma ** 2)
    if B is A:
        # exact ones on the diagonal
        return sk_rbf_kernel(A.T, gamma=gamma)
    if A.shape[0] != B.shape[0]:
        raise DimensionMismatch(f"Kernel inputs have {A.shape[0]} and {B.shape[0]} features")
    return sk_rbf_kernel(A.T, B.T, gamma=gamma)


def center_kernel(K):
    """
    Double-centre a training kernel matrix: (I - J/N) K (I - J/N).
    """
    return KernelCenterer().fit_transform(np.asarray(K, dtype=np.float64))


@dataclass(frozen=True)
class NptState:
    """
    Everything needed to map new samples into the kernel eigenspace.

    Attributes:
        sigma: RBF width
        X_train: Training samples, shape (D, N)
        eigvecs: Kept eigenvectors U, shape (N, r)
        eigvals: Kept eigenvalues, descending and positive
        train_mean_kernel: Column means of the uncentred training kernel
        train_grand_mean: Grand mean of the uncentred training kernel
    """
    sigma: float
    X_train: np.ndarray
    eigvecs: np.ndarray
    eigvals: np.ndarray
    train_mean_kernel: np.ndarray
    train_grand_mean: float

    @property
    def rank(self):
        return self.eigvals.shape[0]

    def to_dict(self):
        return {
            "sigma": self.sigma,
            "X_train": self.X_train.tolist(),
            "eigvecs": self.eigvecs.tolist(),
            "eigvals": self.eigvals.tolist(),
            "train_mean_kernel": self.train_mean_kernel.tolist(),
            "train_grand_mean": self.train_grand_mean,
        }

    @classmethod
    def from_dict(cls, payload):
        return cls(
            sigma=float(payload["sigma"]),
            X_train=np.asarray(payload["X_train"], dtype=np.float64),
            eigvecs=np.asarray(payload["eigvecs"], dtype=np.float64),
            eigvals=np.asarray(payload["eigvals"], dtype=np.float64),
            train_mean_kernel=np.asarray(payload["train_mean_kernel"], dtype=np.float64),
            train_grand_mean=float(payload["train_grand_mean"]),
        )


def fit_npt(K, cutoff_ratio=DEFAULT_CUTOFF_RATIO, X_train=None, sigma=None):
    """
    Eigendecompose a centred training kernel.

    Args:
        K: Uncentred training kernel, shape (N, N)
        cutoff_ratio: Eigenpairs with eigenvalue <= cutoff_ratio * largest are dropped
        X_train: Training samples (D, N) kept for mapping test samples
        sigma: RBF width used to build K

    Returns:
        Tuple of (NptState, Phi) where Phi has shape (r, N) and Phi' Phi
        reproduces the centred kernel on the kept spectrum

    Raises:
        NoPositiveSpectrum: If no eigenvalue is positive
    """
    if not 0.0 < cutoff_ratio < 1.0:
        raise ValueError(f"cutoff_ratio must lie in (0, 1), got {cutoff_ratio}")

    centerer = KernelCenterer().fit(K)
    K_centred = centerer.transform(K)
    # symmetrise against round-off before the symmetric solver
    K_centred = (K_centred + K_centred.T) / 2.0

    eigvals, eigvecs = linalg.eigh(K_centred)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]

    leading = eigvals[0] if eigvals.size else 0.0
    if leading <= EIGENVALUE_FLOOR:
        raise NoPositiveSpectrum(
            f"Centred kernel has no positive spectrum (largest eigenvalue {leading:.3g}); "
            "the samples are identical or sigma is badly scaled"
        )

    keep = eigvals > cutoff_ratio * leading
    eigvals = eigvals[keep]
    eigvecs = eigvecs[:, keep]

    # deterministic signs: largest-magnitude entry of each eigenvector is positive
    pivots = np.argmax(np.abs(eigvecs), axis=0)
    signs = np.sign(eigvecs[pivots, np.arange(eigvecs.shape[1])])
    signs[signs == 0] = 1.0
    eigvecs = eigvecs * signs

    phi = np.sqrt(eigvals)[:, np.newaxis] * eigvecs.T
    logger.debug(f"NPT kept {eigvals.size} of {K.shape[0]} eigenpairs (cutoff ratio {cutoff_ratio:g})")

    state = NptState(
        sigma=float(sigma) if sigma is not None else float("nan"),
        X_train=X_train if X_train is not None else np.empty((0, K.shape[0])),
        eigvecs=eigvecs,
        eigvals=eigvals,
        train_mean_kernel=np.asarray(centerer.K_fit_rows_, dtype=np.float64),
        train_grand_mean=float(centerer.K_fit_all_),
    )
    return state, phi


def fit_npt_from_samples(X_train, sigma, cutoff_ratio=DEFAULT_CUTOFF_RATIO):
    """
    Build the training kernel of ``X_train`` (D x N) and fit the projection.

    Returns:
        Tuple of (NptState, Phi)
    """
    K = rbf_kernel(X_train, X_train, sigma)
    return fit_npt(K, cutoff_ratio=cutoff_ratio, X_train=X_train, sigma=sigma)


def center_test_kernel(state, k_star):
    """
    Centre test kernel columns with the training statistics.

    Args:
        state: NptState
        k_star: Uncentred kernel between training and test samples, shape (N, M)

    Returns:
        Centred kernel columns, shape (N, M)
    """
    return (k_star
            - state.train_mean_kernel[:, np.newaxis]
            - k_star.mean(axis=0)[np.newaxis, :]
            + state.train_grand_mean)


def transform_test(state, x_star):
    """
    Map test samples into the kernel eigenspace.

    Args:
        state: NptState
        x_star: A D-vector or a (D, M) matrix

    Returns:
        An r-vector for a vector input, an (r, M) matrix otherwise

    Raises:
        DimensionMismatch: If D differs from the training samples
    """
    x_star = np.asarray(x_star, dtype=np.float64)
    single = x_star.ndim == 1
    X_star = x_star[:, np.newaxis] if single else x_star
    if X_star.shape[0] != state.X_train.shape[0]:
        raise DimensionMismatch(
            f"Test samples have {X_star.shape[0]} features, the kernel was fitted on {state.X_train.shape[0]}"
        )

    k_star = rbf_kernel(state.X_train, X_star, state.sigma)
    k_centred = center_test_kernel(state, k_star)
    phi = (state.eigvecs.T @ k_centred) / np.sqrt(state.eigvals)[:, np.newaxis]
    return phi[:, 0] if single else phi
