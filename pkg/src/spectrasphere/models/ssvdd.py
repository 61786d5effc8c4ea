"""
Subspace SVDD.

Learns a d x D projection Q jointly with a data description of the target
class: each iteration projects the data, solves the SVDD dual in the
subspace and moves Q along the gradient of the augmented Lagrangian.
Samples are columns (D x N) throughout this module.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional

import numpy as np
from scipy import linalg

from spectrasphere.data.standardizer import StandardizationStats, apply_standardizer, fit_standardizer
from spectrasphere.exceptions import (
    DimensionMismatch, InvalidHyperparams, NonFiniteProjection, RankDeficient
)
from spectrasphere.models.npt import DEFAULT_CUTOFF_RATIO, NptState, fit_npt_from_samples, transform_test
from spectrasphere.models.svdd import (
    BOUND_TOL, KKT_TOL, SmoSolver, SvddSolution, classify, dual_objective, distance_sq, fit_svdd, gram_matrix
)

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10
MAX_INIT_ATTEMPTS = 3


class PsiVariant(str, Enum):
    """How the regulariser weighs each training sample."""
    PSI0 = "psi0"  # no regularisation
    PSI1 = "psi1"  # every sample equally
    PSI2 = "psi2"  # every sample by its dual weight
    PSI3 = "psi3"  # boundary support vectors only


@dataclass(frozen=True)
class Variant:
    """A model family: linear or kernelised, with one regulariser."""
    kernelized: bool
    psi: PsiVariant

    @property
    def label(self):
        return f"{'nonlinear' if self.kernelized else 'linear'}-{self.psi.value}"

    @classmethod
    def parse(cls, label):
        """
        Parse a label such as ``linear-psi0`` or ``nonlinear-psi3``.

        Raises:
            ValueError: If the label is not recognised
        """
        kind, _, psi = str(label).partition("-")
        if kind not in ("linear", "nonlinear"):
            raise ValueError(f"Unknown variant '{label}'; expected linear-psiN or nonlinear-psiN")
        try:
            return cls(kernelized=kind == "nonlinear", psi=PsiVariant(psi))
        except ValueError:
            raise ValueError(f"Unknown regulariser in variant '{label}'") from None

    def __str__(self):
        return self.label


ALL_VARIANTS = [Variant(kernelized, psi) for kernelized in (False, True) for psi in PsiVariant]


@dataclass(frozen=True)
class Hyperparams:
    """
    Hyperparameters of one S-SVDD fit.

    ``eta`` and ``beta`` may be zero (no update, no regularisation); every
    other scale must be positive. ``sigma`` is only read when ``kernelized``.
    """
    beta: float = 1.0
    C: float = 0.5
    sigma: float = 1.0
    d: int = 2
    eta: float = 0.1
    psi: PsiVariant = PsiVariant.PSI0
    kernelized: bool = False
    max_iter: int = 10
    seed: int = 0
    orthonormalize_each_step: bool = True
    npt_cutoff: float = DEFAULT_CUTOFF_RATIO

    def __post_init__(self):
        object.__setattr__(self, "psi", PsiVariant(self.psi))
        errors = []
        if int(self.d) != self.d or self.d < 1:
            errors.append(f"d must be a positive integer, got {self.d}")
        if not self.C > 0:
            errors.append(f"C must be positive, got {self.C}")
        if not self.sigma > 0:
            errors.append(f"sigma must be positive, got {self.sigma}")
        if not self.beta >= 0:
            errors.append(f"beta must be non-negative, got {self.beta}")
        if not self.eta >= 0:
            errors.append(f"eta must be non-negative, got {self.eta}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            errors.append(f"max_iter must be a positive integer, got {self.max_iter}")
        if not 0.0 < self.npt_cutoff < 1.0:
            errors.append(f"npt_cutoff must lie in (0, 1), got {self.npt_cutoff}")
        if errors:
            raise InvalidHyperparams("; ".join(errors))
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "max_iter", int(self.max_iter))

    @property
    def variant(self):
        return Variant(self.kernelized, self.psi)

    def sort_key(self):
        """Ordering from simpler to more complex models, used to break ties."""
        return (self.d, self.C, self.beta, self.eta, self.sigma)

    def with_variant(self, variant):
        return replace(self, kernelized=variant.kernelized, psi=variant.psi)

    def to_dict(self):
        return {
            "beta": self.beta,
            "C": self.C,
            "sigma": self.sigma,
            "d": self.d,
            "eta": self.eta,
            "psi": self.psi.value,
            "kernelized": self.kernelized,
            "max_iter": self.max_iter,
            "seed": self.seed,
            "orthonormalize_each_step": self.orthonormalize_each_step,
            "npt_cutoff": self.npt_cutoff,
        }

    @classmethod
    def from_dict(cls, payload):
        known = {name for name in cls.__dataclass_fields__}
        unknown = set(payload) - known
        if unknown:
            raise InvalidHyperparams(f"Unknown hyperparameters: {sorted(unknown)}")
        return cls(**payload)


def init_projection(d, D, seed):
    """
    Seeded random orthonormal projection.

    Args:
        d: Subspace dimension
        D: Input dimension, d <= D
        seed: Integer seed or a numpy Generator

    Returns:
        Array of shape (d, D) with orthonormal rows
    """
    if not 1 <= d <= D:
        raise InvalidHyperparams(f"Subspace dimension d={d} must satisfy 1 <= d <= D={D}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return orthonormalize(rng.standard_normal((d, D)))


def orthonormalize(Q):
    """
    Orthonormalise the rows of Q without changing their span.

    QR of Q' with the signs fixed so that R has a positive diagonal, then
    l2 row normalisation. An already orthonormal Q comes back unchanged up
    to round-off.

    Raises:
        RankDeficient: If the rows of Q are numerically dependent
    """
    Q = np.asarray(Q, dtype=np.float64)
    if not np.all(np.isfinite(Q)):
        raise NonFiniteProjection("Projection matrix holds non-finite entries")
    basis, R = linalg.qr(Q.T, mode="economic")
    diag = np.diag(R)
    smallest = float(np.min(np.abs(diag))) if diag.size else 0.0
    if smallest < RANK_TOL:
        raise RankDeficient(f"Projection has numerical rank below d={Q.shape[0]} (|R_ii| min {smallest:.3g})")
    signs = np.where(diag < 0, -1.0, 1.0)
    Q_new = (basis * signs).T
    return Q_new / np.linalg.norm(Q_new, axis=1, keepdims=True)


def lambda_weights(psi, alphas, C, tol=BOUND_TOL):
    """
    Per-sample regulariser weights.

    psi0 gives zeros, psi1 ones, psi2 the dual weights and psi3 the dual
    weights of boundary support vectors (tol < alpha < C - tol) only.
    """
    psi = PsiVariant(psi)
    alphas = np.asarray(alphas, dtype=np.float64)
    if psi is PsiVariant.PSI0:
        return np.zeros_like(alphas)
    if psi is PsiVariant.PSI1:
        return np.ones_like(alphas)
    if psi is PsiVariant.PSI2:
        return alphas.copy()
    boundary = (alphas > tol) & (alphas < C - tol)
    return np.where(boundary, alphas, 0.0)


def _check_shapes(Q, X, *weights):
    if Q.ndim != 2 or X.ndim != 2 or Q.shape[1] != X.shape[0]:
        raise DimensionMismatch(f"Projection of shape {Q.shape} cannot act on samples of shape {X.shape}")
    for w in weights:
        if w.shape != (X.shape[1],):
            raise DimensionMismatch(f"Weight vector of shape {w.shape} does not match {X.shape[1]} samples")


def regularizer_value(Q, X, lambdas):
    """tr(Q X l l' X' Q') computed as ||Q X l||^2."""
    Q, X = np.asarray(Q, dtype=np.float64), np.asarray(X, dtype=np.float64)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    _check_shapes(Q, X, lambdas)
    v = Q @ (X @ lambdas)
    return float(v @ v)


def augmented_objective(Q, X, alphas, lambdas, beta):
    """
    Augmented Lagrangian as a function of Q for fixed dual weights.

    sum_i a_i ||Q x_i||^2 - ||Q X a||^2 + beta * ||Q X l||^2
    """
    Q, X = np.asarray(Q, dtype=np.float64), np.asarray(X, dtype=np.float64)
    alphas = np.asarray(alphas, dtype=np.float64)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    _check_shapes(Q, X, alphas, lambdas)
    Y = Q @ X
    center = Y @ alphas
    return float(np.einsum('ij,ij->j', Y, Y) @ alphas - center @ center + beta * regularizer_value(Q, X, lambdas))


def augmented_gradient(Q, X, alphas, lambdas, beta):
    """
    Gradient of the augmented Lagrangian with respect to Q.

    2 Q (X diag(a) X' - (X a)(X a)' + beta (X l)(X l)'), built from D x D
    products only.

    Args:
        Q: Projection, shape (d, D)
        X: Samples, shape (D, N)
        alphas: Dual weights, length N
        lambdas: Regulariser weights, length N
        beta: Regulariser weight

    Returns:
        Array of shape (d, D)
    """
    Q, X = np.asarray(Q, dtype=np.float64), np.asarray(X, dtype=np.float64)
    alphas = np.asarray(alphas, dtype=np.float64)
    lambdas = np.asarray(lambdas, dtype=np.float64)
    _check_shapes(Q, X, alphas, lambdas)

    scatter = (X * alphas) @ X.T
    m = X @ alphas
    v = X @ lambdas
    inner = scatter - np.outer(m, m) + beta * np.outer(v, v)
    return 2.0 * Q @ inner


@dataclass
class TrainingDiagnostics:
    """Per-iteration record of one training run."""
    dual_objective: List[float] = field(default_factory=list)
    psi: List[float] = field(default_factory=list)
    solver_iterations: List[int] = field(default_factory=list)
    solver_converged: List[bool] = field(default_factory=list)
    attempts: int = 1
    n_features: int = 0

    def to_dict(self):
        return {
            "dual_objective": list(self.dual_objective),
            "psi": list(self.psi),
            "solver_iterations": list(self.solver_iterations),
            "solver_converged": list(self.solver_converged),
            "attempts": self.attempts,
            "n_features": self.n_features,
        }

    @classmethod
    def from_dict(cls, payload):
        return cls(**payload)


@dataclass(frozen=True)
class Prediction:
    """Per-sample decisions: 1 for target, -1 for outlier."""
    labels: np.ndarray
    dist_sq: np.ndarray
    radius_sq: float

    @property
    def n_targets(self):
        return int(np.sum(self.labels == 1))


@dataclass(frozen=True)
class SsvddModel:
    """
    A trained S-SVDD model.

    Attributes:
        Q: Projection, shape (d, D') where D' is the band count or the NPT rank
        svdd: SvddSolution in the learned subspace
        stats: Standardisation applied to raw spectra
        npt: NptState when kernelised, otherwise None
        hp: Hyperparams used for training
        train_projections: Projected training samples, shape (d, N)
        diagnostics: TrainingDiagnostics
        target_class: Label of the target class, if known
    """
    Q: np.ndarray
    svdd: SvddSolution
    stats: StandardizationStats
    npt: Optional[NptState]
    hp: Hyperparams
    train_projections: np.ndarray
    diagnostics: TrainingDiagnostics
    target_class: Optional[int] = None

    @property
    def n_bands(self):
        return self.stats.n_bands

    @property
    def radius_sq(self):
        return self.svdd.radius_sq

    def project(self, X_new):
        """
        Map raw spectra (rows of ``X_new``) into the learned subspace.

        Returns:
            Array of shape (d, M)
        """
        X_new = np.asarray(X_new, dtype=np.float64)
        if X_new.ndim == 1:
            X_new = X_new[np.newaxis, :]
        if X_new.ndim != 2 or X_new.shape[1] != self.n_bands:
            raise DimensionMismatch(f"Model expects {self.n_bands} bands, got input of shape {X_new.shape}")
        features = apply_standardizer(self.stats, X_new).T
        if self.npt is not None:
            features = transform_test(self.npt, features)
        return self.Q @ features

    def predict(self, X_new):
        """
        Classify raw spectra.

        Args:
            X_new: Array of shape (M, D) with the model's band count

        Returns:
            Prediction
        """
        Y_star = self.project(X_new)
        dist = distance_sq(Y_star, self.svdd, self.train_projections)
        labels = classify(dist, self.svdd.radius_sq, tol=KKT_TOL)
        return Prediction(labels=labels, dist_sq=dist, radius_sq=self.svdd.radius_sq)


def train(X_target, hp, stats=None, target_class=None):
    """
    Fit an S-SVDD model on standardised target-class samples.

    Args:
        X_target: Standardised target samples, shape (D, N)
        hp: Hyperparams
        stats: Standardisation the samples went through (identity if omitted)
        target_class: Label recorded on the model

    Returns:
        SsvddModel

    Raises:
        InvalidHyperparams: If d does not fit the feature dimension
        RankDeficient: If three initialisations all collapsed
        NonFiniteProjection: If the updates diverged
        InfeasiblePenalty: If C < 1/N
    """
    X_target = np.asarray(X_target, dtype=np.float64)
    if X_target.ndim != 2:
        raise DimensionMismatch(f"Target samples must be a (D, N) matrix, got shape {X_target.shape}")
    n_bands, n_samples = X_target.shape
    if n_samples < 2:
        raise InvalidHyperparams(f"Training needs at least 2 target samples, got {n_samples}")
    if stats is None:
        stats = StandardizationStats.identity(n_bands)

    npt_state = None
    if hp.kernelized:
        npt_state, X = fit_npt_from_samples(X_target, hp.sigma, cutoff_ratio=hp.npt_cutoff)
        if hp.d > npt_state.rank:
            raise InvalidHyperparams(f"d={hp.d} exceeds the kernel space rank {npt_state.rank}")
    else:
        X = X_target
        if hp.d >= n_bands:
            raise InvalidHyperparams(f"Linear subspace dimension d={hp.d} must be below D={n_bands}")

    for attempt in range(MAX_INIT_ATTEMPTS):
        seed = hp.seed if attempt == 0 else np.random.default_rng([hp.seed, attempt])
        try:
            Q, diagnostics = _optimise_projection(X, hp, seed)
        except RankDeficient as e:
            logger.warning(f"Projection lost rank on attempt {attempt + 1}/{MAX_INIT_ATTEMPTS}: {e}")
            continue
        diagnostics.attempts = attempt + 1
        break
    else:
        raise RankDeficient(f"Projection lost rank in all {MAX_INIT_ATTEMPTS} initialisations")

    Y = Q @ X
    solution = fit_svdd(Y, hp.C)
    diagnostics.n_features = X.shape[0]
    logger.debug(
        f"Trained S-SVDD ({hp.variant}, d={hp.d}, C={hp.C}) on {n_samples} samples: "
        f"R^2={solution.radius_sq:.4g}, {len(solution.boundary_indices)} boundary SVs"
    )
    return SsvddModel(
        Q=Q,
        svdd=solution,
        stats=stats,
        npt=npt_state,
        hp=hp,
        train_projections=Y,
        diagnostics=diagnostics,
        target_class=target_class,
    )


def _optimise_projection(X, hp, seed):
    Q = init_projection(hp.d, X.shape[0], seed)
    diagnostics = TrainingDiagnostics()

    for iteration in range(hp.max_iter):
        Y = Q @ X
        solver = SmoSolver(hp.C)
        alphas = solver.solve(gram_matrix(Y))
        lambdas = lambda_weights(hp.psi, alphas, hp.C)

        diagnostics.dual_objective.append(dual_objective(Y, alphas))
        diagnostics.psi.append(regularizer_value(Q, X, lambdas))
        diagnostics.solver_iterations.append(solver.n_iter)
        diagnostics.solver_converged.append(solver.converged)

        Q = Q - hp.eta * augmented_gradient(Q, X, alphas, lambdas, hp.beta)
        if not np.all(np.isfinite(Q)):
            raise NonFiniteProjection(
                f"Projection became non-finite at iteration {iteration + 1} (eta={hp.eta}, beta={hp.beta})"
            )
        if hp.orthonormalize_each_step:
            Q = orthonormalize(Q)

    return Q, diagnostics


def train_on_dataset(ds, target_class, hp, stats=None):
    """
    Fit a model on the target-class rows of a dataset.

    Args:
        ds: Dataset with raw spectra
        target_class: Label of the target class
        hp: Hyperparams
        stats: Standardisation to use; fitted on the target rows when omitted

    Returns:
        SsvddModel
    """
    if stats is None:
        stats = fit_standardizer(ds, target_class)
    X_target = apply_standardizer(stats, ds.rows_of(target_class)).T
    return train(X_target, hp, stats=stats, target_class=target_class)
