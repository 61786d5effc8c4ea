"""
Support Vector Data Description in an already-projected space.

Solves

    max_a  sum_i a_i <y_i, y_i> - sum_ij a_i a_j <y_i, y_j>
    s.t.   sum_i a_i = 1,  0 <= a_i <= C

with pairwise (SMO) ascent, then derives the centre, the squared radius and
the distance rule used at test time. Samples are columns of ``Y`` (d x N).
"""
import logging
import warnings
from dataclasses import dataclass, field
from typing import List

import numpy as np

from spectrasphere.exceptions import (
    DegenerateKernel, DidNotConverge, DimensionMismatch, InfeasiblePenalty
)

logger = logging.getLogger(__name__)

KKT_TOL = 1e-6
BOUND_TOL = 1e-9
# slack on the C >= 1/N feasibility check
FEASIBILITY_SLACK = 1e-12
DISTANCE_CHECK_TOL = 1e-8

TARGET = 1
OUTLIER = -1


class SmoSolver:
    """
    Pairwise ascent on the SVDD dual.

    Each step moves weight from the sample whose gradient most wants to
    shed it to the one that most wants to gain it, solves the 1-D problem
    along that direction exactly and clips to the box. The equality
    constraint holds by construction.
    """

    def __init__(self, C, tol=KKT_TOL, max_iter=None, track_objective=False):
        """
        Initialise the solver.

        Args:
            C: Upper bound on each dual weight
            tol: KKT residual at which the solver stops
            max_iter: Iteration cap (defaults to 100 * N)
            track_objective: Record the dual objective after every step
        """
        if tol <= 0:
            raise ValueError(f"tol must be positive, got {tol}")
        self.C = C
        self.tol = tol
        self.max_iter = max_iter
        self.track_objective = track_objective
        self.n_iter = 0
        self.converged = False
        self.kkt_residual = np.inf
        self.objective_history: List[float] = []

    def solve(self, K):
        """
        Maximise the dual for a Gram matrix.

        Args:
            K: Gram matrix (N x N) of the projected samples

        Returns:
            Dual weights of length N
        """
        n = K.shape[0]
        if n < 1:
            raise ValueError("Cannot solve the dual for zero samples")
        if self.C < 1.0 / n - FEASIBILITY_SLACK:
            raise InfeasiblePenalty(self.C, n)
        if not np.all(np.isfinite(K)):
            raise DegenerateKernel("Gram matrix holds non-finite entries")

        C = min(self.C, 1.0)
        diag = np.diag(K).copy()
        alphas = np.full(n, 1.0 / n)
        # gradient of the minimised form a'Ka - diag'a
        grad = 2.0 * K @ alphas - diag
        max_iter = self.max_iter if self.max_iter is not None else 100 * n

        self.n_iter = 0
        self.converged = False
        self.objective_history = []
        if self.track_objective:
            self.objective_history.append(_objective_from_grad(alphas, grad, diag))

        while True:
            can_grow = alphas < C - BOUND_TOL
            can_shrink = alphas > BOUND_TOL
            if not np.any(can_grow) or not np.any(can_shrink):
                self.kkt_residual = 0.0
                self.converged = True
                break

            i = int(np.argmin(np.where(can_grow, grad, np.inf)))
            j = int(np.argmax(np.where(can_shrink, grad, -np.inf)))
            self.kkt_residual = float(grad[j] - grad[i])
            if self.kkt_residual <= self.tol:
                self.converged = True
                break
            if self.n_iter >= max_iter:
                break

            old_i, old_j = alphas[i], alphas[j]
            room = C - old_i
            curvature = 2.0 * (K[i, i] + K[j, j] - 2.0 * K[i, j])
            step = min(room, old_j)
            if curvature > 0:
                step = min(self.kkt_residual / curvature, step)

            # clipped coordinates land exactly on their bound
            alphas[i] = C if step >= room else old_i + step
            alphas[j] = 0.0 if step >= old_j else old_j - step
            grad += 2.0 * ((alphas[i] - old_i) * K[:, i] - (old_j - alphas[j]) * K[:, j])
            self.n_iter += 1

            if self.track_objective:
                self.objective_history.append(_objective_from_grad(alphas, grad, diag))

        if not self.converged:
            message = (
                f"SVDD dual stopped after {self.n_iter} iterations with KKT residual "
                f"{self.kkt_residual:.3g} > {self.tol:g}"
            )
            logger.warning(message)
            warnings.warn(message, DidNotConverge)
        else:
            logger.debug(f"SVDD dual converged in {self.n_iter} iterations")

        return alphas


def _objective_from_grad(alphas, grad, diag):
    # L = diag'a - a'Ka and grad = 2Ka - diag, so L = a'(diag - grad) / 2
    return float(alphas @ (diag - grad) / 2.0)


def gram_matrix(Y):
    """Inner products between the columns of Y."""
    return Y.T @ Y


def dual_objective(Y, alphas):
    """Value of the dual objective for weights ``alphas``."""
    norms = np.einsum('ij,ij->j', Y, Y)
    center = Y @ alphas
    return float(alphas @ norms - center @ center)


def solve_dual(Y, C, tol=KKT_TOL, max_iter=None):
    """
    Solve the SVDD dual for projected samples.

    Args:
        Y: Projected samples, shape (d, N)
        C: Penalty; must be at least 1/N
        tol: KKT residual tolerance
        max_iter: Iteration cap (defaults to 100 * N)

    Returns:
        Dual weights of length N

    Raises:
        InfeasiblePenalty: If C < 1/N
        DegenerateKernel: If the Gram matrix is not finite
    """
    solver = SmoSolver(C, tol=tol, max_iter=max_iter)
    return solver.solve(gram_matrix(Y))


def boundary_indices(alphas, C, tol=BOUND_TOL):
    """Indices of samples with tol < alpha < C - tol."""
    return np.flatnonzero((alphas > tol) & (alphas < C - tol))


def squared_distances(Y, center):
    """Squared distances of the columns of Y to ``center``."""
    diff = Y - center[:, np.newaxis]
    return np.einsum('ij,ij->j', diff, diff)


def center_and_radius(Y, alphas, C, tol=BOUND_TOL):
    """
    Centre and squared radius of the hypersphere.

    The radius is the mean squared distance of the boundary support vectors.
    If none exists (every weight sits on a bound) the largest distance among
    support vectors is used.

    Args:
        Y: Projected samples, shape (d, N)
        alphas: Dual weights
        C: Penalty used to obtain the weights
        tol: Tolerance for treating a weight as being on a bound

    Returns:
        Tuple of (centre, squared radius)
    """
    center = Y @ alphas
    distances = squared_distances(Y, center)
    boundary = boundary_indices(alphas, C, tol)
    if len(boundary):
        radius_sq = float(np.mean(distances[boundary]))
    else:
        support = np.flatnonzero(alphas > tol)
        radius_sq = float(np.max(distances[support]))
    return center, max(radius_sq, 0.0)


@dataclass(frozen=True)
class SvddSolution:
    """
    A solved data description.

    Attributes:
        alphas: Dual weights
        center: Hypersphere centre
        radius_sq: Squared radius
        boundary_indices: Samples with 0 < alpha < C
        penalty_C: The C used
        objective: Final dual objective
        converged: Whether the solver reached the KKT tolerance
        radius_fallback: True when no boundary support vector existed
    """
    alphas: np.ndarray
    center: np.ndarray
    radius_sq: float
    boundary_indices: np.ndarray
    penalty_C: float
    objective: float = 0.0
    converged: bool = True
    radius_fallback: bool = False
    n_iter: int = field(default=0, compare=False)

    def to_dict(self):
        return {
            "alphas": self.alphas.tolist(),
            "center": self.center.tolist(),
            "radius_sq": self.radius_sq,
            "boundary_indices": self.boundary_indices.tolist(),
            "penalty_C": self.penalty_C,
            "objective": self.objective,
            "converged": self.converged,
            "radius_fallback": self.radius_fallback,
            "n_iter": self.n_iter,
        }

    @classmethod
    def from_dict(cls, payload):
        return cls(
            alphas=np.asarray(payload["alphas"], dtype=np.float64),
            center=np.asarray(payload["center"], dtype=np.float64),
            radius_sq=float(payload["radius_sq"]),
            boundary_indices=np.asarray(payload["boundary_indices"], dtype=np.int64),
            penalty_C=float(payload["penalty_C"]),
            objective=float(payload.get("objective", 0.0)),
            converged=bool(payload.get("converged", True)),
            radius_fallback=bool(payload.get("radius_fallback", False)),
            n_iter=int(payload.get("n_iter", 0)),
        )


def fit_svdd(Y, C, tol=KKT_TOL):
    """
    Solve the dual and package the description.

    Args:
        Y: Projected samples, shape (d, N)
        C: Penalty
        tol: KKT residual tolerance

    Returns:
        SvddSolution
    """
    solver = SmoSolver(C, tol=tol)
    alphas = solver.solve(gram_matrix(Y))
    center, radius_sq = center_and_radius(Y, alphas, C)
    boundary = boundary_indices(alphas, C)
    if not len(boundary):
        logger.warning(f"No boundary support vector at C={C}; radius taken from the farthest support vector")
    return SvddSolution(
        alphas=alphas,
        center=center,
        radius_sq=radius_sq,
        boundary_indices=boundary,
        penalty_C=C,
        objective=dual_objective(Y, alphas),
        converged=solver.converged,
        radius_fallback=not len(boundary),
        n_iter=solver.n_iter,
    )


def distance_sq(y_star, sol, Y):
    """
    Squared distance of test projections to the centre, in kernel-expansion form.

    Args:
        y_star: A d-vector or a (d, M) matrix of projected test samples
        sol: SvddSolution
        Y: Training projections, shape (d, N)

    Returns:
        A scalar for a vector input, an M-vector for a matrix input

    Raises:
        DimensionMismatch: If the dimensions do not agree
    """
    y_star = np.asarray(y_star, dtype=np.float64)
    single = y_star.ndim == 1
    Ys = y_star[:, np.newaxis] if single else y_star
    if Ys.shape[0] != Y.shape[0] or Y.shape[1] != sol.alphas.shape[0]:
        raise DimensionMismatch(
            f"Projection dims {Ys.shape[0]} / training {Y.shape} do not match a solution over "
            f"{sol.alphas.shape[0]} samples"
        )

    weighted = Y @ sol.alphas
    dist = (np.einsum('ij,ij->j', Ys, Ys)
            - 2.0 * (weighted @ Ys)
            + weighted @ weighted)

    if logger.isEnabledFor(logging.DEBUG):
        direct = squared_distances(Ys, sol.center)
        gap = float(np.max(np.abs(direct - dist))) if dist.size else 0.0
        if gap > DISTANCE_CHECK_TOL * max(1.0, float(np.max(np.abs(direct)))):
            logger.debug(f"Expansion and direct distances differ by {gap:.3g}")

    return float(dist[0]) if single else dist


def classify(dist_sq, radius_sq, tol=0.0):
    """
    Label samples by their distance to the centre.

    Args:
        dist_sq: Squared distance (scalar or array)
        radius_sq: Squared radius
        tol: Allowance added to the radius

    Returns:
        TARGET (1) where dist_sq <= radius_sq + tol, otherwise OUTLIER (-1)
    """
    labels = np.where(np.asarray(dist_sq) <= radius_sq + tol, TARGET, OUTLIER)
    return int(labels) if labels.ndim == 0 else labels
