# bath_modes/linalg_kernels.py
"""
Numerical kernels: column-pivoted-QR interpolative decomposition,
Lawson-Hanson nonnegative least squares, and Gauss rules for a
nonstandard weight via discretized Stieltjes (Lanczos) + Golub-Welsch.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike

from .exceptions import (DomainError, EigenSolverError, JacobiBreakdownError,
                         NnlsIterationError)

logger = logging.getLogger(__name__)

NORM_ESTIMATE_ITERATIONS = 20
NORM_ESTIMATE_SEED = 20240601

GAUSS_PANEL_ORDER = 20
STIELTJES_OVERSAMPLING = 10
STIELTJES_STABLE_TOL = 1e-12
STIELTJES_MAX_DOUBLINGS = 8


# ---------------------------------------------------------------------------
# Interpolative decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdFactorization:
    selected_columns: np.ndarray
    interpolation: np.ndarray
    residual_norm: float
    matrix_norm: float
    tolerance_reached: bool = True
    # set when the requested rank exceeded the numerical rank of A
    requested_rank: Optional[int] = None

    @property
    def rank(self) -> int:
        return int(self.selected_columns.size)

    @property
    def truncated(self) -> bool:
        return self.requested_rank is not None and self.requested_rank > self.rank


def estimate_norm(A: np.ndarray, iterations: int = NORM_ESTIMATE_ITERATIONS) -> float:
    """Spectral-norm estimate by power iteration on A^T A with a fixed seed"""
    if A.size == 0:
        return 0.0
    rng = np.random.default_rng(NORM_ESTIMATE_SEED)
    v = rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iterations):
        w = A.T @ (A @ v)
        norm_w = np.linalg.norm(w)
        if norm_w == 0:
            return 0.0
        estimate = math.sqrt(norm_w)
        v = w / norm_w
    return estimate


def numerical_rank(R: np.ndarray) -> int:
    """Count of pivots |R_kk| above max(shape) * eps * |R_00|"""
    pivots = np.abs(np.diag(R))
    if pivots.size == 0 or pivots[0] == 0:
        return 0
    cutoff = max(R.shape) * np.finfo(float).eps * pivots[0]
    return int(np.count_nonzero(pivots > cutoff))


def id_decompose(A: ArrayLike, rank: Optional[int] = None, tolerance: Optional[float] = None,
                 max_rank: Optional[int] = None) -> IdFactorization:
    """
    Column ID A ~ A[:, cols] @ P from LAPACK column-pivoted QR.

    Exactly one of ``rank`` / ``tolerance`` selects the mode. In tolerance
    mode the smallest rank with ||R22||_2 <= tolerance * ||A||_2 is found by
    bisection over the (nonincreasing) trailing-block norms, optionally
    capped by ``max_rank``. A rank beyond the numerical rank of A is cut
    back to it and reported through ``requested_rank``.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or not np.all(np.isfinite(A)):
        raise DomainError("id_decompose needs a finite 2-D real matrix")
    if (rank is None) == (tolerance is None):
        raise DomainError("give exactly one of rank or tolerance")
    if not np.any(A):
        raise DomainError("id_decompose needs a nonzero matrix")

    n_rows, n_cols = A.shape
    full = min(n_rows, n_cols)
    R, perm = scipy.linalg.qr(A, mode='r', pivoting=True)
    R = R[:full]
    matrix_norm = estimate_norm(A)
    numerical = numerical_rank(R)
    reached = True

    if rank is not None:
        if not 1 <= rank <= full:
            raise DomainError(f"rank must be in [1, {full}], got {rank}")
        wanted = int(rank)
    else:
        if not tolerance > 0:
            raise DomainError(f"tolerance must be > 0, got {tolerance!r}")
        target = tolerance * matrix_norm
        lo, hi = 1, numerical
        while lo < hi:
            mid = (lo + hi) // 2
            if estimate_norm(R[mid:, mid:]) <= target:
                hi = mid
            else:
                lo = mid + 1
        wanted = lo
        cap = full if max_rank is None else min(max_rank, full)
        if wanted > cap:
            logger.warning("ID tolerance %.3e not reached within rank %d", tolerance, cap)
            wanted = cap

    r = min(wanted, numerical)
    if r < wanted:
        logger.warning("ID rank %d exceeds the numerical rank %d; using %d", wanted, numerical, r)
    residual = estimate_norm(R[r:, r:])
    if tolerance is not None:
        reached = bool(residual <= tolerance * matrix_norm)

    T = scipy.linalg.solve_triangular(R[:r, :r], R[:r, r:], lower=False)
    P = np.zeros((r, n_cols))
    P[:, perm[:r]] = np.eye(r)
    P[:, perm[r:]] = T
    return IdFactorization(perm[:r].copy(), P, residual, matrix_norm, reached,
                           wanted if r < wanted else None)


# ---------------------------------------------------------------------------
# Nonnegative least squares
# ---------------------------------------------------------------------------

def kkt_residual(B: np.ndarray, c: np.ndarray, z: np.ndarray) -> float:
    """Largest KKT violation: w_k for inactive entries, |w_k| for active ones"""
    w = B.T @ (c - B @ z)
    active = z > 0
    violations = np.concatenate([np.abs(w[active]), np.maximum(w[~active], 0.0)])
    return float(violations.max()) if violations.size else 0.0


def nnls_tolerance(B: np.ndarray, c: np.ndarray) -> float:
    return 1e-10 * float(np.max(np.abs(B.T @ c)))


def nnls(B: ArrayLike, c: ArrayLike, max_iter: Optional[int] = None) -> np.ndarray:
    """Lawson-Hanson active-set solution of min ||c - Bz||_2 s.t. z >= 0"""
    B = np.asarray(B, dtype=float)
    c = np.asarray(c, dtype=float)
    if B.ndim != 2 or c.ndim != 1 or B.shape[0] != c.shape[0]:
        raise DomainError(f"nnls shapes do not match: B {B.shape}, c {c.shape}")

    n = B.shape[1]
    max_iter = max_iter or max(3 * n, 30)
    tau = nnls_tolerance(B, c)
    z = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    # indices refused by the inner solve until z changes again
    blocked = np.zeros(n, dtype=bool)
    iterations = 0

    while True:
        w = B.T @ (c - B @ z)
        candidates = ~passive & ~blocked
        if not np.any(candidates) or np.max(w[candidates]) <= tau:
            break
        if iterations >= max_iter:
            raise NnlsIterationError(z, kkt_residual(B, c, z), max_iter)
        iterations += 1

        j = int(np.flatnonzero(candidates)[np.argmax(w[candidates])])
        passive[j] = True
        z_before = z.copy()

        while np.any(passive):
            s = np.zeros(n)
            s[passive] = np.linalg.lstsq(B[:, passive], c, rcond=None)[0]
            if np.all(s[passive] > 0):
                z = s
                break
            shrink = np.flatnonzero(passive & (s <= 0))
            ratios = z[shrink] / (z[shrink] - s[shrink])
            k = int(np.argmin(ratios))
            z = z + ratios[k] * (s - z)
            z[shrink[k]] = 0.0
            passive &= z > 0
            z[~passive] = 0.0

        if not passive[j] and np.array_equal(z, z_before):
            # j cannot enter numerically; skip it until z moves
            blocked[j] = True
        else:
            blocked[:] = False

    z[z < 0] = 0.0
    return z


# ---------------------------------------------------------------------------
# Gauss rules for a nonstandard weight
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JacobiMatrix:
    """alpha_0..alpha_{M-1}, eta_1..eta_{M-1} (squared off-diagonals), total weight"""
    alpha: np.ndarray
    eta: np.ndarray
    total_weight: float

    @property
    def size(self) -> int:
        return int(self.alpha.size)

    def assemble(self) -> np.ndarray:
        off = np.sqrt(self.eta)
        return np.diag(self.alpha) + np.diag(off, 1) + np.diag(off, -1)


def _composite_gauss_legendre(breaks: np.ndarray, panels: int):
    """Composite Gauss-Legendre nodes/weights, ``panels`` panels per segment"""
    x, w = np.polynomial.legendre.leggauss(GAUSS_PANEL_ORDER)
    nodes, weights = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        edges = np.linspace(a, b, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        nodes.append((mid[:, None] + half[:, None] * x[None, :]).ravel())
        weights.append((half[:, None] * w[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def _lanczos(nodes: np.ndarray, weights: np.ndarray, size: int):
    """Recurrence coefficients of the discrete measure sum_i weights_i delta(x - nodes_i)"""
    total = float(weights.sum())
    Q = np.zeros((nodes.size, size + 1))
    Q[:, 0] = np.sqrt(weights / total)
    alpha = np.zeros(size)
    beta = np.zeros(size)
    for k in range(size):
        v = nodes * Q[:, k]
        alpha[k] = Q[:, k] @ v
        v -= alpha[k] * Q[:, k]
        if k > 0:
            v -= beta[k] * Q[:, k - 1]
        # full reorthogonalization, twice is enough
        for _ in range(2):
            v -= Q[:, :k + 1] @ (Q[:, :k + 1].T @ v)
        if k + 1 < size:
            beta[k + 1] = np.linalg.norm(v)
            if not beta[k + 1] > 0:
                raise JacobiBreakdownError(k + 1, beta[k + 1] ** 2)
            Q[:, k + 1] = v / beta[k + 1]
    return alpha, beta[1:] ** 2, total


def stieltjes_jacobi(weight: Callable[[np.ndarray], np.ndarray], omega_min: float,
                     omega_max: float, size: int) -> JacobiMatrix:
    """
    Jacobi matrix of the polynomials orthonormal under ``weight`` on
    [omega_min, omega_max]. The weight is sampled on a composite
    Gauss-Legendre grid (10x oversampled), the discrete measure is run
    through Lanczos, and the grid is doubled until the coefficients are
    stable to 1e-12.
    """
    if size < 1:
        raise DomainError(f"Jacobi matrix size must be >= 1, got {size}")
    if not omega_min < omega_max:
        raise DomainError(f"need omega_min < omega_max, got [{omega_min}, {omega_max}]")

    inner = getattr(weight, 'breakpoints', None)
    cuts = [omega_min, omega_max] + (inner(omega_min, omega_max) if inner else [])
    breaks = np.array(sorted(set(cuts)))
    scale = max(abs(omega_min), abs(omega_max))
    panels = max(1, math.ceil(STIELTJES_OVERSAMPLING * size / (GAUSS_PANEL_ORDER * (breaks.size - 1))))

    previous = None
    for _ in range(STIELTJES_MAX_DOUBLINGS + 1):
        nodes, gl_weights = _composite_gauss_legendre(breaks, panels)
        values = np.asarray(weight(nodes), dtype=float)
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise DomainError("Gauss weight must be finite and nonnegative on the interval")
        w = gl_weights * values
        support = w > 0
        if np.count_nonzero(support) < size:
            raise JacobiBreakdownError(np.count_nonzero(support), 0.0)
        current = _lanczos(nodes[support], w[support], size)
        if previous is not None:
            d_alpha = np.max(np.abs(current[0] - previous[0]), initial=0.0) / scale
            d_eta = np.max(np.abs(current[1] - previous[1]), initial=0.0) / scale ** 2
            if max(d_alpha, d_eta) <= STIELTJES_STABLE_TOL:
                break
        previous = current
        panels *= 2
    else:
        logger.warning("Stieltjes coefficients not stable to %.0e after %d doublings",
                       STIELTJES_STABLE_TOL, STIELTJES_MAX_DOUBLINGS)

    alpha, eta, total = current
    return JacobiMatrix(alpha, eta, total)


def golub_welsch(jacobi: JacobiMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Gauss nodes (ascending) and Christoffel weights total_weight * U[0, k]^2"""
    if jacobi.size == 1:
        return jacobi.alpha.copy(), np.array([jacobi.total_weight])
    try:
        nodes, vectors = scipy.linalg.eigh_tridiagonal(jacobi.alpha, np.sqrt(jacobi.eta))
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise EigenSolverError(f"tridiagonal eigensolver failed: {exc}") from exc
    weights = jacobi.total_weight * vectors[0, :] ** 2
    return nodes, weights
