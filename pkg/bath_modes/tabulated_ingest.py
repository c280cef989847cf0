# bath_modes/tabulated_ingest.py
"""
Tabulated spectral densities: reading, smoothing-spline denoising and AAA
barycentric rational surrogates.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike
from scipy.interpolate import make_smoothing_spline

from .exceptions import DomainError, RationalFitError
from .spectral_density import TabulatedSd

logger = logging.getLogger(__name__)

MIN_TABLE_POINTS = 8
DEFAULT_AAA_TOL = 1e-6
DEFAULT_AAA_MAX_DEGREE = 100
DEFAULT_OMEGA_FLOOR = 1.0


@dataclass(frozen=True)
class SdTable:
    omega: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if omega.ndim != 1 or omega.shape != values.shape:
            raise DomainError("SD table needs two 1-D columns of equal length")
        if omega.size < MIN_TABLE_POINTS:
            raise DomainError(f"SD table needs at least {MIN_TABLE_POINTS} points, got {omega.size}")
        if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(values))):
            raise DomainError("SD table contains non-finite entries")
        if np.any(np.diff(omega) <= 0):
            raise DomainError("SD table abscissae must be strictly increasing")
        object.__setattr__(self, 'omega', omega)
        object.__setattr__(self, 'values', values)


def read_table(path) -> SdTable:
    """Two numeric columns, comma- or whitespace-separated, '#' comments"""
    with open(path, 'r') as fh:
        data = np.loadtxt((line.replace(',', ' ') for line in fh), comments='#', ndmin=2)
    if data.shape[1] < 2:
        raise DomainError(f"{path}: expected two columns (omega_cm1, J_cm1)")
    return SdTable(data[:, 0], data[:, 1])


def smooth_table(table: SdTable, smoothing: Optional[float] = None) -> SdTable:
    """
    Cubic smoothing spline on the same abscissae. ``smoothing=None`` picks
    lambda by generalized cross-validation; ``0`` returns the table unchanged.
    """
    if smoothing is not None and smoothing < 0:
        raise DomainError(f"smoothing must be >= 0, got {smoothing!r}")
    if smoothing == 0:
        return table
    spline = make_smoothing_spline(table.omega, table.values, lam=smoothing)
    return SdTable(table.omega, spline(table.omega))


@dataclass(frozen=True)
class RationalInterpolant:
    """r(x) = sum_j w_j f_j / (x - z_j) / sum_j w_j / (x - z_j)"""
    support_points: np.ndarray
    support_values: np.ndarray
    barycentric_weights: np.ndarray

    def __call__(self, omega: ArrayLike):
        return eval_interpolant(self, omega)

    def poles(self) -> np.ndarray:
        z, w = self.support_points, self.barycentric_weights
        m = z.size
        if m < 2:
            return np.array([], dtype=complex)
        E = np.zeros((m + 1, m + 1))
        E[0, 1:] = w
        E[1:, 0] = 1.0
        E[1:, 1:] = np.diag(z)
        B = np.eye(m + 1)
        B[0, 0] = 0.0
        eigenvalues = scipy.linalg.eigvals(E, B)
        return eigenvalues[np.isfinite(eigenvalues)]

    def denominator(self, omega: ArrayLike) -> np.ndarray:
        """Polynomial denominator sum_j w_j prod_{k!=j} (x - z_k), scaled by the support span"""
        x = np.atleast_1d(np.asarray(omega, dtype=float))
        z, w = self.support_points, self.barycentric_weights
        span = max(np.ptp(z), 1.0)
        diffs = (x[:, None] - z[None, :]) / span
        total = np.zeros_like(x)
        for j in range(z.size):
            total += w[j] * np.prod(np.delete(diffs, j, axis=1), axis=1)
        return total


def eval_interpolant(r: RationalInterpolant, omega: ArrayLike):
    x = np.asarray(omega, dtype=float)
    flat = x.ravel()
    z, f, w = r.support_points, r.support_values, r.barycentric_weights
    with np.errstate(divide='ignore', invalid='ignore'):
        C = 1.0 / (flat[:, None] - z[None, :])
        values = (C @ (w * f)) / (C @ w)
    # exact at support points
    hit_rows, hit_cols = np.nonzero(flat[:, None] == z[None, :])
    values[hit_rows] = f[hit_cols]
    values = values.reshape(x.shape)
    return values.item() if x.ndim == 0 else values


def _solve_weights(omega, values, support):
    """Least-squares Loewner null vector for the given support indices"""
    mask = np.ones(omega.size, dtype=bool)
    mask[support] = False
    zj, fj = omega[support], values[support]
    C = 1.0 / (omega[mask, None] - zj[None, :])
    loewner = (values[mask, None] - fj[None, :]) * C
    full = loewner.shape[0] < loewner.shape[1]
    _, _, vh = np.linalg.svd(loewner, full_matrices=full)
    weights = vh[-1].copy()
    approx = values.copy()
    approx[mask] = (C @ (weights * fj)) / (C @ weights)
    return weights, approx


def _interior_poles(r: RationalInterpolant, lo: float, hi: float) -> np.ndarray:
    poles = r.poles()
    span = hi - lo
    near_axis = np.abs(poles.imag) <= 1e-6 * span
    inside = (poles.real >= lo) & (poles.real <= hi)
    return poles[near_axis & inside].real


def _clean_up(omega, values, support, weights):
    """Drop the support point nearest each in-range pole and re-solve"""
    lo, hi = omega[0], omega[-1]
    support = list(support)
    while len(support) > 1:
        r = RationalInterpolant(omega[support], values[support], weights)
        bad = _interior_poles(r, lo, hi)
        if bad.size == 0:
            return support, weights
        for pole in bad:
            nearest = int(np.argmin(np.abs(omega[support] - pole)))
            logger.info("AAA cleanup: pole at %.6g cm^-1 removes support point %.6g",
                        pole, omega[support[nearest]])
            support.pop(nearest)
            if len(support) == 1:
                break
        weights, _ = _solve_weights(omega, values, support)
    return support, np.ones(1) if len(support) == 1 else weights


def aaa_fit(table: SdTable, tol: float = DEFAULT_AAA_TOL,
            max_degree: int = DEFAULT_AAA_MAX_DEGREE) -> RationalInterpolant:
    """
    Greedy AAA fit of the table. Stops once max|F - r| <= tol * max|F| or
    the degree reaches ``max_degree`` (at most ``max_degree + 1`` support
    points). In-range poles are removed before returning.
    """
    if not tol > 0:
        raise DomainError(f"AAA tolerance must be > 0, got {tol!r}")
    if max_degree < 0:
        raise DomainError(f"max_degree must be >= 0, got {max_degree!r}")

    omega, values = table.omega, table.values
    scale = np.max(np.abs(values))
    if scale == 0:
        return RationalInterpolant(omega[:1].copy(), values[:1].copy(), np.ones(1))

    approx = np.full(values.shape, values.mean())
    support: list[int] = []
    best = None
    best_error = np.inf
    max_support = min(max_degree + 1, omega.size - 1)

    while len(support) < max_support:
        residual = np.abs(values - approx)
        residual[support] = -1.0
        support.append(int(np.argmax(residual)))
        weights, approx = _solve_weights(omega, values, support)
        error = np.max(np.abs(values - approx))
        if error < best_error:
            best_error, best = error, (list(support), weights)
        if error <= tol * scale:
            break

    support, weights = _clean_up(omega, values, *best)
    result = RationalInterpolant(omega[support].copy(), values[support].copy(), weights)
    achieved = np.max(np.abs(values - result(omega))) / scale
    logger.info("AAA fit: %d support points, relative error %.3e", len(support), achieved)
    if not achieved <= tol:
        raise RationalFitError(result, achieved, tol)
    return result


def build_tabulated_sd(table: SdTable, smoothing: Optional[float] = None,
                       aaa_tol: float = DEFAULT_AAA_TOL,
                       aaa_max_degree: int = DEFAULT_AAA_MAX_DEGREE,
                       omega_floor: float = DEFAULT_OMEGA_FLOOR) -> TabulatedSd:
    """Smooth -> AAA -> floor: the structured-SD ingestion pipeline"""
    if table.omega[0] < 0:
        raise DomainError("Tabulated SD abscissae must be >= 0 cm^-1")
    smoothed = smooth_table(table, smoothing)
    interpolant = aaa_fit(smoothed, tol=aaa_tol, max_degree=aaa_max_degree)
    return TabulatedSd(interpolant, float(omega_floor), float(table.omega[-1]))


def load_tabulated_sd(path, **kwargs) -> TabulatedSd:
    logger.info("Reading tabulated SD from %s", Path(path))
    return build_tabulated_sd(read_table(path), **kwargs)
