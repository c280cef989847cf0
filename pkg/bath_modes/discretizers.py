# bath_modes/discretizers.py
"""
Discretization front-ends turning a QNSD into a finite set of bath modes:
interpolative decomposition (ID) + NNLS, logarithmic bins (LD), the mode
density method (MDM) and SD-orthogonal Gauss quadrature (BSDO), plus the
chain coefficients that go with the BSDO Jacobi matrix.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from numpy.typing import ArrayLike
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gammainc, gammaincinv

from .bcf_oracle import DEFAULT_ORACLE_TOL, bcf_reference, mode_correlation
from .exceptions import DegenerateFitError, DomainError, SingularWeightError
from .linalg_kernels import golub_welsch, id_decompose, nnls, stieltjes_jacobi
from .spectral_density import KAPPA, PowerLawExpCutoff, Qnsd

logger = logging.getLogger(__name__)

DEFAULT_LD_LAMBDA = 1.1
QUADRATURE_RULES = ('trapezoid', 'rectangle')
# relative accuracy of the per-bin / cumulative integrals
BIN_QUAD_TOL = 1e-12
BIN_QUAD_LIMIT = 500


@dataclass(frozen=True)
class DiscretizationGrid:
    """Equispaced fine grid: m times over [0, T] and n frequencies over [lo, hi]"""
    cutoff_time_fs: float
    omega_lo_cm1: float
    omega_hi_cm1: float
    time_points: int
    freq_points: int

    def __post_init__(self):
        if not (math.isfinite(self.cutoff_time_fs) and self.cutoff_time_fs > 0):
            raise DomainError(f"cutoff time must be > 0 fs, got {self.cutoff_time_fs!r}")
        if not self.omega_lo_cm1 < self.omega_hi_cm1:
            raise DomainError(
                f"need omega_lo < omega_hi, got [{self.omega_lo_cm1}, {self.omega_hi_cm1}]")
        if self.time_points < 2 or self.freq_points < 2:
            raise DomainError("grid needs at least 2 time points and 2 frequency points")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.cutoff_time_fs, self.time_points)

    @property
    def frequencies(self) -> np.ndarray:
        return np.linspace(self.omega_lo_cm1, self.omega_hi_cm1, self.freq_points)

    @property
    def spacing(self) -> float:
        return (self.omega_hi_cm1 - self.omega_lo_cm1) / (self.freq_points - 1)

    def quadrature_weights(self, rule: str = 'trapezoid') -> np.ndarray:
        if rule not in QUADRATURE_RULES:
            raise DomainError(f"unknown quadrature rule {rule!r}; use one of {QUADRATURE_RULES}")
        weights = np.full(self.freq_points, self.spacing)
        if rule == 'trapezoid':
            weights[[0, -1]] *= 0.5
        return weights

    def as_dict(self) -> dict:
        return {
            'cutoff_time_fs': self.cutoff_time_fs,
            'omega_lo_cm1': self.omega_lo_cm1,
            'omega_hi_cm1': self.omega_hi_cm1,
            'time_points': self.time_points,
            'freq_points': self.freq_points,
        }


@dataclass(frozen=True)
class DiscreteBath:
    """
    Bath modes sorted by ascending frequency with strictly positive g_k^2.
    Use ``DiscreteBath.build`` to sort and drop zero-weight modes.
    """
    frequencies: np.ndarray
    coupling_squared: np.ndarray
    temperature_k: float
    method: str
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.frequencies, dtype=float)
        g2 = np.asarray(self.coupling_squared, dtype=float)
        if w.ndim != 1 or w.shape != g2.shape:
            raise DomainError("frequencies and couplings must be 1-D arrays of equal length")
        if np.any(g2 <= 0) or not np.all(np.isfinite(g2)):
            raise DomainError("every mode needs a finite g_k^2 > 0")
        if np.any(np.diff(w) <= 0):
            raise DomainError("mode frequencies must be distinct and ascending")
        object.__setattr__(self, 'frequencies', w)
        object.__setattr__(self, 'coupling_squared', g2)

    @classmethod
    def build(cls, frequencies: ArrayLike, coupling_squared: ArrayLike, temperature_k: float,
              method: str, provenance: Optional[dict] = None) -> 'DiscreteBath':
        w = np.asarray(frequencies, dtype=float)
        g2 = np.asarray(coupling_squared, dtype=float)
        keep = g2 > 0
        if not np.all(keep):
            logger.warning("%s: dropping %d zero-weight mode(s)", method, int(np.count_nonzero(~keep)))
        order = np.argsort(w[keep], kind='stable')
        return cls(w[keep][order], g2[keep][order], temperature_k, method, dict(provenance or {}))

    @property
    def couplings(self) -> np.ndarray:
        return np.sqrt(self.coupling_squared)

    @property
    def reorganization_sum(self) -> float:
        """sum_k g_k^2, i.e. the mode-set C(0)"""
        return float(self.coupling_squared.sum())

    def __len__(self):
        return int(self.frequencies.size)

    def rows(self):
        for w, g, g2 in zip(self.frequencies, self.couplings, self.coupling_squared):
            yield float(w), float(g), float(g2)


@dataclass(frozen=True)
class ChainCoefficients:
    total_weight: float
    site_energies: np.ndarray
    hoppings: np.ndarray

    @property
    def system_coupling(self) -> float:
        return math.sqrt(self.total_weight)

    @property
    def size(self) -> int:
        return int(self.site_energies.size)

    def hamiltonian(self) -> np.ndarray:
        """M x M tridiagonal chain block (sites only, system coupling excluded)"""
        h = self.hoppings
        return np.diag(self.site_energies) + np.diag(h, 1) + np.diag(h, -1)


# ---------------------------------------------------------------------------
# ID + NNLS
# ---------------------------------------------------------------------------

def _id_matrix(q: Qnsd, times: np.ndarray, omega: np.ndarray):
    """Real 2m x n matrix [Re f; Im f] with f(t, w) = S(w) exp(-i kappa w t)"""
    s = np.asarray(q(omega), dtype=float)
    phase = KAPPA * np.outer(times, omega)
    return np.vstack([s * np.cos(phase), -s * np.sin(phase)]), s


def discretize_id(q: Qnsd, grid: DiscretizationGrid, rank: Optional[int] = None,
                  tolerance: Optional[float] = None, max_rank: Optional[int] = None,
                  quadrature: str = 'trapezoid',
                  oracle_tol: float = DEFAULT_ORACLE_TOL) -> DiscreteBath:
    """
    Select r frequencies of the fine grid by interpolative decomposition of
    the stacked BCF integrand, then fit nonnegative weights z_k against the
    oracle BCF on the same time samples: g_k^2 = z_k S(w_k).

    At finite temperature a singular w = 0 column is moved to half a grid
    step, so that mode sits at dw/2 instead of 0.
    """
    times = grid.times
    omega = grid.frequencies.copy()
    if q.singular_at_zero:
        at_zero = omega == 0
        if np.any(at_zero):
            omega[at_zero] = 0.5 * grid.spacing
            logger.info("ID: singular omega=0 column moved to %.6g cm^-1", 0.5 * grid.spacing)

    A, s = _id_matrix(q, times, omega)
    factor = id_decompose(A, rank=rank, tolerance=tolerance, max_rank=max_rank)
    cols = factor.selected_columns
    logger.info("ID: rank %d selected from %d grid frequencies", factor.rank, omega.size)

    reference = bcf_reference(q, grid.omega_lo_cm1, grid.omega_hi_cm1, times, tol=oracle_tol)
    c = np.concatenate([reference.values.real, reference.values.imag])
    z = nnls(A[:, cols], c)
    if not np.any(z > 0):
        raise DegenerateFitError("NNLS returned only zero weights; widen the grid or raise the rank")
    logger.info("NNLS: %d of %d weights nonzero", int(np.count_nonzero(z > 0)), z.size)

    seed = factor.interpolation @ grid.quadrature_weights(quadrature)
    fitted = mode_correlation(omega[cols], z * s[cols], times)
    seeded = mode_correlation(omega[cols], seed * s[cols], times)
    norm = reference.normalization

    provenance: dict[str, Any] = {
        'grid': grid.as_dict(),
        'mode': ({'rank': int(rank)} if rank is not None
                 else {'tolerance': float(tolerance), 'max_rank': max_rank}),
        'quadrature': quadrature,
        'selected_rank': factor.rank,
        'rank_truncated': factor.truncated,
        'tolerance_reached': factor.tolerance_reached,
        'id_relative_residual': factor.residual_norm / factor.matrix_norm,
        'pivot_frequencies_cm1': omega[cols].tolist(),
        'seed_coefficients': seed.tolist(),
        'nnls_coefficients': z.tolist(),
        'seed_residual': float(np.max(np.abs(seeded - reference.values)) / norm),
        'achieved_residual': float(np.max(np.abs(fitted - reference.values)) / norm),
    }
    return DiscreteBath.build(omega[cols], z * s[cols], q.temperature_k, 'id', provenance)


# ---------------------------------------------------------------------------
# Logarithmic discretization
# ---------------------------------------------------------------------------

def _integrate(fn, a, b, q: Qnsd) -> float:
    value, _ = quad(fn, a, b, epsabs=0.0, epsrel=BIN_QUAD_TOL, limit=BIN_QUAD_LIMIT,
                    points=q.breakpoints(a, b) or None)
    return value


def _check_even(n_modes: int):
    if n_modes < 2 or n_modes % 2:
        raise DomainError(f"mode count must be an even number >= 2, got {n_modes!r}")


def ld_bin_edges(omega_max: float, n_modes: int, ld_lambda: float = DEFAULT_LD_LAMBDA) -> np.ndarray:
    """
    Positive-side edges Omega, Omega/L, ..., with the innermost edge set to 0.
    M/2 bins per side give M bins on [-Omega, Omega] in total.
    """
    edges = omega_max * ld_lambda ** -np.arange(n_modes // 2 + 1, dtype=float)
    edges[-1] = 0.0
    return edges


def discretize_ld(q: Qnsd, omega_max: float, n_modes: int,
                  ld_lambda: float = DEFAULT_LD_LAMBDA) -> DiscreteBath:
    """Bin weights g_k^2 = int S and centroids w_k over log-spaced bins"""
    _check_even(n_modes)
    if not ld_lambda > 1:
        raise DomainError(f"LD ratio must be > 1, got {ld_lambda!r}")
    if not omega_max > 0:
        raise DomainError(f"LD needs omega_max > 0, got {omega_max!r}")

    edges = ld_bin_edges(omega_max, n_modes, ld_lambda)
    bins = [(lo, hi) for hi, lo in zip(edges[:-1], edges[1:])]
    if not q.zero_temperature:
        bins += [(-hi, -lo) for lo, hi in bins]

    frequencies, weights = [], []
    for a, b in bins:
        g2 = _integrate(q, a, b, q)
        if not g2 > 0:
            logger.warning("LD: bin [%.6g, %.6g] cm^-1 carries no weight, mode dropped", a, b)
            continue
        frequencies.append(_integrate(lambda w: w * q(w), a, b, q) / g2)
        weights.append(g2)

    provenance = {'omega_max_cm1': omega_max, 'n_modes': n_modes, 'ld_lambda': ld_lambda,
                  'bin_edges_cm1': edges.tolist()}
    return DiscreteBath.build(frequencies, weights, q.temperature_k, 'ld', provenance)


# ---------------------------------------------------------------------------
# Mode density method
# ---------------------------------------------------------------------------

def _density_nodes(q: Qnsd, half: int):
    """Positive nodes with equal shares of int J/w, the per-share Gamma and the cumulative residual"""
    targets = (np.arange(1, half + 1) - 0.5) / half
    sd = q.sd
    if isinstance(sd, PowerLawExpCutoff):
        total = sd.inverse_moment()
        nodes = sd.cutoff_cm1 * gammaincinv(sd.exponent, targets)
        cumulative = gammainc(sd.exponent, nodes / sd.cutoff_cm1)
    else:
        lo, hi = sd.breakpoints()
        density = lambda w: sd.evaluate(np.array([w]))[0] / w if w > 0 else 0.0
        cdf = lambda w: quad(density, lo, w, epsabs=0.0, epsrel=BIN_QUAD_TOL, limit=BIN_QUAD_LIMIT)[0]
        total = cdf(hi)
        if not (math.isfinite(total) and total > 0):
            raise DomainError("MDM needs a finite, positive integral of J(w)/w")
        nodes = np.array([brentq(lambda w, p=p: cdf(w) / total - p, max(lo, 1e-300), hi, xtol=1e-14)
                          for p in targets])
        cumulative = np.array([cdf(w) for w in nodes]) / total
    gamma = total / half
    residual = float(np.max(np.abs(half * cumulative - (np.arange(1, half + 1) - 0.5))))
    return nodes, gamma, residual


def discretize_mdm(q: Qnsd, n_modes: int) -> DiscreteBath:
    """
    Equal-share partition of int_0^inf J/w: positive nodes solve
    Gamma^-1 int_0^{w_k} J/w = k - 1/2, negative nodes mirror them, and
    g_k^2 = S(w_k) / rho(|w_k|) with rho = J(w) / (Gamma w).
    """
    _check_even(n_modes)
    half = n_modes // 2
    nodes, gamma, residual = _density_nodes(q, half)
    logger.info("MDM: %d positive nodes, Gamma=%.6g, cumulative residual %.3e", half, gamma, residual)

    frequencies = nodes if q.zero_temperature else np.concatenate([-nodes[::-1], nodes])
    magnitude = np.abs(frequencies)
    rho = q.sd.evaluate(magnitude) / (gamma * magnitude)
    weights = np.where(rho > 0, np.asarray(q(frequencies)) / np.where(rho > 0, rho, 1.0), 0.0)

    provenance = {'n_modes': n_modes, 'gamma_cm1': gamma, 'cumulative_residual': residual}
    return DiscreteBath.build(frequencies, weights, q.temperature_k, 'mdm', provenance)


# ---------------------------------------------------------------------------
# SD-orthogonal Gauss quadrature and chain mapping
# ---------------------------------------------------------------------------

def _checked_jacobi(weight, omega_min: float, omega_max: float, size: int):
    if getattr(weight, 'singular_at_zero', False) and omega_min <= 0 <= omega_max:
        raise SingularWeightError(omega_min, omega_max)
    return stieltjes_jacobi(weight, omega_min, omega_max, size)


def discretize_bsdo(q: Qnsd, omega_min: float, omega_max: float, n_modes: int) -> DiscreteBath:
    """Gauss nodes and Christoffel weights for the weight S(w) on [omega_min, omega_max]"""
    jacobi = _checked_jacobi(q, omega_min, omega_max, n_modes)
    nodes, weights = golub_welsch(jacobi)
    provenance = {'interval_cm1': [omega_min, omega_max], 'n_modes': n_modes,
                  'total_weight': jacobi.total_weight}
    return DiscreteBath.build(nodes, weights, q.temperature_k, 'bsdo', provenance)


def chain_map(q, omega_min: float, omega_max: float, n_modes: int) -> ChainCoefficients:
    """Chain sites alpha_k, hoppings sqrt(eta_k) and total weight for the same Jacobi matrix"""
    jacobi = _checked_jacobi(q, omega_min, omega_max, n_modes)
    return ChainCoefficients(jacobi.total_weight, jacobi.alpha.copy(), np.sqrt(jacobi.eta))


# ---------------------------------------------------------------------------
# Hybridization function
# ---------------------------------------------------------------------------

def hybridization_function(q: Qnsd, omega_min: float, omega_max: float, z: complex) -> complex:
    """int S(w) / (z - w) dw over [omega_min, omega_max] for z off the real interval"""
    z = complex(z)
    if z.imag == 0 and omega_min <= z.real <= omega_max:
        raise DomainError(f"z={z} lies on the integration interval")
    value, _ = quad(lambda w: q(w) / (z - w), omega_min, omega_max, complex_func=True,
                    epsabs=0.0, epsrel=BIN_QUAD_TOL, limit=BIN_QUAD_LIMIT,
                    points=q.breakpoints(omega_min, omega_max) or None)
    return complex(value)


def hybridization_from_modes(bath: DiscreteBath, z: ArrayLike):
    """sum_k g_k^2 / (z - w_k)"""
    zz = np.asarray(z, dtype=complex)
    values = (1.0 / (zz[..., None] - bath.frequencies)) @ bath.coupling_squared
    return values.item() if zz.ndim == 0 else values
