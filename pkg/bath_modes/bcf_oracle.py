# bath_modes/bcf_oracle.py
"""
Reference bath correlation functions C(t) = int S_beta(w) exp(-i kappa w t) dw,
correlation functions of discrete mode sets, and normalized error metrics.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike
from scipy.integrate import quad_vec
from scipy.special import expit

from .exceptions import DomainError, GridMismatchError, QuadratureError
from .spectral_density import KAPPA, PowerLawExpCutoff, Qnsd

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_TOL = 1e-10
# Total number of adaptive subintervals allowed per integration piece
SUBDIVISION_LIMIT = 20000


@dataclass(frozen=True)
class BcfSeries:
    times: np.ndarray
    values: np.ndarray
    normalization: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if times.ndim != 1 or times.shape != values.shape or times.size == 0:
            raise DomainError("BCF series needs equal-length 1-D times and values")
        if times[0] != 0 or np.any(np.diff(times) <= 0):
            raise DomainError("BCF times must start at 0 fs and increase strictly")
        if not self.normalization > 0:
            raise DomainError("BCF normalization |C(0)| must be positive")
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_values(cls, times, values):
        values = np.asarray(values, dtype=complex)
        return cls(times, values, float(abs(values[0])))


@dataclass(frozen=True)
class ErrorReport:
    method: str
    times: np.ndarray
    per_time: np.ndarray
    max_error: float
    mean_error: float


def check_times(times: ArrayLike) -> np.ndarray:
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] != 0 or np.any(np.diff(t) <= 0):
        raise DomainError("times must be a 1-D ascending sequence starting at 0 fs")
    return t


def _singular_decay(q: Qnsd) -> float:
    """Power of omega with which the DE-mapped integrand vanishes at the singular end"""
    if isinstance(q.sd, PowerLawExpCutoff):
        return min(max(q.sd.exponent, 0.02), 1.0)
    return 1.0


class _OscillatoryIntegrand:
    """S_beta(w) [cos(k w t), -sin(k w t)] stacked over all time points"""

    def __init__(self, q: Qnsd, times: np.ndarray, scale: np.ndarray):
        self.q = q
        self.phase = KAPPA * times
        self.scale = np.concatenate([scale, scale])

    def __call__(self, omega):
        s = self.q(omega)
        arg = self.phase * omega
        return np.concatenate([s * np.cos(arg), -s * np.sin(arg)]) / self.scale


class _DoubleExponentialPanel:
    """
    int_a^b f dw for f singular at ``end`` (a or b), via
    w(u) = end +/- (b - a) expit(pi sinh u), u in [-U, U].
    """

    def __init__(self, integrand, a, b, end, decay):
        self.integrand = integrand
        self.a, self.b, self.end = a, b, end
        self.sign = 1.0 if end == a else -1.0
        self.limit = math.asinh(36.0 / (math.pi * decay))

    def __call__(self, u):
        z = math.pi * math.sinh(u)
        length = self.b - self.a
        omega = self.end + self.sign * length * expit(z)
        if omega == self.end:
            return 0.0 * self.integrand.scale
        jacobian = length * math.pi * math.cosh(u) * expit(z) * expit(-z)
        return self.integrand(omega) * jacobian


def _pieces(q: Qnsd, lo: float, hi: float, extra: Sequence[float]) -> list[tuple[float, float]]:
    cuts = sorted({lo, hi, *q.breakpoints(lo, hi), *(p for p in extra if lo < p < hi)})
    return list(zip(cuts[:-1], cuts[1:]))


def _integrate(integrand, q, lo, hi, width, tol, extra):
    total = 0.0
    converged = True
    for a, b in _pieces(q, lo, hi, extra):
        touches_zero = q.singular_at_zero and (a == 0 or b == 0)
        if touches_zero:
            end = a if a == 0 else b
            h = min(width, b - a)
            da, db = (a, a + h) if end == a else (b - h, b)
            panel = _DoubleExponentialPanel(integrand, da, db, end, _singular_decay(q))
            part, _, info = quad_vec(panel, -panel.limit, panel.limit, epsabs=tol, epsrel=tol,
                                     norm='max', limit=SUBDIVISION_LIMIT, full_output=True)
            total = total + part
            converged &= bool(info.success)
            a, b = (a + h, b) if end == a else (a, b - h)
            if b - a <= 0:
                continue
        n_panels = max(1, math.ceil((b - a) / width))
        edges = np.linspace(a, b, n_panels + 1)
        part, _, info = quad_vec(integrand, a, b, epsabs=tol, epsrel=tol, norm='max',
                                 limit=SUBDIVISION_LIMIT, points=edges[1:-1] if n_panels > 1 else None,
                                 quadrature='gk21', full_output=True)
        total = total + part
        converged &= bool(info.success)
    return total, converged


def bcf_reference(q: Qnsd, omega_lo: float, omega_hi: float, times: ArrayLike,
                  tol: float = DEFAULT_ORACLE_TOL,
                  extra_breakpoints: Sequence[float] = ()) -> BcfSeries:
    """
    Adaptive Gauss-Kronrod evaluation of C(t) over [omega_lo, omega_hi].

    Panels are no wider than pi / (kappa t_max). The interval is split at 0
    and, for an integrable singularity there, the adjacent panel is handled
    by double-exponential substitution. A second pass rescales each time
    point by its first-pass magnitude so the tolerance holds per time point.
    """
    if not omega_lo < omega_hi:
        raise DomainError(f"need omega_lo < omega_hi, got [{omega_lo}, {omega_hi}]")
    if not tol > 0:
        raise DomainError(f"oracle tolerance must be > 0, got {tol!r}")
    t = check_times(times)
    t_max = t[-1]
    span = omega_hi - omega_lo
    width = min(span, math.pi / (KAPPA * t_max)) if t_max > 0 else span

    ones = np.ones(t.size)
    first, ok_first = _integrate(_OscillatoryIntegrand(q, t, ones), q, omega_lo, omega_hi,
                                 width, tol, extra_breakpoints)
    first = first[:t.size] + 1j * first[t.size:]
    floor = tol * np.max(np.abs(first))
    if floor == 0:
        raise QuadratureError("QNSD integrates to zero on the requested window", 0.0)
    scale = np.maximum(np.abs(first), floor)

    second, ok_second = _integrate(_OscillatoryIntegrand(q, t, scale), q, omega_lo, omega_hi,
                                   width, tol, extra_breakpoints)
    values = (second[:t.size] + 1j * second[t.size:]) * scale

    if not (ok_first and ok_second):
        worst = int(np.argmax(np.abs(values - first) / scale))
        raise QuadratureError("BCF quadrature did not converge within the subdivision budget",
                              float(t[worst]))
    logger.debug("Oracle BCF on %d time points over [%g, %g] cm^-1", t.size, omega_lo, omega_hi)
    return BcfSeries.from_values(t, values)


def mode_correlation(frequencies: ArrayLike, weights: ArrayLike, times: ArrayLike) -> np.ndarray:
    """sum_k g_k^2 exp(-i kappa w_k t) for arbitrary (also negative) times"""
    w = np.asarray(frequencies, dtype=float)
    g2 = np.asarray(weights, dtype=float)
    t = np.asarray(times, dtype=float)
    return np.exp(-1j * KAPPA * np.outer(t, w)) @ g2


def bcf_from_modes(bath, times: ArrayLike) -> BcfSeries:
    if len(bath.frequencies) == 0:
        raise DomainError("bcf_from_modes needs at least one mode")
    t = check_times(times)
    return BcfSeries.from_values(t, mode_correlation(bath.frequencies, bath.coupling_squared, t))


def compare(approx: BcfSeries, reference: BcfSeries, method: str = '') -> ErrorReport:
    """Pointwise |C_approx - C_ref| / |C_ref(0)|"""
    if approx.times.shape != reference.times.shape or not np.array_equal(approx.times, reference.times):
        raise GridMismatchError("approximate and reference BCFs use different time grids")
    per_time = np.abs(approx.values - reference.values) / reference.normalization
    return ErrorReport(method, reference.times, per_time,
                       float(per_time.max()), float(per_time.mean()))
