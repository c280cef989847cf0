# bath_modes/spectral_density.py
"""
Unit conventions, analytic spectral densities and the temperature-dressed
quantum noise spectral density (QNSD).

Internal units are fixed: cm^-1 for energies and frequencies, fs for time,
K for temperature. Every conversion goes through ``CONSTANTS``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import gamma as gamma_fn

from .exceptions import DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-derived constants for the cm^-1 / fs / K unit system"""
    radiation_constant_c2: float = 1.4387769          # hc/k_B in cm K
    phase_per_cm1_fs: float = 1.8836515673e-4         # 2*pi*c in rad fs^-1 per cm^-1


CONSTANTS = PhysicalConstants()

# Phase factor kappa: exp(-i * kappa * omega[cm^-1] * t[fs])
KAPPA = CONSTANTS.phase_per_cm1_fs


@dataclass(frozen=True)
class PowerLawExpCutoff:
    """J(w) = pi * alpha * wc^(1-s) * w^s * exp(-w/wc) for w >= 0"""
    exponent: float
    alpha: float
    cutoff_cm1: float

    def __post_init__(self):
        for name in ('exponent', 'alpha', 'cutoff_cm1'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"PowerLawExpCutoff requires {name} > 0, got {value!r}")

    @property
    def label(self):
        return f"power_law(s={self.exponent:g}, alpha={self.alpha:g}, wc={self.cutoff_cm1:g})"

    def evaluate(self, omega: np.ndarray) -> np.ndarray:
        s, wc = self.exponent, self.cutoff_cm1
        return np.pi * self.alpha * wc ** (1.0 - s) * omega ** s * np.exp(-omega / wc)

    def derivative_at_zero(self) -> float:
        """J'(0+): finite only for s >= 1"""
        if self.exponent > 1:
            return 0.0
        if self.exponent == 1:
            return np.pi * self.alpha
        return math.inf

    def inverse_moment(self) -> float:
        """Integral of J(w)/w over (0, inf)"""
        return np.pi * self.alpha * self.cutoff_cm1 * gamma_fn(self.exponent)

    def breakpoints(self) -> list[float]:
        return []


@dataclass(frozen=True)
class TabulatedSd:
    """
    Spectral density backed by a rational surrogate of tabulated data.

    Values are clamped at 0, zeroed below ``omega_floor_cm1`` and above the
    last tabulated abscissa ``omega_max_cm1``.
    """
    interpolant: Any
    omega_floor_cm1: float
    omega_max_cm1: float

    def __post_init__(self):
        if self.omega_floor_cm1 < 0:
            raise DomainError(f"omega_floor must be >= 0, got {self.omega_floor_cm1!r}")
        if self.omega_max_cm1 <= self.omega_floor_cm1:
            raise DomainError("Tabulated SD range is empty above its floor")

    @property
    def label(self):
        return (f"tabulated(floor={self.omega_floor_cm1:g}, "
                f"max={self.omega_max_cm1:g}, degree={len(self.interpolant.support_points)})")

    def evaluate(self, omega: np.ndarray) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        values = np.maximum(self.interpolant(omega), 0.0)
        inside = (omega >= self.omega_floor_cm1) & (omega <= self.omega_max_cm1)
        return np.where(inside, values, 0.0)

    def derivative_at_zero(self) -> float:
        if self.omega_floor_cm1 > 0:
            return 0.0
        h = 1e-6 * self.omega_max_cm1
        return float(self.evaluate(np.array([h]))[0] / h)

    def breakpoints(self) -> list[float]:
        return [self.omega_floor_cm1, self.omega_max_cm1]


SpectralDensity = Union[PowerLawExpCutoff, TabulatedSd]


def eval_sd(sd: SpectralDensity, omega: ArrayLike) -> Union[float, np.ndarray]:
    """Evaluate J(omega) for omega >= 0"""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0) or np.any(np.isnan(w)):
        raise DomainError("eval_sd is defined for omega >= 0 only")
    result = sd.evaluate(w)
    return result.item() if w.ndim == 0 else result


@dataclass(frozen=True)
class Qnsd:
    """
    S_beta(w) = (1/2pi) J(w) [coth(beta w / 2) + 1] with J odd-extended.

    ``temperature_k == 0`` is the distinguished zero-temperature limit; no
    arithmetic with beta = inf is ever done.
    """
    sd: SpectralDensity
    temperature_k: float

    def __post_init__(self):
        if not (math.isfinite(self.temperature_k) and self.temperature_k >= 0):
            raise DomainError(f"temperature must be a finite value >= 0 K, got {self.temperature_k!r}")

    @property
    def zero_temperature(self) -> bool:
        return self.temperature_k == 0

    @property
    def beta(self) -> float:
        """Inverse temperature in cm (i.e. (cm^-1)^-1)"""
        if self.zero_temperature:
            return math.inf
        return CONSTANTS.radiation_constant_c2 / self.temperature_k

    @property
    def singular_at_zero(self) -> bool:
        """True when S_beta has an integrable singularity at omega = 0"""
        return (not self.zero_temperature) and math.isinf(self.sd.derivative_at_zero())

    def breakpoints(self, lo: float, hi: float) -> list[float]:
        """Interior points of [lo, hi] where S_beta is not smooth"""
        inner = list(self.sd.breakpoints())
        points = [0.0, *inner]
        if not self.zero_temperature:
            points += [-p for p in inner]
        return sorted({p for p in points if lo < p < hi})

    def __call__(self, omega: ArrayLike):
        return eval_qnsd(self, omega)


def eval_qnsd(q: Qnsd, omega: ArrayLike) -> Union[float, np.ndarray]:
    """
    Evaluate the QNSD. At finite T and omega = 0 the analytic limit
    J'(0)/(pi beta) is returned; ``+inf`` marks an integrable singularity.
    """
    w = np.asarray(omega, dtype=float)
    out = np.zeros(w.shape, dtype=float)

    if q.zero_temperature:
        positive = w > 0
        out[positive] = q.sd.evaluate(w[positive]) / np.pi
        return out.item() if w.ndim == 0 else out

    nonzero = w != 0
    wn = w[nonzero]
    j_odd = np.sign(wn) * q.sd.evaluate(np.abs(wn))
    with np.errstate(over='ignore'):
        # coth(x/2) + 1 = 2 / (1 - exp(-x))
        out[nonzero] = j_odd / (np.pi * -np.expm1(-q.beta * wn))
    out[~nonzero] = q.sd.derivative_at_zero() / (np.pi * q.beta)
    return out.item() if w.ndim == 0 else out
