# bath_modes/tests/fixtures.py
import math

import numpy as np

from bath_modes.spectral_density import PowerLawExpCutoff, Qnsd

OHMIC = PowerLawExpCutoff(exponent=1.0, alpha=5.0, cutoff_cm1=53.0)
SUB_OHMIC = PowerLawExpCutoff(exponent=0.25, alpha=5.0, cutoff_cm1=53.0)

OHMIC_300K = Qnsd(OHMIC, 300.0)
SUB_OHMIC_50K = Qnsd(SUB_OHMIC, 50.0)


class NarrowLine:
    """Gaussian line of total weight pi * area at ``center`` (so int S = area at T = 0)"""

    def __init__(self, center, width, area):
        self.center = center
        self.width = width
        self.area = area

    label = 'narrow_line'

    def evaluate(self, omega):
        x = (np.asarray(omega, dtype=float) - self.center) / self.width
        return math.pi * self.area * np.exp(-0.5 * x * x) / (self.width * math.sqrt(2 * math.pi))

    def derivative_at_zero(self):
        return 0.0

    def breakpoints(self):
        return [self.center - 10 * self.width, self.center, self.center + 10 * self.width]


class FlatSd:
    """J(w) = level everywhere; only sensible at T = 0"""

    label = 'flat'

    def __init__(self, level):
        self.level = level

    def evaluate(self, omega):
        return np.full(np.shape(omega), float(self.level))

    def derivative_at_zero(self):
        return math.inf

    def breakpoints(self):
        return []


def lorentzian_sum(omega, centers=(60.0, 180.0, 420.0, 1100.0, 1600.0),
                   widths=(15.0, 30.0, 40.0, 60.0, 80.0), heights=(40.0, 80.0, 60.0, 120.0, 90.0)):
    """Structured SD with five peaks, vanishing at omega = 0"""
    omega = np.asarray(omega, dtype=float)
    total = np.zeros_like(omega)
    for c, w, h in zip(centers, widths, heights):
        total += h * w * w * omega / (c * ((omega - c) ** 2 + w * w))
    return total


def write_config(path, **entries):
    lines = ["# test run configuration"]
    lines += [f"{key} = {value}" for key, value in entries.items()]
    path.write_text("\n".join(lines) + "\n")
    return path
