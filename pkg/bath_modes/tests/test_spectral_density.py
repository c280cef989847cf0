# bath_modes/tests/test_spectral_density.py
import math

import numpy as np
from django.test import SimpleTestCase

from bath_modes.exceptions import DomainError
from bath_modes.spectral_density import (CONSTANTS, KAPPA, PowerLawExpCutoff, Qnsd, eval_qnsd,
                                         eval_sd)

from .fixtures import OHMIC, OHMIC_300K, SUB_OHMIC, SUB_OHMIC_50K


class PhysicalConstantsTests(SimpleTestCase):

    def test_fixed_values(self):
        self.assertEqual(CONSTANTS.radiation_constant_c2, 1.4387769)
        self.assertEqual(KAPPA, 1.8836515673e-4)


class PowerLawTests(SimpleTestCase):

    def test_vanishes_at_zero(self):
        self.assertEqual(eval_sd(OHMIC, 0.0), 0.0)

    def test_value_at_cutoff(self):
        expected = math.pi * 5 * 53 * math.exp(-1)
        self.assertAlmostEqual(eval_sd(OHMIC, 53.0), expected, places=10)
        self.assertAlmostEqual(eval_sd(OHMIC, 53.0), 306.3, delta=0.05)
        # w = wc removes the exponent dependence
        self.assertAlmostEqual(eval_sd(SUB_OHMIC, 53.0), expected, places=10)

    def test_array_evaluation_keeps_shape(self):
        values = eval_sd(OHMIC, np.array([[1.0, 2.0], [3.0, 4.0]]))
        self.assertEqual(values.shape, (2, 2))

    def test_negative_frequency_rejected(self):
        with self.assertRaises(DomainError):
            eval_sd(OHMIC, -1.0)

    def test_invalid_parameters_rejected(self):
        for args in [(0.0, 5.0, 53.0), (1.0, -1.0, 53.0), (1.0, 5.0, 0.0)]:
            with self.assertRaises(DomainError):
                PowerLawExpCutoff(*args)

    def test_inverse_moment(self):
        self.assertAlmostEqual(OHMIC.inverse_moment(), math.pi * 5 * 53)


class QnsdTests(SimpleTestCase):

    def test_ohmic_limit_at_zero(self):
        expected = 5 * 300 / 1.4387769
        self.assertAlmostEqual(eval_qnsd(OHMIC_300K, 0.0), expected, places=8)
        self.assertAlmostEqual(expected, 1042.56, delta=0.01)

    def test_continuous_at_zero_for_ohmic(self):
        limit = eval_qnsd(OHMIC_300K, 0.0)
        for k in range(1, 9):
            for sign in (1, -1):
                value = eval_qnsd(OHMIC_300K, sign * 10.0 ** -k)
                self.assertAlmostEqual(value / limit, 1.0, delta=1e-2 * 10.0 ** -(k - 1) + 1e-12)

    def test_detailed_balance(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            omega = rng.uniform(0.5, 800.0)
            temperature = rng.uniform(10.0, 1000.0)
            for sd in (OHMIC, SUB_OHMIC):
                q = Qnsd(sd, temperature)
                ratio = eval_qnsd(q, -omega) / eval_qnsd(q, omega)
                np.testing.assert_allclose(ratio, math.exp(-q.beta * omega), rtol=1e-12)

    def test_detailed_balance_at_100(self):
        ratio = eval_qnsd(OHMIC_300K, -100.0) / eval_qnsd(OHMIC_300K, 100.0)
        self.assertAlmostEqual(ratio, math.exp(-100 * OHMIC_300K.beta), places=14)

    def test_zero_temperature(self):
        q = Qnsd(SUB_OHMIC, 0.0)
        omega = np.linspace(0.1, 600.0, 50)
        np.testing.assert_allclose(eval_qnsd(q, omega), eval_sd(SUB_OHMIC, omega) / math.pi,
                                   rtol=1e-14)
        self.assertEqual(eval_qnsd(q, -10.0), 0.0)
        self.assertEqual(eval_qnsd(q, 0.0), 0.0)
        self.assertTrue(q.zero_temperature)
        self.assertFalse(q.singular_at_zero)

    def test_sub_ohmic_singularity_marker(self):
        self.assertTrue(SUB_OHMIC_50K.singular_at_zero)
        self.assertEqual(eval_qnsd(SUB_OHMIC_50K, 0.0), math.inf)
        self.assertFalse(OHMIC_300K.singular_at_zero)

    def test_negative_temperature_rejected(self):
        with self.assertRaises(DomainError):
            Qnsd(OHMIC, -1.0)

    def test_breakpoints_split_at_zero(self):
        self.assertEqual(OHMIC_300K.breakpoints(-500, 500), [0.0])
        self.assertEqual(OHMIC_300K.breakpoints(0, 500), [])
