# bath_modes/tests/test_tabulated_ingest.py
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from bath_modes.exceptions import DomainError, RationalFitError
from bath_modes.spectral_density import Qnsd, eval_sd
from bath_modes.tabulated_ingest import (SdTable, aaa_fit, build_tabulated_sd, eval_interpolant,
                                         load_tabulated_sd, read_table, smooth_table)

from .fixtures import OHMIC


def ohmic_table(points=200):
    omega = np.linspace(0.0, 500.0, points)
    return SdTable(omega, eval_sd(OHMIC, omega))


class SdTableTests(SimpleTestCase):

    def test_rejects_short_tables(self):
        with self.assertRaises(DomainError):
            SdTable(np.arange(5.0), np.ones(5))

    def test_rejects_unsorted_abscissae(self):
        omega = np.arange(10.0)
        omega[3] = omega[2]
        with self.assertRaises(DomainError):
            SdTable(omega, np.ones(10))

    def test_read_table_comma_and_whitespace(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'sd.txt'
            rows = [f"{w}, {2 * w}" if i % 2 else f"{w}   {2 * w}" for i, w in enumerate(range(10))]
            path.write_text("# omega_cm1 J_cm1\n" + "\n".join(rows) + "\n")
            table = read_table(path)
        np.testing.assert_array_equal(table.omega, np.arange(10.0))
        np.testing.assert_array_equal(table.values, 2 * np.arange(10.0))


class SmoothTableTests(SimpleTestCase):

    def test_zero_penalty_is_identity(self):
        table = ohmic_table()
        self.assertIs(smooth_table(table, 0.0), table)

    def test_constant_is_preserved(self):
        table = SdTable(np.linspace(0, 10, 30), np.full(30, 3.5))
        np.testing.assert_allclose(smooth_table(table, 5.0).values, 3.5, rtol=1e-9)
        np.testing.assert_allclose(smooth_table(table).values, 3.5, rtol=1e-9)

    def test_gcv_smoothing_reduces_noise(self):
        rng = np.random.default_rng(11)
        x = np.linspace(0, 2 * np.pi, 64)
        clean = np.sin(x)
        noisy = clean + 0.1 * rng.standard_normal(x.size)
        smoothed = smooth_table(SdTable(x, noisy))
        self.assertLess(np.max(np.abs(smoothed.values - clean)), np.max(np.abs(noisy - clean)))

    def test_negative_penalty_rejected(self):
        with self.assertRaises(DomainError):
            smooth_table(ohmic_table(), -1.0)


class AaaFitTests(SimpleTestCase):

    def test_reproduces_low_degree_rational(self):
        omega = np.linspace(0.0, 10.0, 50)
        table = SdTable(omega, 1.0 / (1.0 + omega))
        r = aaa_fit(table, tol=1e-12)
        self.assertLessEqual(len(r.support_points), 3)
        np.testing.assert_allclose(r(omega), table.values, atol=1e-12)

    def test_constant_needs_one_support_point(self):
        table = SdTable(np.linspace(0, 1, 12), np.full(12, 2.0))
        r = aaa_fit(table)
        self.assertEqual(len(r.support_points), 1)
        self.assertEqual(r(0.55), 2.0)

    def test_exact_at_support_points(self):
        r = aaa_fit(ohmic_table())
        np.testing.assert_array_equal(eval_interpolant(r, r.support_points), r.support_values)

    def test_ohmic_surrogate_accuracy(self):
        table = ohmic_table()
        r = aaa_fit(table, tol=1e-6)
        fine = np.linspace(0.0, 500.0, 2000)
        exact = eval_sd(OHMIC, fine)
        self.assertLess(np.max(np.abs(r(fine) - exact)) / np.max(exact), 1e-5)
        self.assertAlmostEqual(r(53.0), eval_sd(OHMIC, 53.0), delta=3e-4)

    def test_no_poles_on_the_table_range(self):
        r = aaa_fit(ohmic_table())
        denominator = r.denominator(np.linspace(0.0, 500.0, 20001))
        self.assertTrue(np.all(denominator > 0) or np.all(denominator < 0))

    def test_error_does_not_grow_with_degree(self):
        table = ohmic_table()
        errors = []
        for degree in (2, 4, 8, 16):
            try:
                r = aaa_fit(table, tol=1e-14, max_degree=degree)
            except RationalFitError as exc:
                r = exc.best
            errors.append(np.max(np.abs(r(table.omega) - table.values)))
        self.assertEqual(errors, sorted(errors, reverse=True))

    def test_unreachable_tolerance_carries_best_fit(self):
        with self.assertRaises(RationalFitError) as ctx:
            aaa_fit(ohmic_table(), tol=1e-15, max_degree=2)
        self.assertLessEqual(len(ctx.exception.best.support_points), 3)
        self.assertGreater(ctx.exception.achieved_error, 1e-15)


class TabulatedSdTests(SimpleTestCase):

    def test_floor_and_upper_edge(self):
        sd = build_tabulated_sd(ohmic_table(), smoothing=0.0, omega_floor=1.0)
        self.assertEqual(eval_sd(sd, 0.5), 0.0)
        self.assertEqual(eval_sd(sd, 600.0), 0.0)
        self.assertGreater(eval_sd(sd, 53.0), 0.0)
        self.assertEqual(sd.breakpoints(), [1.0, 500.0])

    def test_finite_temperature_limit_without_floor(self):
        sd = build_tabulated_sd(ohmic_table(), smoothing=0.0, omega_floor=0.0)
        q = Qnsd(sd, 300.0)
        self.assertFalse(q.singular_at_zero)
        self.assertAlmostEqual(q(0.0) / (5 * 300 / 1.4387769), 1.0, delta=0.1)

    def test_load_from_file(self):
        table = ohmic_table(100)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'ohmic.csv'
            np.savetxt(path, np.column_stack([table.omega, table.values]), delimiter=',',
                       header='omega_cm1,J_cm1')
            sd = load_tabulated_sd(path, smoothing=0.0)
        self.assertAlmostEqual(eval_sd(sd, 53.0), eval_sd(OHMIC, 53.0), delta=1e-2)
