# bath_modes/tests/test_discretizers.py
import math

import numpy as np
from django.test import SimpleTestCase
from scipy.special import gammainc

from bath_modes.bcf_oracle import bcf_from_modes, bcf_reference
from bath_modes.discretizers import (DiscreteBath, DiscretizationGrid, chain_map, discretize_bsdo,
                                     discretize_id, discretize_ld, discretize_mdm,
                                     hybridization_from_modes, hybridization_function,
                                     ld_bin_edges)
from bath_modes.exceptions import DomainError, SingularWeightError
from bath_modes.spectral_density import Qnsd

from .fixtures import OHMIC, OHMIC_300K, SUB_OHMIC_50K, FlatSd, NarrowLine


def uniform_weight(omega):
    return np.ones_like(omega)


def c0(q, lo, hi):
    return bcf_reference(q, lo, hi, [0.0]).values[0].real


class GridTests(SimpleTestCase):

    def test_equispaced_samples(self):
        grid = DiscretizationGrid(1000.0, -500.0, 500.0, 5, 11)
        np.testing.assert_array_equal(grid.times, [0.0, 250.0, 500.0, 750.0, 1000.0])
        self.assertEqual(grid.frequencies[0], -500.0)
        self.assertEqual(grid.frequencies[-1], 500.0)
        self.assertEqual(grid.spacing, 100.0)

    def test_quadrature_weights(self):
        grid = DiscretizationGrid(100.0, 0.0, 10.0, 2, 11)
        trapezoid = grid.quadrature_weights('trapezoid')
        self.assertEqual(trapezoid[0], 0.5)
        self.assertAlmostEqual(trapezoid.sum(), 10.0)
        self.assertAlmostEqual(grid.quadrature_weights('rectangle').sum(), 11.0)
        with self.assertRaises(DomainError):
            grid.quadrature_weights('simpson')

    def test_invalid_grids(self):
        for args in [(0.0, -1.0, 1.0, 5, 5), (10.0, 1.0, -1.0, 5, 5),
                     (10.0, -1.0, 1.0, 1, 5), (10.0, -1.0, 1.0, 5, 1)]:
            with self.assertRaises(DomainError):
                DiscretizationGrid(*args)


class DiscreteBathTests(SimpleTestCase):

    def test_build_sorts_and_drops_zero_weights(self):
        with self.assertLogs('bath_modes.discretizers', level='WARNING'):
            bath = DiscreteBath.build([30.0, -10.0, 5.0], [1.0, 4.0, 0.0], 300.0, 'test')
        np.testing.assert_array_equal(bath.frequencies, [-10.0, 30.0])
        np.testing.assert_array_equal(bath.couplings, [2.0, 1.0])
        self.assertEqual(len(bath), 2)

    def test_rejects_duplicate_frequencies(self):
        with self.assertRaises(DomainError):
            DiscreteBath([1.0, 1.0], [1.0, 2.0], 0.0, 'test')


class DiscretizeIdTests(SimpleTestCase):

    grid = DiscretizationGrid(500.0, -500.0, 500.0, 100, 401)

    def test_selects_grid_frequencies(self):
        bath = discretize_id(OHMIC_300K, self.grid, rank=12)
        self.assertLessEqual(len(bath), 12)
        self.assertTrue(np.all(np.isin(bath.frequencies, self.grid.frequencies)))
        self.assertTrue(np.all(np.diff(bath.frequencies) > 0))
        provenance = bath.provenance
        self.assertEqual(provenance['selected_rank'], 12)
        self.assertEqual(len(provenance['pivot_frequencies_cm1']), 12)
        self.assertEqual(len(provenance['seed_coefficients']), 12)
        self.assertTrue(provenance['tolerance_reached'])

    def test_reorganization_within_achieved_residual(self):
        bath = discretize_id(OHMIC_300K, self.grid, rank=12)
        reference = c0(OHMIC_300K, -500.0, 500.0)
        mismatch = abs(bath.reorganization_sum - reference) / reference
        self.assertLessEqual(mismatch, bath.provenance['achieved_residual'] + 1e-9)

    def test_repeatable(self):
        first = discretize_id(OHMIC_300K, self.grid, rank=10)
        second = discretize_id(OHMIC_300K, self.grid, rank=10)
        np.testing.assert_array_equal(first.frequencies, second.frequencies)
        np.testing.assert_array_equal(first.coupling_squared, second.coupling_squared)

    def test_single_line_gives_single_mode(self):
        line = NarrowLine(center=100.0, width=0.01, area=3.0)
        q = Qnsd(line, 0.0)
        grid = DiscretizationGrid(100.0, 0.0, 200.0, 50, 201)
        bath = discretize_id(q, grid, tolerance=1e-6)
        self.assertEqual(len(bath), 1)
        self.assertEqual(bath.frequencies[0], 100.0)
        np.testing.assert_allclose(bath.coupling_squared[0], 3.0, rtol=1e-6)

    def test_zero_temperature_keeps_positive_frequencies(self):
        q = Qnsd(OHMIC, 0.0)
        grid = DiscretizationGrid(300.0, 0.0, 500.0, 60, 300)
        bath = discretize_id(q, grid, rank=8)
        self.assertTrue(np.all(bath.frequencies >= 0))

    def test_singular_zero_column_is_moved(self):
        grid = DiscretizationGrid(300.0, -200.0, 200.0, 60, 201)
        bath = discretize_id(SUB_OHMIC_50K, grid, rank=10)
        self.assertTrue(np.all(np.isfinite(bath.coupling_squared)))
        self.assertNotIn(0.0, bath.frequencies.tolist())

    def test_rank_above_the_few_positive_columns_at_zero_temperature(self):
        # only four grid frequencies above 0 carry weight at T = 0
        grid = DiscretizationGrid(200.0, -500.0, 10.0, 40, 200)
        with self.assertLogs('bath_modes.linalg_kernels', level='WARNING'):
            bath = discretize_id(Qnsd(OHMIC, 0.0), grid, rank=8)
        self.assertTrue(bath.provenance['rank_truncated'])
        self.assertLessEqual(bath.provenance['selected_rank'], 4)
        self.assertLessEqual(len(bath), 4)
        self.assertTrue(np.all(bath.frequencies > 0))


class DiscretizeLdTests(SimpleTestCase):

    def test_bins_partition_the_window(self):
        edges = ld_bin_edges(500.0, 20, 1.1)
        self.assertEqual(edges.size, 11)
        self.assertEqual(edges[0], 500.0)
        self.assertEqual(edges[-1], 0.0)
        self.assertTrue(np.all(np.diff(edges) < 0))
        np.testing.assert_allclose(edges[1:-1], 500.0 * 1.1 ** -np.arange(1.0, 10.0), rtol=1e-15)

    def test_weights_sum_to_c0(self):
        bath = discretize_ld(OHMIC_300K, 500.0, 20, 1.1)
        self.assertEqual(len(bath), 20)
        self.assertAlmostEqual(bath.reorganization_sum / c0(OHMIC_300K, -500.0, 500.0), 1.0,
                               delta=1e-8)

    def test_flat_density_gives_bin_midpoints(self):
        q = Qnsd(FlatSd(2.0), 0.0)
        bath = discretize_ld(q, 100.0, 6, 2.0)
        edges = ld_bin_edges(100.0, 6, 2.0)
        midpoints = 0.5 * (edges[:-1] + edges[1:])
        order = np.argsort(midpoints)
        np.testing.assert_allclose(bath.frequencies, midpoints[order], rtol=1e-10)
        widths = edges[:-1] - edges[1:]
        np.testing.assert_allclose(bath.coupling_squared, 2.0 / math.pi * widths[order], rtol=1e-10)

    def test_odd_count_rejected(self):
        with self.assertRaises(DomainError):
            discretize_ld(OHMIC_300K, 500.0, 7)
        with self.assertRaises(DomainError):
            discretize_ld(OHMIC_300K, 500.0, 8, ld_lambda=1.0)


class DiscretizeMdmTests(SimpleTestCase):

    def test_ohmic_nodes_closed_form(self):
        bath = discretize_mdm(OHMIC_300K, 20)
        k = np.arange(1, 11)
        expected = -53.0 * np.log(1 - (k - 0.5) / 10)
        self.assertEqual(len(bath), 20)
        np.testing.assert_allclose(bath.frequencies[10:], expected, rtol=1e-12)
        np.testing.assert_allclose(bath.frequencies[:10], -expected[::-1], rtol=1e-12)

    def test_cumulative_condition(self):
        bath = discretize_mdm(Qnsd(SUB_OHMIC_50K.sd, 50.0), 16)
        self.assertLessEqual(bath.provenance['cumulative_residual'], 1e-10)
        nodes = bath.frequencies[bath.frequencies > 0]
        residual = 8 * gammainc(0.25, nodes / 53.0) - (np.arange(1, 9) - 0.5)
        np.testing.assert_allclose(residual, 0.0, atol=1e-10)

    def test_coefficients_follow_density(self):
        bath = discretize_mdm(OHMIC_300K, 10)
        gamma = bath.provenance['gamma_cm1']
        self.assertAlmostEqual(gamma, OHMIC.inverse_moment() / 5)
        w = bath.frequencies
        rho = OHMIC.evaluate(np.abs(w)) / (gamma * np.abs(w))
        np.testing.assert_allclose(bath.coupling_squared, OHMIC_300K(w) / rho, rtol=1e-12)

    def test_zero_temperature_keeps_positive_side(self):
        bath = discretize_mdm(Qnsd(OHMIC, 0.0), 10)
        self.assertEqual(len(bath), 5)
        self.assertTrue(np.all(bath.frequencies > 0))


class DiscretizeBsdoTests(SimpleTestCase):

    def test_weights_sum_to_total_weight(self):
        bath = discretize_bsdo(OHMIC_300K, -250.0, 250.0, 20)
        self.assertEqual(len(bath), 20)
        total = bath.provenance['total_weight']
        self.assertAlmostEqual(bath.reorganization_sum / total, 1.0, delta=1e-10)
        self.assertAlmostEqual(total / c0(OHMIC_300K, -250.0, 250.0), 1.0, delta=1e-8)

    def test_refuses_singular_endpoint(self):
        with self.assertRaises(SingularWeightError) as ctx:
            discretize_bsdo(SUB_OHMIC_50K, -200.0, 200.0, 10)
        self.assertIn('omega_min > 0', str(ctx.exception))

    def test_interval_excluding_zero(self):
        bath = discretize_bsdo(SUB_OHMIC_50K, 0.5, 200.0, 10)
        self.assertTrue(np.all((bath.frequencies > 0.5) & (bath.frequencies < 200.0)))


class ChainMapTests(SimpleTestCase):

    def test_single_site(self):
        chain = chain_map(OHMIC_300K, -250.0, 250.0, 1)
        self.assertEqual(chain.size, 1)
        self.assertEqual(chain.hoppings.size, 0)
        self.assertAlmostEqual(chain.system_coupling, math.sqrt(chain.total_weight))

    def test_legendre_chain(self):
        chain = chain_map(uniform_weight, -1.0, 1.0, 3)
        np.testing.assert_allclose(chain.site_energies, 0.0, atol=1e-13)
        np.testing.assert_allclose(chain.hoppings, [math.sqrt(1 / 3), math.sqrt(4 / 15)], rtol=1e-12)

    def test_chain_spectrum_matches_bsdo_nodes(self):
        chain = chain_map(OHMIC_300K, -250.0, 250.0, 12)
        bath = discretize_bsdo(OHMIC_300K, -250.0, 250.0, 12)
        self.assertTrue(np.all(chain.hoppings > 0))
        np.testing.assert_allclose(np.linalg.eigvalsh(chain.hamiltonian()), bath.frequencies,
                                   rtol=0, atol=1e-12 * 250.0 * 10)


class HybridizationTests(SimpleTestCase):

    def test_gauss_modes_reproduce_hybridization(self):
        bath = discretize_bsdo(OHMIC_300K, -500.0, 500.0, 20)
        for z in (600j, 100.0 + 700j, -800.0 + 50j):
            np.testing.assert_allclose(hybridization_from_modes(bath, z),
                                       hybridization_function(OHMIC_300K, -500.0, 500.0, z),
                                       rtol=1e-8)

    def test_modes_vectorized(self):
        bath = DiscreteBath([-1.0, 2.0], [1.0, 3.0], 0.0, 'test')
        values = hybridization_from_modes(bath, np.array([1j, 5.0]))
        np.testing.assert_allclose(values, [1 / (1j + 1) + 3 / (1j - 2), 1 / 6 + 1.0])

    def test_real_point_on_interval_rejected(self):
        with self.assertRaises(DomainError):
            hybridization_function(OHMIC_300K, -500.0, 500.0, 10.0)

    def test_chain_and_bath_totals_agree(self):
        chain = chain_map(OHMIC_300K, -250.0, 250.0, 6)
        bath = discretize_bsdo(OHMIC_300K, -250.0, 250.0, 6)
        self.assertAlmostEqual(chain.total_weight / bath.reorganization_sum, 1.0, delta=1e-12)
        np.testing.assert_allclose(bcf_from_modes(bath, [0.0]).values[0], bath.reorganization_sum)
