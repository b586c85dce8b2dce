import math
import unittest

import numpy as np

from lagdisp.interface import transforms
from lagdisp.interface import verify
from lagdisp.interface.spectral import OperatorParams
from lagdisp.interface.spectral import eigenvalue
from lagdisp.interface.spectral import levels_in_window
from lagdisp.interface.spectral import modes_in_window
from lagdisp.interface.transforms import DyadicPartition
from lagdisp.interface.transforms import QuadratureGrid
from lagdisp.interface.transforms import SpectralBasis
from lagdisp.interface.verify import ScanGrid


def setup_default_basis(a=1.0, lambda_max=12.0):
    spectral_set = modes_in_window(0.0, lambda_max, OperatorParams(a))
    grid = QuadratureGrid.for_spectral_set(spectral_set)
    return SpectralBasis(grid, spectral_set)


def besov_weight(partition, value, s):
    """sum_j 2^(2js) psi_j(sqrt lambda)^2"""
    root = math.sqrt(value)
    return sum(4.0**(j*s)*float(partition.psi_j(j, root))**2
               for j in range(-4, 8))


class TestKernelEstimates(unittest.TestCase):
    """
    Integration test of the kernel scans on the standard grid
    """

    def test_k_function_scan(self):
        """
        rho in [0, 40] with 400 nodes and u with 81 nodes
        """
        report = verify.verify_k_function(40.0, 400, 81, OperatorParams(1.0))
        self.assertTrue(report.stable)
        self.assertEqual(report.extras["truncated_points"], 0)

        report = verify.verify_k_function(40.0, 400, 81, OperatorParams(0.0))
        self.assertAlmostEqual(report.sup, (2*math.pi)**-1.5, delta=1.0e-9)
        self.assertLessEqual(report.extras["max_reference_deviation"],
                             1.0e-9)

    def test_schrodinger_dispersive(self):
        grid = ScanGrid()
        for a in (0.5, 1.0, 2.0):
            report = verify.verify_schrodinger_dispersive(grid,
                                                          OperatorParams(a))
            self.assertTrue(report.stable)
            self.assertEqual(report.extras["truncated_points"], 0)

        report = verify.verify_schrodinger_dispersive(grid,
                                                      OperatorParams(0.0))
        self.assertAlmostEqual(report.sup, (4*math.pi)**-1.5, delta=1.0e-6)

    def test_heat_gaussian(self):
        grid = ScanGrid().with_times(0.05, 5.0)
        for a in (0.5, 1.0, 2.0):
            report = verify.verify_heat_gaussian(grid, OperatorParams(a))
            self.assertTrue(report.stable)
            self.assertLessEqual(report.extras["bound_factor"], 10.0)


class TestBlockEstimates(unittest.TestCase):
    """
    Integration test of the Littlewood-Paley estimates
    """

    def test_bernstein_kernel_supremum(self):
        """
        2^(-3j) sup |psi_j(sqrt H)(x, y)| stays within one order of
        magnitude over the active blocks up to j = 3
        """
        grid = ScanGrid()
        for a in (0.0, 1.0):
            params = OperatorParams(a)
            bottom = math.sqrt(eigenvalue(0, 0, params))
            blocks = [j for j in range(-2, 4) if 2.0**(j + 1) >= bottom]
            values = [verify.verify_bernstein(j, 1, math.inf, 0.0, params,
                                              grid).sup for j in blocks]

            self.assertGreater(min(values), 0.0)
            self.assertLessEqual(max(values)/min(values), 10.0)

    def test_halfwave_decay(self):
        grid = ScanGrid()
        params = OperatorParams(1.0)
        for j in (1, 2, 3):
            report = verify.verify_halfwave_decay(
                j, verify.halfwave_grid(j, grid), params)
            self.assertTrue(report.stable)

    def test_besov_equivalence(self):
        """
        Ratios of two partitions stay inside [1/C, C] with C frozen from
        the single mode ratios of the window
        """
        params = OperatorParams(1.0)
        partition_a = DyadicPartition()
        partition_b = DyadicPartition(1.2, 1.8)
        levels = levels_in_window(0.0, 20.0, params)
        single = [math.sqrt(besov_weight(partition_a, value, 0.5)
                            / besov_weight(partition_b, value, 0.5))
                  for value in levels.eigenvalues]
        frozen = max(max(single), 1.0/min(single))

        for seed in (0, 100):
            report = verify.verify_besov_equivalence(
                partition_a, partition_b, 0.5, 2, 2, params, seed=seed)
            self.assertGreaterEqual(report.extras["min_ratio"],
                                    1.0/frozen - 1.0e-12)
            self.assertLessEqual(report.extras["max_ratio"],
                                 frozen + 1.0e-12)

        same = verify.verify_besov_equivalence(
            partition_a, partition_a, 0.5, 2, 2, params)
        self.assertAlmostEqual(same.sup, 1.0, delta=1.0e-12)


class TestWaveEstimates(unittest.TestCase):
    """
    Integration test of the conservation laws and the Strichartz quotient
    """

    def test_conservation(self):
        spectral_set = modes_in_window(0.0, 12.0, OperatorParams(1.0))
        f = transforms.random_coefficients(spectral_set, seed=1)
        g = transforms.random_coefficients(spectral_set, seed=2)
        energy = transforms.wave_energy(f, g, 0.0)

        for t in np.linspace(0.1, 10.0, 7):
            self.assertAlmostEqual(transforms.wave_energy(f, g, t), energy,
                                   delta=1.0e-12*energy)
            self.assertAlmostEqual(
                transforms.schrodinger_evolve(f, t).norm(), 1.0,
                delta=1.0e-12)

    def test_strichartz(self):
        """
        (q, r) = (4, 4) for five random data sets on [0.1, pi - 0.1]
        """
        basis = setup_default_basis()
        spectral_set = basis.spectral_set
        data = [(transforms.random_coefficients(spectral_set, 2*i),
                 transforms.random_coefficients(spectral_set, 2*i + 1))
                for i in range(5)]

        report = verify.verify_strichartz(4, 4, data, 0.1, math.pi - 0.1,
                                          basis)

        self.assertTrue(math.isfinite(report.sup))
        self.assertEqual(report.extras["s"], 0.5)
        self.assertTrue(report.stable)
        self.assertLess(report.extras["max_relative_change"], 0.02)


if __name__ == '__main__':
    unittest.main()
