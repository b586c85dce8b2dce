import math
import unittest

import numpy as np

from lagdisp.helper.exceptions import InputError
from lagdisp.helper.exceptions import ResolutionError
from lagdisp.helper.geometry import PolarPoints
from lagdisp.interface import transforms
from lagdisp.interface.spectral import OperatorParams
from lagdisp.interface.spectral import eigenfunction
from lagdisp.interface.spectral import levels_in_window
from lagdisp.interface.spectral import modes_in_window
from lagdisp.interface.transforms import DyadicPartition
from lagdisp.interface.transforms import GridFunction
from lagdisp.interface.transforms import QuadratureGrid
from lagdisp.interface.transforms import SpectralBasis
from lagdisp.interface.transforms import SpectralCoefficients


def setup_basis(a=0.0, lambda_max=7.5):
    """Basis of a small window on a grid built for it"""
    spectral_set = modes_in_window(0.0, lambda_max, OperatorParams(a))
    grid = QuadratureGrid.for_spectral_set(spectral_set, n_r=60,
                                           radius=10.0, n_mu=8)
    return SpectralBasis(grid, spectral_set)


def setup_single_mode(spectral_set, mode=(0, 0, 0)):
    coefficients = SpectralCoefficients(spectral_set)
    coefficients.values[spectral_set.index_of(mode)] = 1.0
    return coefficients


class TestQuadratureGrid(unittest.TestCase):
    """
    Tests for QuadratureGrid and GridFunction
    """

    def test_sizes(self):
        grid = QuadratureGrid(n_r=10, radius=5.0, n_mu=4)

        self.assertEqual(grid.shape, (10, 4, 8))
        self.assertEqual(grid.size, 320)
        self.assertEqual(grid.points().shape, (10, 4, 8))
        self.assertAlmostEqual(grid.sphere_area(), 4*math.pi, places=13)

    def test_gaussian_integral(self):
        """
        The integral of exp(-|x|^2) over R^3 is pi^(3/2)
        """
        grid = QuadratureGrid(n_r=80, radius=10.0, n_mu=6)
        f = GridFunction.from_callable(lambda x: np.exp(-x.r**2), grid)

        self.assertAlmostEqual(grid.integrate(f.values).real,
                               math.pi**1.5, places=11)

    def test_for_spectral_set(self):
        spectral_set = modes_in_window(0.0, 7.5, OperatorParams(0.0))
        grid = QuadratureGrid.for_spectral_set(spectral_set, n_r=60,
                                               radius=10.0, n_mu=8)

        self.assertAlmostEqual(grid.radius, 2*math.sqrt(7.5) + 10.0)
        self.assertEqual(grid.n_mu, 14)
        self.assertGreaterEqual(grid.n_r, 8*grid.radius)

    def test_refined(self):
        grid = QuadratureGrid(n_r=10, radius=5.0, n_mu=4)
        fine = grid.refined()

        self.assertEqual(fine.shape, (20, 8, 16))
        self.assertEqual(fine.radius, 5.0)
        self.assertNotEqual(fine, grid)
        with self.assertRaises(InputError):
            grid.refined(0)

    def test_invalid_grid(self):
        with self.assertRaises(InputError):
            QuadratureGrid(n_r=0)
        with self.assertRaises(InputError):
            QuadratureGrid(radius=-1.0)

    def test_grid_function_checks(self):
        grid = QuadratureGrid(n_r=4, radius=2.0, n_mu=2)
        with self.assertRaises(InputError):
            GridFunction(np.zeros((4, 2, 3)), grid)
        values = np.zeros(grid.shape)
        values[0, 0, 0] = np.nan
        with self.assertRaises(InputError):
            GridFunction(values, grid)

        other = QuadratureGrid(n_r=5, radius=2.0, n_mu=2)
        with self.assertRaises(InputError):
            GridFunction(np.zeros(grid.shape), grid) + GridFunction(
                np.zeros(other.shape), other)

    def test_sup_norm(self):
        grid = QuadratureGrid(n_r=4, radius=2.0, n_mu=2)
        values = np.zeros(grid.shape, dtype=complex)
        values[1, 1, 2] = 3.0 - 4.0j

        self.assertEqual(GridFunction(values, grid).lp_norm(math.inf), 5.0)


class TestSpectralBasis(unittest.TestCase):
    """
    Tests for analysis, synthesis and the Gram matrix
    """

    def test_gram_identity(self):
        """
        The modes are orthonormal under the quadrature of their grid
        """
        basis = setup_basis(a=1.0)
        gram = basis.gram()

        np.testing.assert_allclose(gram, np.eye(len(basis.spectral_set)),
                                   atol=1e-9)

    def test_gram_matrix_function(self):
        basis = setup_basis()
        gram = transforms.gram_matrix(basis.spectral_set, basis.grid)

        np.testing.assert_allclose(gram, basis.gram(), atol=1e-14)

    def test_analyze_inverts_synthesize(self):
        basis = setup_basis(a=1.0)
        coefficients = transforms.random_coefficients(basis.spectral_set,
                                                      seed=3)

        f = basis.synthesize(coefficients)
        recovered = basis.analyze(f)

        np.testing.assert_allclose(recovered.values, coefficients.values,
                                   atol=1e-9)

    def test_module_level_functions(self):
        basis = setup_basis()
        coefficients = transforms.random_coefficients(basis.spectral_set)

        f = transforms.synthesize(coefficients, basis.grid)
        recovered = transforms.analyze(f, basis.spectral_set)

        np.testing.assert_allclose(recovered.values, coefficients.values,
                                   atol=1e-9)

    def test_parseval(self):
        """
        The quadrature L2 norm of the synthesis equals the coefficient norm
        """
        basis = setup_basis()
        coefficients = transforms.random_coefficients(basis.spectral_set,
                                                      seed=5)

        f = basis.synthesize(coefficients)

        self.assertAlmostEqual(f.l2_norm(), 1.0, places=9)
        self.assertEqual(transforms.lp_norm(coefficients, 2), 1.0)

    def test_evaluate_matches_synthesis(self):
        basis = setup_basis()
        coefficients = transforms.random_coefficients(basis.spectral_set,
                                                      seed=1)
        f = basis.synthesize(coefficients)
        points = basis.grid.points()[5:7, 2:4, 0:3]

        values = basis.evaluate(coefficients, points)

        np.testing.assert_allclose(values, f.values[5:7, 2:4, 0:3],
                                   atol=1e-12)

    def test_ground_state_synthesis(self):
        """
        The mode (0, 0, 0) synthesizes to the oscillator ground state
        """
        basis = setup_basis()
        f = basis.synthesize(setup_single_mode(basis.spectral_set))

        r = basis.grid.r
        np.testing.assert_allclose(f.values[:, 3, 5],
                                   (2*math.pi)**-0.75*np.exp(-0.25*r*r),
                                   atol=1e-13)

    def test_resolution_error(self):
        """
        A grid too coarse for the highest degree raises ResolutionError
        """
        spectral_set = modes_in_window(0.0, 7.5, OperatorParams(0.0))
        grid = QuadratureGrid(n_r=20, radius=10.0, n_mu=4)

        with self.assertRaises(ResolutionError):
            SpectralBasis(grid, spectral_set)

    def test_other_grid(self):
        basis = setup_basis()
        other = QuadratureGrid(n_r=30, radius=8.0, n_mu=14)

        with self.assertRaises(InputError):
            basis.analyze(GridFunction(np.zeros(other.shape), other))

    def test_lp_norm_needs_basis(self):
        basis = setup_basis()
        coefficients = transforms.random_coefficients(basis.spectral_set)

        with self.assertRaises(InputError):
            transforms.lp_norm(coefficients, 4)
        self.assertGreater(transforms.lp_norm(coefficients, 4, basis), 0.0)

    def test_refined_sup_is_not_smaller(self):
        basis = setup_basis(lambda_max=4.5)
        coefficients = transforms.random_coefficients(basis.spectral_set)

        coarse = transforms.lp_norm(coefficients, math.inf, basis)
        refined = transforms.lp_norm(coefficients, math.inf, basis,
                                     refine=True)

        self.assertGreaterEqual(refined, coarse)

    def test_check_exponent(self):
        self.assertEqual(transforms.check_exponent("inf", "p"), math.inf)
        self.assertEqual(transforms.check_exponent(2, "p"), 2.0)
        with self.assertRaises(InputError):
            transforms.check_exponent(0.5, "p")
        with self.assertRaises(InputError):
            transforms.check_exponent("two", "q")


class TestMultipliers(unittest.TestCase):
    """
    Tests for spectral multipliers and the evolution groups
    """

    def test_apply_multiplier_on_grid(self):
        basis = setup_basis()
        coefficients = transforms.random_coefficients(basis.spectral_set)
        f = basis.synthesize(coefficients)

        result = transforms.apply_multiplier(np.sqrt, f, basis)
        expected = basis.synthesize(coefficients.multiply(np.sqrt))

        np.testing.assert_allclose(result.values, expected.values,
                                   atol=1e-9)
        with self.assertRaises(InputError):
            transforms.apply_multiplier(np.sqrt, f)

    def test_multipliers_compose(self):
        """
        F(H) G(H) = (F G)(H) on coefficients and on grid functions
        """
        basis = setup_basis(a=1.0)
        coefficients = transforms.random_coefficients(basis.spectral_set,
                                                      seed=5)
        block = DyadicPartition().multiplier(0)

        def damping(eigenvalues):
            return np.exp(-0.3*eigenvalues)

        def product(eigenvalues):
            return damping(eigenvalues)*block(eigenvalues)

        composed = transforms.apply_multiplier(
            damping, transforms.apply_multiplier(block, coefficients))
        direct = transforms.apply_multiplier(product, coefficients)
        np.testing.assert_allclose(composed.values, direct.values,
                                   rtol=1e-14, atol=1e-16)

        f = basis.synthesize(coefficients)
        composed = transforms.apply_multiplier(
            damping, transforms.apply_multiplier(block, f, basis), basis)
        direct = transforms.apply_multiplier(product, f, basis)
        np.testing.assert_allclose(composed.values, direct.values,
                                   atol=1e-9)

    def test_schrodinger_is_unitary(self):
        spectral_set = modes_in_window(0.0, 12.0, OperatorParams(1.0))
        coefficients = transforms.random_coefficients(spectral_set, seed=2)

        for t in (0.3, 1.7, -2.0):
            evolved = transforms.schrodinger_evolve(coefficients, t)
            self.assertAlmostEqual(evolved.norm(), 1.0, places=13)

    def test_heat_contracts(self):
        spectral_set = modes_in_window(0.0, 12.0, OperatorParams(1.0))
        coefficients = transforms.random_coefficients(spectral_set, seed=2)

        self.assertLess(transforms.heat_evolve(coefficients, 0.5).norm(),
                        1.0)
        np.testing.assert_allclose(
            transforms.heat_evolve(coefficients, 0.0).values,
            coefficients.values)
        with self.assertRaises(InputError):
            transforms.heat_evolve(coefficients, -0.1)

    def test_wave_energy_is_conserved(self):
        spectral_set = modes_in_window(0.0, 12.0, OperatorParams(1.0))
        f = transforms.random_coefficients(spectral_set, seed=7)
        g = transforms.random_coefficients(spectral_set, seed=8)

        energy = transforms.wave_energy(f, g, 0.0)
        for t in (0.7, 2.0, 9.0):
            self.assertAlmostEqual(transforms.wave_energy(f, g, t)/energy,
                                   1.0, places=12)

    def test_wave_initial_data(self):
        """
        u(0) = f and du/dt(0) = g, the time derivative matches a central
        difference
        """
        spectral_set = modes_in_window(0.0, 12.0, OperatorParams(1.0))
        f = transforms.random_coefficients(spectral_set, seed=7)
        g = transforms.random_coefficients(spectral_set, seed=8)

        np.testing.assert_allclose(transforms.wave_evolve(f, g, 0.0).values,
                                   f.values, atol=1e-15)
        np.testing.assert_allclose(
            transforms.wave_velocity(f, g, 0.0).values, g.values,
            atol=1e-15)

        h = 1.0e-5
        difference = (transforms.wave_evolve(f, g, 1.0 + h).values
                      - transforms.wave_evolve(f, g, 1.0 - h).values)/(2*h)
        np.testing.assert_allclose(difference,
                                   transforms.wave_velocity(f, g, 1.0).values,
                                   atol=1e-7)

    def test_wave_needs_shared_set(self):
        params = OperatorParams(1.0)
        f = transforms.random_coefficients(modes_in_window(0, 8.0, params))
        g = transforms.random_coefficients(modes_in_window(0, 9.0, params))

        with self.assertRaises(InputError):
            transforms.wave_evolve(f, g, 1.0)

    def test_non_finite_multiplier(self):
        spectral_set = modes_in_window(0.0, 5.0, OperatorParams(0.0))
        coefficients = transforms.random_coefficients(spectral_set)

        with self.assertRaises(InputError):
            coefficients.multiply(lambda eigenvalues: 1.0/(eigenvalues - 1.5))

    def test_random_coefficients(self):
        spectral_set = modes_in_window(0.0, 8.0, OperatorParams(1.0))

        first = transforms.random_coefficients(spectral_set, seed=11)
        second = transforms.random_coefficients(spectral_set, seed=11)

        self.assertAlmostEqual(first.norm(), 1.0, places=14)
        np.testing.assert_array_equal(first.values, second.values)
        with self.assertRaises(InputError):
            transforms.random_coefficients(
                modes_in_window(0.0, 1.0, OperatorParams(1.0)))

    def test_bump_coefficients(self):
        basis = setup_basis()

        coefficients = transforms.bump_coefficients(basis, (1.0, 0.0, 1.0))

        self.assertAlmostEqual(coefficients.norm(), 1.0, places=14)
        with self.assertRaises(InputError):
            transforms.bump_coefficients(basis, (1.0, 0.0, 1.0), width=0.0)


class TestDyadicPartition(unittest.TestCase):
    """
    Tests for the Littlewood-Paley partition
    """

    def test_chi_edges(self):
        partition = DyadicPartition()

        self.assertEqual(partition.chi(0.5), 1.0)
        self.assertEqual(partition.chi(1.0), 1.0)
        self.assertEqual(partition.chi(2.0), 0.0)
        self.assertEqual(partition.chi(3.0), 0.0)
        self.assertTrue(0.0 < partition.chi(1.5) < 1.0)

    def test_psi_support(self):
        """
        psi vanishes outside [1/2, 2]
        """
        for partition in (DyadicPartition(), DyadicPartition(1.2, 1.8)):
            x = np.concatenate([np.linspace(0.0, 0.5, 11),
                                np.linspace(2.0, 5.0, 11)])
            np.testing.assert_array_equal(partition.psi(x), 0.0)
            self.assertGreater(partition.psi(1.0), 0.0)

    def test_partition_of_unity(self):
        x = np.geomspace(1.0e-2, 1.0e2, 301)
        for partition in (DyadicPartition(), DyadicPartition(1.2, 1.8)):
            np.testing.assert_allclose(partition.block_sum(x), 1.0,
                                       atol=1e-14)

    def test_active_blocks_sum_to_one(self):
        partition = DyadicPartition()
        spectral_set = modes_in_window(0.0, 30.0, OperatorParams(2.5))
        eigenvalues = spectral_set.eigenvalues

        total = np.zeros(eigenvalues.shape)
        for j in partition.active_blocks(eigenvalues):
            total += partition.multiplier(j)(eigenvalues)

        np.testing.assert_allclose(total, 1.0, atol=1e-14)
        self.assertEqual(partition.active_blocks([]), [])

    def test_block_window(self):
        self.assertEqual(DyadicPartition.block_window(1), (1.0, 16.0))
        self.assertEqual(DyadicPartition.block_window(0), (0.25, 4.0))

        partition = DyadicPartition()
        lo, hi = DyadicPartition.block_window(2)
        outside = np.array([0.5*lo, 2.0*hi])
        np.testing.assert_array_equal(partition.multiplier(2)(outside), 0.0)

    def test_square_sum_bounds(self):
        """
        At most two blocks overlap, so the square sum lies in [1/2, 1]
        """
        low, high = DyadicPartition(1.2, 1.8).square_sum_bounds()

        self.assertGreaterEqual(low, math.sqrt(0.5) - 1.0e-12)
        self.assertLessEqual(high, 1.0 + 1.0e-12)

    def test_invalid_partition(self):
        for lo, hi in ((0.5, 2.0), (1.5, 1.2), (1.0, 2.5)):
            with self.assertRaises(InputError):
                DyadicPartition(lo, hi)

    def test_equality(self):
        self.assertEqual(DyadicPartition(), DyadicPartition(1, 2))
        self.assertNotEqual(DyadicPartition(), DyadicPartition(1.2, 1.8))
        self.assertEqual(DyadicPartition(1.2, 1.8).to_dict(),
                         {"lo": 1.2, "hi": 1.8})


class TestNorms(unittest.TestCase):
    """
    Tests for the Besov and Sobolev norms
    """

    def test_single_mode_besov(self):
        """
        For one mode the norm is (sum_j 2^(2js) psi_j(sqrt lambda)^2)^(1/2)
        """
        spectral_set = modes_in_window(0.0, 8.0, OperatorParams(1.0))
        mode = (1, 1, 0)
        coefficients = setup_single_mode(spectral_set, mode)
        value = float(spectral_set.eigenvalues[spectral_set.index_of(mode)])
        partition = DyadicPartition()

        expected = math.sqrt(sum(
            4.0**(j*0.5)*float(partition.psi_j(j, math.sqrt(value)))**2
            for j in range(-3, 6)))

        self.assertAlmostEqual(
            transforms.besov_norm(coefficients, 0.5, 2, 2, partition),
            expected, places=13)

    def test_besov_bounded_by_l2(self):
        spectral_set = modes_in_window(0.0, 30.0, OperatorParams(1.0))
        coefficients = transforms.random_coefficients(spectral_set, seed=4)

        value = transforms.besov_norm(coefficients, 0.0, 2, 2)

        self.assertGreaterEqual(value, math.sqrt(0.5) - 1.0e-12)
        self.assertLessEqual(value, 1.0 + 1.0e-12)

    def test_besov_q_infinity(self):
        spectral_set = modes_in_window(0.0, 30.0, OperatorParams(1.0))
        coefficients = transforms.random_coefficients(spectral_set, seed=4)

        norms = transforms.block_norms(coefficients, 2)
        value = transforms.besov_norm(coefficients, 1.0, 2, math.inf)

        self.assertAlmostEqual(value, max(2.0**j*norm for j, norm
                                          in norms.items()), places=14)

    def test_empty_coefficients(self):
        spectral_set = modes_in_window(0.0, 1.0, OperatorParams(1.0))

        self.assertEqual(transforms.besov_norm(
            SpectralCoefficients(spectral_set), 0.5, 2, 2), 0.0)

    def test_sobolev(self):
        spectral_set = modes_in_window(0.0, 8.0, OperatorParams(0.0))
        coefficients = setup_single_mode(spectral_set, (0, 1, 1))

        self.assertAlmostEqual(transforms.sobolev_norm(coefficients, 2.0),
                               2.5, places=14)
        self.assertAlmostEqual(transforms.sobolev_norm(coefficients, 0.0),
                               1.0, places=14)


class TestSpectralKernel(unittest.TestCase):
    """
    Tests for ZonalKernelTable and spectral_kernel
    """

    def test_matches_mode_sum(self):
        """
        The zonal form equals the sum over modes of F e(x) conj(e(y))
        """
        params = OperatorParams(1.0)
        levels = levels_in_window(0.0, 9.0, params)
        spectral_set = modes_in_window(0.0, 9.0, params)
        x = PolarPoints(np.array([0.3, 1.0, 2.2]), np.array([0.1, 2.0, 4.0]),
                        np.array([0.4, 1.5, 2.9]))
        y = PolarPoints(np.array([1.1, 0.6, 1.9]), np.array([5.0, 0.3, 1.0]),
                        np.array([2.0, 0.2, 1.2]))

        def function(eigenvalues):
            return np.exp(-0.3j*eigenvalues)

        value = transforms.spectral_kernel(function, levels, x, y)
        expected = np.zeros(3, dtype=complex)
        for mode, eigenvalue in zip(spectral_set, spectral_set.eigenvalues):
            expected += (function(eigenvalue)*eigenfunction(mode, params, x)
                         * np.conj(eigenfunction(mode, params, y)))

        np.testing.assert_allclose(value, expected, atol=1e-13)

    def test_table_grid_and_pairs(self):
        params = OperatorParams(2.5)
        levels = levels_in_window(0.0, 16.0, params)
        table = transforms.ZonalKernelTable(levels, [0.5, 1.0, 2.0])
        factors = table.factors(lambda eigenvalues: 1.0/eigenvalues)
        u = np.array([-1.0, 0.0, 0.5])

        grid = table.evaluate(factors, [0, 2], [1, 1], u)
        pairs = table.evaluate_pairs(factors, np.array([0, 0, 2]),
                                     np.array([1, 1, 1]), u)

        self.assertEqual(grid.shape, (2, 3))
        np.testing.assert_allclose(pairs, [grid[0, 0], grid[0, 1],
                                           grid[1, 2]], rtol=1e-13)

    def test_block_kernel_is_symmetric(self):
        params = OperatorParams(1.0)
        x = (1.0, 0.0, 0.5)
        y = (0.7, 1.0, 1.3)

        forward = transforms.lp_block_kernel(1, params, x, y)
        backward = transforms.lp_block_kernel(1, params, y, x)

        self.assertAlmostEqual(forward, backward, places=13)

    def test_block_kernel_acts_as_multiplier(self):
        """
        Integrating the block kernel against f gives psi_j(sqrt H) f
        """
        basis = setup_basis(a=1.0)
        spectral_set = basis.spectral_set
        params = spectral_set.params
        partition = DyadicPartition()
        x = (1.3, 0.4, 1.1)
        kernel = transforms.lp_block_kernel(0, params, x,
                                            basis.grid.points())

        mode = (0, 1, 0)
        single = setup_single_mode(spectral_set, mode)
        integral = basis.grid.integrate(
            kernel*basis.synthesize(single).values)
        value = spectral_set.eigenvalues[spectral_set.index_of(mode)]
        expected = (partition.psi_j(0, math.sqrt(value))
                    * eigenfunction(mode, params, PolarPoints(*x)))
        self.assertGreater(abs(expected), 1e-3)
        self.assertAlmostEqual(integral, expected, places=8)

        coefficients = transforms.random_coefficients(spectral_set, seed=3)
        integral = basis.grid.integrate(
            kernel*basis.synthesize(coefficients).values)
        expected = basis.evaluate(
            transforms.apply_multiplier(partition.multiplier(0),
                                        coefficients), x)
        self.assertAlmostEqual(integral, complex(expected), places=8)

    def test_block_levels(self):
        levels = transforms.block_levels(1, OperatorParams(1.0))

        self.assertTrue(np.all(levels.eigenvalues >= 1.0))
        self.assertTrue(np.all(levels.eigenvalues <= 16.0))


if __name__ == '__main__':
    unittest.main()
