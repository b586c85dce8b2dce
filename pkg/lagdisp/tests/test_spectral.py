import io
import math
import os
import tempfile
import unittest
import unittest.mock

import numpy as np
from scipy import integrate

from lagdisp.helper import specfun
from lagdisp.helper.exceptions import InputError
from lagdisp.interface.spectral import ModeIndex
from lagdisp.interface.spectral import OperatorParams
from lagdisp.interface.spectral import SpectralSet
from lagdisp.interface.spectral import alpha
from lagdisp.interface.spectral import beta
from lagdisp.interface.spectral import eigenfunction
from lagdisp.interface.spectral import eigenvalue
from lagdisp.interface.spectral import levels_in_window
from lagdisp.interface.spectral import modes_in_window
from lagdisp.interface.spectral import radial_eigenfunction
from lagdisp.interface.spectral import radial_table


def setup_spectral_set(a=0.0, lambda_max=5.5):
    return modes_in_window(0.0, lambda_max, OperatorParams(a))


class TestEigenvalues(unittest.TestCase):
    """
    Tests for OperatorParams, beta, alpha and eigenvalue
    """

    def test_params(self):
        self.assertEqual(OperatorParams(2).a, 2.0)
        self.assertEqual(OperatorParams(1.0), OperatorParams(1))
        with self.assertRaises(InputError):
            OperatorParams(-0.5)
        with self.assertRaises(InputError):
            OperatorParams(float("nan"))

    def test_beta_alpha(self):
        params = OperatorParams(1.0)
        self.assertAlmostEqual(beta(0, params), math.sqrt(1.25), places=15)
        self.assertAlmostEqual(alpha(0, params), 0.5 - math.sqrt(1.25),
                               places=15)
        self.assertEqual(beta(3, OperatorParams(0.0)), 3.5)

    def test_harmonic_oscillator_levels(self):
        """
        a = 0 gives 2m + k + 3/2
        """
        params = OperatorParams(0.0)
        for m in range(4):
            for k in range(4):
                self.assertEqual(eigenvalue(m, k, params), 2*m + k + 1.5)

    def test_bottom_of_spectrum(self):
        params = OperatorParams(2.5)
        self.assertAlmostEqual(eigenvalue(0, 0, params),
                               1.0 + math.sqrt(0.25 + 2.5), places=14)

    def test_mode_index(self):
        self.assertEqual(ModeIndex(1, 2, -2), (1, 2, -2))
        with self.assertRaises(InputError):
            ModeIndex(0, 1, 2)
        with self.assertRaises(InputError):
            ModeIndex(-1, 0, 0)
        with self.assertRaises(InputError):
            ModeIndex(0.5, 0, 0)


class TestRadialFunctions(unittest.TestCase):
    """
    Tests for the radial profiles and eigenfunctions
    """

    def test_normalization(self):
        """
        The profiles have unit norm in L2(r^2 dr)
        """
        params = OperatorParams(1.0)
        for m, k in ((0, 0), (2, 1), (4, 3)):
            norm, _ = integrate.quad(
                lambda r: radial_eigenfunction(m, k, params, r)**2*r*r,
                0.0, 40.0, limit=200)
            self.assertAlmostEqual(norm, 1.0, places=9)

    def test_orthogonality(self):
        """
        Profiles of equal degree and different m are orthogonal
        """
        params = OperatorParams(2.5)
        overlap, _ = integrate.quad(
            lambda r: (radial_eigenfunction(0, 2, params, r)
                       * radial_eigenfunction(3, 2, params, r)*r*r),
            0.0, 40.0, limit=200)
        self.assertAlmostEqual(overlap, 0.0, places=9)

    def test_eigen_equation(self):
        """
        -R'' - 2R'/r + (k(k+1) + a)/r^2 R + r^2/4 R = lambda R by finite
        differences
        """
        params = OperatorParams(1.0)
        m, k = 2, 1
        h = 1.0e-3
        r = np.linspace(0.5, 3.0, 26)
        values = radial_table(m, k, params, np.stack([r - h, r, r + h]))[m]
        lower, middle, upper = values
        second = (upper - 2*middle + lower)/h**2
        first = (upper - lower)/(2*h)
        value = eigenvalue(m, k, params)

        residual = (-second - 2*first/r + (k*(k + 1) + params.a)/r**2*middle
                    + 0.25*r*r*middle - value*middle)

        scale = np.max(np.abs(value*middle))
        self.assertLess(np.max(np.abs(residual)), 1.0e-5*scale)

    def test_origin(self):
        """
        Only a = 0, k = 0 is non-zero at the origin
        """
        self.assertGreater(radial_eigenfunction(0, 0, OperatorParams(0.0),
                                                0.0), 0.0)
        self.assertEqual(radial_eigenfunction(0, 0, OperatorParams(1.0),
                                              0.0), 0.0)
        self.assertEqual(radial_eigenfunction(1, 2, OperatorParams(0.0),
                                              0.0), 0.0)

    def test_ground_state(self):
        """
        e_000 for a = 0 is (2 pi)^(-3/4) exp(-r^2/4)
        """
        r = np.array([0.0, 0.5, 2.0])
        values = eigenfunction((0, 0, 0), OperatorParams(0.0),
                               (r, 0.3, 1.2))
        np.testing.assert_allclose(values,
                                   (2*math.pi)**-0.75*np.exp(-0.25*r*r),
                                   rtol=1e-13)

    def test_eigenfunction_factorizes(self):
        params = OperatorParams(1.0)
        value = eigenfunction((1, 2, -1), params, (1.3, 0.4, 2.0))
        expected = (radial_eigenfunction(1, 2, params, 1.3)
                    * specfun.spherical_harmonic(2, -1, 0.4, 2.0))
        self.assertAlmostEqual(value, expected, places=14)

    def test_negative_radius(self):
        with self.assertRaises(InputError):
            radial_table(2, 0, OperatorParams(1.0), -0.1)


class TestSpectralSet(unittest.TestCase):
    """
    Tests for SpectralSet, levels_in_window and modes_in_window
    """

    def test_oscillator_degeneracy(self):
        """
        Levels N = 0..4 of the oscillator hold (N+1)(N+2)/2 modes each
        """
        spectral_set = setup_spectral_set()

        self.assertEqual(len(spectral_set), 35)
        values, counts = np.unique(spectral_set.eigenvalues,
                                   return_counts=True)
        np.testing.assert_array_equal(values, [1.5, 2.5, 3.5, 4.5, 5.5])
        np.testing.assert_array_equal(counts, [1, 3, 6, 10, 15])

    def test_order(self):
        """
        Modes are sorted by eigenvalue
        """
        spectral_set = setup_spectral_set(a=1.0, lambda_max=9.0)

        self.assertTrue(np.all(np.diff(spectral_set.eigenvalues) >= 0))
        self.assertEqual(spectral_set[0], ModeIndex(0, 0, 0))
        self.assertEqual(spectral_set.k_max, max(mode.k for mode
                                                 in spectral_set))

    def test_levels_match_modes(self):
        params = OperatorParams(2.5)
        levels = levels_in_window(3.0, 12.0, params)
        spectral_set = modes_in_window(3.0, 12.0, params)

        self.assertEqual(int(np.sum(levels.multiplicity())),
                         len(spectral_set))
        self.assertTrue(np.all(levels.eigenvalues >= 3.0))
        self.assertTrue(np.all(levels.eigenvalues <= 12.0))

    def test_empty_window(self):
        spectral_set = modes_in_window(0.0, 1.0, OperatorParams(1.0))

        self.assertEqual(len(spectral_set), 0)
        self.assertEqual(spectral_set.k_max, -1)

    def test_invalid_window(self):
        with self.assertRaises(InputError):
            modes_in_window(3.0, 2.0, OperatorParams(1.0))

    def test_index_of(self):
        spectral_set = setup_spectral_set()

        position = spectral_set.index_of((1, 1, 0))
        self.assertEqual(spectral_set[position], (1, 1, 0))
        with self.assertRaises(NameError):
            spectral_set.index_of((5, 0, 0))

    def test_restrict(self):
        spectral_set = setup_spectral_set()

        restricted = spectral_set.restrict(2.0, 3.6)

        self.assertEqual(len(restricted), 9)
        self.assertTrue((0, 0, 0) not in restricted)
        self.assertTrue((1, 0, 0) in restricted)

    def test_outside_window(self):
        with self.assertRaises(InputError):
            SpectralSet(OperatorParams(0.0), 2.0, [(1, 0, 0)])

    def test_json_round_trip(self):
        spectral_set = setup_spectral_set(a=1.0, lambda_max=7.0)

        with tempfile.TemporaryDirectory() as folder:
            filename = os.path.join(folder, "spectrum.json")
            spectral_set.to_json(filename)
            loaded = SpectralSet.from_json(filename)

        self.assertEqual(loaded, spectral_set)

    def test_radial_pairs(self):
        spectral_set = setup_spectral_set(lambda_max=3.5)

        pairs, pair_of_mode = spectral_set.radial_pairs()

        self.assertEqual(sorted(pairs), [(0, 0), (0, 1), (0, 2), (1, 0)])
        for mode, pair in zip(spectral_set, pair_of_mode):
            self.assertEqual(pairs[pair], (mode.m, mode.k))

    @unittest.mock.patch('sys.stdout', new_callable=io.StringIO)
    def test_show(self, mock_stdout):
        """
        show prints a header and one line per level
        """
        setup_spectral_set(lambda_max=2.5).show()

        output = mock_stdout.getvalue().split("\n")
        self.assertIn("4 modes", output[0])
        self.assertIn("m = 0", output[1])
        self.assertEqual(len([line for line in output if line]), 3)


if __name__ == '__main__':
    unittest.main()
