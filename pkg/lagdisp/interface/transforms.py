"""
Quadrature, spectral transforms and the functional calculus of H

Functions on R^3 are sampled on a product grid: Gauss-Legendre nodes in
the radius on [0, R], Gauss-Legendre nodes in mu = cos(phi) and uniform
nodes in the azimuth theta. On such a grid the transform to eigenmode
coefficients separates into an FFT over theta, a Legendre projection in
mu and a radial sum.

Multipliers F(H) act on SpectralCoefficients by multiplying each
coefficient with F(lambda). Kernels of multipliers are evaluated in
zonal form, one term per (m, k) level, see ZonalKernelTable.
"""
import csv
import json
import logging
import math

import numpy as np

from lagdisp.helper import specfun
from lagdisp.helper.exceptions import InputError
from lagdisp.helper.exceptions import ResolutionError
from lagdisp.helper.formatting import format_row
from lagdisp.helper.geometry import PolarPoints
from lagdisp.helper.geometry import as_points
from lagdisp.interface.spectral import SpectralSet
from lagdisp.interface.spectral import levels_in_window
from lagdisp.interface.spectral import radial_table

logger = logging.getLogger(__name__)


class QuadratureGrid:
    """
    Product quadrature grid on the ball of radius R

    Attributes
    ----------
    n_r, n_mu, n_theta : int
        Number of radial, polar and azimuthal nodes

    radius : float
        Outer radius R

    r : numpy array
        Radial nodes

    radial_weights : numpy array
        Radial weights including the Jacobian r^2

    mu : numpy array
        Polar nodes mu = cos(phi)

    mu_weights : numpy array
        Gauss-Legendre weights in mu

    phi : numpy array
        Polar angles of the mu nodes

    theta : numpy array
        Azimuthal nodes 2 pi q / n_theta

    theta_weight : float
        Azimuthal weight 2 pi / n_theta
    """

    def __init__(self, n_r=160, radius=12.0, n_mu=24, n_theta=None):
        if n_theta is None:
            n_theta = 2*n_mu
        for name, value in (("n_r", n_r), ("n_mu", n_mu),
                            ("n_theta", n_theta)):
            if int(value) != value or value < 1:
                raise InputError("QuadratureGrid needs a positive integer "
                                 + name + ", got " + repr(value))
        if not (math.isfinite(radius) and radius > 0):
            raise InputError("QuadratureGrid needs a positive radius.")

        self.n_r = int(n_r)
        self.n_mu = int(n_mu)
        self.n_theta = int(n_theta)
        self.radius = float(radius)

        nodes, weights = np.polynomial.legendre.leggauss(self.n_r)
        self.r = 0.5*self.radius*(nodes + 1.0)
        self.radial_weights = 0.5*self.radius*weights*self.r**2

        self.mu, self.mu_weights = np.polynomial.legendre.leggauss(self.n_mu)
        self.phi = np.arccos(self.mu)

        self.theta = 2.0*math.pi*np.arange(self.n_theta)/self.n_theta
        self.theta_weight = 2.0*math.pi/self.n_theta

    @classmethod
    def for_spectral_set(cls, spectral_set, n_r=160, radius=12.0, n_mu=24):
        """
        Grid that resolves every mode of spectral_set

        The radius grows with the classical turning point 2 sqrt(lambda)
        of the highest mode and n_mu with its degree.
        """
        if len(spectral_set) > 0:
            top = float(np.max(spectral_set.eigenvalues))
        else:
            top = spectral_set.lambda_max
        radius = max(radius, 2.0*math.sqrt(top) + 10.0)
        n_mu = max(n_mu, 2*spectral_set.k_max + 2)
        n_r = max(n_r, int(math.ceil(8.0*radius)))
        return cls(n_r=n_r, radius=radius, n_mu=n_mu)

    @property
    def shape(self):
        return (self.n_r, self.n_mu, self.n_theta)

    @property
    def size(self):
        return self.n_r*self.n_mu*self.n_theta

    def sphere_area(self):
        """Quadrature of the constant 1 over the unit sphere, 4 pi"""
        return float(np.sum(self.mu_weights))*self.theta_weight*self.n_theta

    def weights(self):
        """Full weight array with the shape of the grid"""
        return (self.radial_weights[:, None, None]
                * self.mu_weights[None, :, None]
                * np.full(self.n_theta, self.theta_weight)[None, None, :])

    def points(self):
        """The grid nodes as PolarPoints of shape (n_r, n_mu, n_theta)"""
        return PolarPoints(self.r[:, None, None], self.theta[None, None, :],
                           self.phi[None, :, None])

    def integrate(self, values):
        """Quadrature of values sampled on the grid"""
        return (np.einsum("i,j,ijk->", self.radial_weights, self.mu_weights,
                          values)*self.theta_weight)

    def refined(self, factor=2):
        """Grid with every node count multiplied by factor"""
        if int(factor) != factor or factor < 1:
            raise InputError("Refinement factor must be a positive integer.")
        return QuadratureGrid(n_r=self.n_r*factor, radius=self.radius,
                              n_mu=self.n_mu*factor,
                              n_theta=self.n_theta*factor)

    def to_dict(self):
        return {"n_r": self.n_r, "radius": self.radius, "n_mu": self.n_mu,
                "n_theta": self.n_theta}

    def __eq__(self, other):
        return (isinstance(other, QuadratureGrid)
                and self.to_dict() == other.to_dict())

    def __hash__(self):
        return hash(tuple(sorted(self.to_dict().items())))

    def __repr__(self):
        return ("QuadratureGrid(n_r=" + str(self.n_r) + ", radius="
                + repr(self.radius) + ", n_mu=" + str(self.n_mu)
                + ", n_theta=" + str(self.n_theta) + ")")


class GridFunction:
    """
    Complex function sampled on a QuadratureGrid

    Attributes
    ----------
    values : numpy array
        Complex samples with shape grid.shape

    grid : QuadratureGrid

    params : OperatorParams or None
        Operator the function is associated with
    """

    def __init__(self, values, grid, params=None):
        values = np.asarray(values, dtype=complex)
        if values.shape != grid.shape:
            raise InputError("GridFunction values need shape "
                             + str(grid.shape) + ", got "
                             + str(values.shape))
        if not np.all(np.isfinite(values)):
            raise InputError("GridFunction values must be finite.")

        self.values = values
        self.grid = grid
        self.params = params

    @classmethod
    def from_callable(cls, function, grid, params=None):
        """Samples function(points) on the grid nodes"""
        return cls(np.broadcast_to(function(grid.points()), grid.shape),
                   grid, params)

    def lp_norm(self, p):
        """L^p norm by quadrature, grid maximum for p = inf"""
        p = check_exponent(p, "p")
        magnitude = np.abs(self.values)
        if p == math.inf:
            return float(np.max(magnitude))
        return float(self.grid.integrate(magnitude**p))**(1.0/p)

    def l2_norm(self):
        return self.lp_norm(2)

    def __add__(self, other):
        self._check_grid(other)
        return GridFunction(self.values + other.values, self.grid,
                            self.params)

    def __sub__(self, other):
        self._check_grid(other)
        return GridFunction(self.values - other.values, self.grid,
                            self.params)

    def _check_grid(self, other):
        if not isinstance(other, GridFunction) or other.grid != self.grid:
            raise InputError("GridFunctions must live on the same grid.")

    def to_csv(self, filename):
        """Writes the samples with columns r, theta, phi, re, im"""
        points = self.grid.points()
        r, theta, phi = np.broadcast_arrays(points.r, points.theta,
                                            points.phi)
        with open(filename, "w", newline="") as csv_file:
            writer = csv.writer(csv_file)
            writer.writerow(["r", "theta", "phi", "re", "im"])
            for row in zip(r.ravel(), theta.ravel(), phi.ravel(),
                           self.values.real.ravel(),
                           self.values.imag.ravel()):
                writer.writerow(format_row(row))

    @classmethod
    def from_csv(cls, filename, grid, params=None):
        """Reads a file written by to_csv back onto grid"""
        with open(filename, "r", newline="") as csv_file:
            reader = csv.reader(csv_file)
            header = next(reader)
            if header != ["r", "theta", "phi", "re", "im"]:
                raise InputError("Unexpected GridFunction CSV header "
                                 + str(header))
            rows = [(float(row[3]), float(row[4])) for row in reader]

        if len(rows) != grid.size:
            raise InputError("GridFunction CSV holds " + str(len(rows))
                             + " rows, the grid needs " + str(grid.size))
        data = np.array(rows)
        return cls((data[:, 0] + 1j*data[:, 1]).reshape(grid.shape), grid,
                   params)

    def __repr__(self):
        return "GridFunction(" + repr(self.grid) + ")"


class SpectralCoefficients:
    """
    Coefficients c_{m,k,n} of a function in the eigenbasis of H

    Attributes
    ----------
    spectral_set : SpectralSet
        Modes the coefficients belong to

    values : numpy array
        Complex coefficients, aligned with spectral_set.modes

    Methods
    -------
    multiply(F)
        Coefficients of F(H) applied to the function

    norm()
        L2 norm, exact by Parseval

    to_json(filename) / from_json(filename, params)
        JSON array of [m, k, n, re, im]
    """

    def __init__(self, spectral_set, values=None):
        if values is None:
            values = np.zeros(len(spectral_set), dtype=complex)
        values = np.asarray(values, dtype=complex)
        if values.shape != (len(spectral_set),):
            raise InputError("SpectralCoefficients need one value per mode, "
                             + "got shape " + str(values.shape) + " for "
                             + str(len(spectral_set)) + " modes")
        self.spectral_set = spectral_set
        self.values = values

    @property
    def params(self):
        return self.spectral_set.params

    @property
    def eigenvalues(self):
        return self.spectral_set.eigenvalues

    def __getitem__(self, mode):
        return complex(self.values[self.spectral_set.index_of(mode)])

    def norm(self):
        return float(np.linalg.norm(self.values))

    def multiply(self, function):
        """Applies the spectral multiplier function(lambda)"""
        factors = np.broadcast_to(np.asarray(function(self.eigenvalues)),
                                  self.values.shape)
        if not np.all(np.isfinite(factors)):
            raise InputError("Spectral multiplier is not finite on the "
                             + "spectrum of the set.")
        return SpectralCoefficients(self.spectral_set, self.values*factors)

    def _check_set(self, other):
        if (not isinstance(other, SpectralCoefficients)
                or other.spectral_set != self.spectral_set):
            raise InputError("Coefficients must share their spectral set.")

    def __add__(self, other):
        self._check_set(other)
        return SpectralCoefficients(self.spectral_set,
                                    self.values + other.values)

    def __sub__(self, other):
        self._check_set(other)
        return SpectralCoefficients(self.spectral_set,
                                    self.values - other.values)

    def __mul__(self, scalar):
        return SpectralCoefficients(self.spectral_set, self.values*scalar)

    __rmul__ = __mul__

    def to_list(self):
        return [[mode.m, mode.k, mode.n, float(value.real),
                 float(value.imag)]
                for mode, value in zip(self.spectral_set.modes, self.values)]

    def to_json(self, filename):
        with open(filename, "w") as json_file:
            json.dump(self.to_list(), json_file)

    @classmethod
    def from_json(cls, filename, params, lambda_max=None):
        """
        Reads a JSON array of [m, k, n, re, im]. The spectral set is built
        from the listed modes with window [0, lambda_max], lambda_max
        defaulting to the largest eigenvalue present.
        """
        with open(filename, "r") as json_file:
            entries = json.load(json_file)

        modes = [entry[:3] for entry in entries]
        if lambda_max is None:
            probe = SpectralSet(params, math.inf, modes)
            lambda_max = (float(np.max(probe.eigenvalues)) if len(probe)
                          else 1.0)
        spectral_set = SpectralSet(params, lambda_max, modes)
        coefficients = cls(spectral_set)
        for entry in entries:
            position = spectral_set.index_of(entry[:3])
            coefficients.values[position] = complex(entry[3], entry[4])
        return coefficients

    def __repr__(self):
        return ("SpectralCoefficients(" + repr(self.spectral_set)
                + ", norm=" + repr(self.norm()) + ")")


def _pair_radial_values(pairs, params, r):
    """R_{m,k}(r) for a list of (m, k) pairs, shape (len(pairs), len(r))"""
    values = np.empty((len(pairs), np.size(r)))
    by_degree = {}
    for position, (m, k) in enumerate(pairs):
        by_degree.setdefault(k, []).append((position, m))

    for k, members in by_degree.items():
        table = radial_table(max(m for _, m in members), k, params, r)
        for position, m in members:
            values[position] = table[m]
    return values


class SpectralBasis:
    """
    Eigenfunctions of a SpectralSet tabulated on a QuadratureGrid

    analyze computes c = <f, e> by quadrature and synthesize the finite
    sum of c e. On band-limited functions the two are inverse to each
    other up to the quadrature error of the Gram matrix.

    Raises ResolutionError when the grid cannot resolve the highest
    degree, n_mu < 2 k_max + 2 or n_theta <= 2 k_max.
    """

    def __init__(self, grid, spectral_set):
        k_max = spectral_set.k_max
        if grid.n_mu < 2*k_max + 2:
            raise ResolutionError("Grid with n_mu=" + str(grid.n_mu)
                                  + " cannot resolve degree " + str(k_max)
                                  + ", needs n_mu >= " + str(2*k_max + 2))
        if grid.n_theta <= 2*k_max:
            raise ResolutionError("Grid with n_theta=" + str(grid.n_theta)
                                  + " cannot resolve degree " + str(k_max))

        self.grid = grid
        self.spectral_set = spectral_set
        self.k_max = max(k_max, 0)
        self.orders = np.arange(-self.k_max, self.k_max + 1)

        self.pairs, self.pair_of_mode = spectral_set.radial_pairs()
        self.radial = _pair_radial_values(self.pairs, spectral_set.params,
                                          grid.r)
        self.legendre = specfun.normalized_assoc_legendre_table(self.k_max,
                                                                grid.mu)
        self.k_index = np.array([mode.k for mode in spectral_set.modes],
                                dtype=int)
        self.n_index = np.array([mode.n for mode in spectral_set.modes],
                                dtype=int)
        self._refined = None

    @property
    def params(self):
        return self.spectral_set.params

    def _angular(self):
        """Legendre factors of every (k, n) slot, shape (K+1, 2K+1, n_mu)"""
        return self.legendre[:, np.abs(self.orders), :]

    def analyze(self, f):
        """Coefficients <f, e_{m,k,n}> of a GridFunction"""
        if f.grid != self.grid:
            raise InputError("GridFunction lives on another grid than the "
                             + "basis.")
        if len(self.spectral_set) == 0:
            return SpectralCoefficients(self.spectral_set)

        spectrum = np.fft.fft(f.values, axis=2)*self.grid.theta_weight
        selected = spectrum[:, :, self.orders % self.grid.n_theta]
        angular = self._angular()*self.grid.mu_weights
        projected = np.einsum("rmn,knm->knr", selected, angular)

        per_mode = projected[self.k_index, self.n_index + self.k_max]
        radial = self.radial[self.pair_of_mode]*self.grid.radial_weights
        return SpectralCoefficients(self.spectral_set,
                                    np.sum(per_mode*radial, axis=1))

    def synthesize(self, coefficients):
        """GridFunction sum_modes c e on the grid"""
        self._check_coefficients(coefficients)
        grid = self.grid
        if len(self.spectral_set) == 0:
            return GridFunction(np.zeros(grid.shape), grid, self.params)

        slots = np.zeros((self.k_max + 1, self.orders.size, grid.n_r),
                         dtype=complex)
        contributions = (coefficients.values[:, None]
                         * self.radial[self.pair_of_mode])
        np.add.at(slots, (self.k_index, self.n_index + self.k_max),
                  contributions)

        harmonics = np.einsum("knm,knr->rmn", self._angular(), slots)
        spectrum = np.zeros(grid.shape, dtype=complex)
        spectrum[:, :, self.orders % grid.n_theta] = harmonics
        values = np.fft.ifft(spectrum, axis=2)*grid.n_theta
        return GridFunction(values, grid, self.params)

    def evaluate(self, coefficients, points):
        """Values of sum_modes c e at arbitrary points"""
        self._check_coefficients(coefficients)
        points = as_points(points)
        shape = points.shape
        points = points.flatten()
        if len(self.spectral_set) == 0:
            return np.zeros(shape, dtype=complex)

        radial = _pair_radial_values(self.pairs, self.params, points.r)
        legendre = specfun.normalized_assoc_legendre_table(
            self.k_max, np.clip(np.cos(points.phi), -1.0, 1.0))
        total = np.zeros(len(points), dtype=complex)
        for i, (k, n) in enumerate(zip(self.k_index, self.n_index)):
            total += (coefficients.values[i]*radial[self.pair_of_mode[i]]
                      * legendre[k, abs(n)]*np.exp(1j*n*points.theta))
        return total.reshape(shape)

    def gram(self):
        """
        Quadrature Gram matrix G[i, j] = <e_i, e_j> of the modes

        The integrand is a product of a radial, a polar and an azimuthal
        factor, so G is the elementwise product of three small tables.
        """
        grid = self.grid
        phases = np.exp(1j*self.orders[:, None]*grid.theta[None, :])
        azimuthal = (phases*grid.theta_weight) @ phases.conj().T

        polar_factors = self.legendre[self.k_index, np.abs(self.n_index)]
        polar = (polar_factors*grid.mu_weights) @ polar_factors.T

        radial = (self.radial*grid.radial_weights) @ self.radial.T

        slot = self.n_index + self.k_max
        return (azimuthal[np.ix_(slot, slot)]*polar
                * radial[np.ix_(self.pair_of_mode, self.pair_of_mode)])

    def refined(self, factor=2):
        """Basis of the same set on the refined grid, cached for factor 2"""
        if factor == 2 and self._refined is not None:
            return self._refined
        basis = SpectralBasis(self.grid.refined(factor), self.spectral_set)
        if factor == 2:
            self._refined = basis
        return basis

    def _check_coefficients(self, coefficients):
        if coefficients.spectral_set != self.spectral_set:
            raise InputError("Coefficients belong to another spectral set "
                             + "than the basis.")

    def __repr__(self):
        return ("SpectralBasis(" + repr(self.grid) + ", "
                + repr(self.spectral_set) + ")")


def analyze(f, spectral_set, basis=None):
    """Coefficients of the GridFunction f on the modes of spectral_set"""
    if basis is None:
        basis = SpectralBasis(f.grid, spectral_set)
    return basis.analyze(f)


def synthesize(coefficients, grid, basis=None):
    """GridFunction of the coefficients on grid"""
    if basis is None:
        basis = SpectralBasis(grid, coefficients.spectral_set)
    return basis.synthesize(coefficients)


def gram_matrix(spectral_set, grid):
    """Quadrature Gram matrix of the eigenfunctions of spectral_set"""
    return SpectralBasis(grid, spectral_set).gram()


def check_exponent(p, name):
    """Returns p as float if 1 <= p <= inf, raises InputError otherwise"""
    try:
        p = float(p)
    except (TypeError, ValueError):
        raise InputError("Exponent " + name + " must be a number, got "
                         + repr(p))
    if not 1 <= p <= math.inf:
        raise InputError("Exponent " + name + " must lie in [1, inf], got "
                         + repr(p))
    return p


def lp_norm(data, p, basis=None, refine=False):
    """
    L^p norm of a GridFunction or of SpectralCoefficients

    For coefficients p = 2 is exact by Parseval, other exponents are
    evaluated on the grid of basis. With refine=True a sup norm is also
    taken on the refined grid and the larger value is returned.
    """
    p = check_exponent(p, "p")
    if isinstance(data, GridFunction):
        return data.lp_norm(p)

    if p == 2:
        return data.norm()
    if basis is None:
        raise InputError("L^p norms of coefficients with p != 2 need a "
                         + "SpectralBasis.")
    value = basis.synthesize(data).lp_norm(p)
    if refine and p == math.inf:
        fine = basis.refined().synthesize(data).lp_norm(p)
        logger.debug("sup norm %s, on refined grid %s", value, fine)
        value = max(value, fine)
    return value


def apply_multiplier(function, data, basis=None):
    """
    Applies F(H) to SpectralCoefficients or to a GridFunction

    Coefficients are multiplied by F(lambda). A GridFunction is analyzed
    with basis, multiplied and synthesized on the same grid.
    """
    if isinstance(data, SpectralCoefficients):
        return data.multiply(function)
    if basis is None:
        raise InputError("Applying a multiplier to a GridFunction needs a "
                         + "SpectralBasis.")
    return basis.synthesize(basis.analyze(data).multiply(function))


def _bump_edge(t):
    t = np.asarray(t, dtype=float)
    positive = t > 0
    return np.where(positive, np.exp(-1.0/np.where(positive, t, 1.0)), 0.0)


class DyadicPartition:
    """
    Smooth dyadic partition of unity

    chi is 1 on [0, lo], 0 on [hi, inf) and in between
    h(hi - x)/(h(hi - x) + h(x - lo)) with h(t) = exp(-1/t). The blocks are
    psi(x) = chi(x) - chi(2x) and psi_j(x) = psi(2^-j x), so that
    sum_j psi_j(x) = 1 for x > 0. Requiring 1 <= lo < hi <= 2 keeps the
    support of psi inside [1/2, 2].

    Attributes
    ----------
    lo, hi : float
        Edges of the transition of chi
    """

    def __init__(self, lo=1.0, hi=2.0):
        lo = float(lo)
        hi = float(hi)
        if not 1.0 <= lo < hi <= 2.0:
            raise InputError("DyadicPartition needs 1 <= lo < hi <= 2, got "
                             + "lo=" + repr(lo) + ", hi=" + repr(hi))
        self.lo = lo
        self.hi = hi

    def chi(self, x):
        x = np.asarray(x, dtype=float)
        rising = _bump_edge(self.hi - x)
        falling = _bump_edge(x - self.lo)
        return specfun._as_output(rising/(rising + falling))

    def psi(self, x):
        x = np.asarray(x, dtype=float)
        return specfun._as_output(np.asarray(self.chi(x))
                                  - np.asarray(self.chi(2.0*x)))

    def psi_j(self, j, x):
        """Block j, psi(2^-j x)"""
        return self.psi(2.0**(-int(j))*np.asarray(x, dtype=float))

    def multiplier(self, j):
        """Spectral multiplier lambda -> psi_j(sqrt(lambda))"""
        return lambda eigenvalues: self.psi_j(j, np.sqrt(eigenvalues))

    @staticmethod
    def block_window(j):
        """Eigenvalue window [2^(2(j-1)), 2^(2(j+1))] holding psi_j(sqrt H)"""
        return 4.0**(int(j) - 1), 4.0**(int(j) + 1)

    def block_sum(self, x):
        """sum_j psi_j(x), one for every x > 0"""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        low = int(math.floor(math.log2(float(np.min(x))))) - 2
        high = int(math.ceil(math.log2(float(np.max(x))))) + 2
        total = np.zeros(x.shape)
        for j in range(low, high + 1):
            total += self.psi_j(j, x)
        return total

    def active_blocks(self, eigenvalues):
        """Blocks j with psi_j(sqrt(lambda)) > 0 for some listed lambda"""
        roots = np.sqrt(np.asarray(eigenvalues, dtype=float))
        if roots.size == 0:
            return []
        low = int(math.floor(math.log2(float(np.min(roots))))) - 1
        high = int(math.ceil(math.log2(float(np.max(roots))))) + 1
        return [j for j in range(low, high + 1)
                if np.any(np.asarray(self.psi_j(j, roots)) > 0)]

    def square_sum_bounds(self, samples=4001):
        """
        min and max over x of (sum_j psi_j(x)^2)^(1/2), sampled on [1, 2]
        which covers every x > 0 by dyadic scaling
        """
        x = np.linspace(1.0, 2.0, samples)
        total = np.zeros(samples)
        for j in range(-2, 3):
            total += np.asarray(self.psi_j(j, x))**2
        root = np.sqrt(total)
        return float(np.min(root)), float(np.max(root))

    def to_dict(self):
        return {"lo": self.lo, "hi": self.hi}

    def __eq__(self, other):
        return (isinstance(other, DyadicPartition) and other.lo == self.lo
                and other.hi == self.hi)

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return ("DyadicPartition(lo=" + repr(self.lo) + ", hi="
                + repr(self.hi) + ")")


class ZonalKernelTable:
    """
    Kernel of a multiplier F(H) over the levels of a window in zonal form

        sum_{levels} F(lambda_{m,k}) R_{m,k}(r1) R_{m,k}(r2) Z_k(u)

    The radial profiles are tabulated once at a fixed set of radii, so
    evaluating many multipliers (for instance the same block at many
    times) only repeats the level sums.
    """

    def __init__(self, levels, radii):
        self.levels = levels
        self.radii = np.asarray(radii, dtype=float).ravel()
        self.radial = levels.radial_values(self.radii)
        self.degrees, self.starts = levels.degree_starts()

    def factors(self, function):
        return np.asarray(function(self.levels.eigenvalues))

    def _per_degree(self, factors, first, second):
        weighted = (factors[:, None]*self.radial[:, first]
                    * self.radial[:, second])
        return np.add.reduceat(weighted, self.starts, axis=0)

    def evaluate(self, factors, first, second, u):
        """
        Kernel on the grid of radius pairs x angles

        Parameters
        ----------
        factors : numpy array
            F at the level eigenvalues, see factors()

        first, second : int arrays
            Indices into radii of the two radii of every pair

        u : numpy array
            Cosines of the angles

        Returns
        -------
        numpy array with shape (len(first), len(u))
        """
        u = np.atleast_1d(u)
        first = np.atleast_1d(first)
        if len(self.levels) == 0:
            return np.zeros((first.size, u.size), dtype=factors.dtype)
        zonal = specfun.zonal_table(self.levels.k_max, u)[self.degrees]
        return self._per_degree(factors, first,
                                np.atleast_1d(second)).T @ zonal

    def evaluate_pairs(self, factors, first, second, u):
        """Kernel at the elementwise triples (first, second, u)"""
        u = np.atleast_1d(u)
        if len(self.levels) == 0:
            return np.zeros(u.shape, dtype=factors.dtype)
        zonal = specfun.zonal_table(self.levels.k_max, u)[self.degrees]
        per_degree = self._per_degree(factors, np.atleast_1d(first),
                                      np.atleast_1d(second))
        return np.sum(per_degree*zonal, axis=0)


def spectral_kernel(function, levels, x, y):
    """
    Kernel sum_modes F(lambda) e(x) conj(e(y)) over the modes of the
    levels, evaluated at broadcast point pairs
    """
    x = as_points(x)
    y = as_points(y)
    r1, r2 = np.broadcast_arrays(x.r, y.r)
    u = np.broadcast_to(x.cos_angle(y), r1.shape)

    radii, inverse = np.unique(np.concatenate([r1.ravel(), r2.ravel()]),
                               return_inverse=True)
    table = ZonalKernelTable(levels, radii)
    factors = table.factors(function).astype(complex)
    values = table.evaluate_pairs(factors, inverse[:r1.size],
                                  inverse[r1.size:], u.ravel())
    return specfun._as_output(values.reshape(r1.shape))


def block_levels(j, params):
    """Levels of the eigenvalue window of block j"""
    lo, hi = DyadicPartition.block_window(j)
    return levels_in_window(lo, hi, params)


def lp_block_kernel(j, params, x, y, partition=None):
    """Kernel of the Littlewood-Paley block psi_j(sqrt H) at (x, y)"""
    if partition is None:
        partition = DyadicPartition()
    return spectral_kernel(partition.multiplier(j), block_levels(j, params),
                           x, y)


def block_norms(coefficients, p, partition=None, basis=None):
    """L^p norms of psi_j(sqrt H) f for every active block, as a dict"""
    if partition is None:
        partition = DyadicPartition()
    norms = {}
    for j in partition.active_blocks(coefficients.eigenvalues):
        block = coefficients.multiply(partition.multiplier(j))
        norms[j] = lp_norm(block, p, basis)
    return norms


def besov_norm(coefficients, s, p, q, partition=None, basis=None):
    """
    Besov norm (sum_j 2^(jqs) ||psi_j(sqrt H) f||_p^q)^(1/q)

    p = 2 uses Parseval on every block, other p need a SpectralBasis.
    q = inf gives the supremum over the blocks.
    """
    p = check_exponent(p, "p")
    q = check_exponent(q, "q")
    norms = block_norms(coefficients, p, partition, basis)
    if not norms:
        return 0.0

    weighted = np.array([2.0**(j*s)*value for j, value in norms.items()])
    if q == math.inf:
        return float(np.max(weighted))
    return float(np.sum(weighted**q))**(1.0/q)


def sobolev_norm(coefficients, s):
    """(sum lambda^s |c|^2)^(1/2)"""
    return float(np.sqrt(np.sum(coefficients.eigenvalues**s
                                * np.abs(coefficients.values)**2)))


def _check_pair(f, g):
    if f.spectral_set != g.spectral_set:
        raise InputError("Wave data f and g must share their spectral set.")


def wave_evolve(f, g, t, basis=None):
    """
    u(t) = cos(t sqrt H) f + sin(t sqrt H)/sqrt H g

    Returns coefficients, or a GridFunction when a basis is given.
    """
    _check_pair(f, g)
    root = np.sqrt(f.eigenvalues)
    values = (np.cos(t*root)*f.values + np.sin(t*root)/root*g.values)
    result = SpectralCoefficients(f.spectral_set, values)
    if basis is not None:
        return basis.synthesize(result)
    return result


def wave_velocity(f, g, t):
    """Time derivative of wave_evolve, -sqrt H sin(t sqrt H) f + cos g"""
    _check_pair(f, g)
    root = np.sqrt(f.eigenvalues)
    values = -root*np.sin(t*root)*f.values + np.cos(t*root)*g.values
    return SpectralCoefficients(f.spectral_set, values)


def wave_energy(f, g, t):
    """||sqrt H u(t)||^2 + ||d/dt u(t)||^2"""
    position = wave_evolve(f, g, t)
    velocity = wave_velocity(f, g, t)
    return (sobolev_norm(position, 1.0)**2 + velocity.norm()**2)


def schrodinger_evolve(coefficients, t):
    """exp(-itH) applied to the coefficients"""
    return coefficients.multiply(lambda eigenvalues:
                                 np.exp(-1j*t*eigenvalues))


def heat_evolve(coefficients, t):
    """exp(-tH) applied to the coefficients, t >= 0"""
    if not t >= 0:
        raise InputError("The heat semigroup needs t >= 0.")
    return coefficients.multiply(lambda eigenvalues: np.exp(-t*eigenvalues))


def random_coefficients(spectral_set, seed=0):
    """
    Unit norm complex Gaussian coefficients from numpy's default
    generator seeded with seed
    """
    if len(spectral_set) == 0:
        raise InputError("Random data needs a non-empty spectral set.")
    generator = np.random.default_rng(seed)
    values = (generator.standard_normal(len(spectral_set))
              + 1j*generator.standard_normal(len(spectral_set)))
    return SpectralCoefficients(spectral_set,
                                values/np.linalg.norm(values))


def bump_coefficients(basis, center, width=0.5):
    """
    Unit norm projection of the Gaussian bump exp(-|x-x0|^2/(2 width^2))
    onto the modes of basis
    """
    if not width > 0:
        raise InputError("Bump width must be positive.")
    center = as_points(center)
    bump = GridFunction.from_callable(
        lambda x: np.exp(-x.distance_squared(center)/(2.0*width**2)),
        basis.grid, basis.params)
    coefficients = basis.analyze(bump)
    size = coefficients.norm()
    if size == 0:
        raise InputError("Bump has no component in the spectral set.")
    return coefficients*(1.0/size)
