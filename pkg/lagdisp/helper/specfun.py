"""
Double precision special functions used by every other part of LagDisp.

All functions accept scalars or numpy arrays and broadcast over their
array arguments. Scalar input gives a python float (or complex) back.
Gamma ratios are handled in log space so that orders and degrees in the
hundreds do not overflow.
"""
import logging
import math

import numpy as np
from scipy import special

from lagdisp.helper.exceptions import InputError
from lagdisp.helper.exceptions import SeriesTruncationError

logger = logging.getLogger(__name__)

# Ascending series are used up to this argument, scipy beyond it.
SERIES_CROSSOVER = 30.0

# A series result is rejected when the summed magnitude of its terms
# exceeds the magnitude of the result by more than this factor.
CONDITION_LIMIT = 1.0e4

# Slack accepted on |u| <= 1 before an argument is called out of domain.
UNIT_SLACK = 1.0e-12


class SeriesTolerance:
    """
    Truncation control for the power series in this module

    A series is stopped once the newest term is below rel_tol times the
    summed magnitude of all terms so far. Reaching max_terms before that
    raises SeriesTruncationError.

    Attributes
    ----------
    rel_tol : float
        Relative size of the last retained term

    max_terms : int
        Largest number of terms summed
    """

    def __init__(self, rel_tol=1.0e-17, max_terms=500):
        if not rel_tol > 0:
            raise InputError("SeriesTolerance needs rel_tol > 0, got "
                             + str(rel_tol))
        if int(max_terms) != max_terms or max_terms < 1:
            raise InputError("SeriesTolerance needs a positive integer "
                             + "max_terms, got " + str(max_terms))

        self.rel_tol = float(rel_tol)
        self.max_terms = int(max_terms)

    def __repr__(self):
        return ("SeriesTolerance(rel_tol=" + repr(self.rel_tol)
                + ", max_terms=" + str(self.max_terms) + ")")


DEFAULT_TOLERANCE = SeriesTolerance()


def _as_output(values):
    """Unwraps 0-d arrays into python scalars"""
    values = np.asarray(values)
    if values.ndim == 0:
        return values.item()
    return values


def _unit_interval(u, name):
    """Checks |u| <= 1 (up to UNIT_SLACK) and clips to [-1, 1]"""
    u = np.asarray(u, dtype=float)
    if np.any(~(np.abs(u) <= 1.0 + UNIT_SLACK)):
        raise InputError(name + " needs arguments in [-1, 1].")
    return np.clip(u, -1.0, 1.0)


def _check_degree(k, name):
    if int(k) != k or k < 0:
        raise InputError(name + " needs a non-negative integer degree, "
                         + "got " + str(k))
    return int(k)


def log_gamma(x):
    """
    Natural logarithm of the gamma function for positive arguments

    Parameters
    ----------
    x : float or array
        Positive argument(s)
    """
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise InputError("log_gamma is only defined for positive x.")

    return _as_output(special.gammaln(x))


def laguerre_table(m_max, alpha, t):
    """
    Generalized Laguerre polynomials L_0^alpha ... L_m_max^alpha at t

    Uses the three term recurrence
    (m+1) L_{m+1} = (2m+1+alpha-t) L_m - (m+alpha) L_{m-1}.

    Parameters
    ----------
    m_max : int
        Highest degree returned

    alpha : float
        Laguerre parameter, must be larger than -1

    t : float or array
        Evaluation point(s)

    Returns
    -------
    numpy array with shape (m_max + 1,) + shape of t
    """
    m_max = _check_degree(m_max, "laguerre")
    if not alpha > -1:
        raise InputError("Laguerre polynomials need alpha > -1, got "
                         + str(alpha))

    t = np.asarray(t, dtype=float)
    table = np.empty((m_max + 1,) + t.shape)
    table[0] = 1.0
    if m_max >= 1:
        table[1] = 1.0 + alpha - t

    for m in range(1, m_max):
        table[m + 1] = ((2*m + 1 + alpha - t)*table[m]
                        - (m + alpha)*table[m - 1])/(m + 1)

    return table


def laguerre(m, alpha, t):
    """Generalized Laguerre polynomial L_m^alpha(t)"""
    m = _check_degree(m, "laguerre")
    return _as_output(laguerre_table(m, alpha, t)[m])


def legendre_table(k_max, u):
    """
    Legendre polynomials P_0 ... P_k_max at u by the Bonnet recurrence

    Returns an array with shape (k_max + 1,) + shape of u. P_k(1) is
    exactly one since every step of the recurrence is exact there.
    """
    k_max = _check_degree(k_max, "legendre_p")
    u = _unit_interval(u, "legendre_p")

    table = np.empty((k_max + 1,) + u.shape)
    table[0] = 1.0
    if k_max >= 1:
        table[1] = u

    for k in range(1, k_max):
        table[k + 1] = ((2*k + 1)*u*table[k] - k*table[k - 1])/(k + 1)

    return table


def legendre_p(k, u):
    """Legendre polynomial P_k(u) for |u| <= 1"""
    k = _check_degree(k, "legendre_p")
    return _as_output(legendre_table(k, u)[k])


def assoc_legendre(k, n, u):
    """
    Associated Legendre function P_k^n(u) without Condon-Shortley sign

    For n >= 0 this is (1-u^2)^(n/2) d^n/du^n P_k(u), and negative
    orders follow P_k^-n = (k-n)!/(k+n)! P_k^n. With this choice the
    spherical harmonics of this module satisfy Y_-n = conj(Y_n) and the
    addition theorem holds as written.

    Parameters
    ----------
    k : int
        Degree

    n : int
        Order, |n| <= k

    u : float or array
        Argument(s) in [-1, 1]
    """
    k = _check_degree(k, "assoc_legendre")
    if int(n) != n or abs(n) > k:
        raise InputError("assoc_legendre needs |n| <= k, got n="
                         + str(n) + " for k=" + str(k))
    u = _unit_interval(u, "assoc_legendre")
    order = abs(int(n))
    s = np.sqrt((1.0 - u)*(1.0 + u))

    p_nn = np.ones_like(u)
    for i in range(1, order + 1):
        p_nn = p_nn*(2*i - 1)*s

    if k == order:
        value = p_nn
    else:
        p_lower, p_upper = p_nn, (2*order + 1)*u*p_nn
        for degree in range(order + 2, k + 1):
            p_next = ((2*degree - 1)*u*p_upper
                      - (degree + order - 1)*p_lower)/(degree - order)
            p_lower, p_upper = p_upper, p_next
        value = p_upper

    if n < 0:
        value = value*math.exp(special.gammaln(k - order + 1)
                               - special.gammaln(k + order + 1))

    return _as_output(value)


def normalized_assoc_legendre_table(k_max, u):
    """
    Orthonormalized associated Legendre functions for 0 <= n <= k <= k_max

    Entry [k, n] holds sqrt((2k+1)/(4 pi) (k-n)!/(k+n)!) P_k^n(u) with
    P_k^n as in assoc_legendre. Built with the normalized recurrence, so
    no factorial is ever formed. Entries with n > k are zero.

    Returns
    -------
    numpy array with shape (k_max + 1, k_max + 1) + shape of u
    """
    k_max = _check_degree(k_max, "normalized_assoc_legendre_table")
    u = _unit_interval(u, "normalized_assoc_legendre_table")
    s = np.sqrt((1.0 - u)*(1.0 + u))
    expand = (slice(None),) + (None,)*u.ndim

    table = np.zeros((k_max + 1, k_max + 1) + u.shape)
    table[0, 0] = math.sqrt(1.0/(4.0*math.pi))

    for degree in range(1, k_max + 1):
        table[degree, degree] = (math.sqrt((2*degree + 1)/(2.0*degree))
                                 *s*table[degree - 1, degree - 1])

    for degree in range(0, k_max):
        table[degree + 1, degree] = (math.sqrt(2*degree + 3)
                                     *u*table[degree, degree])

    for degree in range(1, k_max):
        orders = np.arange(degree)
        an = np.sqrt((2*degree + 1)*(2*degree + 3)
                     /((degree + 1 + orders)*(degree + 1 - orders)))
        bn = np.sqrt((2*degree + 3)*(degree - orders)*(degree + orders)
                     /((2*degree - 1)*(degree + 1 + orders)
                       *(degree + 1 - orders)))
        table[degree + 1, :degree] = (an[expand]*u*table[degree, :degree]
                                      - bn[expand]*table[degree - 1, :degree])

    return table


def spherical_harmonic(k, n, theta, phi):
    """
    L2(S^2) normalized spherical harmonic Y_n^k(theta, phi)

    theta is the azimuthal angle in [0, 2 pi] and phi the polar angle in
    [0, pi]. The normalization uses (2k+1)/(4 pi) (k-n)!/(k+n)!.
    """
    k = _check_degree(k, "spherical_harmonic")
    if int(n) != n or abs(n) > k:
        raise InputError("spherical_harmonic needs |n| <= k, got n="
                         + str(n) + " for k=" + str(k))

    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    u = np.clip(np.cos(phi), -1.0, 1.0)
    table = normalized_assoc_legendre_table(k, u)

    return _as_output(table[k, abs(int(n))]*np.exp(1j*n*theta))


def zonal_table(k_max, u):
    """Zonal functions (2k+1)/(4 pi) P_k(u) for k = 0 ... k_max"""
    table = legendre_table(k_max, u)
    weights = (2*np.arange(k_max + 1) + 1)/(4.0*math.pi)
    return table*weights[(slice(None),) + (None,)*(table.ndim - 1)]


def zonal(k, u):
    """Zonal function (2k+1)/(4 pi) P_k(u), the degree-k reproducing kernel"""
    k = _check_degree(k, "zonal")
    return _as_output((2*k + 1)/(4.0*math.pi)*legendre_table(k, u)[k])


def _ascending_series(nu, x, sign, shift, tol):
    """
    Sum of sign^j (x/2)^(2j+nu) / (j! Gamma(j+nu+1)) times exp(-shift)

    Compensated (Kahan) summation over 1-d arrays of equal shape with
    x > 0. Returns the sums and the summed term magnitudes.
    """
    half = 0.5*x
    ratio = sign*half*half
    term = np.exp(nu*np.log(half) - special.gammaln(nu + 1.0) - shift)

    total = term.copy()
    compensation = np.zeros_like(total)
    magnitude = np.abs(term)
    active = magnitude > 0

    for j in range(1, tol.max_terms + 1):
        if not active.any():
            return total, magnitude

        term = term*ratio/(j*(j + nu))
        corrected = term - compensation
        updated = total + corrected
        compensation = np.where(active, (updated - total) - corrected,
                                compensation)
        total = np.where(active, updated, total)
        magnitude = np.where(active, magnitude + np.abs(term), magnitude)
        active &= np.abs(term) > tol.rel_tol*magnitude

    if active.any():
        raise SeriesTruncationError(
            "Bessel power series did not converge within "
            + str(tol.max_terms) + " terms for x up to "
            + str(np.max(x[active])))

    return total, magnitude


def _bessel_arguments(nu, x, name):
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(~(nu >= 0)):
        raise InputError(name + " needs order nu >= 0.")
    if np.any(~(x >= 0)):
        raise InputError(name + " needs argument x >= 0.")

    return np.broadcast_arrays(nu, x)


def bessel_j(nu, x, tol=DEFAULT_TOLERANCE):
    """
    Bessel function of the first kind J_nu(x) for real nu, x >= 0

    The ascending power series with compensated summation is used for
    x <= SERIES_CROSSOVER. Series results that lost too many digits to
    cancellation, and all larger arguments, are evaluated with
    scipy.special.jv.

    Parameters
    ----------
    nu : float or array
        Order(s), non-negative

    x : float or array
        Argument(s), non-negative

    tol : SeriesTolerance
        Truncation control of the power series
    """
    nu, x = _bessel_arguments(nu, x, "bessel_j")
    result = np.empty(x.shape)

    at_zero = x == 0
    result[at_zero] = np.where(nu[at_zero] == 0, 1.0, 0.0)

    series = ~at_zero & (x <= SERIES_CROSSOVER)
    if series.any():
        values, magnitude = _ascending_series(nu[series], x[series],
                                              -1.0, 0.0, tol)
        ill_conditioned = magnitude > CONDITION_LIMIT*np.abs(values)
        if ill_conditioned.any():
            values[ill_conditioned] = special.jv(
                nu[series][ill_conditioned], x[series][ill_conditioned])
        result[series] = values

    rest = ~at_zero & ~series
    if rest.any():
        result[rest] = special.jv(nu[rest], x[rest])

    return _as_output(result)


def bessel_i_scaled(nu, x, tol=DEFAULT_TOLERANCE):
    """
    Exponentially scaled modified Bessel function exp(-x) I_nu(x)

    The power series has only positive terms, the scaling is folded into
    its leading term. Above SERIES_CROSSOVER scipy.special.ive is used.
    """
    nu, x = _bessel_arguments(nu, x, "bessel_i_scaled")
    result = np.empty(x.shape)

    at_zero = x == 0
    result[at_zero] = np.where(nu[at_zero] == 0, 1.0, 0.0)

    series = ~at_zero & (x <= SERIES_CROSSOVER)
    if series.any():
        result[series], _ = _ascending_series(nu[series], x[series],
                                              1.0, x[series], tol)

    rest = ~at_zero & ~series
    if rest.any():
        result[rest] = special.ive(nu[rest], x[rest])

    return _as_output(result)
