"""
Series evaluation of the propagator kernels of H = -Laplace + a/|x|^2 + |x|^2/4

The central object is the K function

    K(rho, u) = rho^(-1/2) sum_k exp(-i pi beta_k/2) J_beta_k(rho) Z_k(u),

with Z_k the zonal functions. Its a = 0 part is a plane wave, so by
default the series is split into that closed form plus the difference
series, whose terms are damped by a/(2k+1). The Schrodinger kernel is a
prefactor times K(|x||y|/(2 sin t), cos angle(x, y)). The heat kernel
uses the same split with exponentially scaled modified Bessel functions.

Every series is truncated at the first index whose certified tail is
below the requested tolerance. If that index is not reached before the
cap, the returned KernelValue is flagged instead of raising.
"""
import logging
import math

import numpy as np
from scipy import special

from lagdisp.helper import specfun
from lagdisp.helper.exceptions import InputError
from lagdisp.helper.exceptions import SingularTimeError
from lagdisp.helper.exceptions import TruncationError
from lagdisp.helper.geometry import as_points

logger = logging.getLogger(__name__)

SINGULAR_EPSILON = 1.0e-3

PLANE_WAVE_SCALE = (2.0*math.pi)**-1.5

# exp(-i pi/4), the phase the a = 0 series sums to
PLANE_WAVE_PHASE = complex(math.cos(math.pi/4), -math.sin(math.pi/4))

ROUNDING = np.finfo(float).eps

# Largest number of table entries contracted at once
CHUNK_ENTRIES = 4000000


class TruncationPolicy:
    """
    Truncation control of the kernel series

    The number of terms summed for an argument rho is capped by
    max(k_max_cap, rho + 12 rho^(1/3) + 40) for Bessel J series and by
    max(k_max_cap, 8 sqrt(z) + 40) for scaled modified Bessel series,
    never by more than hard_cap. Inside the cap the series stops at the
    first index whose tail bound is below tail_tol.

    Attributes
    ----------
    k_max_cap : int
        Least number of terms available to the series

    tail_tol : float
        Tolerance for the certified tail

    hard_cap : int
        Absolute limit on the number of terms

    split : bool
        True sums the difference to the closed a = 0 series, False sums
        the series directly (kept for cross validation)
    """

    def __init__(self, k_max_cap=200, tail_tol=1.0e-10, hard_cap=6000,
                 split=True):
        if int(k_max_cap) != k_max_cap or k_max_cap < 1:
            raise InputError("k_max_cap must be a positive integer.")
        if int(hard_cap) != hard_cap or hard_cap < k_max_cap:
            raise InputError("hard_cap must be an integer >= k_max_cap.")
        if not tail_tol > 0:
            raise InputError("tail_tol must be positive.")

        self.k_max_cap = int(k_max_cap)
        self.tail_tol = float(tail_tol)
        self.hard_cap = int(hard_cap)
        self.split = bool(split)

    def bessel_cap(self, rho_max):
        """Number of terms used for J series with arguments up to rho_max"""
        wanted = math.ceil(rho_max + 12.0*rho_max**(1.0/3.0) + 40.0)
        return min(self.hard_cap, max(self.k_max_cap, wanted))

    def modified_bessel_cap(self, z_max):
        """Number of terms used for scaled I series up to argument z_max"""
        wanted = math.ceil(8.0*math.sqrt(z_max) + 40.0)
        return min(self.hard_cap, max(self.k_max_cap, wanted))

    def to_dict(self):
        return {"k_max_cap": self.k_max_cap, "tail_tol": self.tail_tol,
                "hard_cap": self.hard_cap, "split": self.split}

    def __repr__(self):
        return ("TruncationPolicy(k_max_cap=" + str(self.k_max_cap)
                + ", tail_tol=" + repr(self.tail_tol)
                + ", hard_cap=" + str(self.hard_cap)
                + ", split=" + str(self.split) + ")")


DEFAULT_POLICY = TruncationPolicy()


class KernelValue:
    """
    Kernel values together with their truncation diagnostics

    All attributes are arrays of the broadcast shape of the evaluation
    points (or scalars for scalar input).

    Attributes
    ----------
    value : complex or real array
        Kernel values

    k_used : int array
        Number of series terms summed

    tail_bound : float array
        Certified bound on the neglected terms (before prefactors)

    truncated : bool array
        True where tail_bound could not be brought below tail_tol

    negative : bool array or None
        For heat kernels, True where the value is negative beyond its
        rounding error estimate
    """

    def __init__(self, value, k_used, tail_bound, truncated, negative=None):
        self.value = specfun._as_output(value)
        self.k_used = specfun._as_output(k_used)
        self.tail_bound = specfun._as_output(tail_bound)
        self.truncated = specfun._as_output(truncated)
        self.negative = (None if negative is None
                         else specfun._as_output(negative))

    @property
    def failed(self):
        return bool(np.any(self.truncated))

    @property
    def k_max(self):
        return int(np.max(self.k_used))

    @property
    def max_tail(self):
        return float(np.max(self.tail_bound))

    def check(self):
        """Raises TruncationError if any value is flagged"""
        if self.failed:
            raise TruncationError(
                "Kernel series not truncated within tolerance at "
                + str(int(np.sum(self.truncated))) + " point(s), largest "
                + "tail bound " + repr(self.max_tail))
        return self

    def __repr__(self):
        return ("KernelValue(shape=" + str(np.shape(self.value))
                + ", k_max=" + str(self.k_max)
                + ", max_tail=" + repr(self.max_tail)
                + ", failed=" + str(self.failed) + ")")


class _SeriesTable:
    """Truncated zonal series coefficients for a 1-d array of arguments"""

    def __init__(self, coefficients, k_used, tail, truncated):
        self.coefficients = coefficients
        self.k_used = k_used
        self.tail = tail
        self.truncated = truncated

    @property
    def size(self):
        return self.coefficients.shape[0]


def _orders(count, params):
    k = np.arange(count)
    return k, np.sqrt((k + 0.5)**2 + params.a), k + 0.5


def _geometric_tail(last, before, k_last, decaying):
    """
    Bound on the sum beyond index k_last of a positive sequence whose
    ratios are decreasing, from its last two members. The growth of the
    zonal bound (2k+1)/(4 pi) is folded into the ratio.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(before > 0, last/before, 0.0)
    ratio = ratio*(2*k_last + 3.0)/(2*k_last + 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(last == 0, 0.0, last*ratio/(1.0 - ratio))
    usable = decaying & ((last == 0) | (ratio < 1.0))
    return np.where(usable, tail, np.inf)


def _truncate(coefficients, remainder, tail_tol):
    """
    Finds for every column the first index whose tail is below tail_tol

    The tail of index K is the sum of |coefficient_k| (2k+1)/(4 pi) over
    k >= K plus the remainder beyond the table. Coefficients from the
    truncation index on are set to zero.
    """
    count, columns = coefficients.shape
    bound = (2*np.arange(count) + 1)/(4.0*math.pi)
    magnitude = np.abs(coefficients)*bound[:, None]

    suffix = np.zeros((count + 1, columns))
    suffix[:count] = np.cumsum(magnitude[::-1], axis=0)[::-1]
    suffix += remainder[None, :]

    below = suffix <= tail_tol
    reached = below.any(axis=0)
    k_used = np.where(reached, np.argmax(below, axis=0), count)
    tail = suffix[k_used, np.arange(columns)]

    keep = np.arange(count)[:, None] < k_used[None, :]
    return _SeriesTable(np.where(keep, coefficients, 0.0), k_used, tail,
                        ~reached)


def _scaled_bessel_j(orders, rho):
    """rho^(-1/2) J_nu(rho) on the grid orders x rho, with the rho = 0 limit"""
    values = specfun.bessel_j(orders[:, None], rho[None, :])
    positive = rho > 0
    root = np.sqrt(np.where(positive, rho, 1.0))
    limit = np.where(orders == 0.5, math.sqrt(2.0/math.pi), 0.0)
    return np.where(positive[None, :], values/root[None, :], limit[:, None])


def _scaled_bessel_i(orders, z):
    """z^(-1/2) exp(-z) I_nu(z) on the grid orders x z, with the z = 0 limit"""
    values = specfun.bessel_i_scaled(orders[:, None], z[None, :])
    positive = z > 0
    root = np.sqrt(np.where(positive, z, 1.0))
    limit = np.where(orders == 0.5, math.sqrt(2.0/math.pi), 0.0)
    return np.where(positive[None, :], values/root[None, :], limit[:, None])


def _small_argument_remainder(rho, orders_beyond, count):
    """
    Tail beyond the table for rho < 2 from |J_nu(r)| <= (r/2)^nu
    exp(r^2/4)/Gamma(1+nu). Successive bounds shrink by more than half
    there, so twice the first neglected bound covers the rest.
    """
    remainder = np.zeros(rho.shape)
    positive = rho > 0
    r = rho[positive]
    for order in orders_beyond:
        log_bound = (-0.5*np.log(r) + order*np.log(0.5*r)
                     - special.gammaln(1.0 + order) + 0.25*r*r)
        remainder[positive] += np.exp(log_bound)
    return 2.0*remainder*(2*count + 1)/(4.0*math.pi)


def _bessel_coefficients(count, rho, params, split):
    """
    Series coefficients for k < count and the moduli of the scaled
    Bessel sequences they are built from
    """
    k, betas, plain = _orders(count, params)
    scaled = _scaled_bessel_j(betas, rho)
    coefficients = np.exp(-0.5j*math.pi*betas)[:, None]*scaled
    bounds = [np.abs(scaled)]
    if split:
        plain_scaled = _scaled_bessel_j(plain, rho)
        coefficients -= np.exp(-0.5j*math.pi*plain)[:, None]*plain_scaled
        bounds.append(np.abs(plain_scaled))
    return coefficients, bounds


def _bessel_table(rho, params, policy, count=None):
    """
    Coefficients of the K function series (difference series when the
    policy splits) for the 1-d argument array rho
    """
    if count is None:
        count = policy.bessel_cap(float(np.max(rho, initial=0.0)))
    coefficients, bounds = _bessel_coefficients(count, rho, params,
                                                policy.split)

    decaying = count - 1 > rho + 1.0
    remainder = np.zeros(rho.shape)
    for bound in bounds:
        remainder += _geometric_tail(
            bound[count - 1]*(2*count - 1)/(4*math.pi),
            bound[count - 2]*(2*count - 3)/(4*math.pi), count - 1, decaying)

    small = rho < 2.0
    if small.any():
        _, betas, plain = _orders(count + 1, params)
        orders_beyond = [betas[count]]
        if policy.split:
            orders_beyond.append(plain[count])
        remainder[small] = _small_argument_remainder(rho[small],
                                                     orders_beyond, count)

    return _truncate(coefficients, remainder, policy.tail_tol)


def _modified_table(z, params, policy, count=None):
    """
    Coefficients of the scaled heat series (difference series when the
    policy splits) for the 1-d argument array z
    """
    if count is None:
        count = policy.modified_bessel_cap(float(np.max(z, initial=0.0)))
    k, betas, plain = _orders(count, params)

    coefficients = _scaled_bessel_i(betas, z)
    bounds = [coefficients.copy()]
    if policy.split:
        plain_scaled = _scaled_bessel_i(plain, z)
        coefficients = coefficients - plain_scaled
        bounds.append(plain_scaled)

    remainder = np.zeros(z.shape)
    decaying = np.ones(z.shape, dtype=bool)
    for bound in bounds:
        remainder += _geometric_tail(bound[-1]*(2*count - 1)/(4*math.pi),
                                     bound[-2]*(2*count - 3)/(4*math.pi),
                                     count - 1, decaying)

    return _truncate(coefficients, remainder, policy.tail_tol)


def _contract(coefficients, column_index, zonal, u_index):
    """Elementwise sum_k coefficients[k, column] zonal[k, u]"""
    count = coefficients.shape[0]
    points = column_index.size
    result = np.empty(points, dtype=np.result_type(coefficients, zonal))
    step = max(1, CHUNK_ENTRIES//max(count, 1))
    for start in range(0, points, step):
        chunk = slice(start, start + step)
        result[chunk] = np.einsum("kp,kp->p",
                                  coefficients[:, column_index[chunk]],
                                  zonal[:, u_index[chunk]])
    return result


def _check_unit(u):
    u = np.asarray(u, dtype=float)
    if np.any(~(np.abs(u) <= 1.0 + specfun.UNIT_SLACK)):
        raise InputError("Angle cosines u must lie in [-1, 1].")
    return np.clip(u, -1.0, 1.0)


def _check_rho(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(~np.isfinite(rho)) or np.any(rho < 0):
        raise InputError("K function arguments rho must be finite and "
                         + ">= 0.")
    return rho


def plane_wave(rho, u):
    """The a = 0 K function exp(-i pi/4) (2 pi)^(-3/2) exp(-i rho u)"""
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    return specfun._as_output(PLANE_WAVE_PHASE*PLANE_WAVE_SCALE
                              * np.exp(-1j*rho*u))


def k_series_terms(rho, params, count, split=True):
    """
    Untruncated series coefficients of the K function at the arguments
    rho, shape (count, len(rho)). With split=True these are the terms of
    the difference series.
    """
    rho = np.atleast_1d(_check_rho(rho)).ravel()
    coefficients, _ = _bessel_coefficients(int(count), rho, params, split)
    return coefficients


def k_function(rho, u, params, trunc=DEFAULT_POLICY):
    """
    K function at broadcast pairs (rho, u)

    Parameters
    ----------
    rho : float or array
        Non-negative arguments, the rho = 0 limit is taken analytically

    u : float or array
        Cosines of the angle between the two directions

    params : OperatorParams

    trunc : TruncationPolicy

    Returns
    -------
    KernelValue with complex values
    """
    rho, u = np.broadcast_arrays(_check_rho(rho), _check_unit(u))
    shape = rho.shape

    if params.a == 0 and trunc.split:
        return KernelValue(plane_wave(rho, u), np.zeros(shape, dtype=int),
                           np.zeros(shape), np.zeros(shape, dtype=bool))

    rho_values, rho_index = np.unique(rho.ravel(), return_inverse=True)
    u_values, u_index = np.unique(u.ravel(), return_inverse=True)

    table = _bessel_table(rho_values, params, trunc)
    zonal = specfun.zonal_table(table.size - 1, u_values)
    series = _contract(table.coefficients, rho_index, zonal, u_index)
    if trunc.split:
        series = series + np.ravel(plane_wave(rho, u))

    _log_failures(table, "K function")
    return KernelValue(series.reshape(shape),
                       table.k_used[rho_index].reshape(shape),
                       table.tail[rho_index].reshape(shape),
                       table.truncated[rho_index].reshape(shape))


def k_function_grid(rho, u, params, trunc=DEFAULT_POLICY):
    """
    K function on the outer grid rho x u of two 1-d arrays

    Returns a KernelValue whose value has shape (len(rho), len(u)); the
    diagnostics depend on rho only and have shape (len(rho),).
    """
    rho = np.atleast_1d(_check_rho(rho)).ravel()
    u = np.atleast_1d(_check_unit(u)).ravel()

    if params.a == 0 and trunc.split:
        values = plane_wave(rho[:, None], u[None, :])
        return KernelValue(np.asarray(values), np.zeros(rho.size, dtype=int),
                           np.zeros(rho.size), np.zeros(rho.size, dtype=bool))

    table = _bessel_table(rho, params, trunc)
    zonal = specfun.zonal_table(table.size - 1, u)
    values = table.coefficients.T @ zonal
    if trunc.split:
        values = values + plane_wave(rho[:, None], u[None, :])

    _log_failures(table, "K function")
    return KernelValue(values, table.k_used, table.tail, table.truncated)


def _log_failures(table, name):
    if np.any(table.truncated):
        logger.warning("%s series not truncated within tolerance at %d "
                       "argument(s), largest tail %s", name,
                       int(np.sum(table.truncated)),
                       repr(float(np.max(table.tail))))


def check_schrodinger_time(t, epsilon=SINGULAR_EPSILON):
    """
    Validates a Schrodinger time, 0 < |t| < pi and at least epsilon away
    from 0 and +-pi. Returns t as float.
    """
    t = float(t)
    if not math.isfinite(t):
        raise InputError("Time must be finite.")
    nearest = math.pi*round(t/math.pi)
    # pi - epsilon itself is accepted despite rounding
    if abs(t - nearest) < epsilon - 1.0e-12:
        raise SingularTimeError(
            "The Schrodinger kernel is singular at multiples of pi, t="
            + repr(t) + " is within " + repr(epsilon) + " of "
            + repr(nearest))
    if abs(t) > math.pi:
        raise InputError("Schrodinger times must satisfy |t| < pi, got "
                         + repr(t))
    return t


def _pair_geometry(x, y):
    x = as_points(x)
    y = as_points(y)
    r1, r2 = np.broadcast_arrays(x.r, y.r)
    u = np.broadcast_to(x.cos_angle(y), r1.shape)
    return r1, r2, u


def schrodinger_kernel(t, x, y, params, trunc=DEFAULT_POLICY,
                       epsilon=SINGULAR_EPSILON):
    """
    Kernel of exp(-itH) between the points x and y

    Evaluated as -i (2 sin t)^(-3/2) exp(i (|x|^2+|y|^2) cot t / 4)
    K(|x||y|/(2 sin t), cos angle(x, y)) for 0 < t < pi, and by complex
    conjugation for negative t.

    Parameters
    ----------
    t : float
        Time, 0 < |t| < pi, at least epsilon away from 0 and +-pi

    x, y : PolarPoints or (r, theta, phi) tuples
        Evaluation points, broadcast against each other
    """
    t = check_schrodinger_time(t, epsilon)
    duration = abs(t)
    r1, r2, u = _pair_geometry(x, y)

    sine = math.sin(duration)
    rho = r1*r2/(2.0*sine)
    core = k_function(rho, u, params, trunc)

    prefactor = (-1j*(2.0*sine)**-1.5
                 * np.exp(0.25j*(r1*r1 + r2*r2)*math.cos(duration)/sine))
    value = prefactor*core.value
    if t < 0:
        value = np.conj(value)

    return KernelValue(value, core.k_used, core.tail_bound, core.truncated)


def mehler_schrodinger(t, x, y):
    """
    a = 0 Schrodinger kernel (4 pi i sin t)^(-3/2)
    exp(i ((|x|^2+|y|^2) cos t - 2 x.y)/(4 sin t)), for 0 < |t| < pi
    """
    t = check_schrodinger_time(t, 0.0)
    duration = abs(t)
    x = as_points(x)
    y = as_points(y)
    sine = math.sin(duration)
    phase = ((x.r**2 + y.r**2)*math.cos(duration) - 2.0*x.dot(y))/(4*sine)
    value = (np.exp(-0.75j*math.pi)*(4.0*math.pi*sine)**-1.5
             * np.exp(1j*phase))
    if t < 0:
        value = np.conj(value)
    return specfun._as_output(value)


def _check_heat_time(t):
    t = float(t)
    if not (math.isfinite(t) and t > 0):
        raise InputError("Heat kernel times must be finite and > 0, got "
                         + repr(t))
    return t


class HeatSeries:
    """
    Scaled heat series S(z, u) = sum_k z^(-1/2) e^-z I_beta_k(z) Z_k(u)

    The heat kernel is (2 sinh t)^(-3/2) exp(E) S with
    z = r1 r2/(2 sinh t) and E = -(r1-r2)^2/(4 tanh t) - r1 r2 tanh(t/2)/2.

    Attributes
    ----------
    value : numpy array
        S at the requested points

    rounding : numpy array
        Estimate of the rounding error of S

    k_used, tail_bound, truncated : numpy arrays
        Truncation diagnostics
    """

    def __init__(self, value, rounding, k_used, tail_bound, truncated):
        self.value = value
        self.rounding = rounding
        self.k_used = k_used
        self.tail_bound = tail_bound
        self.truncated = truncated


def heat_series(z, u, params, trunc=DEFAULT_POLICY, grid=False):
    """
    Evaluates the scaled heat series, see HeatSeries

    With grid=True, z and u are 1-d arrays and the result lives on their
    outer grid; otherwise they are broadcast elementwise.
    """
    z = _check_rho(z)
    u = _check_unit(u)
    if grid:
        z = np.atleast_1d(z).ravel()
        u = np.atleast_1d(u).ravel()
        closed = PLANE_WAVE_SCALE*np.exp(-z[:, None]*(1.0 - u[None, :]))
        shape = closed.shape
    else:
        z, u = np.broadcast_arrays(z, u)
        closed = PLANE_WAVE_SCALE*np.exp(-z*(1.0 - u))
        shape = z.shape

    if params.a == 0 and trunc.split:
        diagnostics_shape = z.shape
        return HeatSeries(closed, ROUNDING*closed,
                          np.zeros(diagnostics_shape, dtype=int),
                          np.zeros(diagnostics_shape),
                          np.zeros(diagnostics_shape, dtype=bool))

    if grid:
        table = _modified_table(z, params, trunc)
        zonal = specfun.zonal_table(table.size - 1, u)
        series = table.coefficients.T @ zonal
        spread = np.abs(table.coefficients).T @ np.abs(zonal)
        k_used, tail, truncated = table.k_used, table.tail, table.truncated
    else:
        z_values, z_index = np.unique(z.ravel(), return_inverse=True)
        u_values, u_index = np.unique(u.ravel(), return_inverse=True)
        table = _modified_table(z_values, params, trunc)
        zonal = specfun.zonal_table(table.size - 1, u_values)
        series = _contract(table.coefficients, z_index, zonal,
                           u_index).reshape(shape)
        spread = _contract(np.abs(table.coefficients), z_index,
                           np.abs(zonal), u_index).reshape(shape)
        k_used = table.k_used[z_index].reshape(shape)
        tail = table.tail[z_index].reshape(shape)
        truncated = table.truncated[z_index].reshape(shape)

    _log_failures(table, "Heat")
    if trunc.split:
        series = series + closed
        spread = spread + closed

    rounding = 4.0*ROUNDING*spread
    return HeatSeries(series, rounding, k_used, tail, truncated)


def heat_kernel(t, x, y, params, trunc=DEFAULT_POLICY):
    """
    Kernel of exp(-tH) between the points x and y, t > 0

    Returns a KernelValue with real values; negative flags points where
    the value is below zero by more than its rounding estimate.
    """
    t = _check_heat_time(t)
    r1, r2, u = _pair_geometry(x, y)
    z = r1*r2/(2.0*math.sinh(t))
    series = heat_series(z, u, params, trunc)

    exponent = (-(r1 - r2)**2/(4.0*math.tanh(t))
                - 0.5*r1*r2*math.tanh(0.5*t))
    scale = (2.0*math.sinh(t))**-1.5*np.exp(exponent)
    negative = series.value < -np.maximum(series.rounding,
                                          1.0e-12*PLANE_WAVE_SCALE)
    if np.any(negative):
        logger.warning("heat kernel negative beyond rounding at %d point(s)",
                       int(np.sum(negative)))

    return KernelValue(scale*series.value, series.k_used, series.tail_bound,
                       series.truncated, negative=negative)


def mehler_heat(t, x, y):
    """
    a = 0 heat kernel (4 pi sinh t)^(-3/2)
    exp(-((|x|^2+|y|^2) cosh t - 2 x.y)/(4 sinh t))
    """
    t = _check_heat_time(t)
    x = as_points(x)
    y = as_points(y)
    exponent = -((x.r**2 + y.r**2)*math.cosh(t)
                 - 2.0*x.dot(y))/(4.0*math.sinh(t))
    return specfun._as_output((4.0*math.pi*math.sinh(t))**-1.5
                              * np.exp(exponent))


def gaussian_weight_exponent(t, r1, r2, u):
    """
    Exponent W with |K_t(x,y)| sinh(t)^(3/2) exp(|x-y|^2/(4 tanh t))
    = 2^(-3/2) exp(W) |S|
    """
    product = np.asarray(r1)*np.asarray(r2)
    return (0.5*product*(1.0 - np.asarray(u))/math.tanh(t)
            - 0.5*product*math.tanh(0.5*t))


def heat_gaussian_ratio(t, x, y, params, trunc=DEFAULT_POLICY,
                        resolve_tol=1.0e-3):
    """
    Gaussian weighted heat kernel |K_t(x,y)| sinh(t)^(3/2)
    exp(|x-y|^2/(4 tanh t))

    Computed from the scaled series so that no overflow occurs.

    Returns
    -------
    ratio : numpy array

    resolved : bool array
        False where the rounding error estimate exceeds resolve_tol
        times the ratio

    series : HeatSeries
        The underlying series with its diagnostics
    """
    t = _check_heat_time(t)
    r1, r2, u = _pair_geometry(x, y)
    z = r1*r2/(2.0*math.sinh(t))
    series = heat_series(z, u, params, trunc)
    weight = 2.0**-1.5*np.exp(gaussian_weight_exponent(t, r1, r2, u))
    ratio = weight*np.abs(series.value)
    resolved = weight*series.rounding <= resolve_tol*ratio
    return specfun._as_output(ratio), specfun._as_output(resolved), series


def hille_hardy_partial_sum(alpha, x, y, r, M):
    """
    sum_{m < M} m! L_m^alpha(x) L_m^alpha(y) r^m / Gamma(1+alpha+m)
    """
    _check_hille_hardy(alpha, x, y, r, M)
    table_x = specfun.laguerre_table(M - 1, alpha, x)
    table_y = specfun.laguerre_table(M - 1, alpha, y)
    m = np.arange(M)
    log_weight = special.gammaln(m + 1) - special.gammaln(1 + alpha + m)
    if r > 0:
        log_weight = log_weight + m*math.log(r)
    else:
        log_weight = np.where(m == 0, log_weight, -np.inf)
    return math.fsum(np.exp(log_weight)*table_x*table_y)


def hille_hardy_closed_form(alpha, x, y, r):
    """
    exp(-r(x+y)/(1-r)) / ((1-r) (xyr)^(alpha/2)) I_alpha(2 sqrt(xyr)/(1-r)),
    with its continuous limit when x y r = 0
    """
    _check_hille_hardy(alpha, x, y, r, 1)
    product = x*y*r
    decay = -r*(x + y)/(1.0 - r)
    if product == 0:
        return math.exp(decay - (1.0 + alpha)*math.log(1.0 - r)
                        - special.gammaln(1.0 + alpha))

    argument = 2.0*math.sqrt(product)/(1.0 - r)
    log_value = (decay - math.log(1.0 - r) - 0.5*alpha*math.log(product)
                 + math.log(special.ive(alpha, argument)) + argument)
    return math.exp(log_value)


def hille_hardy_check(alpha, x, y, r, M):
    """
    Relative residual between the Laguerre bilinear partial sum of length
    M and its closed form
    """
    closed = hille_hardy_closed_form(alpha, x, y, r)
    partial = hille_hardy_partial_sum(alpha, x, y, r, M)
    return abs(partial - closed)/abs(closed)


def _check_hille_hardy(alpha, x, y, r, M):
    if not alpha > -1:
        raise InputError("The Laguerre bilinear sum needs alpha > -1.")
    if not (x >= 0 and y >= 0):
        raise InputError("The Laguerre bilinear sum needs x, y >= 0.")
    if not 0 <= r < 1:
        raise InputError("The Laguerre bilinear sum needs 0 <= r < 1, got "
                         + repr(r))
    if int(M) != M or M < 1:
        raise InputError("The partial sum length M must be a positive "
                         + "integer.")
