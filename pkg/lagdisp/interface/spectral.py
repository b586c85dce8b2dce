"""
Eigenvalues, eigenfunctions and finite mode sets of

    H = -Laplace + a/|x|^2 + |x|^2/4      on R^3, a >= 0.

The eigenfunctions are e_{m,k,n}(x) = R_{m,k}(|x|) Y_n^k(x/|x|) with

    R_{m,k}(r) = sqrt(m!/(2^beta Gamma(m+1+beta))) r^(beta-1/2)
                 exp(-r^2/4) L_m^beta(r^2/2),    beta = beta_k,

and eigenvalue 2m + 1 + beta_k.
"""
import collections
import json
import logging
import math

import numpy as np
from scipy import special

from lagdisp.helper import specfun
from lagdisp.helper.exceptions import InputError
from lagdisp.helper.formatting import bcolors
from lagdisp.helper.geometry import as_points

logger = logging.getLogger(__name__)


class OperatorParams:
    """
    Parameters of the operator, only the inverse square coupling a

    The coefficient of the harmonic potential is fixed to 1/4 and is not
    stored. Negative couplings are rejected.
    """

    def __init__(self, a=0.0):
        try:
            a = float(a)
        except (TypeError, ValueError):
            raise InputError("Coupling a must be a real number, got "
                             + repr(a))
        if not math.isfinite(a) or a < 0:
            raise InputError("Coupling a must be finite and >= 0, got "
                             + repr(a))
        self._a = a

    @property
    def a(self):
        return self._a

    def to_dict(self):
        return {"a": self._a}

    def __eq__(self, other):
        return isinstance(other, OperatorParams) and other.a == self.a

    def __hash__(self):
        return hash(("OperatorParams", self._a))

    def __repr__(self):
        return "OperatorParams(a=" + repr(self._a) + ")"


class ModeIndex(collections.namedtuple("ModeIndex", ["m", "k", "n"])):
    """
    Eigenmode label (m, k, n): radial number m, degree k and order n
    with |n| <= k
    """
    __slots__ = ()

    def __new__(cls, m, k, n):
        for name, value in (("m", m), ("k", k), ("n", n)):
            if int(value) != value:
                raise InputError("Mode index " + name
                                 + " must be an integer, got "
                                 + repr(value))
        m, k, n = int(m), int(k), int(n)
        if m < 0 or k < 0:
            raise InputError("Mode indices m and k must be >= 0.")
        if abs(n) > k:
            raise InputError("Mode order must satisfy |n| <= k, got n="
                             + str(n) + " for k=" + str(k))
        return super(ModeIndex, cls).__new__(cls, m, k, n)


def _degrees(k):
    k = np.asarray(k)
    if np.any(k < 0) or np.any(np.asarray(k, dtype=float) != np.floor(k)):
        raise InputError("Degrees k must be non-negative integers.")
    return k


def beta(k, params):
    """beta_k = sqrt((k + 1/2)^2 + a), the Bessel order of degree k"""
    k = _degrees(k)
    return specfun._as_output(np.sqrt((k + 0.5)**2 + params.a))


def alpha(k, params):
    """alpha_k = 1/2 - beta_k"""
    return specfun._as_output(0.5 - np.asarray(beta(k, params)))


def eigenvalue(m, k, params):
    """lambda_{m,k} = 2m + 1 + beta_k"""
    m = np.asarray(m)
    if np.any(m < 0):
        raise InputError("Radial number m must be >= 0.")
    return specfun._as_output(2*m + 1 + np.asarray(beta(k, params)))


def radial_table(m_max, k, params, r):
    """
    Radial profiles R_{0,k} ... R_{m_max,k} evaluated at r

    Computed in log space apart from the Laguerre factor. At r = 0 the
    continuous limit is returned, which is non-zero only when
    beta_k = 1/2, i.e. a = 0 and k = 0.

    Returns
    -------
    numpy array with shape (m_max + 1,) + shape of r
    """
    r = np.asarray(r, dtype=float)
    if np.any(~(r >= 0)):
        raise InputError("Radial eigenfunctions need r >= 0.")

    order = float(beta(k, params))
    laguerre = specfun.laguerre_table(m_max, order, 0.5*r*r)

    m = np.arange(m_max + 1)
    log_norm = 0.5*(special.gammaln(m + 1) - order*math.log(2.0)
                    - special.gammaln(m + 1 + order))

    positive = r > 0
    safe_r = np.where(positive, r, 1.0)
    at_origin = 0.0 if order == 0.5 else -np.inf
    log_profile = np.where(positive,
                           (order - 0.5)*np.log(safe_r) - 0.25*r*r,
                           at_origin)

    expand = (slice(None),) + (None,)*r.ndim
    return np.exp(log_norm[expand] + log_profile)*laguerre


def radial_eigenfunction(m, k, params, r):
    """Radial profile R_{m,k}(r), normalized in L2(r^2 dr)"""
    if int(m) != m or m < 0:
        raise InputError("Radial number m must be a non-negative integer.")
    return specfun._as_output(radial_table(int(m), k, params, r)[int(m)])


def eigenfunction(mode, params, x):
    """
    Eigenfunction e_{m,k,n}(x) = R_{m,k}(|x|) Y_n^k(x/|x|)

    Parameters
    ----------
    mode : ModeIndex or (m, k, n) tuple

    params : OperatorParams

    x : PolarPoints or (r, theta, phi) tuple
    """
    mode = ModeIndex(*mode)
    points = as_points(x)
    radial = radial_table(mode.m, mode.k, params, points.r)[mode.m]
    angular = specfun.spherical_harmonic(mode.k, mode.n, points.theta,
                                         points.phi)
    return specfun._as_output(radial*angular)


class SpectralSet:
    """
    Finite, ordered collection of eigenmodes inside an energy window

    Modes are sorted by (eigenvalue, k, n). Instances are not meant to be
    changed after construction, restrict() returns a new set.

    Attributes
    ----------
    params : OperatorParams
        Operator the modes belong to

    lambda_min : float
        Lower edge of the energy window

    lambda_max : float
        Upper edge of the energy window

    modes : tuple of ModeIndex
        The modes in canonical order

    eigenvalues : numpy array
        Eigenvalue of every mode, same order as modes

    Methods
    -------
    index_of(mode)
        Position of a mode in the set

    restrict(lo, hi)
        New set with the modes whose eigenvalue lies in [lo, hi]

    radial_pairs()
        Distinct (m, k) pairs and the pair position of every mode

    show()
        Prints the modes to the console

    to_json(filename) / from_json(filename)
        JSON export with fields a, lambda_max, lambda_min and modes
    """

    def __init__(self, params, lambda_max, modes, lambda_min=0.0):
        if not isinstance(params, OperatorParams):
            raise InputError("SpectralSet needs OperatorParams.")
        if not 0 <= lambda_min < lambda_max:
            raise InputError("SpectralSet window needs "
                             + "0 <= lambda_min < lambda_max.")

        self.params = params
        self.lambda_min = float(lambda_min)
        self.lambda_max = float(lambda_max)

        labelled = []
        for mode in modes:
            mode = ModeIndex(*mode)
            value = float(eigenvalue(mode.m, mode.k, params))
            if not self.lambda_min <= value <= self.lambda_max:
                raise InputError("Mode " + str(tuple(mode))
                                 + " lies outside the spectral window.")
            labelled.append((value, mode.k, mode.n, mode.m, mode))
        labelled.sort()

        self.modes = tuple(entry[-1] for entry in labelled)
        self.eigenvalues = np.array([entry[0] for entry in labelled])
        self.eigenvalues.setflags(write=False)
        self._index = {mode: i for i, mode in enumerate(self.modes)}
        if len(self._index) != len(self.modes):
            raise InputError("SpectralSet modes must be distinct.")

    @property
    def k_max(self):
        if len(self.modes) == 0:
            return -1
        return max(mode.k for mode in self.modes)

    @property
    def m_max(self):
        if len(self.modes) == 0:
            return -1
        return max(mode.m for mode in self.modes)

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __getitem__(self, index):
        return self.modes[index]

    def __contains__(self, mode):
        return tuple(mode) in self._index

    def __eq__(self, other):
        return (isinstance(other, SpectralSet)
                and self.params == other.params
                and self.lambda_min == other.lambda_min
                and self.lambda_max == other.lambda_max
                and self.modes == other.modes)

    def index_of(self, mode):
        try:
            return self._index[ModeIndex(*mode)]
        except KeyError:
            raise NameError("Mode " + str(tuple(mode))
                            + " is not part of this spectral set.")

    def restrict(self, lo, hi):
        """Returns the modes with lo <= eigenvalue <= hi as a new set"""
        lo = max(float(lo), self.lambda_min)
        hi = min(float(hi), self.lambda_max)
        if not lo < hi:
            raise InputError("restrict needs a non-empty window inside "
                             + "the set's window.")
        keep = [mode for mode, value in zip(self.modes, self.eigenvalues)
                if lo <= value <= hi]
        return SpectralSet(self.params, hi, keep, lambda_min=lo)

    def radial_pairs(self):
        """
        Returns the distinct (m, k) pairs in order of first appearance and
        an integer array giving the pair position of every mode.
        """
        pairs = []
        positions = {}
        pair_of_mode = np.empty(len(self.modes), dtype=int)
        for i, mode in enumerate(self.modes):
            key = (mode.m, mode.k)
            if key not in positions:
                positions[key] = len(pairs)
                pairs.append(key)
            pair_of_mode[i] = positions[key]
        return pairs, pair_of_mode

    def radial_values(self, r):
        """
        R_{m,k}(r) for every mode, shape (len(self),) + shape of r
        """
        r = np.asarray(r, dtype=float)
        values = np.empty((len(self.modes),) + r.shape)
        by_degree = collections.defaultdict(list)
        for i, mode in enumerate(self.modes):
            by_degree[mode.k].append(i)

        for k, members in by_degree.items():
            m_top = max(self.modes[i].m for i in members)
            table = radial_table(m_top, k, self.params, r)
            for i in members:
                values[i] = table[self.modes[i].m]

        return values

    def to_dict(self):
        return {"a": self.params.a,
                "lambda_min": self.lambda_min,
                "lambda_max": self.lambda_max,
                "modes": [[mode.m, mode.k, mode.n, float(value)]
                          for mode, value in zip(self.modes,
                                                 self.eigenvalues)]}

    @classmethod
    def from_dict(cls, dictionary):
        modes = [entry[:3] for entry in dictionary["modes"]]
        return cls(OperatorParams(dictionary["a"]),
                   dictionary["lambda_max"], modes,
                   lambda_min=dictionary.get("lambda_min", 0.0))

    def to_json(self, filename):
        with open(filename, "w") as json_file:
            json.dump(self.to_dict(), json_file, indent=1)

    @classmethod
    def from_json(cls, filename):
        with open(filename, "r") as json_file:
            return cls.from_dict(json.load(json_file))

    def show(self, line_length=93):
        """
        Prints the modes with their eigenvalues, one (m, k) level per line
        """
        print(bcolors.BOLD + "Spectral set for a = " + str(self.params.a)
              + ", window [" + str(self.lambda_min) + ", "
              + str(self.lambda_max) + "], " + str(len(self.modes))
              + " modes" + bcolors.ENDC)

        if len(self.modes) == 0:
            print("No modes in window")
            return

        pairs, _ = self.radial_pairs()
        for m, k in sorted(pairs, key=lambda pair: (
                float(eigenvalue(pair[0], pair[1], self.params)), pair[1])):
            value = float(eigenvalue(m, k, self.params))
            line = ("lambda = " + str(round(value, 10)).ljust(14)
                    + " m = " + str(m).ljust(4) + " k = " + str(k).ljust(4)
                    + " orders " + str(-k) + ".." + str(k))
            print(line[:line_length])

    def __repr__(self):
        return ("SpectralSet(a=" + repr(self.params.a) + ", window=["
                + repr(self.lambda_min) + ", " + repr(self.lambda_max)
                + "], modes=" + str(len(self.modes)) + ")")


class SpectralLevels:
    """
    The (m, k) levels of an energy window with the orders n collapsed

    Kernels written in zonal form only need one entry per level, which
    keeps windows with millions of modes manageable. Levels are sorted
    by (k, m) so per-degree sums can use np.add.reduceat.

    Attributes
    ----------
    params : OperatorParams

    lambda_min, lambda_max : float
        Window edges

    m, k : numpy int arrays
        Level labels

    eigenvalues : numpy array
        lambda_{m,k} of every level
    """

    def __init__(self, params, lambda_min, lambda_max, m, k):
        self.params = params
        self.lambda_min = float(lambda_min)
        self.lambda_max = float(lambda_max)
        order = np.lexsort((np.asarray(m), np.asarray(k)))
        self.m = np.asarray(m, dtype=int)[order]
        self.k = np.asarray(k, dtype=int)[order]
        self.eigenvalues = 2*self.m + 1 + np.sqrt((self.k + 0.5)**2
                                                  + params.a)

    def __len__(self):
        return self.m.size

    @property
    def k_max(self):
        return int(self.k.max()) if self.m.size else -1

    def degree_starts(self):
        """Degrees present and the first level index of each"""
        degrees, starts = np.unique(self.k, return_index=True)
        return degrees, starts

    def multiplicity(self):
        """Number of orders 2k+1 of each level"""
        return 2*self.k + 1

    def radial_values(self, r):
        """R_{m,k}(r) for every level, shape (len(self),) + shape of r"""
        r = np.asarray(r, dtype=float)
        values = np.empty((self.m.size,) + r.shape)
        degrees, starts = self.degree_starts()
        stops = np.append(starts[1:], self.m.size)
        for k, start, stop in zip(degrees, starts, stops):
            table = radial_table(int(self.m[start:stop].max()), int(k),
                                 self.params, r)
            values[start:stop] = table[self.m[start:stop]]
        return values

    def __repr__(self):
        return ("SpectralLevels(a=" + repr(self.params.a) + ", window=["
                + repr(self.lambda_min) + ", " + repr(self.lambda_max)
                + "], levels=" + str(len(self)) + ")")


def _check_window(lo, hi, name):
    if not (math.isfinite(lo) and math.isfinite(hi) and 0 <= lo < hi):
        raise InputError(name + " needs 0 <= lo < hi, got lo="
                         + str(lo) + ", hi=" + str(hi))


def levels_in_window(lo, hi, params):
    """
    All levels (m, k) with lo <= lambda_{m,k} <= hi, see SpectralLevels
    """
    _check_window(lo, hi, "levels_in_window")

    m_list = []
    k_list = []
    k = 0
    # lambda_{0,k} grows with k, so the first empty degree ends the search
    while eigenvalue(0, k, params) <= hi:
        bottom = float(eigenvalue(0, k, params))
        m = np.arange(int(math.floor((hi - bottom)/2.0)) + 2)
        values = np.asarray(eigenvalue(m, k, params))
        keep = (values >= lo) & (values <= hi)
        m_list.append(m[keep])
        k_list.append(np.full(int(keep.sum()), k))
        k += 1

    if m_list:
        m_all = np.concatenate(m_list)
        k_all = np.concatenate(k_list)
    else:
        m_all = np.zeros(0, dtype=int)
        k_all = np.zeros(0, dtype=int)

    return SpectralLevels(params, lo, hi, m_all, k_all)


def modes_in_window(lo, hi, params):
    """
    All modes (m, k, n) with lo <= lambda_{m,k} <= hi

    Every (m, k) level is expanded to its 2k+1 orders. An empty window
    gives an empty set.

    Parameters
    ----------
    lo : float
        Lower edge, non-negative

    hi : float
        Upper edge, larger than lo

    params : OperatorParams
    """
    _check_window(lo, hi, "modes_in_window")
    levels = levels_in_window(lo, hi, params)

    modes = []
    for m, k in zip(levels.m, levels.k):
        modes.extend(ModeIndex(m, k, n) for n in range(-k, k + 1))

    logger.debug("window [%s, %s] holds %d modes", lo, hi, len(modes))
    return SpectralSet(params, hi, modes, lambda_min=lo)
