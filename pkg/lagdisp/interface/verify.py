"""
Numerical scans of the dispersive, Gaussian, Bernstein, Besov and
Strichartz type estimates for H = -Laplace + a/|x|^2 + |x|^2/4

Every scan evaluates a weighted ratio on a finite grid, records its
supremum and the first grid point attaining it, repeats the scan on a
refined grid and compares the two suprema. A scan cannot prove a bound
over all of R^3 x R^3 x (0, pi); the reports state what was observed.

Kernel point pairs are x = (r1, theta=0, phi=0) and y = (r2, 0, gamma)
with r1 <= r2 taken from the scan radii, so that u = cos(gamma). The
kernels only depend on (|x|, |y|, u), which makes this family cover
all configurations of the listed radii and angles.
"""
import logging
import math

import numpy as np

from lagdisp.data.data import EstimateReport
from lagdisp.data.data import is_stable
from lagdisp.data.data import relative_change
from lagdisp.helper.exceptions import InputError
from lagdisp.interface import kernels
from lagdisp.interface import transforms
from lagdisp.interface.kernels import DEFAULT_POLICY
from lagdisp.interface.kernels import TruncationPolicy
from lagdisp.interface.spectral import OperatorParams
from lagdisp.interface.spectral import levels_in_window
from lagdisp.interface.spectral import modes_in_window
from lagdisp.interface.transforms import DyadicPartition
from lagdisp.interface.transforms import QuadratureGrid
from lagdisp.interface.transforms import SpectralBasis
from lagdisp.interface.transforms import SpectralCoefficients
from lagdisp.interface.transforms import ZonalKernelTable

logger = logging.getLogger(__name__)

ESTIMATE_IDS = ("schrodinger-dispersive", "heat-gaussian", "multiplier-decay",
                "bernstein", "block-interaction", "besov-equivalence",
                "halfwave-decay", "wave-dispersive", "k-function")

MINIMUM_EPSILON = 1.0e-3

# Strichartz quotients are compared with this tolerance under time node
# doubling.
TIME_DOUBLING_TOLERANCE = 0.02

# Sample based norm estimates are limited to windows of this many modes.
MAX_SAMPLE_MODES = 4000

# Points whose rounding estimate exceeds this fraction of the weighted heat
# ratio are excluded from the supremum.
HEAT_RESOLVE_TOLERANCE = 1.0e-3


class ScanGrid:
    """
    Times, radii and angles of a kernel scan

    Attributes
    ----------
    t_min, t_max : float
        Time range, t_max defaults to pi - epsilon

    t_count : int
        Number of equidistant times

    epsilon : float
        Distance kept from the singular times, at least 1e-3

    radii : numpy array
        Sorted distinct radii of the points x and y

    angle_count : int
        Number of equidistant angles gamma in [0, pi]

    refine_factor : int
        Factor applied by refined()
    """

    def __init__(self, t_min=None, t_max=None, t_count=48, epsilon=1.0e-3,
                 radii=(0.25, 0.5, 1.0, 1.5, 2.0, 3.0), angle_count=13,
                 refine_factor=2):
        if not epsilon >= MINIMUM_EPSILON:
            raise InputError("ScanGrid needs epsilon >= "
                             + repr(MINIMUM_EPSILON) + ", got "
                             + repr(epsilon))
        if t_min is None:
            t_min = epsilon
        if t_max is None:
            t_max = math.pi - epsilon
        if not (math.isfinite(t_min) and math.isfinite(t_max)
                and 0 <= t_min < t_max):
            raise InputError("ScanGrid needs 0 <= t_min < t_max, got "
                             + repr(t_min) + ", " + repr(t_max))
        for name, value in (("t_count", t_count),
                            ("angle_count", angle_count),
                            ("refine_factor", refine_factor)):
            if int(value) != value or value < 2:
                raise InputError("ScanGrid needs an integer " + name
                                 + " >= 2, got " + repr(value))

        radii = np.unique(np.asarray(radii, dtype=float))
        if radii.size == 0:
            raise InputError("ScanGrid needs at least one radius.")
        if np.any(~np.isfinite(radii)) or np.any(radii < 0):
            raise InputError("ScanGrid radii must be finite and >= 0.")

        self.t_min = float(t_min)
        self.t_max = float(t_max)
        self.t_count = int(t_count)
        self.epsilon = float(epsilon)
        self.radii = radii
        self.angle_count = int(angle_count)
        self.refine_factor = int(refine_factor)

    def times(self):
        return np.linspace(self.t_min, self.t_max, self.t_count)

    def angles(self):
        return np.linspace(0.0, math.pi, self.angle_count)

    def cosines(self):
        return np.cos(self.angles())

    def pairs(self):
        """Radius index arrays (first, second) of all pairs r1 <= r2"""
        return np.triu_indices(self.radii.size)

    def with_times(self, t_min, t_max):
        """Same grid on another time range"""
        return ScanGrid(t_min=t_min, t_max=t_max, t_count=self.t_count,
                        epsilon=self.epsilon, radii=self.radii,
                        angle_count=self.angle_count,
                        refine_factor=self.refine_factor)

    def refined(self):
        """
        Nested refinement: time and angle steps divided by the factor and
        refine_factor - 1 radii inserted between neighbouring radii
        """
        factor = self.refine_factor
        radii = [self.radii[0]]
        for low, high in zip(self.radii[:-1], self.radii[1:]):
            radii.extend(np.linspace(low, high, factor + 1)[1:])
        return ScanGrid(t_min=self.t_min, t_max=self.t_max,
                        t_count=(self.t_count - 1)*factor + 1,
                        epsilon=self.epsilon, radii=radii,
                        angle_count=(self.angle_count - 1)*factor + 1,
                        refine_factor=factor)

    def to_dict(self):
        return {"t_min": self.t_min, "t_max": self.t_max,
                "t_count": self.t_count, "epsilon": self.epsilon,
                "radii": [float(r) for r in self.radii],
                "angle_count": self.angle_count,
                "refine_factor": self.refine_factor}

    def __repr__(self):
        return ("ScanGrid(t=[" + repr(self.t_min) + ", " + repr(self.t_max)
                + "] x " + str(self.t_count) + ", radii="
                + str(self.radii.size) + ", angles=" + str(self.angle_count)
                + ")")


def _sequential_map(function, tasks):
    return [function(task) for task in tasks]


def _point_pair(r1, r2, gamma):
    return [float(r1), 0.0, 0.0], [float(r2), 0.0, float(gamma)]


def _location(ratios):
    """First maximum of ratios as an index tuple, nan ignored, or None"""
    masked = np.where(np.isnan(ratios), -np.inf, ratios)
    if masked.size == 0 or not np.any(np.isfinite(masked)):
        return None
    return np.unravel_index(int(np.argmax(masked)), masked.shape)


def _argmax_description(index, grid, times=None):
    if index is None:
        return []
    first, second = grid.pairs()
    angles = grid.angles()
    if times is None:
        pair, angle = index
        x, y = _point_pair(grid.radii[first[pair]], grid.radii[second[pair]],
                           angles[angle])
        return [None, x, y]
    step, pair, angle = index
    x, y = _point_pair(grid.radii[first[pair]], grid.radii[second[pair]],
                       angles[angle])
    return [float(times[step]), x, y]


def _sup(ratios):
    finite = ratios[~np.isnan(ratios)]
    if finite.size == 0:
        return None
    return float(np.max(finite))


def _merge_truncation(results):
    k_max = 0
    tail = 0.0
    truncated = 0
    for result in results:
        k_max = max(k_max, int(np.max(result["k_used"], initial=0)))
        tail = max(tail, float(np.max(result["tail"], initial=0.0)))
        truncated += int(np.sum(result["truncated"]))
    return {"k_max": k_max, "tail": tail}, truncated


def _policy_task(policy):
    return policy.to_dict()


def _schrodinger_chunk(task):
    """Weighted Schrodinger kernel |sin t|^(3/2) |K_t| at one time"""
    t, a, radii, first, second, u, policy = task
    params = OperatorParams(a)
    rho = radii[first]*radii[second]/(2.0*math.sin(t))
    core = kernels.k_function_grid(rho, u, params, TruncationPolicy(**policy))
    # |sin t|^(3/2) (2 sin t)^(-3/2) = 2^(-3/2)
    return {"ratio": 2.0**-1.5*np.abs(core.value),
            "k_used": np.asarray(core.k_used),
            "tail": np.asarray(core.tail_bound),
            "truncated": np.asarray(core.truncated)}


def _schrodinger_scan(grid, params, policy, mapper):
    times = grid.times()
    for t in (grid.t_min, grid.t_max):
        kernels.check_schrodinger_time(t, grid.epsilon)
    if grid.t_max >= math.pi:
        raise InputError("Schrodinger scans need t_max < pi.")

    first, second = grid.pairs()
    u = grid.cosines()
    tasks = [(float(t), params.a, grid.radii, first, second, u,
              _policy_task(policy)) for t in times]
    results = mapper(_schrodinger_chunk, tasks)
    ratios = np.stack([result["ratio"] for result in results])
    truncation, truncated = _merge_truncation(results)
    return times, ratios, results, truncation, truncated


def verify_schrodinger_dispersive(grid, params, trunc=DEFAULT_POLICY,
                                  mapper=None, refine=True):
    """
    Supremum of |sin t|^(3/2) |K_t^S(x, y)| over the scan grid

    For a = 0 the ratio is (4 pi)^(-3/2) at every point; the deviation
    from that value is reported in extras.
    """
    mapper = mapper or _sequential_map
    times, ratios, results, truncation, truncated = _schrodinger_scan(
        grid, params, trunc, mapper)
    sup = _sup(ratios)
    index = _location(ratios)

    refined_sup = None
    if refine:
        fine = _schrodinger_scan(grid.refined(), params, trunc, mapper)
        refined_sup = _sup(fine[1])
        fine_truncation, fine_truncated = fine[3], fine[4]
        truncation = {"k_max": max(truncation["k_max"],
                                   fine_truncation["k_max"]),
                      "tail": max(truncation["tail"],
                                  fine_truncation["tail"])}
        truncated += fine_truncated

    extras = {"truncated_points": truncated}
    if params.a == 0:
        reference = (4.0*math.pi)**-1.5
        extras["reference"] = reference
        extras["max_reference_deviation"] = float(
            np.max(np.abs(ratios - reference)))

    first, second = grid.pairs()
    u = grid.cosines()
    rows = []
    for step, t in enumerate(times):
        for pair in range(first.size):
            for angle in range(u.size):
                rows.append([float(t), grid.radii[first[pair]],
                             grid.radii[second[pair]], float(u[angle]),
                             float(ratios[step, pair, angle]),
                             int(results[step]["k_used"][pair]),
                             float(results[step]["tail"][pair])])

    report = EstimateReport(
        "schrodinger-dispersive", params=params.to_dict(),
        grid=grid.to_dict(), sup=sup,
        argmax=_argmax_description(index, grid, times),
        refined_sup=refined_sup, truncation=truncation, extras=extras,
        rows=rows,
        row_header=["t", "r1", "r2", "u", "ratio", "k_used", "tail"])
    _log_report(report)
    return report


def _heat_chunk(task):
    """Gaussian weighted heat kernel at one time"""
    t, a, radii, first, second, u, policy, resolve_tol = task
    params = OperatorParams(a)
    r1 = radii[first]
    r2 = radii[second]
    z = r1*r2/(2.0*math.sinh(t))
    series = kernels.heat_series(z, u, params, TruncationPolicy(**policy),
                                 grid=True)

    exponent = kernels.gaussian_weight_exponent(t, r1[:, None], r2[:, None],
                                                u[None, :])
    magnitude = np.abs(series.value)
    with np.errstate(divide="ignore"):
        log_ratio = exponent + np.log(magnitude) - 1.5*math.log(2.0)
    ratio = np.exp(log_ratio)
    resolved = series.rounding <= resolve_tol*magnitude

    product = (r1*r2)[:, None]*u[None, :]
    reference = ((4.0*math.pi)**-1.5
                 * np.exp(-0.5*product*math.tanh(0.5*t)))
    return {"ratio": np.where(resolved, ratio, np.nan),
            "reference": reference,
            "excluded": int(np.sum(~resolved)),
            "k_used": np.asarray(series.k_used),
            "tail": np.asarray(series.tail_bound),
            "truncated": np.asarray(series.truncated)}


def _heat_scan(grid, params, policy, mapper):
    times = grid.times()
    if not grid.t_min > 0:
        raise InputError("Heat scans need t_min > 0.")
    first, second = grid.pairs()
    u = grid.cosines()
    tasks = [(float(t), params.a, grid.radii, first, second, u,
              _policy_task(policy), HEAT_RESOLVE_TOLERANCE) for t in times]
    results = mapper(_heat_chunk, tasks)
    ratios = np.stack([result["ratio"] for result in results])
    references = np.stack([result["reference"] for result in results])
    excluded = sum(result["excluded"] for result in results)
    truncation, truncated = _merge_truncation(results)
    return times, ratios, references, excluded, truncation, truncated


def verify_heat_gaussian(grid, params, trunc=DEFAULT_POLICY, mapper=None,
                         refine=True):
    """
    Supremum of |K_t^H(x,y)| sinh(t)^(3/2) exp(|x-y|^2/(4 tanh t))

    The a = 0 supremum of the same ratio on the same grid is reported as
    reference_sup together with bound_factor = sup/reference_sup. Points
    whose rounding error cannot be controlled are excluded and counted.
    """
    mapper = mapper or _sequential_map
    times, ratios, references, excluded, truncation, truncated = \
        _heat_scan(grid, params, trunc, mapper)
    sup = _sup(ratios)
    index = _location(ratios)
    reference_sup = float(np.max(references))

    refined_sup = None
    refined_excluded = 0
    if refine:
        fine = _heat_scan(grid.refined(), params, trunc, mapper)
        refined_sup = _sup(fine[1])
        refined_excluded = fine[3]
        truncation = {"k_max": max(truncation["k_max"], fine[4]["k_max"]),
                      "tail": max(truncation["tail"], fine[4]["tail"])}
        truncated += fine[5]

    if excluded:
        logger.warning("heat scan excluded %d unresolved point(s)", excluded)

    extras = {"excluded_points": excluded,
              "refined_excluded_points": refined_excluded,
              "reference_sup": reference_sup,
              "bound_factor": (None if sup is None
                               else sup/reference_sup),
              "truncated_points": truncated}

    first, second = grid.pairs()
    u = grid.cosines()
    rows = []
    for step, t in enumerate(times):
        for pair in range(first.size):
            for angle in range(u.size):
                rows.append([float(t), grid.radii[first[pair]],
                             grid.radii[second[pair]], float(u[angle]),
                             float(ratios[step, pair, angle]),
                             float(references[step, pair, angle])])

    report = EstimateReport(
        "heat-gaussian", params=params.to_dict(), grid=grid.to_dict(),
        sup=sup, argmax=_argmax_description(index, grid, times),
        refined_sup=refined_sup, truncation=truncation, extras=extras,
        rows=rows, row_header=["t", "r1", "r2", "u", "ratio", "reference"])
    _log_report(report)
    return report


def verify_k_function(rho_max, rho_count, u_count, params,
                      trunc=DEFAULT_POLICY, refine_factor=2, refine=True):
    """
    Supremum of |K(rho, u)| over rho in [0, rho_max] and u in [-1, 1]

    For a = 0 the modulus is (2 pi)^(-3/2) everywhere.
    """
    if not (math.isfinite(rho_max) and rho_max > 0):
        raise InputError("rho_max must be positive and finite.")
    for name, value in (("rho_count", rho_count), ("u_count", u_count)):
        if int(value) != value or value < 2:
            raise InputError(name + " must be an integer >= 2.")

    def scan(rho_nodes, u_nodes):
        rho = np.linspace(0.0, rho_max, rho_nodes)
        u = np.linspace(-1.0, 1.0, u_nodes)
        values = kernels.k_function_grid(rho, u, params, trunc)
        return rho, u, np.abs(values.value), values

    rho, u, modulus, values = scan(int(rho_count), int(u_count))
    sup = float(np.max(modulus))
    row, column = np.unravel_index(int(np.argmax(modulus)), modulus.shape)
    truncation = {"k_max": int(np.max(values.k_used)),
                  "tail": float(np.max(values.tail_bound))}
    truncated = int(np.sum(values.truncated))

    refined_sup = None
    if refine:
        _, _, fine_modulus, fine_values = scan(
            (int(rho_count) - 1)*refine_factor + 1,
            (int(u_count) - 1)*refine_factor + 1)
        refined_sup = float(np.max(fine_modulus))
        truncated += int(np.sum(fine_values.truncated))
        truncation["k_max"] = max(truncation["k_max"],
                                  int(np.max(fine_values.k_used)))
        truncation["tail"] = max(truncation["tail"],
                                 float(np.max(fine_values.tail_bound)))

    extras = {"truncated_points": truncated,
              "rho_zero_max": float(np.max(modulus[0]))}
    if params.a == 0:
        extras["reference"] = kernels.PLANE_WAVE_SCALE
        extras["max_reference_deviation"] = float(
            np.max(np.abs(modulus - kernels.PLANE_WAVE_SCALE)))

    rows = []
    for i in range(rho.size):
        for j in range(u.size):
            rows.append([float(rho[i]), float(u[j]), float(modulus[i, j]),
                         int(values.k_used[i]),
                         float(values.tail_bound[i])])

    report = EstimateReport(
        "k-function", params=params.to_dict(),
        grid={"rho_max": float(rho_max), "rho_count": int(rho_count),
              "u_count": int(u_count), "refine_factor": int(refine_factor)},
        sup=sup, argmax=[float(rho[row]), float(u[column])],
        refined_sup=refined_sup, truncation=truncation, extras=extras,
        rows=rows, row_header=["rho", "u", "modulus", "k_used", "tail"])
    _log_report(report)
    return report


def _block_table(j, params, grid):
    levels = transforms.block_levels(j, params)
    return ZonalKernelTable(levels, grid.radii)


def _pair_distances(grid):
    first, second = grid.pairs()
    r1 = grid.radii[first][:, None]
    r2 = grid.radii[second][:, None]
    u = grid.cosines()[None, :]
    return np.sqrt(np.maximum(r1*r1 + r2*r2 - 2.0*r1*r2*u, 0.0))


def _block_kernel(table, function, grid):
    first, second = grid.pairs()
    factors = table.factors(function).astype(complex)
    return np.abs(table.evaluate(factors, first, second, grid.cosines()))


def _decay_ratios(j, order, grid, params, partition):
    table = _block_table(j, params, grid)
    modulus = _block_kernel(table, partition.multiplier(j), grid)
    weight = (1.0 + 2.0**j*_pair_distances(grid))**order
    return modulus*weight*2.0**(-3*j), len(table.levels)


def verify_multiplier_decay(j, order, grid, params, partition=None,
                            refine=True):
    """
    Supremum of |psi_j(sqrt H)(x, y)| (1 + 2^j |x-y|)^N 2^(-3j) over the
    radii and angles of the scan grid
    """
    if int(order) != order or order < 0:
        raise InputError("Decay order N must be a non-negative integer.")
    partition = partition or DyadicPartition()
    ratios, level_count = _decay_ratios(j, order, grid, params, partition)
    sup = float(np.max(ratios))
    index = _location(ratios)

    refined_sup = None
    if refine:
        refined_sup = float(np.max(_decay_ratios(j, order, grid.refined(),
                                                 params, partition)[0]))

    first, second = grid.pairs()
    u = grid.cosines()
    rows = [[grid.radii[first[pair]], grid.radii[second[pair]],
             float(u[angle]), float(ratios[pair, angle])]
            for pair in range(first.size) for angle in range(u.size)]

    report = EstimateReport(
        "multiplier-decay", params=params.to_dict(), grid=grid.to_dict(),
        sup=sup, argmax=_argmax_description(index, grid),
        refined_sup=refined_sup,
        extras={"j": int(j), "order": int(order), "levels": level_count,
                "partition": partition.to_dict()},
        rows=rows, row_header=["r1", "r2", "u", "ratio"])
    _log_report(report)
    return report


def _bernstein_multiplier(j, s, partition):
    block = partition.multiplier(j)
    return lambda eigenvalues: block(eigenvalues)*eigenvalues**s


def _column_norms(table, function, grid):
    """
    sup over the radii of (sum_levels F^2 R(r)^2 (2k+1)/(4 pi))^(1/2), the
    L2 norm of the kernel in one variable
    """
    if len(table.levels) == 0:
        return 0.0
    factors = table.factors(function)
    weights = (np.abs(factors)**2*(2*table.levels.k + 1)/(4.0*math.pi))
    columns = np.sqrt(weights @ table.radial**2)
    return float(np.max(columns))


def _sample_window_basis(lo, hi, params, grid_base):
    spectral_set = modes_in_window(lo, hi, params)
    if len(spectral_set) > MAX_SAMPLE_MODES:
        raise InputError("Sample based norms are limited to "
                         + str(MAX_SAMPLE_MODES) + " modes, the window ["
                         + repr(lo) + ", " + repr(hi) + "] holds "
                         + str(len(spectral_set)))
    if len(spectral_set) == 0:
        return spectral_set, None
    grid = QuadratureGrid.for_spectral_set(spectral_set, **(grid_base or {}))
    return spectral_set, SpectralBasis(grid, spectral_set)


def sample_functions(basis, count, seed=0):
    """
    Deterministic sample data on the modes of basis: count random
    coefficient vectors and bumps at three radii
    """
    samples = [transforms.random_coefficients(basis.spectral_set, seed + i)
               for i in range(count)]
    for radius in (0.0, 1.0, 2.0):
        samples.append(transforms.bump_coefficients(
            basis, (radius, 0.0, 0.5*math.pi), width=0.5))
    return samples


def _sample_ratios(function, samples, p, q, basis):
    ratios = []
    for sample in samples:
        denominator = transforms.lp_norm(sample, p, basis)
        if denominator == 0:
            continue
        image = sample.multiply(function)
        ratios.append(transforms.lp_norm(image, q, basis)/denominator)
    return ratios


def verify_bernstein(j, p, q, s, params, grid, partition=None,
                     sample_count=8, seed=0, grid_base=None, refine=True):
    """
    Bernstein ratio ||psi_j(sqrt H) H^s f||_q / (2^(2sj + 3j(1/p-1/q))
    ||f||_p), maximized over f

    The pairs (1, inf), (1, 2), (2, inf) and (2, 2) use the exact operator
    norms: kernel supremum, L2 norm of a kernel column and supremum of the
    multiplier. Other pairs are estimated with sample functions.
    """
    p = transforms.check_exponent(p, "p")
    q = transforms.check_exponent(q, "q")
    if not p <= q:
        raise InputError("Bernstein ratios need p <= q.")
    partition = partition or DyadicPartition()
    function = _bernstein_multiplier(j, s, partition)
    scale = 2.0**(2*s*j + 3*j*(1.0/p - 1.0/q))
    extras = {"j": int(j), "p": p, "q": q, "s": float(s),
              "partition": partition.to_dict()}
    argmax = []

    if (p, q) == (1.0, math.inf):
        extras["method"] = "kernel supremum"
        table = _block_table(j, params, grid)
        modulus = _block_kernel(table, function, grid)
        sup = float(np.max(modulus, initial=0.0))/scale
        index = _location(modulus)
        argmax = _argmax_description(index, grid) if index else []
        refined = _block_kernel(_block_table(j, params, grid.refined()),
                                function, grid.refined())
        refined_sup = float(np.max(refined, initial=0.0))/scale
    elif (p, q) in ((1.0, 2.0), (2.0, math.inf)):
        extras["method"] = "kernel column norm"
        sup = _column_norms(_block_table(j, params, grid), function,
                            grid)/scale
        refined_sup = _column_norms(_block_table(j, params, grid.refined()),
                                    function, grid.refined())/scale
    elif (p, q) == (2.0, 2.0):
        extras["method"] = "multiplier supremum"
        levels = transforms.block_levels(j, params)
        values = np.abs(np.asarray(function(levels.eigenvalues)))
        sup = float(np.max(values, initial=0.0))/scale
        refined_sup = sup
    else:
        extras["method"] = "sample functions"
        lo, hi = DyadicPartition.block_window(j)
        spectral_set, basis = _sample_window_basis(lo, hi, params, grid_base)
        if basis is None:
            sup = refined_sup = 0.0
        else:
            samples = sample_functions(basis, sample_count, seed)
            ratios = _sample_ratios(function, samples, p, q, basis)
            sup = max(ratios, default=0.0)/scale
            if refine:
                fine = _sample_ratios(function, samples, p, q,
                                      basis.refined())
                refined_sup = max(fine, default=0.0)/scale
            else:
                refined_sup = None
            extras["samples"] = len(samples)

    if not refine and extras["method"] != "multiplier supremum":
        refined_sup = None

    report = EstimateReport(
        "bernstein", params=params.to_dict(), grid=grid.to_dict(), sup=sup,
        argmax=argmax, refined_sup=refined_sup, extras=extras)
    _log_report(report)
    return report


def verify_block_interaction(j, k, p, m, params, partition_a=None,
                             partition_b=None, sample_count=8, seed=0,
                             grid_base=None, refine=True):
    """
    ||psi_j(sqrt H) phi_k(sqrt H) f||_p / ||f||_p 2^(2m|j-k|), maximized
    over f, with psi from partition_a and phi from partition_b

    For |j-k| >= 2 the supports are disjoint and the ratio is exactly 0.
    p = 2 uses the exact operator norm, the supremum of the product
    multiplier over the spectrum.
    """
    p = transforms.check_exponent(p, "p")
    if abs(int(j) - int(k)) > 4:
        raise InputError("Block interaction is scanned for |j-k| <= 4.")
    partition_a = partition_a or DyadicPartition()
    partition_b = partition_b or DyadicPartition(1.2, 1.8)
    first = partition_a.multiplier(j)
    second = partition_b.multiplier(k)

    def function(eigenvalues):
        return first(eigenvalues)*second(eigenvalues)

    weight = 2.0**(2*m*abs(int(j) - int(k)))
    lo, hi = DyadicPartition.block_window(j)
    extras = {"j": int(j), "k": int(k), "p": p, "m": float(m),
              "partitions": [partition_a.to_dict(), partition_b.to_dict()]}

    if p == 2.0:
        extras["method"] = "multiplier supremum"
        levels = levels_in_window(lo, hi, params)
        values = np.abs(np.asarray(function(levels.eigenvalues)))
        sup = float(np.max(values, initial=0.0))*weight
        refined_sup = sup
    else:
        extras["method"] = "sample functions"
        spectral_set, basis = _sample_window_basis(lo, hi, params, grid_base)
        if basis is None:
            sup = refined_sup = 0.0
        else:
            samples = sample_functions(basis, sample_count, seed)
            ratios = _sample_ratios(function, samples, p, p, basis)
            sup = max(ratios, default=0.0)*weight
            refined_sup = None
            if refine:
                fine = _sample_ratios(function, samples, p, p,
                                      basis.refined())
                refined_sup = max(fine, default=0.0)*weight
            extras["samples"] = len(samples)

    report = EstimateReport(
        "block-interaction", params=params.to_dict(), sup=sup,
        refined_sup=refined_sup, extras=extras)
    _log_report(report)
    return report


def _besov_ratios(samples, s, p, q, partition_a, partition_b, basis):
    ratios = []
    for sample in samples:
        norm_a = transforms.besov_norm(sample, s, p, q, partition_a, basis)
        norm_b = transforms.besov_norm(sample, s, p, q, partition_b, basis)
        if norm_a == 0 and norm_b == 0:
            continue
        ratios.append(norm_a/norm_b)
    return ratios


def _equivalence_constant(ratios):
    if not ratios:
        return None
    return max(max(ratios), 1.0/min(ratios))


def verify_besov_equivalence(partition_a, partition_b, s, p, q, params,
                             lambda_max=20.0, sample_count=20, seed=0,
                             grid_base=None, refine=True):
    """
    Ratio of the Besov norms of two partitions over random band-limited
    data with eigenvalues up to lambda_max

    The reported sup is the equivalence constant
    C = max(max ratio, 1/min ratio), so that every ratio lies in [1/C, C].
    """
    p = transforms.check_exponent(p, "p")
    q = transforms.check_exponent(q, "q")
    spectral_set = modes_in_window(0.0, lambda_max, params)
    if len(spectral_set) == 0:
        raise InputError("The window [0, " + repr(lambda_max)
                         + "] holds no modes.")
    samples = [transforms.random_coefficients(spectral_set, seed + i)
               for i in range(sample_count)]

    basis = None
    if p != 2.0:
        spectral_set, basis = _sample_window_basis(0.0, lambda_max, params,
                                                   grid_base)

    ratios = _besov_ratios(samples, s, p, q, partition_a, partition_b, basis)
    sup = _equivalence_constant(ratios)
    refined_sup = sup
    if p != 2.0:
        refined_sup = None
        if refine:
            refined_sup = _equivalence_constant(_besov_ratios(
                samples, s, p, q, partition_a, partition_b, basis.refined()))

    extras = {"s": float(s), "p": p, "q": q,
              "min_ratio": min(ratios) if ratios else None,
              "max_ratio": max(ratios) if ratios else None,
              "samples": len(ratios), "lambda_max": float(lambda_max),
              "partitions": [partition_a.to_dict(), partition_b.to_dict()]}
    report = EstimateReport(
        "besov-equivalence", params=params.to_dict(), sup=sup,
        refined_sup=refined_sup, extras=extras,
        rows=[[i, ratio] for i, ratio in enumerate(ratios)],
        row_header=["sample", "ratio"])
    _log_report(report)
    return report


def halfwave_grid(j, grid):
    """The scan grid restricted to the times [2^-j, pi - epsilon]"""
    return grid.with_times(2.0**(-int(j)), math.pi - grid.epsilon)


def _halfwave_chunk(task):
    """Both normalizations of the half-wave block kernel at one time"""
    t, j, table, lo, hi, first, second, u = task
    partition = DyadicPartition(lo, hi)
    block = partition.multiplier(j)
    roots = np.sqrt(table.levels.eigenvalues)
    factors = block(table.levels.eigenvalues)*np.exp(1j*t*roots)
    modulus = np.abs(table.evaluate(np.asarray(factors, dtype=complex),
                                    first, second, u))
    scaled = 2.0**j*t
    return {"proof": modulus*(1.0 + scaled)*2.0**(-3*j),
            "printed": modulus*2.0**(3*j)*math.sqrt(1.0 + scaled*scaled)}


def _halfwave_scan(j, grid, params, partition, mapper):
    table = _block_table(j, params, grid)
    first, second = grid.pairs()
    times = grid.times()
    tasks = [(float(t), int(j), table, partition.lo, partition.hi, first,
              second, grid.cosines()) for t in times]
    results = mapper(_halfwave_chunk, tasks)
    proof = np.stack([result["proof"] for result in results])
    printed = np.stack([result["printed"] for result in results])
    return times, proof, printed, len(table.levels)


def verify_halfwave_decay(j, grid, params, partition=None, mapper=None,
                          refine=True):
    """
    Supremum over (t, x, y) of |psi_j(sqrt H) exp(it sqrt H)(x, y)|
    (1 + 2^j t) 2^(-3j)

    The weight 2^(3j) <2^j t> is reported in extras as printed_sup.
    """
    mapper = mapper or _sequential_map
    partition = partition or DyadicPartition()
    times, proof, printed, level_count = _halfwave_scan(j, grid, params,
                                                        partition, mapper)
    sup = float(np.max(proof))
    index = _location(proof)

    extras = {"j": int(j), "levels": level_count,
              "printed_sup": float(np.max(printed)),
              "partition": partition.to_dict()}
    refined_sup = None
    if refine:
        fine = _halfwave_scan(j, grid.refined(), params, partition, mapper)
        refined_sup = float(np.max(fine[1]))
        extras["printed_refined_sup"] = float(np.max(fine[2]))
        extras["printed_stable"] = is_stable(extras["printed_sup"],
                                             extras["printed_refined_sup"])

    report = EstimateReport(
        "halfwave-decay", params=params.to_dict(), grid=grid.to_dict(),
        sup=sup, argmax=_argmax_description(index, grid, times),
        refined_sup=refined_sup, extras=extras)
    _log_report(report)
    return report


def wave_samples(spectral_set, count, seed=0):
    """
    Wave data pairs (f, g): an eigenmode with g = 0, the same mode as g
    with f = 0, then count random pairs
    """
    unit = SpectralCoefficients(spectral_set)
    unit.values[0] = 1.0
    zero = SpectralCoefficients(spectral_set)
    samples = [(unit, zero), (zero, unit)]
    for i in range(count):
        samples.append((
            transforms.random_coefficients(spectral_set, seed + 2*i),
            transforms.random_coefficients(spectral_set, seed + 2*i + 1)))
    return samples


def _wave_ratios(samples, times, basis, partition):
    """sin t ||cos(t sqrt H) f||_inf / ||f||_B(3/2,1,1) and the g part"""
    cos_ratios = np.full((len(samples), times.size), np.nan)
    sin_ratios = np.full((len(samples), times.size), np.nan)
    for i, (f, g) in enumerate(samples):
        f_norm = transforms.besov_norm(f, 1.5, 1, 1, partition, basis)
        g_norm = transforms.besov_norm(g, 1.0, 1, 1, partition, basis)
        zero = SpectralCoefficients(f.spectral_set)
        for step, t in enumerate(times):
            if f_norm > 0:
                u = transforms.wave_evolve(f, zero, t)
                cos_ratios[i, step] = (math.sin(t)*transforms.lp_norm(
                    u, math.inf, basis)/f_norm)
            if g_norm > 0:
                u = transforms.wave_evolve(zero, g, t)
                sin_ratios[i, step] = (math.sin(t)*transforms.lp_norm(
                    u, math.inf, basis)/g_norm)
    return cos_ratios, sin_ratios


def verify_wave_dispersive(samples, times, basis, partition=None,
                           refine=True):
    """
    sup over t and data of sin t ||cos(t sqrt H) f||_inf / ||f||_B(3/2,1,1)
    and sin t ||sin(t sqrt H)/sqrt H g||_inf / ||g||_B(1,1,1)

    Sup norms are grid maxima of basis, Besov norms use L1 quadrature.
    The reported sup is the larger of the two suprema.
    """
    partition = partition or DyadicPartition()
    times = np.asarray(times, dtype=float)
    if np.any(times <= 0) or np.any(times >= math.pi):
        raise InputError("Wave dispersive times must lie in (0, pi).")

    cos_ratios, sin_ratios = _wave_ratios(samples, times, basis, partition)
    cos_sup = _sup(cos_ratios)
    sin_sup = _sup(sin_ratios)
    candidates = [value for value in (cos_sup, sin_sup) if value is not None]
    sup = max(candidates) if candidates else None

    extras = {"cos_sup": cos_sup, "sin_sup": sin_sup,
              "samples": len(samples), "times": int(times.size),
              "partition": partition.to_dict()}
    refined_sup = None
    if refine:
        fine_times = np.linspace(times[0], times[-1], 2*times.size - 1)
        fine_cos, fine_sin = _wave_ratios(samples, fine_times,
                                          basis.refined(), partition)
        fine = [value for value in (_sup(fine_cos), _sup(fine_sin))
                if value is not None]
        refined_sup = max(fine) if fine else None
        extras["refined_cos_sup"] = _sup(fine_cos)
        extras["refined_sin_sup"] = _sup(fine_sin)

    rows = []
    for i in range(len(samples)):
        for step, t in enumerate(times):
            rows.append([i, float(t), float(cos_ratios[i, step]),
                         float(sin_ratios[i, step])])

    report = EstimateReport(
        "wave-dispersive", params=basis.params.to_dict(),
        grid=basis.grid.to_dict(), sup=sup, refined_sup=refined_sup,
        extras=extras, rows=rows,
        row_header=["sample", "t", "cos_ratio", "sin_ratio"])
    _log_report(report)
    return report


def admissible(q, r):
    """
    Wave admissibility of (q, r): 2 <= q <= inf, 2 <= r < inf,
    1/q + 1/r <= 1/2 and gap index s = 3(1/2 - 1/r) - 1/q in [0, 3/2)

    Returns
    -------
    (bool, s) with s None for inadmissible pairs
    """
    q = float(q)
    r = float(r)
    if not (2.0 <= q <= math.inf and 2.0 <= r < math.inf):
        return False, None
    if 1.0/q + 1.0/r > 0.5 + 1.0e-12:
        return False, None
    s = 3.0*(0.5 - 1.0/r) - 1.0/q
    if not -1.0e-15 <= s < 1.5:
        return False, None
    return True, max(s, 0.0)


def admissible_pairs():
    """A few admissible (q, r) pairs with their gap index"""
    pairs = [(math.inf, 2.0), (4.0, 4.0), (6.0, 3.0), (8.0, 8.0/3.0)]
    return [(q, r, admissible(q, r)[1]) for q, r in pairs]


def composite_gauss(start, end, panels, nodes):
    """Composite Gauss-Legendre rule on [start, end]"""
    base, weights = np.polynomial.legendre.leggauss(int(nodes))
    edges = np.linspace(start, end, int(panels) + 1)
    half = 0.5*(edges[1:] - edges[:-1])
    middle = 0.5*(edges[1:] + edges[:-1])
    points = (middle[:, None] + half[:, None]*base[None, :]).ravel()
    point_weights = (half[:, None]*weights[None, :]).ravel()
    return points, point_weights


def mixed_norm(f, g, q, r, start, end, basis, panels=8, nodes=8):
    """||u||_{L^q_t L^r_x} on [start, end] of the wave solution"""
    times, weights = composite_gauss(start, end, panels, nodes)
    norms = np.array([transforms.lp_norm(transforms.wave_evolve(f, g, t),
                                         r, basis) for t in times])
    if q == math.inf:
        return float(np.max(norms))
    return float(np.sum(weights*norms**q))**(1.0/q)


def verify_strichartz(q, r, data, start, end, basis, panels=8, nodes=8):
    """
    Strichartz quotient ||u||_{L^q_t L^r_x([start, end])} /
    (||f||_H^s + ||g||_H^(s-1)) for every (f, g) in data

    The time rule uses panels x nodes Gauss points and is compared with
    twice as many panels. Data with zero denominator gives a degenerate
    report with sup None.
    """
    ok, s = admissible(q, r)
    if not ok:
        raise InputError("(q, r) = (" + repr(q) + ", " + repr(r)
                         + ") is not wave admissible.")
    if not 0 < start < end < math.pi:
        raise InputError("The Strichartz interval must lie inside (0, pi).")
    q = float(q)
    r = float(r)

    quotients = []
    refined = []
    degenerate = 0
    for f, g in data:
        denominator = (transforms.sobolev_norm(f, s)
                       + transforms.sobolev_norm(g, s - 1.0))
        if denominator == 0:
            degenerate += 1
            continue
        quotients.append(mixed_norm(f, g, q, r, start, end, basis, panels,
                                    nodes)/denominator)
        refined.append(mixed_norm(f, g, q, r, start, end, basis, 2*panels,
                                  nodes)/denominator)

    extras = {"q": q, "r": r, "s": s, "interval": [start, end],
              "time_nodes": int(panels*nodes), "quotients": quotients,
              "refined_quotients": refined, "degenerate": degenerate}
    if not quotients:
        report = EstimateReport("strichartz", params=basis.params.to_dict(),
                                grid=basis.grid.to_dict(), sup=None,
                                refined_sup=None, stable=False,
                                extras=extras)
        logger.warning("strichartz quotient degenerate, all data vanish")
        return report

    changes = [relative_change(a, b) for a, b in zip(quotients, refined)]
    extras["max_relative_change"] = max(changes)
    report = EstimateReport(
        "strichartz", params=basis.params.to_dict(),
        grid=basis.grid.to_dict(), sup=max(quotients),
        refined_sup=max(refined),
        stable=all(change < TIME_DOUBLING_TOLERANCE for change in changes),
        extras=extras,
        rows=[[i, a, b] for i, (a, b) in enumerate(zip(quotients, refined))],
        row_header=["sample", "quotient", "refined_quotient"])
    _log_report(report)
    return report


def _log_report(report):
    logger.info("%s: sup %s, refined %s, change %s", report.estimate_id,
                report.sup, report.refined_sup, report.relative_change)
    if report.refined_sup is not None and not report.stable:
        logger.warning("%s not stable under refinement", report.estimate_id)
