"""
Command line front end of LagDisp

    lagdisp [--config PATH] [--out DIR] [--workers N] [--refine [FACTOR]]
            [--a A] [--verbose | --quiet] COMMAND

Commands are eval-kernel, scan-k, spectrum, verify ESTIMATE_ID and
strichartz. Every run that gets as far as creating its output folder
writes manifest.json. Exit codes: 0 success, 1 truncation or internal
failure, 2 invalid input.
"""
import argparse
import logging
import os
import sys

import numpy as np

from lagdisp.data.data import is_stable
from lagdisp.helper.exceptions import InputError
from lagdisp.helper.exceptions import TruncationError
from lagdisp.helper.geometry import PolarPoints
from lagdisp.helper.managed_scan import ManagedScan
from lagdisp.interface import kernels
from lagdisp.interface import verify
from lagdisp.interface.functions import RunConfig
from lagdisp.interface.spectral import modes_in_window
from lagdisp.interface.transforms import QuadratureGrid
from lagdisp.interface.transforms import SpectralBasis
from lagdisp.interface.transforms import random_coefficients

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2

SEED_VARIABLE = "LD_VERIFY_SEED"

KERNEL_HEADER = ["t", "r1", "r2", "u", "re", "im", "k_used", "tail",
                 "reference_re", "reference_im"]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lagdisp",
        description="Spectral numerics for -Laplace + a/|x|^2 + |x|^2/4 "
                    + "in three dimensions.")
    parser.add_argument("--config", help="JSON or YAML file with settings")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--workers", type=int, help="worker processes")
    parser.add_argument("--refine", type=int, nargs="?", const=2,
                        help="refinement factor of the scans")
    parser.add_argument("--a", type=float, help="inverse square coupling")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true")
    verbosity.add_argument("--quiet", action="store_true")

    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("eval-kernel", help="kernel values on the scan grid")
    commands.add_parser("scan-k", help="sup scan of the K function")
    commands.add_parser("spectrum", help="eigenvalues below lambda_max")
    verify_parser = commands.add_parser("verify", help="run one estimate")
    verify_parser.add_argument("estimate_id",
                               help=", ".join(verify.ESTIMATE_IDS))
    commands.add_parser("strichartz", help="Strichartz quotient")
    return parser


def _expand_refine(argv):
    """
    Writes a bare --refine as --refine=2 so that the next token is not
    taken as its value
    """
    expanded = []
    for position, token in enumerate(argv):
        following = argv[position + 1] if position + 1 < len(argv) else ""
        if token == "--refine" and not following.isdigit():
            token = "--refine=2"
        expanded.append(token)
    return expanded


def configure_logging(arguments):
    level = logging.INFO
    if arguments.verbose:
        level = logging.DEBUG
    elif arguments.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format="[%(module)-12s] %(message)s")
    logging.getLogger("lagdisp").setLevel(level)


def _overrides(arguments):
    overrides = {}
    if arguments.out is not None:
        overrides["output"] = {"directory": arguments.out}
    if arguments.workers is not None:
        overrides["workers"] = arguments.workers
    if arguments.refine is not None:
        overrides["scan"] = {"refine_factor": arguments.refine}
    if arguments.a is not None:
        overrides["operator"] = {"a": arguments.a}
    return overrides


def _show(report, config, arguments):
    if not arguments.quiet:
        report.show(line_length=config["other"]["characters_per_line"])


def _exit_code(report, require_stable=False):
    """
    Failure when kernel series hit the truncation cap, when the report is
    degenerate and, with require_stable, when refinement moved the result
    """
    if report.extras.get("truncated_points", 0):
        logger.warning("%d point(s) exceeded the truncation cap",
                       report.extras["truncated_points"])
        return EXIT_FAILURE
    if report.sup is None:
        logger.warning("%s report is degenerate", report.estimate_id)
        return EXIT_FAILURE
    if require_stable and not report.stable:
        logger.warning("%s not stable under refinement", report.estimate_id)
        return EXIT_FAILURE
    return EXIT_SUCCESS


def _kernel_points(grid):
    first, second = grid.pairs()
    gamma = grid.angles()
    r1 = np.repeat(grid.radii[first], gamma.size)
    r2 = np.repeat(grid.radii[second], gamma.size)
    gamma = np.tile(gamma, first.size)
    return PolarPoints(r1), PolarPoints(r2, 0.0, gamma)


def cmd_eval_kernel(config, scan, arguments):
    """Kernel values and the a = 0 closed form on the scan grid"""
    kind = config["kernel"]["kind"]
    times = config["kernel"]["times"]
    if len(times) == 0:
        raise InputError("kernel.times is empty, there is nothing to "
                         + "evaluate.")
    grid = config.scan_grid()
    params = config.params()
    policy = config.policy()
    x, y = _kernel_points(grid)
    u = x.cos_angle(y)

    if kind == "schrodinger":
        for t in times:
            kernels.check_schrodinger_time(t, grid.epsilon)

    rows = []
    truncated = 0
    for t in times:
        if kind == "schrodinger":
            value = kernels.schrodinger_kernel(t, x, y, params, policy,
                                               grid.epsilon)
            reference = kernels.mehler_schrodinger(t, x, y)
        else:
            value = kernels.heat_kernel(t, x, y, params, policy)
            reference = kernels.mehler_heat(t, x, y)
        truncated += int(np.sum(value.truncated))
        values = np.asarray(value.value, dtype=complex)
        reference = np.asarray(reference, dtype=complex)
        k_used = np.broadcast_to(value.k_used, values.shape)
        tail = np.broadcast_to(value.tail_bound, values.shape)
        for i in range(values.size):
            rows.append([float(t), float(x.r[i]), float(y.r[i]),
                         float(u[i]), values[i].real, values[i].imag,
                         int(k_used[i]), float(tail[i]),
                         reference[i].real, reference[i].imag])

    scan.write_csv(kind + "_kernel.csv", KERNEL_HEADER, rows)
    logger.info("%s kernel at %d point(s)", kind, len(rows))
    if truncated:
        logger.warning("%d kernel value(s) exceeded the truncation cap",
                       truncated)
        return EXIT_FAILURE
    return EXIT_SUCCESS


def _k_function_reports(config):
    k_scan = config["k_scan"]
    factor = config["scan"]["refine_factor"]
    params = config.params()
    policy = config.policy()
    coarse = verify.verify_k_function(k_scan["rho_max"], k_scan["rho_count"],
                                      k_scan["u_count"], params, policy,
                                      refine_factor=factor, refine=False)
    fine = verify.verify_k_function(
        k_scan["rho_max"], (k_scan["rho_count"] - 1)*factor + 1,
        (k_scan["u_count"] - 1)*factor + 1, params, policy,
        refine_factor=factor, refine=False)

    coarse.refined_sup = fine.sup
    coarse.stable = is_stable(coarse.sup, fine.sup)
    coarse.truncation = {
        "k_max": max(coarse.truncation["k_max"], fine.truncation["k_max"]),
        "tail": max(coarse.truncation["tail"], fine.truncation["tail"])}
    coarse.extras["truncated_points"] += fine.extras["truncated_points"]
    return coarse, fine


def cmd_scan_k(config, scan, arguments):
    """K function on the rho x u grid and on its refinement"""
    coarse, fine = _k_function_reports(config)
    scan.write_report(coarse, "k-function")
    scan.write_csv("k-function_refined.csv", fine.row_header, fine.rows)
    _show(coarse, config, arguments)
    return _exit_code(coarse)


def cmd_spectrum(config, scan, arguments):
    """Modes with eigenvalue up to spectrum.lambda_max"""
    lambda_max = config["spectrum"]["lambda_max"]
    spectral_set = modes_in_window(0.0, lambda_max, config.params())
    scan.write_json("spectrum.json", spectral_set.to_dict())
    scan.write_csv("spectrum.csv", ["m", "k", "n", "lambda"],
                   [[mode.m, mode.k, mode.n, float(value)]
                    for mode, value in zip(spectral_set.modes,
                                           spectral_set.eigenvalues)])
    if not arguments.quiet:
        spectral_set.show(config["other"]["characters_per_line"])
    return EXIT_SUCCESS


def _basis(lambda_max, config):
    spectral_set = modes_in_window(0.0, lambda_max, config.params())
    if len(spectral_set) == 0:
        raise InputError("No modes with eigenvalue up to "
                         + repr(lambda_max))
    grid = QuadratureGrid.for_spectral_set(spectral_set,
                                           **config.quadrature_base())
    return spectral_set, SpectralBasis(grid, spectral_set)


def run_estimate(estimate_id, config, mapper=None):
    """Runs the estimate with the given id using the settings of config"""
    params = config.params()
    policy = config.policy()
    grid = config.scan_grid()
    estimate = config["estimate"]
    partition = config.partition()

    if estimate_id == "schrodinger-dispersive":
        return verify.verify_schrodinger_dispersive(grid, params, policy,
                                                    mapper)
    if estimate_id == "heat-gaussian":
        heat_grid = grid.with_times(estimate["heat_t_min"],
                                    estimate["heat_t_max"])
        return verify.verify_heat_gaussian(heat_grid, params, policy, mapper)
    if estimate_id == "multiplier-decay":
        return verify.verify_multiplier_decay(estimate["j"],
                                              estimate["order"], grid,
                                              params, partition)
    if estimate_id == "bernstein":
        return verify.verify_bernstein(
            estimate["j"], estimate["p"], estimate["q"], estimate["s"],
            params, grid, partition, estimate["sample_count"],
            estimate["seed"], config.quadrature_base())
    if estimate_id == "block-interaction":
        return verify.verify_block_interaction(
            estimate["j"], estimate["k"], estimate["p"], estimate["m"],
            params, partition, config.alt_partition(),
            estimate["sample_count"], estimate["seed"],
            config.quadrature_base())
    if estimate_id == "besov-equivalence":
        return verify.verify_besov_equivalence(
            partition, config.alt_partition(), estimate["besov_s"],
            estimate["besov_p"], estimate["besov_q"], params,
            estimate["sample_lambda_max"], estimate["sample_count"],
            estimate["seed"], config.quadrature_base())
    if estimate_id == "halfwave-decay":
        return verify.verify_halfwave_decay(
            estimate["j"], verify.halfwave_grid(estimate["j"], grid),
            params, partition, mapper)
    if estimate_id == "wave-dispersive":
        spectral_set, basis = _basis(estimate["sample_lambda_max"], config)
        samples = verify.wave_samples(spectral_set,
                                      estimate["sample_count"],
                                      estimate["seed"])
        times = np.linspace(grid.t_min, grid.t_max, estimate["wave_t_count"])
        return verify.verify_wave_dispersive(samples, times, basis,
                                             partition)
    if estimate_id == "k-function":
        return _k_function_reports(config)[0]

    raise InputError("Unknown estimate id \"" + estimate_id
                     + "\", choose one of " + ", ".join(verify.ESTIMATE_IDS))


def cmd_verify(config, scan, arguments):
    """Runs one estimate and writes its report"""
    report = scan.time_stage(arguments.estimate_id, run_estimate,
                             arguments.estimate_id, config, scan.map)
    scan.write_report(report)
    _show(report, config, arguments)
    return _exit_code(report)


def cmd_strichartz(config, scan, arguments):
    """Strichartz quotient for random band-limited data"""
    settings = config["strichartz"]
    spectral_set, basis = _basis(settings["lambda_max"], config)
    seed = settings["seed"]
    data = [(random_coefficients(spectral_set, seed + 2*i),
             random_coefficients(spectral_set, seed + 2*i + 1))
            for i in range(settings["sample_count"])]
    report = scan.time_stage(
        "strichartz", verify.verify_strichartz, settings["q"],
        settings["r"], data, settings["t_start"], settings["t_end"], basis,
        settings["panels"], settings["nodes"])
    scan.write_report(report)
    _show(report, config, arguments)
    return _exit_code(report, require_stable=True)


COMMANDS = {"eval-kernel": cmd_eval_kernel,
            "scan-k": cmd_scan_k,
            "spectrum": cmd_spectrum,
            "verify": cmd_verify,
            "strichartz": cmd_strichartz}


def main(argv=None):
    """Runs the command line interface and returns the exit code"""
    parser = build_parser()
    try:
        arguments = parser.parse_args(_expand_refine(
            sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as exit_request:
        return exit_request.code or EXIT_SUCCESS

    configure_logging(arguments)
    seed = os.environ.get(SEED_VARIABLE)
    if seed is not None:
        logger.info("%s=%s is ignored, all computations are "
                    "deterministic", SEED_VARIABLE, seed)

    config = None
    scan = None
    try:
        config = RunConfig(arguments.config, overrides=_overrides(arguments))
        output = config["output"]
        scan = ManagedScan(arguments.command,
                           foldername=output["directory"],
                           workers=config["workers"],
                           increment_folder_name=output[
                               "increment_folder_name"])
        scan.prepare_folder()
        exit_code = COMMANDS[arguments.command](config, scan, arguments)
    except InputError as error:
        logger.error("invalid input: %s", error)
        exit_code = EXIT_INPUT
    except TruncationError as error:
        logger.error("truncation failure: %s", error)
        exit_code = EXIT_FAILURE
    except Exception:
        logger.exception("internal failure")
        exit_code = EXIT_FAILURE

    if scan is not None and os.path.isdir(scan.data_folder_name):
        scan.write_manifest(config.resolved(), config.config_hash(),
                            exit_code, seed)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
