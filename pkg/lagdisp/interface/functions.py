import copy
import hashlib
import json
import logging
import os

import yaml

from lagdisp.data.data import EstimateReport
from lagdisp.helper.exceptions import InputError
from lagdisp.helper.managed_scan import load_report_folder
from lagdisp.interface.kernels import TruncationPolicy
from lagdisp.interface.spectral import OperatorParams
from lagdisp.interface.transforms import DyadicPartition
from lagdisp.interface.verify import ScanGrid

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = {
    "operator": {"a": 1.0},
    "truncation": {"k_max_cap": 200, "tail_tol": 1.0e-10, "hard_cap": 6000,
                   "split": True},
    "quadrature": {"n_r": 160, "radius": 12.0, "n_mu": 24},
    "partition": {"lo": 1.0, "hi": 2.0},
    "alt_partition": {"lo": 1.2, "hi": 1.8},
    "scan": {"t_min": 0.001, "t_max": None, "t_count": 48, "epsilon": 0.001,
             "radii": [0.25, 0.5, 1.0, 1.5, 2.0, 3.0], "angle_count": 13,
             "refine_factor": 2},
    "kernel": {"kind": "schrodinger", "times": [0.5, 1.0, 2.0]},
    "k_scan": {"rho_max": 40.0, "rho_count": 400, "u_count": 81},
    "spectrum": {"lambda_max": 12.0},
    "estimate": {"j": 1, "k": 2, "order": 2, "p": 1.0, "q": float("inf"),
                 "s": 0.0, "m": 1.0, "besov_s": 0.5, "besov_p": 2.0,
                 "besov_q": 2.0, "sample_count": 8,
                 "sample_lambda_max": 20.0, "seed": 0, "heat_t_min": 0.05,
                 "heat_t_max": 5.0, "wave_t_count": 16},
    "strichartz": {"q": 4.0, "r": 4.0, "t_start": 0.1, "t_end": 3.0,
                   "panels": 8, "nodes": 8, "sample_count": 4,
                   "lambda_max": 12.0, "seed": 0},
    "output": {"directory": "lagdisp_output", "increment_folder_name": True},
    "workers": 1,
    "other": {"characters_per_line": 93},
}


def report_search(estimate_id, reports):
    """
    report_search returns the EstimateReport with the given id from a
    list of reports. If several reports share the id a list is returned.

    Parameters
    ----------
    estimate_id : str
        Id of the estimate, for example "heat-gaussian"

    reports : list of EstimateReport
        Reports to search, for example from load_reports
    """
    if type(reports) is not list:
        raise InputError(
            "report_search needs a list of EstimateReport as input")

    if len(reports) > 0 and not isinstance(reports[0], EstimateReport):
        raise InputError(
            "report_search needs objects of type EstimateReport as input.")

    list_result = [report for report in reports
                   if report.estimate_id == estimate_id]

    if len(list_result) == 0:
        raise NameError("No report with id: \"" + estimate_id + "\" found.")

    if len(list_result) == 1:
        return list_result[0]
    return list_result


def load_reports(foldername):
    """
    Loads the reports written by a lagdisp run

    Parameters
    ----------
    foldername : str
        Output folder of the run
    """
    return load_report_folder(foldername)


class Configurator:
    """
    Class for setting the configuration file for LagDisp, which holds
    the defaults of every command line run.

    Attributes
    ----------
    configuration_file_name : str
        absolute path of configuration file

    Methods
    -------
    set_default(section, key, value)
        sets a default value

    set_workers(int)
        sets the default number of worker processes

    set_output_directory(string)
        sets the default output directory

    set_line_length(int)
        sets maximum line length to given int

    read()
        returns the configuration as a dict

    _write_yaml(dict)
        internal method, writes a configuration yaml file with dict content

    _read_yaml()
        internal method, reads a configuration yaml file and returns a dict

    _create_new_config_file()
        internal method, creates default configuration file
    """

    def __init__(self, *args):
        """
        Checks that the configuration file exists and writes the default
        configuration file if it does not.

        Parameters
        ----------
        (optional) custom name : str
            Custom name for configuration file for testing purposes
        """
        if len(args) == 1:
            name = args[0]
        else:
            name = "configuration"

        THIS_DIR = os.path.dirname(os.path.abspath(__file__))
        self.configuration_file_name = THIS_DIR + "/../" + name + ".yaml"
        if not os.path.isfile(self.configuration_file_name):
            self._create_new_config_file()

    def _write_yaml(self, dictionary):
        with open(self.configuration_file_name, 'w') as yaml_file:
            yaml.dump(dictionary, yaml_file, default_flow_style=False)

    def _read_yaml(self):
        with open(self.configuration_file_name, 'r') as yaml_file:
            return yaml.safe_load(yaml_file)

    def _create_new_config_file(self):
        """Writes the default configuration to the package directory"""
        self._write_yaml(copy.deepcopy(DEFAULT_CONFIG))

    def read(self):
        return self._read_yaml()

    def set_default(self, section, key, value):
        """
        Sets a default value

        Parameters
        ----------
        section : str
            Section of the configuration, for example "scan"

        key : str
            Key within the section

        value
            New default, checked by the same rules as user configuration
        """
        config = self._read_yaml()
        if section not in config or not isinstance(config[section], dict):
            raise InputError("Unknown configuration section \"" + section
                             + "\"")
        if key not in config[section]:
            raise InputError("Unknown configuration key \"" + section + "."
                             + key + "\"")
        _check_value(DEFAULT_CONFIG[section][key], value, section + "." + key)

        config[section][key] = value
        self._write_yaml(config)

    def set_workers(self, workers):
        if int(workers) != workers or workers < 1:
            raise InputError("workers must be a positive integer.")
        config = self._read_yaml()
        config["workers"] = int(workers)
        self._write_yaml(config)

    def set_output_directory(self, directory):
        config = self._read_yaml()
        config["output"]["directory"] = str(directory)
        self._write_yaml(config)

    def set_line_length(self, line_length):
        """
        Sets maximum line length for printed summaries

        Parameters
        ----------
        line_length : int
            maximum line length for output
        """
        config = self._read_yaml()
        config["other"]["characters_per_line"] = int(line_length)
        self._write_yaml(config)


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_value(default, value, path):
    """Type check of one value against its default"""
    if path == "scan.t_max":
        valid = value is None or _is_number(value)
    elif isinstance(default, bool):
        valid = isinstance(value, bool)
    elif _is_number(default):
        valid = _is_number(value)
    elif isinstance(default, list):
        valid = (isinstance(value, list)
                 and all(_is_number(entry) for entry in value))
    else:
        valid = isinstance(value, type(default))
    if not valid:
        raise InputError("Configuration value " + path + " has the wrong "
                         + "type: " + repr(value))


def _merge(defaults, overrides, path=""):
    """Recursive merge of overrides into a copy of defaults"""
    merged = copy.deepcopy(defaults)
    for key, value in overrides.items():
        name = path + str(key)
        if key not in defaults:
            raise InputError("Unknown configuration key \"" + name + "\"")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise InputError("Configuration section \"" + name
                                 + "\" must be a mapping.")
            merged[key] = _merge(defaults[key], value, name + ".")
        else:
            _check_value(defaults[key], value, name)
            merged[key] = value
    return merged


class RunConfig:
    """
    Resolved configuration of one run

    The defaults come from the Configurator file, a user file in JSON or
    YAML is merged on top and command line flags on top of that. Unknown
    keys raise InputError.

    Methods
    -------
    resolved()
        Resolved configuration as a dict

    config_hash()
        sha256 of the canonical JSON of the resolved configuration

    params(), policy(), scan_grid(), partition(), alt_partition(),
    quadrature_base()
        Typed views of the sections
    """

    def __init__(self, filename=None, overrides=None, defaults=None):
        """
        Parameters
        ----------
        filename : str, optional
            JSON or YAML file with user settings

        overrides : dict, optional
            Settings applied last, usually from command line flags

        defaults : dict, optional
            Base configuration, read from the Configurator if not given
        """
        if defaults is None:
            defaults = Configurator().read()
        self._config = _merge(DEFAULT_CONFIG, defaults)

        if filename is not None:
            self._config = _merge(self._config, _read_user_file(filename))
        if overrides:
            self._config = _merge(self._config, overrides)

        self._validate()
        logger.debug("resolved configuration %s", self.config_hash())

    def _validate(self):
        self.params()
        self.policy()
        self.scan_grid()
        self.partition()
        self.alt_partition()
        workers = self._config["workers"]
        if int(workers) != workers or workers < 1:
            raise InputError("workers must be a positive integer.")
        if self._config["kernel"]["kind"] not in ("schrodinger", "heat"):
            raise InputError("kernel.kind must be \"schrodinger\" or "
                             + "\"heat\".")

    def __getitem__(self, section):
        return self._config[section]

    def resolved(self):
        return copy.deepcopy(self._config)

    def config_hash(self):
        canonical = json.dumps(self._config, sort_keys=True,
                               separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def params(self):
        return OperatorParams(self._config["operator"]["a"])

    def policy(self):
        return TruncationPolicy(**self._config["truncation"])

    def scan_grid(self):
        return ScanGrid(**self._config["scan"])

    def partition(self):
        return DyadicPartition(**self._config["partition"])

    def alt_partition(self):
        return DyadicPartition(**self._config["alt_partition"])

    def quadrature_base(self):
        """Least grid parameters handed to QuadratureGrid.for_spectral_set"""
        return dict(self._config["quadrature"])


def _read_user_file(filename):
    if not os.path.isfile(filename):
        raise InputError("Configuration file \"" + filename
                         + "\" does not exist.")
    with open(filename, "r") as config_file:
        try:
            if filename.endswith(".json"):
                content = json.load(config_file)
            else:
                content = yaml.safe_load(config_file)
        except (ValueError, yaml.YAMLError) as error:
            raise InputError("Could not parse configuration file \""
                             + filename + "\": " + str(error))
    if content is None:
        return {}
    if not isinstance(content, dict):
        raise InputError("Configuration file \"" + filename
                         + "\" must hold a mapping.")
    return content
