import concurrent.futures
import csv
import json
import logging
import os
import platform
import time

import numpy as np
import scipy
import yaml

import lagdisp
from lagdisp.data.data import EstimateReport
from lagdisp.helper.exceptions import InputError
from lagdisp.helper.formatting import format_row
from lagdisp.helper.formatting import is_legal_filename

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class ManagedScan:
    """
    A class for running one LagDisp command and organizing its output
    in a folder

    ManagedScan is usually created by the command line interface but can
    be used independently. It owns the output folder, distributes
    independent tasks over a process pool and writes CSV and JSON files
    in a deterministic order.

    Attributes
    ----------
    command : str
        Name of the command the output belongs to

    data_folder_name : str
        Folder all files are written to

    workers : int
        Number of worker processes, 1 runs everything in this process

    increment_folder_name : bool
        If True an existing folder is not reused, _0, _1, ... is appended

    outputs : list of str
        Names of the files written so far

    timings : dict
        Wall clock seconds of the timed stages

    Methods
    -------
    prepare_folder()
        Creates the output folder

    map(function, tasks)
        Applies function to every task, results in task order

    write_csv(name, header, rows)
        Writes a CSV file

    write_json(name, data)
        Writes a JSON file

    write_report(report, name)
        Writes an EstimateReport as JSON and its rows as CSV

    write_manifest(...)
        Writes manifest.json

    load_results(foldername)
        Loads the reports of a folder
    """

    def __init__(self, command, **kwargs):
        """
        Parameters
        ----------
        command : str
            Name of the command

        kwargs : keyword arguments
            foldername : str
                Sets data_folder_name, required
            workers : int
                Sets workers
            increment_folder_name : bool
                Sets increment_folder_name
        """
        self.command = command
        self.workers = 1
        self.increment_folder_name = False
        self.outputs = []
        self.timings = {}

        if "foldername" in kwargs:
            self.data_folder_name = kwargs["foldername"]
        else:
            raise NameError(
                "ManagedScan needs foldername to write data, add "
                + "with keyword argument.")

        if "workers" in kwargs:
            workers = kwargs["workers"]
            if int(workers) != workers or workers < 1:
                raise InputError("workers must be a positive integer, got "
                                 + repr(workers))
            self.workers = int(workers)

        if "increment_folder_name" in kwargs:
            self.increment_folder_name = kwargs["increment_folder_name"]

        self._started = time.perf_counter()

    def prepare_folder(self):
        """Creates the output folder, incrementing its name if requested"""
        if self.increment_folder_name and os.path.isdir(self.data_folder_name):
            counter = 0
            new_name = self.data_folder_name + "_" + str(counter)
            while os.path.isdir(new_name):
                counter = counter + 1
                new_name = self.data_folder_name + "_" + str(counter)

            self.data_folder_name = new_name

        os.makedirs(self.data_folder_name, exist_ok=True)
        logger.info("writing output to %s", self.data_folder_name)
        return self.data_folder_name

    def map(self, function, tasks):
        """
        Applies function to every task and returns the results in task
        order. With more than one worker the tasks run in a process pool,
        so function and tasks must be picklable.
        """
        tasks = list(tasks)
        if self.workers == 1 or len(tasks) < 2:
            return [function(task) for task in tasks]

        with concurrent.futures.ProcessPoolExecutor(
                max_workers=self.workers) as executor:
            return list(executor.map(function, tasks))

    def time_stage(self, name, function, *args, **kwargs):
        """Runs function(*args, **kwargs) and records its duration"""
        start = time.perf_counter()
        result = function(*args, **kwargs)
        self.timings[name] = time.perf_counter() - start
        return result

    def output_path(self, name):
        if not is_legal_filename(name):
            raise InputError("Output name \"" + name
                             + "\" is not a legal filename.")
        return os.path.join(self.data_folder_name, name)

    def write_csv(self, name, header, rows):
        path = self.output_path(name)
        with open(path, "w", newline="") as csv_file:
            writer = csv.writer(csv_file)
            writer.writerow(header)
            for row in rows:
                writer.writerow(format_row(row))
        self.outputs.append(name)
        return path

    def write_json(self, name, data):
        path = self.output_path(name)
        with open(path, "w") as json_file:
            json.dump(data, json_file, indent=1, sort_keys=True)
        self.outputs.append(name)
        return path

    def write_report(self, report, name=None):
        """Writes report as <name>.json and, if it has rows, <name>.csv"""
        if name is None:
            name = report.estimate_id
        self.write_json(name + ".json", report.to_dict())
        if report.rows:
            self.write_csv(name + ".csv", report.row_header, report.rows)

    def write_manifest(self, config, config_hash, exit_code, seed=None):
        """
        Writes manifest.json describing the run: command, resolved
        configuration and its hash, package versions, timings, outputs
        and exit code.
        """
        self.timings["total"] = time.perf_counter() - self._started
        manifest = {"command": self.command,
                    "config": config,
                    "config_hash": config_hash,
                    "versions": package_versions(),
                    "timings": self.timings,
                    "seed_environment": seed,
                    "outputs": list(self.outputs),
                    "exit_code": exit_code}
        path = os.path.join(self.data_folder_name, MANIFEST_NAME)
        with open(path, "w") as json_file:
            json.dump(manifest, json_file, indent=1, sort_keys=True)
        return path

    def load_results(self, *args):
        """
        Loads every report JSON of the folder (the manifest excluded) as
        a list of EstimateReport, sorted by filename
        """
        if len(args) == 0:
            data_folder_name = self.data_folder_name
        elif len(args) == 1:
            data_folder_name = args[0]
        else:
            raise InputError("load_results can be called with 0 or 1 "
                             + "arguments")

        return load_report_folder(data_folder_name)


def load_report_folder(data_folder_name):
    if not os.path.isdir(data_folder_name):
        raise NameError("Given data directory does not exist.")

    results = []
    for filename in sorted(os.listdir(data_folder_name)):
        if not filename.endswith(".json") or filename == MANIFEST_NAME:
            continue
        path = os.path.join(data_folder_name, filename)
        with open(path, "r") as json_file:
            content = json.load(json_file)
        if isinstance(content, dict) and "id" in content:
            results.append(EstimateReport.from_dict(content))

    return results


def package_versions():
    return {"lagdisp": lagdisp.__version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pyyaml": yaml.__version__,
            "python": platform.python_version()}
