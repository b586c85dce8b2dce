import json
import os
import tempfile
import unittest

import lagdisp
from lagdisp.data.data import EstimateReport
from lagdisp.helper.exceptions import InputError
from lagdisp.helper.managed_scan import MANIFEST_NAME
from lagdisp.helper.managed_scan import ManagedScan
from lagdisp.helper.managed_scan import load_report_folder
from lagdisp.helper.managed_scan import package_versions


def square(value):
    return value*value


def setup_scan(folder, **kwargs):
    """ManagedScan writing into folder/output"""
    return ManagedScan("verify", foldername=os.path.join(folder, "output"),
                       **kwargs)


class TestManagedScan(unittest.TestCase):
    """
    Tests for ManagedScan, the class owning an output folder
    """

    def test_foldername_required(self):
        with self.assertRaises(NameError):
            ManagedScan("verify")

    def test_workers(self):
        with tempfile.TemporaryDirectory() as folder:
            self.assertEqual(setup_scan(folder).workers, 1)
            self.assertEqual(setup_scan(folder, workers=3).workers, 3)
            with self.assertRaises(InputError):
                setup_scan(folder, workers=0)
            with self.assertRaises(InputError):
                setup_scan(folder, workers=1.5)

    def test_prepare_folder(self):
        with tempfile.TemporaryDirectory() as folder:
            scan = setup_scan(folder)
            path = scan.prepare_folder()

            self.assertTrue(os.path.isdir(path))
            self.assertEqual(path, os.path.join(folder, "output"))

    def test_increment_folder_name(self):
        """
        Existing folders are kept and _0, _1 are appended
        """
        with tempfile.TemporaryDirectory() as folder:
            os.makedirs(os.path.join(folder, "output"))
            os.makedirs(os.path.join(folder, "output_0"))

            scan = setup_scan(folder, increment_folder_name=True)
            path = scan.prepare_folder()

            self.assertEqual(path, os.path.join(folder, "output_1"))

    def test_reuse_folder(self):
        with tempfile.TemporaryDirectory() as folder:
            os.makedirs(os.path.join(folder, "output"))

            path = setup_scan(folder).prepare_folder()

            self.assertEqual(path, os.path.join(folder, "output"))

    def test_map_in_order(self):
        with tempfile.TemporaryDirectory() as folder:
            serial = setup_scan(folder).map(square, range(6))
            parallel = setup_scan(folder, workers=2).map(square, range(6))

        self.assertEqual(serial, [0, 1, 4, 9, 16, 25])
        self.assertEqual(parallel, serial)

    def test_time_stage(self):
        with tempfile.TemporaryDirectory() as folder:
            scan = setup_scan(folder)
            result = scan.time_stage("square", square, 3)

        self.assertEqual(result, 9)
        self.assertGreaterEqual(scan.timings["square"], 0.0)

    def test_illegal_output_name(self):
        with tempfile.TemporaryDirectory() as folder:
            scan = setup_scan(folder)
            scan.prepare_folder()
            with self.assertRaises(InputError):
                scan.write_json("../escape.json", {})

    def test_write_report(self):
        """
        A report with rows gives a JSON and a CSV file
        """
        report = EstimateReport("heat-gaussian", sup=0.1, refined_sup=0.1,
                                rows=[[1.0, 2.0]], row_header=["t", "ratio"])
        with tempfile.TemporaryDirectory() as folder:
            scan = setup_scan(folder)
            scan.prepare_folder()
            scan.write_report(report)
            scan.write_report(EstimateReport("bernstein"), "empty")
            files = sorted(os.listdir(scan.data_folder_name))

        self.assertEqual(files, ["empty.json", "heat-gaussian.csv",
                                 "heat-gaussian.json"])
        self.assertEqual(scan.outputs, ["heat-gaussian.json",
                                        "heat-gaussian.csv", "empty.json"])

    def test_manifest(self):
        with tempfile.TemporaryDirectory() as folder:
            scan = setup_scan(folder)
            scan.prepare_folder()
            scan.write_csv("values.csv", ["x"], [[1.0]])
            path = scan.write_manifest({"operator": {"a": 1.0}}, "abc", 0,
                                       seed="7")
            with open(path, "r") as json_file:
                manifest = json.load(json_file)

        self.assertEqual(os.path.basename(path), MANIFEST_NAME)
        self.assertEqual(manifest["command"], "verify")
        self.assertEqual(manifest["config_hash"], "abc")
        self.assertEqual(manifest["exit_code"], 0)
        self.assertEqual(manifest["seed_environment"], "7")
        self.assertEqual(manifest["outputs"], ["values.csv"])
        self.assertIn("total", manifest["timings"])
        self.assertEqual(manifest["versions"]["lagdisp"],
                         lagdisp.__version__)

    def test_load_results(self):
        """
        Reports are loaded sorted by filename, the manifest is skipped
        """
        with tempfile.TemporaryDirectory() as folder:
            scan = setup_scan(folder)
            scan.prepare_folder()
            scan.write_report(EstimateReport("bernstein", sup=2.0), "b")
            scan.write_report(EstimateReport("heat-gaussian", sup=1.0), "a")
            scan.write_json("other.json", [1, 2])
            scan.write_manifest({}, "abc", 0)

            reports = scan.load_results()
            same = load_report_folder(scan.data_folder_name)

        self.assertEqual([report.estimate_id for report in reports],
                         ["heat-gaussian", "bernstein"])
        self.assertEqual([report.sup for report in same], [1.0, 2.0])

    def test_load_results_arguments(self):
        with tempfile.TemporaryDirectory() as folder:
            scan = setup_scan(folder)
            with self.assertRaises(NameError):
                scan.load_results(os.path.join(folder, "missing"))
            with self.assertRaises(InputError):
                scan.load_results(folder, folder)

    def test_package_versions(self):
        versions = package_versions()

        self.assertEqual(sorted(versions), ["lagdisp", "numpy", "python",
                                            "pyyaml", "scipy"])


if __name__ == '__main__':
    unittest.main()
