import csv
import json
import math

from lagdisp.helper.formatting import bcolors
from lagdisp.helper.formatting import format_row

# Relative change between a sup and its refined value accepted as stable
STABILITY_TOLERANCE = 0.05


def relative_change(value, refined):
    """
    |refined - value| / max(|refined|, |value|), zero when both vanish
    """
    if value is None or refined is None:
        return math.nan
    scale = max(abs(value), abs(refined))
    if scale == 0:
        return 0.0
    return abs(refined - value)/scale


def is_stable(value, refined, tolerance=STABILITY_TOLERANCE):
    """True if the refined value differs by at most tolerance"""
    change = relative_change(value, refined)
    return bool(change <= tolerance)


class EstimateReport:
    """
    Result of one numerical estimate scan

    Attributes
    ----------
    estimate_id : str
        Name of the estimate, for example "schrodinger-dispersive"

    params : dict
        Operator parameters, {"a": value}

    grid : dict
        Description of the scan grid

    sup : float or None
        Observed supremum of the weighted ratio, None for degenerate
        scans

    argmax : list
        Location of the supremum, [t, x, y] with x and y as
        [r, theta, phi] lists

    refined_sup : float or None
        Supremum on the refined grid

    stable : bool
        True when sup and refined_sup agree within the stability
        tolerance

    truncation : dict
        {"k_max": largest number of series terms, "tail": largest tail}

    extras : dict
        Further diagnostics, for example excluded point counts

    rows : list of lists
        Per point results written by write_csv

    row_header : list of str
        Column names of rows

    Methods
    -------
    to_dict()
        Report as a json compatible dict

    to_json(filename) / from_json(filename)
        JSON round trip

    write_csv(filename)
        Writes rows with row_header

    show()
        Prints a summary to the console
    """

    def __init__(self, estimate_id, **kwargs):
        """
        Parameters
        ----------
        estimate_id : str
            Name of the estimate

        kwargs : keyword arguments
            params, grid, sup, argmax, refined_sup, stable, truncation,
            extras, rows, row_header
        """
        self.estimate_id = estimate_id
        self.params = kwargs.get("params", {})
        self.grid = kwargs.get("grid", {})
        self.sup = kwargs.get("sup", None)
        self.argmax = kwargs.get("argmax", [])
        self.refined_sup = kwargs.get("refined_sup", None)
        self.truncation = kwargs.get("truncation", {"k_max": 0, "tail": 0.0})
        self.extras = kwargs.get("extras", {})
        self.rows = kwargs.get("rows", [])
        self.row_header = kwargs.get("row_header", [])

        if "stable" in kwargs:
            self.stable = bool(kwargs["stable"])
        elif self.sup is not None and self.refined_sup is not None:
            self.stable = is_stable(self.sup, self.refined_sup)
        else:
            self.stable = False

    @property
    def relative_change(self):
        return relative_change(self.sup, self.refined_sup)

    def to_dict(self):
        return {"id": self.estimate_id,
                "params": self.params,
                "grid": self.grid,
                "sup": self.sup,
                "argmax": self.argmax,
                "refined_sup": self.refined_sup,
                "stable": self.stable,
                "truncation": self.truncation,
                "extras": self.extras}

    @classmethod
    def from_dict(cls, dictionary):
        return cls(dictionary["id"],
                   params=dictionary.get("params", {}),
                   grid=dictionary.get("grid", {}),
                   sup=dictionary.get("sup"),
                   argmax=dictionary.get("argmax", []),
                   refined_sup=dictionary.get("refined_sup"),
                   stable=dictionary.get("stable", False),
                   truncation=dictionary.get("truncation", {}),
                   extras=dictionary.get("extras", {}))

    def to_json(self, filename):
        with open(filename, "w") as json_file:
            json.dump(self.to_dict(), json_file, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, filename):
        with open(filename, "r") as json_file:
            return cls.from_dict(json.load(json_file))

    def write_csv(self, filename):
        """Writes the per point rows, numbers in round trip format"""
        with open(filename, "w", newline="") as csv_file:
            writer = csv.writer(csv_file)
            writer.writerow(self.row_header)
            for row in self.rows:
                writer.writerow(format_row(row))

    def show(self, line_length=93):
        """Prints a short summary of the report"""
        if self.stable:
            status = bcolors.OKGREEN + "stable" + bcolors.ENDC
        else:
            status = bcolors.WARNING + "not stable" + bcolors.ENDC

        print(bcolors.BOLD + "Estimate " + self.estimate_id + bcolors.ENDC
              + " " + str(self.params))
        print("  sup         " + str(self.sup))
        print("  refined sup " + str(self.refined_sup) + " (" + status + ")")
        print(("  argmax      " + str(self.argmax))[:line_length])
        print("  truncation  " + str(self.truncation))
        for key in sorted(self.extras):
            print(("  " + key.ljust(12) + str(self.extras[key]))[:line_length])

    def __repr__(self):
        return ("EstimateReport(" + self.estimate_id + ", sup="
                + repr(self.sup) + ", refined_sup=" + repr(self.refined_sup)
                + ", stable=" + str(self.stable) + ")")
