import math


class bcolors:
    """
    Helper class that contains formatting classes and functions
    """
    HEADER = '\033[95m'
    OKBLUE = '\033[94m'
    OKGREEN = '\033[92m'
    WARNING = '\033[93m'
    FAIL = '\033[91m'
    ENDC = '\033[0m'
    BOLD = '\033[1m'
    UNDERLINE = '\033[4m'


def is_legal_filename(name):
    """
    Function that returns true if the given name can be used as a
    filename inside an output folder
    """

    if name == "":
        return False

    if " " in name:
        return False

    if "/" in name:
        return False

    if "\\" in name:
        return False

    return True


def format_number(value):
    """
    Shortest round-trip decimal text of a number, independent of locale

    Integers and bools are written as integers, None as an empty field
    and non-finite floats as nan, inf or -inf.
    """
    if value is None:
        return ""

    if isinstance(value, bool):
        return str(int(value))

    if isinstance(value, int):
        return str(value)

    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"

    return repr(value)


def format_row(values):
    """Formats a sequence of numbers (or strings) as CSV fields"""
    fields = []
    for value in values:
        if isinstance(value, str):
            fields.append(value)
        elif hasattr(value, "item"):
            fields.append(format_number(value.item()))
        else:
            fields.append(format_number(value))
    return fields
