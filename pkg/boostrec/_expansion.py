import re
from typing import Any, Mapping, Optional, Text

from dotenv.variables import parse_variables


def expand_posix_vars(obj: Any, variables: Mapping[Text, Optional[Any]]) -> Any:
    """Recursively expands POSIX-style variables in a loaded config object.

    Args:
        obj (any): dict, list or scalar loaded from a config file
        variables (dict): maps variable names to their values
    """
    if isinstance(obj, dict):
        return {key: expand_posix_vars(val, variables) for key, val in obj.items()}
    if isinstance(obj, list):
        return [expand_posix_vars(i, variables) for i in obj]
    if isinstance(obj, str) and "$" in obj:
        atoms = parse_variables(obj)
        return _str_to_python_value("".join(str(atom.resolve(variables)) for atom in atoms))
    return obj


INT_REGEX = re.compile(r"^[-+]?[0-9]+$")
FLOAT_REGEX = re.compile(r"^[-+]?([0-9]+\.[0-9]*|\.[0-9]+)([eE][-+]?[0-9]+)?$")


def _str_to_python_value(val: str) -> Any:
    # only applied to strings that went through expansion, so that a
    # numeric radius given through the environment arrives as a number
    if val in ("true", "True", "on"):
        return True
    if val in ("false", "False", "off"):
        return False
    if INT_REGEX.match(val):
        return int(val)
    if FLOAT_REGEX.match(val):
        return float(val)
    return val
