"""Exception hierarchy.

The CLI maps these onto exit codes: validation 2, computation 3, I/O 4.
"""


class ProxySelError(Exception):
    exit_code = 1


class ValidationError(ProxySelError, ValueError):
    """Malformed input: bad labels, missing cells, bad configuration."""

    exit_code = 2


class DegenerateStatisticError(ProxySelError, ArithmeticError):
    """A statistic is undefined for the given data (zero variance, too few points)."""

    exit_code = 3
