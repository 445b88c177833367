"""Exception types raised by the library.

Every domain error carries a stable ``code`` so the CLI can emit a
structured message without string matching.
"""


class Almost2Error(Exception):
    code = "Almost2Error"


class OddTotalDegree(Almost2Error, ValueError):
    code = "OddTotalDegree"


class InvalidDegree(Almost2Error, ValueError):
    code = "InvalidDegree"


class TooLarge(Almost2Error, ValueError):
    code = "TooLarge"


class NoKernelHalfEdges(Almost2Error, ValueError):
    code = "NoKernelHalfEdges"


class NonPositiveArgument(Almost2Error, ValueError):
    code = "NonPositiveArgument"


class BadInterval(Almost2Error, ValueError):
    code = "BadInterval"


class OutOfRange(Almost2Error, ValueError):
    code = "OutOfRange"


class EmptySample(Almost2Error, ValueError):
    code = "EmptySample"


class ConfigError(Almost2Error, ValueError):
    code = "ConfigError"
