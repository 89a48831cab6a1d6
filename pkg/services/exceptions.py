"""
Error types shared by the fanforge services.
Every error carries the process exit code the CLI reports for it.
"""


class FanforgeError(Exception):
    """Base class for all fanforge errors"""

    exit_code = 2

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InputError(FanforgeError, ValueError):
    """Malformed input: unknown labels, bad files, unsupported fields"""


class HypothesisError(InputError):
    """The hypotheses of the case-check theorem do not hold for the input"""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class StructuralError(FanforgeError):
    """The input is well-formed but has the wrong structure for the operation"""


class ResourceAbort(FanforgeError):
    """A configured search ceiling was reached before the search finished"""

    exit_code = 3
