"""Exception taxonomy shared by every module.

InputError covers malformed arguments and unparseable files (CLI exit 2);
ContractError covers violated mathematical guarantees discovered at run
time (CLI exit 1).
"""


class InputError(ValueError):
    """Bad user input: dimension mismatch, out-of-range parameter, parse failure."""


class ContractError(RuntimeError):
    """A stated postcondition or invariant failed."""


class UnsupportedMeasureError(InputError):
    """Measure evaluation requested for a shape/measure pair with no evaluator."""


class CoverConstructionError(ContractError):
    """Exhaustion could not reach the requested residual; names the offending tag."""

    def __init__(self, message: str, tag=None):
        super().__init__(message)
        self.tag = tag
