"""Exception hierarchy.

Each error maps to a CLI exit code through ``exit_code``.
"""


class PartMaxEntError(Exception):
    exit_code = 1


class InvalidInput(PartMaxEntError, ValueError):
    exit_code = 3


class ZeroEntry(InvalidInput):
    """A scaled profile entry rounds down to zero."""


class DomainViolation(PartMaxEntError, ValueError):
    """The polynomial sum_j beta_j x^j is not positive where required."""

    exit_code = 3


class NoConvergence(PartMaxEntError):
    """A Newton solve stopped without meeting its tolerance.

    ``best`` holds the best iterate seen (a SolveReport or DiscreteDual).
    """

    exit_code = 2

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class QuadratureFailure(PartMaxEntError):
    pass


class TailBoundFailure(PartMaxEntError):
    pass


class SingularSigma(PartMaxEntError):
    pass


class DegreeCapExceeded(InvalidInput):
    pass


class BoxCapExceeded(InvalidInput):
    pass


class MemoryCapExceeded(PartMaxEntError):
    def __init__(self, message, states=None):
        super().__init__(message)
        self.states = states


class CapExceeded(PartMaxEntError):
    pass


class MaxTriesExceeded(PartMaxEntError):
    def __init__(self, message, tries=None):
        super().__init__(message)
        self.tries = tries


class WindowUncovered(InvalidInput):
    pass
