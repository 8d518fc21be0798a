"""Exception hierarchy shared by every module."""


class MppcError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(MppcError):
    pass


class ValidationError(MppcError):
    pass


class StructuralError(MppcError):
    """A solution refers to sites that do not exist."""


class MetricError(MppcError):
    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class IncompleteCacheError(MetricError):
    def __init__(self, pair):
        super().__init__(f"no distance for pair {pair[0]}-{pair[1]} and no path through cached entries")
        self.pair = pair


class ItemTooLargeError(MppcError):
    def __init__(self, index, size, capacity):
        super().__init__(f"item {index} of size {size} exceeds bin capacity {capacity}")
        self.index = index


class SizeLimitError(MppcError):
    pass


class ParameterError(MppcError):
    pass


class InfeasibleSolutionError(MppcError):
    def __init__(self, violations):
        super().__init__("solution is infeasible: " + "; ".join(str(v) for v in violations))
        self.violations = violations
