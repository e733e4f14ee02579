"""Exception hierarchy. Input problems map to CLI exit code 2, numeric ones to 3."""


class GgmError(Exception):
    pass


class InputError(GgmError, ValueError):
    """Bad user input: parameters, data shape, unparseable files."""


class DomainError(InputError):
    pass


class ParameterError(InputError):
    pass


class InsufficientDataError(InputError):
    pass


class IngestionError(InputError):
    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class NumericError(GgmError, ArithmeticError):
    """Numerical failure inside a solver or factorization."""


class DefinitenessError(NumericError):
    def __init__(self, pivot):
        super().__init__(f"matrix is not positive definite (pivot {pivot} is non-positive)")
        self.pivot = pivot


class ConvergenceError(NumericError):
    def __init__(self, message, violation=float("nan")):
        super().__init__(message)
        self.violation = violation


class InfeasibleError(NumericError):
    pass


class DegenerateResidualError(NumericError):
    def __init__(self, node, value):
        super().__init__(f"residual second moment of node {node} is {value:.3g} (at or below floor)")
        self.node = node
        self.value = value


class SolverError(NumericError):
    """Wraps a per-node solver failure with its location."""

    def __init__(self, cause, node, grid_index=None):
        where = f"node {node}" if grid_index is None else f"grid index {grid_index}, node {node}"
        super().__init__(f"{where}: {cause}")
        self.cause = cause
        self.node = node
        self.grid_index = grid_index
