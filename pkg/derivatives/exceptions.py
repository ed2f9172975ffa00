class DerivativeFreeError(Exception):
    """
    Base class for every error raised by the estimation library
    """


class ConfigurationError(DerivativeFreeError, ValueError):
    """
    Invalid scheme, bound or solver settings (h = 0, eta = 1, n < 2, ...)
    """


class ContractViolation(DerivativeFreeError, ValueError):
    """
    Inputs that do not fit together (lengths, missing sample blocks)
    """


class SingularSystemError(DerivativeFreeError, ArithmeticError):
    """
    Dense interpolation system without full rank
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class UnsupportedOperation(DerivativeFreeError):
    """
    Operation needs information the objective does not provide
    """


class UnknownProblemError(DerivativeFreeError, KeyError):
    """
    Objective name missing from the registry
    """

    def __str__(self):
        return str(self.args[0]) if self.args else ''


class BudgetExhausted(DerivativeFreeError):
    """
    Evaluation budget used up before the requested call
    """


class EvaluationError(DerivativeFreeError):
    """
    Objective failed at a point. The original exception is kept as __cause__.
    """

    def __init__(self, point, reason=''):
        self.point = tuple(float(value) for value in point)
        self.partial_result = None
        message = f'objective evaluation failed at {list(self.point)}'
        if reason:
            message = f'{message}: {reason}'
        super().__init__(message)
