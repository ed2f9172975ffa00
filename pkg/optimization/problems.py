"""
Test objectives with analytic derivatives, and the per-run evaluation counter.

Most problems are sums of squared residuals f = r^T r, so the analytic
gradient is 2 J^T r from the residual Jacobian.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from derivatives.exceptions import (
    BudgetExhausted,
    ConfigurationError,
    ContractViolation,
    DerivativeFreeError,
    EvaluationError,
    UnknownProblemError,
)


@dataclass(frozen=True)
class Objective:
    name: str
    n: int
    evaluate: Callable
    standard_start: tuple
    analytic_gradient: Optional[Callable] = None
    analytic_diag_hessian: Optional[Callable] = None
    analytic_hessian: Optional[Callable] = None
    minimizer: Optional[tuple] = None
    description: str = ''
    tags: tuple = field(default_factory=tuple)

    def start(self):
        return np.array(self.standard_start, dtype=float)

    @property
    def has_gradient(self):
        return self.analytic_gradient is not None

    @property
    def has_diag_hessian(self):
        return self.analytic_diag_hessian is not None

    @property
    def has_hessian(self):
        return self.analytic_hessian is not None


def _vector(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ContractViolation(f'expected a point of length {n}, got shape {x.shape}')
    return x


def least_squares(name, n, residuals, jacobian, start, minimizer=None, description=''):
    """Objective f = sum(r_i^2) with gradient 2 J^T r"""

    def evaluate(x):
        r = residuals(_vector(x, n))
        return float(r @ r)

    def gradient(x):
        x = _vector(x, n)
        return 2 * jacobian(x).T @ residuals(x)

    return Objective(
        name=name, n=n, evaluate=evaluate, standard_start=tuple(start),
        analytic_gradient=gradient, minimizer=minimizer, description=description,
        tags=('least-squares',),
    )


def rosenbrock(n=2):
    if n != 2:
        raise ConfigurationError(f'rosenbrock is defined for n = 2, got {n}')

    def evaluate(x):
        y1, y2 = _vector(x, 2)
        return (1 - y1) ** 2 + 100 * (y2 - y1 ** 2) ** 2

    def gradient(x):
        y1, y2 = _vector(x, 2)
        return np.array([
            -2 * (1 - y1) - 400 * y1 * (y2 - y1 ** 2),
            200 * (y2 - y1 ** 2),
        ])

    def hessian(x):
        y1, y2 = _vector(x, 2)
        return np.array([
            [2 - 400 * y2 + 1200 * y1 ** 2, -400 * y1],
            [-400 * y1, 200.0],
        ])

    return Objective(
        name='rosenbrock', n=2, evaluate=evaluate, standard_start=(-1.2, 1.0),
        analytic_gradient=gradient, analytic_hessian=hessian,
        analytic_diag_hessian=lambda x: np.diag(hessian(x)).copy(),
        minimizer=(1.0, 1.0), description='Banana valley (1 - y1)^2 + 100 (y2 - y1^2)^2',
    )


def freudenstein_roth():
    def residuals(x):
        x1, x2 = x
        return np.array([
            -13 + x1 + ((5 - x2) * x2 - 2) * x2,
            -29 + x1 + ((1 + x2) * x2 - 14) * x2,
        ])

    def jacobian(x):
        _, x2 = x
        return np.array([
            [1.0, 10 * x2 - 3 * x2 ** 2 - 2],
            [1.0, 3 * x2 ** 2 + 2 * x2 - 14],
        ])

    return least_squares(
        'freudenstein_roth', 2, residuals, jacobian, (0.5, -2.0), minimizer=(5.0, 4.0),
        description='Two cubic residuals with a local minimum near (11.41, -0.8968)',
    )


BEALE_TARGETS = np.array([1.5, 2.25, 2.625])


def beale():
    powers = np.arange(1, 4)

    def residuals(x):
        x1, x2 = x
        return BEALE_TARGETS - x1 * (1 - x2 ** powers)

    def jacobian(x):
        x1, x2 = x
        return np.column_stack([-(1 - x2 ** powers), x1 * powers * x2 ** (powers - 1)])

    return least_squares('beale', 2, residuals, jacobian, (1.0, 1.0), minimizer=(3.0, 0.5))


def _helical_angle(x1, x2):
    # Branch of atan matching the angle in [-1/4, 3/4); undefined at x1 = x2 = 0
    if x1 > 0:
        return math.atan(x2 / x1) / (2 * math.pi)
    if x1 < 0:
        return math.atan(x2 / x1) / (2 * math.pi) + 0.5
    return math.copysign(0.25, x2)


def helical_valley():
    def residuals(x):
        x1, x2, x3 = x
        return np.array([
            10 * (x3 - 10 * _helical_angle(x1, x2)),
            10 * (math.hypot(x1, x2) - 1),
            x3,
        ])

    def jacobian(x):
        x1, x2, _ = x
        radius_sq = x1 ** 2 + x2 ** 2
        radius = math.sqrt(radius_sq)
        scale = 100 / (2 * math.pi * radius_sq)
        return np.array([
            [scale * x2, -scale * x1, 10.0],
            [10 * x1 / radius, 10 * x2 / radius, 0.0],
            [0.0, 0.0, 1.0],
        ])

    return least_squares(
        'helical_valley', 3, residuals, jacobian, (-1.0, 0.0, 0.0), minimizer=(1.0, 0.0, 0.0),
        description='Helix around the x3 axis; undefined on x1 = x2 = 0',
    )


def powell_singular():
    root5, root10 = math.sqrt(5), math.sqrt(10)

    def residuals(x):
        x1, x2, x3, x4 = x
        return np.array([
            x1 + 10 * x2,
            root5 * (x3 - x4),
            (x2 - 2 * x3) ** 2,
            root10 * (x1 - x4) ** 2,
        ])

    def jacobian(x):
        x1, x2, x3, x4 = x
        a = 2 * (x2 - 2 * x3)
        b = 2 * root10 * (x1 - x4)
        return np.array([
            [1.0, 10.0, 0.0, 0.0],
            [0.0, 0.0, root5, -root5],
            [0.0, a, -2 * a, 0.0],
            [b, 0.0, 0.0, -b],
        ])

    return least_squares(
        'powell_singular', 4, residuals, jacobian, (3.0, -1.0, 0.0, 1.0),
        minimizer=(0.0, 0.0, 0.0, 0.0), description='Singular Hessian at the minimizer',
    )


def woods():
    root90, root10 = math.sqrt(90), math.sqrt(10)

    def residuals(x):
        x1, x2, x3, x4 = x
        return np.array([
            10 * (x2 - x1 ** 2),
            1 - x1,
            root90 * (x4 - x3 ** 2),
            1 - x3,
            root10 * (x2 + x4 - 2),
            (x2 - x4) / root10,
        ])

    def jacobian(x):
        x1, _, x3, _ = x
        return np.array([
            [-20 * x1, 10.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, -2 * root90 * x3, root90],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, root10, 0.0, root10],
            [0.0, 1 / root10, 0.0, -1 / root10],
        ])

    return least_squares(
        'woods', 4, residuals, jacobian, (-3.0, -1.0, -3.0, -1.0), minimizer=(1.0, 1.0, 1.0, 1.0),
    )


def trigonometric(n=2):
    index = np.arange(1, n + 1)

    def residuals(x):
        return n - np.cos(x).sum() + index * (1 - np.cos(x)) - np.sin(x)

    def jacobian(x):
        J = np.tile(np.sin(x), (n, 1))
        J[np.diag_indices(n)] += index * np.sin(x) - np.cos(x)
        return J

    return least_squares('trigonometric', n, residuals, jacobian, np.full(n, 1 / n))


def brown_almost_linear(n=2):
    def residuals(x):
        r = x + x.sum() - (n + 1)
        r[-1] = np.prod(x) - 1
        return r

    def jacobian(x):
        J = np.ones((n, n)) + np.eye(n)
        J[-1] = [np.prod(np.delete(x, j)) for j in range(n)]
        return J

    return least_squares(
        'brown_almost_linear', n, residuals, jacobian, np.full(n, 0.5), minimizer=tuple(np.ones(n)),
    )


def broyden_tridiagonal(n=20):
    def residuals(x):
        shifted_down = np.concatenate([[0.0], x[:-1]])
        shifted_up = np.concatenate([x[1:], [0.0]])
        return (3 - 2 * x) * x - shifted_down - 2 * shifted_up + 1

    def jacobian(x):
        return np.diag(3 - 4 * x) - np.eye(n, k=-1) - 2 * np.eye(n, k=1)

    return least_squares('broyden_tridiagonal', n, residuals, jacobian, np.full(n, -1.0))


def quadratic(A, b=None, c=0.0, start=None, name='quadratic'):
    """f(x) = 1/2 x^T A x + b^T x + c with A symmetric"""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T):
        raise ConfigurationError('A must be a symmetric square matrix')
    b = np.zeros(n) if b is None else np.asarray(b, dtype=float)
    start = np.ones(n) if start is None else np.asarray(start, dtype=float)

    def evaluate(x):
        x = _vector(x, n)
        return float(0.5 * x @ A @ x + b @ x + c)

    return Objective(
        name=name, n=n, evaluate=evaluate, standard_start=tuple(start),
        analytic_gradient=lambda x: A @ _vector(x, n) + b,
        analytic_hessian=lambda x: A.copy(),
        analytic_diag_hessian=lambda x: np.diag(A).copy(),
        tags=('factory',),
    )


def cubic(n=2):
    """f(x) = x_1^3 embedded in n dimensions"""

    def hessian(x):
        H = np.zeros((n, n))
        H[0, 0] = 6 * _vector(x, n)[0]
        return H

    def gradient(x):
        g = np.zeros(n)
        g[0] = 3 * _vector(x, n)[0] ** 2
        return g

    return Objective(
        name='cubic', n=n, evaluate=lambda x: float(_vector(x, n)[0] ** 3),
        standard_start=tuple(np.ones(n)), analytic_gradient=gradient,
        analytic_hessian=hessian, analytic_diag_hessian=lambda x: np.diag(hessian(x)).copy(),
        tags=('factory',),
    )


PROBLEM_FACTORIES = {
    'rosenbrock': rosenbrock,
    'freudenstein_roth': freudenstein_roth,
    'beale': beale,
    'helical_valley': helical_valley,
    'powell_singular': powell_singular,
    'woods': woods,
    'trigonometric': trigonometric,
    'brown_almost_linear': brown_almost_linear,
    'broyden_tridiagonal': broyden_tridiagonal,
}


def registry():
    """Fresh map of every registered problem"""
    return {name: factory() for name, factory in PROBLEM_FACTORIES.items()}


def get_problem(name):
    try:
        factory = PROBLEM_FACTORIES[name]
    except KeyError:
        raise UnknownProblemError(
            f'unknown problem {name!r}, expected one of {", ".join(PROBLEM_FACTORIES)}'
        ) from None
    return factory()


class Evaluator:
    """
    Counts objective calls for one run and keeps the best point seen.

    Failing calls are counted too and surface as EvaluationError.
    """

    def __init__(self, objective, budget=None):
        self.objective = objective
        self.budget = budget
        self.nf = 0
        self.best_x = None
        self.best_f = math.inf

    @property
    def remaining(self):
        if self.budget is None:
            return math.inf
        return max(self.budget - self.nf, 0)

    @property
    def exhausted(self):
        return self.remaining <= 0

    def __call__(self, x):
        if self.exhausted:
            raise BudgetExhausted(f'budget of {self.budget} evaluations used up')
        x = np.array(x, dtype=float)
        self.nf += 1
        try:
            value = float(self.objective.evaluate(x))
        except DerivativeFreeError:
            raise
        except Exception as exc:
            raise EvaluationError(x, str(exc)) from exc
        if value < self.best_f:
            self.best_f = value
            self.best_x = x
        return value
