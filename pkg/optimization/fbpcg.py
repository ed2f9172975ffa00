"""
Frame-based preconditioned conjugate gradients.

Each iteration samples a frame of 2m points around x_k with eta = -1,
builds the gradient estimate from it and moves along a preconditioned
Polak-Ribiere direction found by a short line search. Every n+3
iterations the diagonal Hessian estimate refreshes the preconditioner and
the iterate jumps to the best point seen. The frame radius shrinks by
lambda whenever no frame point beats the centre by more than
epsilon_scale * h^2.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from derivatives.bases import BasisKind
from derivatives.estimators import (
    CMPB_DIAG_CENTRAL,
    CMPB_DIAG_CHOICES,
    diag_quadratic,
    grad_quadratic,
)
from derivatives.exceptions import BudgetExhausted, ConfigurationError, ContractViolation, EvaluationError
from derivatives.sampling import ModelOrder, SamplingScheme, difference_vectors, evaluate_samples

from .problems import Evaluator

logger = logging.getLogger(__name__)

STOP_RADIUS = 'radius'
STOP_BUDGET = 'budget'


@dataclass(frozen=True)
class SolverConfig:
    """
    Solver settings. reserved_* values are accepted but not used by the
    iteration.
    """
    kind: BasisKind = BasisKind.CB
    budget: int = 1300
    h0: float = 1.0
    h_min: float = 1e-10
    shrink: float = 4.0
    line_search_budget: int = 10
    diag_clamp: float = 1e-4
    cmpb_diag: str = CMPB_DIAG_CENTRAL
    epsilon_scale: float = 1.0
    reserved_n: int = None
    reserved_tau_min: float = None
    reserved_nu: float = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', BasisKind.parse(self.kind))
        if self.budget < 0:
            raise ConfigurationError(f'budget must be nonnegative, got {self.budget}')
        if not self.shrink > 1:
            raise ConfigurationError(f'shrink factor must exceed 1, got {self.shrink}')
        if not self.h_min > 0 or not self.h0 > 0:
            raise ConfigurationError('h0 and h_min must be positive')
        if self.line_search_budget < 1:
            raise ConfigurationError('line search needs at least one evaluation')
        if not self.diag_clamp > 0:
            raise ConfigurationError(f'diagonal clamp must be positive, got {self.diag_clamp}')
        if self.cmpb_diag not in CMPB_DIAG_CHOICES:
            raise ConfigurationError(f'unknown diagonal rule {self.cmpb_diag!r}')
        if not self.epsilon_scale >= 0:
            raise ConfigurationError(f'epsilon scale must be nonnegative, got {self.epsilon_scale}')

    @property
    def eta(self):
        return -1.0

    def scheme(self, n, h):
        return SamplingScheme(self.kind, n, h, eta=self.eta, model=ModelOrder.QUADRATIC)

    def epsilon(self, h):
        """Quasi-minimality tolerance for radius h, epsilon_scale * h^2"""
        return self.epsilon_scale * h ** 2


@dataclass
class SolverState:
    x: np.ndarray
    fx: float
    h: float
    j: int
    h_diag: np.ndarray
    g: np.ndarray = None
    p: np.ndarray = None
    nf: int = 0
    best_x: np.ndarray = None
    best_f: float = math.inf
    iterations: int = 0
    qmf_count: int = 0


@dataclass
class SolverResult:
    kind: BasisKind
    fmin: float
    x_min: np.ndarray
    gnorm: float
    h: float
    iterations: int
    qmf_count: int
    nf: int
    stop_reason: str
    trace: list = field(default_factory=list)

    def as_row(self, problem):
        return {
            'problem': problem,
            'basis': self.kind.value,
            'model': ModelOrder.QUADRATIC.value,
            'h': self.h,
            'eta': -1.0,
            'nf': self.nf,
            'eps_g': None,
            'eps_d': None,
            'fmin': self.fmin,
            'gnorm': self.gnorm,
            'itns': self.iterations,
            'qmfs': self.qmf_count,
        }


@dataclass(frozen=True)
class LineSearchResult:
    theta: float
    value: float
    evals: int


def is_quasi_minimal(frame_values, center_value, epsilon):
    """True iff every frame value is at least center_value - epsilon"""
    values = np.asarray(frame_values, dtype=float)
    if values.size == 0:
        raise ContractViolation('a frame needs at least one point')
    if epsilon < 0:
        raise ConfigurationError(f'epsilon must be nonnegative, got {epsilon}')
    return bool(np.all(values >= center_value - epsilon))


def preconditioner(diagonal, clamp=1e-4):
    """H_ii = 1 / max(D_i, clamp)"""
    return 1.0 / np.maximum(np.asarray(diagonal, dtype=float), clamp)


def pcg_beta(g_old, g_new, h_diag):
    """
    Preconditioned Polak-Ribiere coefficient, clipped at 0:
    max(0, g_new^T H (g_new - g_old) / g_old^T H g_old).
    """
    denominator = g_old @ (h_diag * g_old)
    if denominator == 0:
        return 0.0
    return max(0.0, float(g_new @ (h_diag * (g_new - g_old)) / denominator))


def _parabola_vertex(a, b, c):
    (ta, fa), (tb, fb), (tc, fc) = a, b, c
    denominator = (tb - ta) * (fb - fc) - (tb - tc) * (fb - fa)
    if denominator == 0:
        return None
    numerator = (tb - ta) ** 2 * (fb - fc) - (tb - tc) ** 2 * (fb - fa)
    return tb - 0.5 * numerator / denominator


def line_search(evaluate, x, p, h, fx, budget=10):
    """
    Approximately minimise f(x + theta h p / ||p||) over theta >= 0.

    Starts at theta = 1, doubles while the value keeps improving and halves
    while it does not improve on f(x), then spends one evaluation on the
    vertex of the parabola through the best sample and its neighbours.
    Returns the best sampled theta, or 0 when nothing beats f(x).
    """
    norm = float(np.linalg.norm(p))
    if norm == 0 or budget <= 0:
        return LineSearchResult(theta=0.0, value=fx, evals=0)
    unit = np.asarray(p, dtype=float) / norm
    samples = {0.0: fx}

    def trial(theta):
        samples[theta] = evaluate(x + theta * h * unit)
        return samples[theta]

    theta = 1.0
    if trial(theta) < fx:
        while len(samples) - 1 < budget:
            if trial(2 * theta) >= samples[theta]:
                break
            theta *= 2
    else:
        while len(samples) - 1 < budget:
            theta /= 2
            if trial(theta) < fx:
                break

    ordered = sorted(samples.items())
    best = min(range(len(ordered)), key=lambda i: (ordered[i][1], ordered[i][0]))
    if 0 < best < len(ordered) - 1 and len(samples) - 1 < budget:
        vertex = _parabola_vertex(ordered[best - 1], ordered[best], ordered[best + 1])
        if vertex is not None and ordered[best - 1][0] < vertex < ordered[best + 1][0] and vertex not in samples:
            trial(vertex)

    theta, value = min(samples.items(), key=lambda item: (item[1], item[0]))
    return LineSearchResult(theta=theta, value=value, evals=len(samples) - 1)


class FrameSolver:
    """
    One solver run. Holds the evaluator, state and trace so a failed run
    can still report what it did.
    """

    def __init__(self, objective, config=None, start=None):
        self.objective = objective
        self.config = config or SolverConfig()
        x = objective.start() if start is None else np.array(start, dtype=float)
        if x.shape != (objective.n,):
            raise ContractViolation(f'start point must have length {objective.n}, got shape {x.shape}')
        self.evaluator = Evaluator(objective, budget=self.config.budget)
        self.state = SolverState(
            x=x, fx=math.nan, h=self.config.h0, j=objective.n, h_diag=np.ones(objective.n),
        )
        self.trace = []
        self.stop_reason = None

    def run(self):
        try:
            self._iterate()
        except BudgetExhausted:
            self.stop_reason = STOP_BUDGET
        except EvaluationError as exc:
            self.stop_reason = 'evaluation-error'
            exc.partial_result = self.result()
            logger.error('%s: %s after %d evaluations', self.objective.name, exc, self.evaluator.nf)
            raise
        if self.stop_reason == STOP_BUDGET:
            logger.info('%s: stopped on budget after %d evaluations', self.objective.name, self.evaluator.nf)
        return self.result()

    def _iterate(self):
        config, state, evaluator = self.config, self.state, self.evaluator
        n = self.objective.n
        if config.budget == 0:
            self.stop_reason = STOP_BUDGET
            return
        state.fx = evaluator(state.x)
        self._sync()

        while True:
            if state.h < config.h_min:
                self.stop_reason = STOP_RADIUS
                return
            scheme = config.scheme(n, state.h)
            if evaluator.remaining < scheme.sample_count:
                self.stop_reason = STOP_BUDGET
                return

            samples, _ = evaluate_samples(evaluator, state.x, scheme, fx=state.fx)
            diffs = difference_vectors(samples, scheme)
            g_new = grad_quadratic(diffs, scheme.constants, scheme)

            reset = state.j == 1
            if reset:
                diagonal = diag_quadratic(diffs, scheme.constants, scheme, cmpb_diag=config.cmpb_diag)
                state.h_diag = preconditioner(diagonal, config.diag_clamp)

            quasi_minimal = is_quasi_minimal(samples.frame_values(), state.fx, config.epsilon(state.h))

            beta = 0.0
            p = -state.h_diag * g_new
            if state.p is not None and state.g is not None:
                beta = pcg_beta(state.g, g_new, state.h_diag)
                p = p + beta * state.p

            budget = int(min(config.line_search_budget, evaluator.remaining))
            search = line_search(evaluator, state.x, p, state.h, state.fx, budget=budget)

            if reset:
                state.x = evaluator.best_x.copy()
                state.fx = evaluator.best_f
                state.j = n + 3
                state.p = None
                logger.debug('%s: reset at iteration %d', self.objective.name, state.iterations + 1)
            else:
                if search.theta > 0:
                    state.x = state.x + search.theta * state.h * p / np.linalg.norm(p)
                    state.fx = search.value
                state.j -= 1
                state.p = p
            state.g = g_new

            radius = state.h
            if quasi_minimal:
                state.h /= config.shrink
                state.qmf_count += 1
                logger.debug('%s: quasi-minimal frame, h -> %.4e', self.objective.name, state.h)

            state.iterations += 1
            self._sync()
            self.trace.append({
                'iteration': state.iterations,
                'nf': state.nf,
                'f_center': state.fx,
                'f_best': state.best_f,
                'h': radius,
                'theta': search.theta,
                'beta': beta,
                'j': state.j,
                'reset': reset,
                'quasi_minimal': quasi_minimal,
                'gnorm': float(np.linalg.norm(g_new)),
                'h_diag_min': float(state.h_diag.min()),
                'h_diag_max': float(state.h_diag.max()),
            })

    def _sync(self):
        self.state.nf = self.evaluator.nf
        self.state.best_f = self.evaluator.best_f
        self.state.best_x = self.evaluator.best_x

    def result(self):
        self._sync()
        state = self.state
        if state.best_x is None:
            x_min, fmin = state.x.copy(), math.nan
        else:
            x_min, fmin = state.best_x.copy(), state.best_f
        gnorm = float(np.linalg.norm(state.g)) if state.g is not None else math.nan
        return SolverResult(
            kind=self.config.kind, fmin=fmin, x_min=x_min, gnorm=gnorm, h=state.h,
            iterations=state.iterations, qmf_count=state.qmf_count, nf=state.nf,
            stop_reason=self.stop_reason, trace=list(self.trace),
        )


def solve(objective, config=None, start=None):
    return FrameSolver(objective, config=config, start=start).run()
