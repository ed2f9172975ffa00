"""
Error bounds for the gradient estimates and empirical order fitting.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .bases import BasisKind
from .exceptions import ConfigurationError, UnsupportedOperation
from .sampling import ModelOrder

logger = logging.getLogger(__name__)


def _kappa_table(n):
    root = math.sqrt(n)
    return {
        BasisKind.CB: root,
        BasisKind.RB: float(n),
        BasisKind.CMPB: math.sqrt(n + 1),
        BasisKind.RMPB: root,
    }


def kappa(kind, model, n):
    """
    Error constant of the gradient bound. The quadratic and linear models
    share the same table.
    """
    kind = BasisKind.parse(kind)
    ModelOrder.parse(model)
    if n < 1:
        raise ConfigurationError(f'dimension must be positive, got {n}')
    return _kappa_table(n)[kind]


@dataclass(frozen=True)
class ErrorBoundInput:
    """
    lipschitz is M (Hessian) for the quadratic model and L (gradient) for
    the linear one. kappa_override replaces the tabulated constant, e.g.
    with sqrt(n) for every scheme.
    """
    kind: BasisKind
    model: ModelOrder
    n: int
    h: float
    lipschitz: float
    kappa_override: float = None

    def __post_init__(self):
        object.__setattr__(self, 'kind', BasisKind.parse(self.kind))
        object.__setattr__(self, 'model', ModelOrder.parse(self.model))
        if self.lipschitz < 0:
            raise ConfigurationError(f'Lipschitz constant must be nonnegative, got {self.lipschitz}')

    @property
    def kappa(self):
        if self.kappa_override is not None:
            return float(self.kappa_override)
        return kappa(self.kind, self.model, self.n)


def quadratic_bound(lipschitz, h, kappa_value):
    return lipschitz * h ** 2 * kappa_value / 6


def linear_bound(lipschitz, h, kappa_value):
    return 0.5 * lipschitz * abs(h) * kappa_value


def gradient_bound(inp):
    if inp.model == ModelOrder.QUADRATIC:
        return quadratic_bound(inp.lipschitz, inp.h, inp.kappa)
    return linear_bound(inp.lipschitz, inp.h, inp.kappa)


@dataclass(frozen=True)
class OrderFit:
    slope: float
    intercept: float
    used: tuple
    excluded: tuple


def observed_order(pairs):
    """
    Fit log(error) = slope * log(h) + c over (h, error) pairs.

    Pairs with a nonpositive error are left out of the fit and returned in
    `excluded`.
    """
    pairs = [(abs(float(h)), float(error)) for h, error in pairs]
    if len(pairs) < 3:
        raise ConfigurationError(f'order fitting needs at least 3 pairs, got {len(pairs)}')
    radii = [h for h, _ in pairs]
    if any(later >= earlier for earlier, later in zip(radii, radii[1:])):
        raise ConfigurationError('h values must be strictly decreasing')

    used = tuple((h, e) for h, e in pairs if e > 0 and math.isfinite(e))
    excluded = tuple((h, e) for h, e in pairs if not (e > 0 and math.isfinite(e)))
    if excluded:
        logger.info('order fit excludes %d pairs with nonpositive error', len(excluded))
    if len(used) < 2:
        raise ConfigurationError('fewer than 2 pairs with a positive error remain')

    log_h = np.log([h for h, _ in used])
    log_e = np.log([e for _, e in used])
    slope, intercept = np.polyfit(log_h, log_e, 1)
    return OrderFit(slope=float(slope), intercept=float(intercept), used=used, excluded=excluded)


def estimate_lipschitz(objective, x, radius, trials=200, seed=0):
    """
    Sampled lower estimate of the Hessian Lipschitz constant near x.

    Takes the largest ||H(a) - H(b)||_2 / ||a - b|| over random pairs in the
    ball of the given radius and over the coordinate pairs x -/+ radius e_i.
    """
    hessian = getattr(objective, 'analytic_hessian', None)
    if hessian is None:
        raise UnsupportedOperation(f'{objective.name} has no analytic Hessian')
    if radius <= 0:
        raise ConfigurationError(f'radius must be positive, got {radius}')

    x = np.asarray(x, dtype=float)
    n = x.size
    rng = np.random.default_rng(seed)

    def ball_point():
        step = rng.standard_normal(n)
        step /= np.linalg.norm(step)
        return x + radius * rng.uniform() ** (1 / n) * step

    pairs = []
    for i in range(n):
        offset = np.zeros(n)
        offset[i] = radius
        pairs.append((x - offset, x + offset))
    pairs.extend((ball_point(), ball_point()) for _ in range(trials))

    best = 0.0
    for a, b in pairs:
        gap = np.linalg.norm(a - b)
        if gap == 0:
            continue
        ratio = np.linalg.norm(hessian(a) - hessian(b), 2) / gap
        best = max(best, float(ratio))
    logger.debug('Lipschitz estimate for %s: %.6e over %d pairs', objective.name, best, len(pairs))
    return best
