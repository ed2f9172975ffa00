"""
O(n) gradient and diagonal-Hessian estimates for the four sampling schemes.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from .bases import BasisKind, apply_regular_inverse, apply_regular_w_inverse
from .exceptions import ConfigurationError, ContractViolation
from .sampling import ModelOrder, difference_vectors, evaluate_samples

logger = logging.getLogger(__name__)

# Diagonal rules for the coordinate minimal positive basis
CMPB_DIAG_LEAST_SQUARES = 'least-squares'
CMPB_DIAG_CENTRAL = 'central'
CMPB_DIAG_CHOICES = (CMPB_DIAG_LEAST_SQUARES, CMPB_DIAG_CENTRAL)

PRIMED_BLOCK_IGNORED = 'primed block ignored by the linear model'


@dataclass(frozen=True)
class DerivativeEstimate:
    g: np.ndarray
    d: np.ndarray
    scheme: object
    evals_used: int
    center_evaluated: bool = False
    fx: float = None
    warnings: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if (self.d is None) == self.scheme.is_quadratic:
            raise ContractViolation('the diagonal estimate is present exactly for the quadratic model')

    def errors_against(self, gradient, diagonal=None):
        """2-norm errors (eps_g, eps_d) against analytic derivatives"""
        eps_g = float(np.linalg.norm(self.g - np.asarray(gradient, dtype=float)))
        eps_d = None
        if self.d is not None and diagonal is not None:
            eps_d = float(np.linalg.norm(self.d - np.asarray(diagonal, dtype=float)))
        return eps_g, eps_d

    @property
    def total_evaluations(self):
        """Objective calls including a freshly evaluated f(x)"""
        return self.evals_used + int(self.center_evaluated)


def _require_extras(diffs, scheme):
    if scheme.kind.is_minimal_positive and not diffs.has_extras:
        raise ContractViolation(f'{scheme.kind.value} needs the (n+1)-th difference entries')


def grad_quadratic(diffs, consts, scheme):
    _require_extras(diffs, scheme)
    n, h = consts.n, scheme.h
    y = diffs.y
    kind = scheme.kind

    if kind == BasisKind.CB:
        return y / h
    if kind == BasisKind.RB:
        return apply_regular_inverse(consts, y) / h
    if kind == BasisKind.CMPB:
        return (y - (y.sum() + diffs.y_extra) / (n + 1)) / h
    shift = consts.gamma * y.sum() + diffs.y_extra / consts.root
    return (y - shift) / (consts.alpha * h)


def diag_quadratic(diffs, consts, scheme, cmpb_diag=CMPB_DIAG_LEAST_SQUARES):
    """
    Diagonal of the Hessian from z. With cmpb_diag='central' the coordinate
    minimal positive basis falls back to the central-difference rule of the
    coordinate basis, which ignores the extra direction.
    """
    if cmpb_diag not in CMPB_DIAG_CHOICES:
        raise ConfigurationError(f'unknown diagonal rule {cmpb_diag!r}')
    _require_extras(diffs, scheme)
    n, h = consts.n, scheme.h
    z = diffs.z
    kind = scheme.kind
    scale = 2 / h ** 2

    if kind == BasisKind.CB:
        return scale * z
    if kind == BasisKind.RB:
        return scale * apply_regular_w_inverse(consts, z)
    if kind == BasisKind.CMPB:
        if cmpb_diag == CMPB_DIAG_CENTRAL:
            return scale * z
        return scale * (z - (z.sum() - diffs.z_extra) / (n + 1))

    shift = ((consts.omega - consts.sigma) * z.sum() + diffs.z_extra / (consts.mu * n)) / (1 + consts.sigma * n)
    return scale / consts.mu * (z + shift)


def grad_linear(samples, consts, scheme):
    n, h = consts.n, scheme.h
    kind = scheme.kind
    if scheme.is_quadratic:
        raise ContractViolation('grad_linear needs a linear-model scheme')
    samples.check(scheme)
    if samples.fprime is not None:
        logger.warning('%s: %s', kind.value, PRIMED_BLOCK_IGNORED)

    f = samples.f
    if kind == BasisKind.CB:
        return (f - samples.f0) / h
    if kind == BasisKind.RB:
        return apply_regular_inverse(consts, f - samples.f0) / h
    if kind == BasisKind.CMPB:
        return (f[:n] - f.sum() / (n + 1)) / h
    shift = consts.gamma * f[:n].sum() + f[n] / consts.root
    return (f[:n] - shift) / (consts.alpha * h)


def _require_central(scheme):
    if scheme.eta != -1.0 or not scheme.is_quadratic:
        raise ConfigurationError('the central forms need the quadratic model with eta = -1')


def corollary_gradient(samples, consts, scheme):
    """
    Gradient from raw f-values at eta = -1; f(x) is not used.
    """
    _require_central(scheme)
    n, h = consts.n, scheme.h
    kind = scheme.kind
    if samples.fprime is None:
        raise ContractViolation('the central forms need the primed block of samples')
    if samples.f.shape != (scheme.size,) or samples.fprime.shape != (scheme.size,):
        raise ContractViolation(f'{kind.value} needs {scheme.size} values per block')
    diff = samples.f - samples.fprime

    if kind == BasisKind.CB:
        return diff / (2 * h)
    if kind == BasisKind.RB:
        mean = diff.mean()
        return (diff + (consts.root - 1) * mean) / (2 * consts.alpha * h)
    if kind == BasisKind.CMPB:
        return (diff[:n] - diff.sum() / (n + 1)) / (2 * h)
    shift = diff[n] / consts.root + consts.gamma * diff[:n].sum()
    return (diff[:n] - shift) / (2 * consts.alpha * h)


def corollary_diagonal(samples, consts, scheme):
    """
    Diagonal from second differences f_j + f_j' - 2 f(x) at eta = -1.
    """
    _require_central(scheme)
    samples.check(scheme)
    n, h = consts.n, scheme.h
    kind = scheme.kind
    second = samples.f + samples.fprime - 2 * samples.f0

    if kind == BasisKind.CB:
        return second / h ** 2
    if kind == BasisKind.RB:
        return (second - (1 - consts.mu) * second.mean()) / (consts.mu * h ** 2)
    if kind == BasisKind.CMPB:
        return (second[:n] - (second[:n].sum() - second[n]) / (n + 1)) / h ** 2
    shift = ((consts.omega - consts.sigma) * second[:n].sum() + second[n] / (consts.mu * n)) / (1 + consts.sigma * n)
    return (second[:n] + shift) / (consts.mu * h ** 2)


def estimate_from_samples(samples, scheme, center_evaluated=False, cmpb_diag=CMPB_DIAG_LEAST_SQUARES):
    """
    Closed-form estimate from values the caller already evaluated.
    """
    consts = scheme.constants
    warnings = ()
    if scheme.is_quadratic:
        diffs = difference_vectors(samples, scheme)
        g = grad_quadratic(diffs, consts, scheme)
        d = diag_quadratic(diffs, consts, scheme, cmpb_diag=cmpb_diag)
    else:
        if samples.fprime is not None:
            warnings = (PRIMED_BLOCK_IGNORED,)
        g = grad_linear(samples, consts, scheme)
        d = None
    return DerivativeEstimate(
        g=g, d=d, scheme=scheme, evals_used=scheme.sample_count, center_evaluated=center_evaluated,
        fx=samples.f0, warnings=warnings,
    )


def estimate(evaluator, x, scheme, fx=None, cmpb_diag=CMPB_DIAG_LEAST_SQUARES):
    """
    Sample the objective around x and return the scheme's estimate.

    evals_used counts the sample points; center_evaluated tells whether
    f(x) was evaluated here as well. Pass fx to reuse a known value.
    """
    samples, evals = evaluate_samples(evaluator, x, scheme, fx=fx)
    result = estimate_from_samples(
        samples, scheme, center_evaluated=evals > scheme.sample_count, cmpb_diag=cmpb_diag,
    )
    logger.debug(
        'estimate %s/%s n=%d h=%g evals=%d', scheme.kind.value, scheme.model.value,
        scheme.n, scheme.h, evals,
    )
    return result


def expected_samples(kind, model, n):
    """Sample points per estimate, f(x) excluded"""
    kind = BasisKind.parse(kind)
    m = kind.size(n)
    return 2 * m if ModelOrder.parse(model) == ModelOrder.QUADRATIC else m

