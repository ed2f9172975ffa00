"""
Interpolation point sets and the eliminated difference vectors y and z.

Points are laid out as the unprimed block x_j = x + h u_j followed by the
primed block x_j' = x + eta h u_j. The primed block only exists for the
quadratic model.
"""
import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from django.db import models

from .bases import BasisKind, basis_constants, directions
from .exceptions import (
    ContractViolation,
    ConfigurationError,
    DerivativeFreeError,
    EvaluationError,
)

# 1/h^2 overflows below this
MIN_RADIUS = 1e-300


class ModelOrder(models.TextChoices):
    LINEAR = 'linear', 'Linear'
    QUADRATIC = 'quadratic', 'Quadratic'

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(
                f'unknown model {value!r}, expected one of {", ".join(cls.values)}'
            ) from None


@dataclass(frozen=True)
class SamplingScheme:
    """
    Basis kind, dimension, radius, ratio and model order of one estimate.
    """
    kind: BasisKind
    n: int
    h: float
    eta: float = -1.0
    model: ModelOrder = ModelOrder.QUADRATIC

    def __post_init__(self):
        object.__setattr__(self, 'kind', BasisKind.parse(self.kind))
        object.__setattr__(self, 'model', ModelOrder.parse(self.model))
        # Validates n
        basis_constants(self.n)
        object.__setattr__(self, 'n', int(self.n))

        h = float(self.h)
        eta = float(self.eta)
        if not math.isfinite(h) or h == 0:
            raise ConfigurationError(f'sampling radius must be finite and nonzero, got {self.h!r}')
        if abs(h) < MIN_RADIUS:
            raise ConfigurationError(f'sampling radius {h!r} is below {MIN_RADIUS}')
        if not math.isfinite(eta):
            raise ConfigurationError(f'eta must be finite, got {self.eta!r}')
        if self.model == ModelOrder.QUADRATIC and eta in (0.0, 1.0):
            raise ConfigurationError(f'eta must differ from 0 and 1 for the quadratic model, got {eta}')
        object.__setattr__(self, 'h', h)
        object.__setattr__(self, 'eta', eta)

    @property
    def size(self):
        """Directions per block (n or n+1)"""
        return self.kind.size(self.n)

    @property
    def is_quadratic(self):
        return self.model == ModelOrder.QUADRATIC

    @property
    def sample_count(self):
        """Points evaluated besides x itself"""
        return 2 * self.size if self.is_quadratic else self.size

    @property
    def needs_center(self):
        """Whether f(x) enters the formulas"""
        return self.is_quadratic or not self.kind.is_minimal_positive

    @cached_property
    def constants(self):
        return basis_constants(self.n)

    def with_radius(self, h):
        return replace(self, h=h)


def _as_vector(values, length, label):
    vector = np.asarray(values, dtype=float)
    if vector.shape != (length,):
        raise ContractViolation(f'{label} must have length {length}, got shape {vector.shape}')
    return vector


@dataclass(frozen=True)
class SampleSet:
    """
    f-values at the sample points. f0 and fprime may be None when the
    scheme does not need them.
    """
    f: np.ndarray
    f0: float = None
    fprime: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, 'f', np.asarray(self.f, dtype=float))
        if self.fprime is not None:
            object.__setattr__(self, 'fprime', np.asarray(self.fprime, dtype=float))
        if self.f0 is not None:
            object.__setattr__(self, 'f0', float(self.f0))

    def check(self, scheme):
        m = scheme.size
        _as_vector(self.f, m, 'f')
        if self.fprime is not None:
            _as_vector(self.fprime, m, 'fprime')
        if scheme.is_quadratic and self.fprime is None:
            raise ContractViolation('the quadratic model needs the primed block of samples')
        if scheme.needs_center and self.f0 is None:
            raise ContractViolation(f'{scheme.kind.value} {scheme.model.value} needs f(x)')
        return self

    def frame_values(self):
        """All sampled values except f(x), unprimed block first"""
        if self.fprime is None:
            return self.f.copy()
        return np.concatenate([self.f, self.fprime])


@dataclass(frozen=True)
class DifferenceVectors:
    y: np.ndarray
    z: np.ndarray
    y_extra: float = None
    z_extra: float = None

    @property
    def has_extras(self):
        return self.y_extra is not None and self.z_extra is not None


def sample_points(x, scheme):
    """
    Return the points [x_1..x_m] followed by [x_1'..x_m'] (quadratic only).
    """
    x = _as_vector(x, scheme.n, 'x')
    steps = [scheme.h * u for u in directions(scheme.kind, scheme.constants)]
    points = [x + step for step in steps]
    if scheme.is_quadratic:
        points.extend(x + scheme.eta * step for step in steps)
    return points


def _call(evaluator, point):
    try:
        return float(evaluator(point))
    except DerivativeFreeError:
        raise
    except Exception as exc:
        raise EvaluationError(point, str(exc)) from exc


def evaluate_samples(evaluator, x, scheme, fx=None):
    """
    Evaluate every sample point of the scheme at x.

    Returns (SampleSet, evals_used). f(x) is evaluated only when the scheme
    needs it and fx was not supplied.
    """
    x = _as_vector(x, scheme.n, 'x')
    evals = 0
    f0 = None
    if scheme.needs_center:
        if fx is None:
            f0 = _call(evaluator, x)
            evals += 1
        else:
            f0 = float(fx)
    elif fx is not None:
        f0 = float(fx)

    values = [_call(evaluator, point) for point in sample_points(x, scheme)]
    evals += len(values)
    m = scheme.size
    fprime = np.array(values[m:]) if scheme.is_quadratic else None
    return SampleSet(f=np.array(values[:m]), f0=f0, fprime=fprime), evals


def difference_vectors(samples, scheme):
    """
    Eliminate the block system into y (gradient part) and z (diagonal part).

    For minimal positive bases the last entries are split off into
    y_extra and z_extra.
    """
    if not scheme.is_quadratic:
        raise ContractViolation('difference vectors belong to the quadratic model')
    samples.check(scheme)

    eta = scheme.eta
    df = samples.f - samples.f0
    dfp = samples.fprime - samples.f0
    y = (eta ** 2 * df - dfp) / (eta * (eta - 1))
    z = (eta * df - dfp) / (eta * (1 - eta))

    n = scheme.n
    if scheme.kind.is_minimal_positive:
        return DifferenceVectors(y=y[:n], z=z[:n], y_extra=float(y[n]), z_extra=float(z[n]))
    return DifferenceVectors(y=y, z=z)


def model_residual(g, d, samples, scheme):
    """
    Evaluate the diagonal quadratic model (linear if d is None) at the
    sample points and return the residual against the sampled values.
    """
    samples.check(scheme)
    g = _as_vector(g, scheme.n, 'g')
    if d is not None:
        d = _as_vector(d, scheme.n, 'd')

    if samples.f0 is None:
        raise ContractViolation('the model residual needs f(x)')
    f0 = samples.f0
    offsets = [(1.0, samples.f)]
    if scheme.is_quadratic:
        offsets.append((scheme.eta, samples.fprime))

    residual = []
    for factor, values in offsets:
        for u, value in zip(directions(scheme.kind, scheme.constants), values):
            step = factor * scheme.h * u
            predicted = f0 + g @ step
            if d is not None:
                predicted += 0.5 * (d * step) @ step
            residual.append(predicted - value)
    return np.array(residual)
