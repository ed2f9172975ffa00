"""
Sampling directions and the scalar constants of the four interpolation schemes.

Directions are produced one at a time from a handful of scalars; no n x n
matrix is formed here. Direction indices are 1-based to line up with the
point labels x_1 ... x_{n+1}.
"""
import math
from dataclasses import dataclass

import numpy as np
from django.db import models

from .exceptions import ConfigurationError


class BasisKind(models.TextChoices):
    CB = 'cb', 'Coordinate Basis'
    RB = 'rb', 'Regular Basis'
    CMPB = 'cmpb', 'Coordinate Minimal Positive Basis'
    RMPB = 'rmpb', 'Regular Minimal Positive Basis'

    @property
    def is_minimal_positive(self):
        return self in (BasisKind.CMPB, BasisKind.RMPB)

    @property
    def is_regular(self):
        return self in (BasisKind.RB, BasisKind.RMPB)

    def size(self, n):
        """Number of directions in dimension n"""
        return n + 1 if self.is_minimal_positive else n

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ConfigurationError(
                f'unknown basis {value!r}, expected one of {", ".join(cls.values)}'
            ) from None


# Order used when a report lists all four schemes
BASIS_ORDER = (BasisKind.CB, BasisKind.RB, BasisKind.CMPB, BasisKind.RMPB)


@dataclass(frozen=True)
class BasisConstants:
    """
    Scalars shared by the regular directions in dimension n.

    alpha scales the simplex so every direction has unit length, gamma
    centres it, mu and omega describe the inverse of the squared-direction
    matrix and sigma collects the terms of the regular minimal positive
    diagonal formula.
    """
    n: int
    alpha: float
    gamma: float
    mu: float
    omega: float
    sigma: float

    @property
    def root(self):
        return math.sqrt(self.n + 1)

    def as_dict(self):
        return {
            'n': self.n,
            'alpha': self.alpha,
            'gamma': self.gamma,
            'mu': self.mu,
            'omega': self.omega,
            'sigma': self.sigma,
        }


def basis_constants(n):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise ConfigurationError(f'dimension must be an integer, got {n!r}')
    n = int(n)
    if n < 2:
        raise ConfigurationError(f'dimension must be at least 2, got {n}')

    alpha = math.sqrt((n + 1) / n)
    gamma = (1 - 1 / math.sqrt(n + 1)) / n
    mu = alpha ** 2 * (1 - 2 * gamma)
    omega = gamma ** 2 / (1 - 2 * gamma)
    sigma = 2 * omega + omega ** 2 * n + 1 / (mu ** 2 * n ** 2)
    return BasisConstants(n=n, alpha=alpha, gamma=gamma, mu=mu, omega=omega, sigma=sigma)


def direction(kind, constants, j):
    """
    Return the j-th direction (1-based) of the given scheme as a new vector.
    """
    kind = BasisKind.parse(kind)
    n = constants.n
    m = kind.size(n)
    if isinstance(j, bool) or not isinstance(j, (int, np.integer)) or not 1 <= j <= m:
        raise IndexError(f'direction index {j!r} outside 1..{m} for {kind.value}')

    if j == n + 1:
        if kind == BasisKind.CMPB:
            return np.full(n, -1.0)
        return np.full(n, -1.0 / math.sqrt(n))

    if kind.is_regular:
        vector = np.full(n, -constants.alpha * constants.gamma)
        vector[j - 1] += constants.alpha
        return vector

    vector = np.zeros(n)
    vector[j - 1] = 1.0
    return vector


def directions(kind, constants):
    """Yield the scheme's directions in order"""
    kind = BasisKind.parse(kind)
    for j in range(1, kind.size(constants.n) + 1):
        yield direction(kind, constants, j)


def apply_regular_inverse(constants, y):
    """
    Solve V^T g = y for the regular basis V in O(n).
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (constants.n,):
        raise ValueError(f'expected a vector of length {constants.n}, got shape {y.shape}')
    shift = (constants.root - 1) / constants.n * y.sum()
    return (y + shift) / constants.alpha


def apply_regular_w_inverse(constants, z):
    """
    Solve W^T d = z where W holds the squared entries of the regular basis.
    """
    z = np.asarray(z, dtype=float)
    if z.shape != (constants.n,):
        raise ValueError(f'expected a vector of length {constants.n}, got shape {z.shape}')
    shift = (1 - constants.mu) / constants.n * z.sum()
    return (z - shift) / constants.mu


def _relative_gap(a, b):
    scale = max(abs(a), abs(b))
    if scale == 0:
        return 0.0
    return abs(a - b) / scale


def identity_pairs(n):
    """
    Closed-form rewrites of the scheme constants, as (label, lhs, rhs) triples.
    """
    c = basis_constants(n)
    root = c.root
    alpha, gamma, mu, omega = c.alpha, c.gamma, c.mu, c.omega
    mu_denominator = (n - 2) * (n + 1) + 2 * root

    return [
        ('gamma/(1-n gamma) = gamma root', gamma / (1 - n * gamma), gamma * root),
        ('gamma root = (root-1)/n', gamma * root, (root - 1) / n),
        ('gamma^2 expanded', gamma ** 2, (1 - 1 / root) ** 2 / n ** 2),
        ('gamma^2 split', gamma ** 2, ((n + 2) / (n + 1) - 2 / root) / n ** 2),
        ('alpha^2 gamma^2', alpha ** 2 * gamma ** 2, (n + 2 - 2 * root) / n ** 3),
        ('alpha^2 gamma^2 square', alpha ** 2 * gamma ** 2, (root - 1) ** 2 / n ** 3),
        ('1 - 2 gamma', 1 - 2 * gamma, 1 - 2 / n + 2 / (n * root)),
        ('1 - 2 gamma fraction', 1 - 2 * gamma, ((n - 2) * root + 2) / (n * root)),
        ('mu', mu, mu_denominator / n ** 2),
        ('omega n', omega * n, (n + 2 - 2 * root) / mu_denominator),
        ('1 + omega n', 1 + omega * n, n ** 2 / mu_denominator),
        ('omega n / (1 + omega n)', omega * n / (1 + omega * n), (n + 2 - 2 * root) / n ** 2),
        ('1 - mu', 1 - mu, omega * n / (1 + omega * n)),
    ]


def verify_appendix_identities(n):
    """
    Return the largest relative gap between the constants and their
    closed-form rewrites for dimension n.
    """
    c = basis_constants(n)
    if not 1 - 2 * c.gamma > 0:
        raise ConfigurationError(f'1 - 2 gamma is not positive for n = {n}')
    return max(_relative_gap(lhs, rhs) for _, lhs, rhs in identity_pairs(n))
