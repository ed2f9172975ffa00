"""
Dense reference for the closed-form estimators.

Assembles U (directions as columns) and W (their elementwise squares) and
solves the interpolation systems with numpy least squares. This is O(n^3)
and meant for tests and small cross-checks only.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from .bases import BasisKind, basis_constants, directions
from .exceptions import ContractViolation, SingularSystemError

logger = logging.getLogger(__name__)

CONDITION_WARNING = 1e12


@dataclass(frozen=True)
class AssembledSystem:
    U: np.ndarray
    W: np.ndarray
    h: float
    eta: float
    rhs: np.ndarray = None

    @property
    def n(self):
        return self.U.shape[0]

    @property
    def m(self):
        return self.U.shape[1]


def assemble_directions(kind, n):
    """Explicit n x m matrix of the scheme's directions"""
    return np.column_stack(list(directions(kind, basis_constants(n))))


def assemble(scheme, samples=None):
    """
    Build U, W and, when samples are given, the stacked right-hand side
    (delta f, delta f') of the interpolation conditions.
    """
    U = assemble_directions(scheme.kind, scheme.n)
    rhs = None
    if samples is not None:
        if samples.f0 is None:
            raise ContractViolation('the dense system needs f(x)')
        blocks = [samples.f - samples.f0]
        if scheme.is_quadratic:
            samples.check(scheme)
            blocks.append(samples.fprime - samples.f0)
        rhs = np.vstack(blocks)
    return AssembledSystem(U=U, W=U ** 2, h=scheme.h, eta=scheme.eta, rhs=rhs)


def _least_squares(matrix, rhs, label, threshold):
    rank = np.linalg.matrix_rank(matrix)
    condition = float(np.linalg.cond(matrix))
    if rank < min(matrix.shape):
        raise SingularSystemError(
            f'{label} system has rank {rank}, expected {min(matrix.shape)}', condition=condition,
        )
    if condition > threshold:
        logger.warning('%s system is ill-conditioned (cond=%.3e)', label, condition)
    solution, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
    return solution


def solve_quadratic(system, threshold=CONDITION_WARNING):
    """
    Least-squares g and d from the block system after row elimination:
    y = h U^T g and z = 1/2 h^2 W^T d.
    """
    if system.rhs is None or system.rhs.shape[0] != 2:
        raise ContractViolation('the quadratic system needs both sample blocks')
    eta, h = system.eta, system.h
    elimination = np.array([
        [eta ** 2, -1.0],
        [eta, -1.0],
    ]) / np.array([[eta * (eta - 1)], [eta * (1 - eta)]])
    y, z = elimination @ system.rhs

    g = _least_squares(h * system.U.T, y, 'gradient', threshold)
    d = _least_squares(0.5 * h ** 2 * system.W.T, z, 'diagonal', threshold)
    return g, d


def solve_linear(system, threshold=CONDITION_WARNING):
    if system.rhs is None:
        raise ContractViolation('the linear system needs the sample block')
    return _least_squares(system.h * system.U.T, system.rhs[0], 'gradient', threshold)


def kappa_from_pseudoinverse(kind, n):
    """
    Error constant recomputed as ||U^+||_2 sqrt(m) for the assembled directions.
    """
    kind = BasisKind.parse(kind)
    U = assemble_directions(kind, n)
    return float(np.linalg.norm(np.linalg.pinv(U.T), 2) * math.sqrt(kind.size(n)))
