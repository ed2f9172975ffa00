from pathlib import Path

from django.conf import settings

from optimization.fbpcg import SolverConfig

DEFAULTS = {
    'ETA': -1.0,
    'SOLVER_BUDGET': 1300,
    'SOLVER_H0': 1.0,
    'SOLVER_H_MIN': 1e-10,
    'SOLVER_LAMBDA': 4.0,
    'LINE_SEARCH_BUDGET': 10,
    'DIAG_CLAMP': 1e-4,
    'QUASI_MINIMAL_SCALE': 1.0,
}


def numerics():
    """DERIVATIVE_FREE settings over the built-in defaults"""
    return {**DEFAULTS, **getattr(settings, 'DERIVATIVE_FREE', {})}


def output_dir():
    return Path(getattr(settings, 'DFO_OUTPUT_DIR', Path.cwd() / 'results'))


def solver_config(kind, **overrides):
    values = numerics()
    options = {
        'kind': kind,
        'budget': int(values['SOLVER_BUDGET']),
        'h0': float(values['SOLVER_H0']),
        'h_min': float(values['SOLVER_H_MIN']),
        'shrink': float(values['SOLVER_LAMBDA']),
        'line_search_budget': int(values['LINE_SEARCH_BUDGET']),
        'diag_clamp': float(values['DIAG_CLAMP']),
        'epsilon_scale': float(values['QUASI_MINIMAL_SCALE']),
    }
    options.update({key: value for key, value in overrides.items() if value is not None})
    return SolverConfig(**options)
