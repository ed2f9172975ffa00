import math

import numpy as np
from django.test import SimpleTestCase
from django.urls import reverse
from numpy.testing import assert_allclose
from rest_framework import status
from rest_framework.test import APITestCase

from derivatives.bases import BasisKind
from derivatives.exceptions import (
    BudgetExhausted,
    ConfigurationError,
    EvaluationError,
    UnknownProblemError,
)

from .fbpcg import (
    STOP_BUDGET,
    SolverConfig,
    is_quasi_minimal,
    line_search,
    pcg_beta,
    preconditioner,
    solve,
)
from .problems import Evaluator, Objective, get_problem, quadratic, registry


def central_gradient(objective, x, step=1e-6):
    x = np.asarray(x, dtype=float)
    gradient = np.zeros_like(x)
    for i in range(x.size):
        offset = np.zeros_like(x)
        offset[i] = step * max(1.0, abs(x[i]))
        gradient[i] = (objective.evaluate(x + offset) - objective.evaluate(x - offset)) / (2 * offset[i])
    return gradient


class ProblemTests(SimpleTestCase):

    def test_registry_holds_every_problem(self):
        problems = registry()
        self.assertEqual(len(problems), 9)
        self.assertEqual(problems['broyden_tridiagonal'].n, 20)
        self.assertEqual(problems['helical_valley'].n, 3)

    def test_unknown_problem(self):
        with self.assertRaises(UnknownProblemError) as ctx:
            get_problem('himmelblau')
        self.assertIn('himmelblau', str(ctx.exception))

    def test_analytic_gradients_match_central_differences(self):
        rng = np.random.default_rng(5)
        for name, objective in registry().items():
            x = objective.start() + 0.1 * rng.standard_normal(objective.n)
            expected = central_gradient(objective, x)
            with self.subTest(problem=name):
                assert_allclose(
                    objective.analytic_gradient(x), expected,
                    rtol=1e-5, atol=1e-5 * max(1.0, np.linalg.norm(expected)),
                )

    def test_known_minimizers(self):
        for name in ('rosenbrock', 'freudenstein_roth', 'beale', 'helical_valley', 'powell_singular', 'woods',
                     'brown_almost_linear'):
            objective = get_problem(name)
            with self.subTest(problem=name):
                self.assertAlmostEqual(objective.evaluate(np.array(objective.minimizer)), 0.0, places=12)

    def test_standard_starts(self):
        self.assertAlmostEqual(get_problem('rosenbrock').evaluate(get_problem('rosenbrock').start()), 24.2)
        self.assertAlmostEqual(get_problem('helical_valley').evaluate(np.array([-1.0, 0.0, 0.0])), 2500.0)

    def test_rosenbrock_derivatives_at_the_reference_points(self):
        objective = get_problem('rosenbrock')
        x = np.array([1.1, 1.1 ** 2 + 1e-5])
        assert_allclose(objective.analytic_gradient(x), [0.1956, 0.002], rtol=1e-6)
        assert_allclose(objective.analytic_diag_hessian(x), [969.996, 200.0], rtol=1e-9)
        x = np.array([0.9, 0.81])
        assert_allclose(objective.analytic_gradient(x), [-0.2, 0.0], atol=1e-12)
        assert_allclose(objective.analytic_diag_hessian(x), [650.0, 200.0], rtol=1e-12)

    def test_rosenbrock_hessian(self):
        objective = get_problem('rosenbrock')
        assert_allclose(objective.analytic_hessian(np.array([1.0, 1.0])), [[802.0, -400.0], [-400.0, 200.0]])

    def test_quadratic_factory_checks_symmetry(self):
        with self.assertRaises(ConfigurationError):
            quadratic([[1.0, 2.0], [0.0, 1.0]])


class EvaluatorTests(SimpleTestCase):

    def test_counts_and_tracks_the_best_point(self):
        evaluator = Evaluator(quadratic(np.eye(2)), budget=3)
        evaluator([1.0, 1.0])
        evaluator([0.5, 0.0])
        evaluator([2.0, 0.0])
        self.assertEqual(evaluator.nf, 3)
        self.assertEqual(evaluator.best_f, 0.125)
        assert_allclose(evaluator.best_x, [0.5, 0.0])
        self.assertTrue(evaluator.exhausted)

    def test_budget_is_enforced(self):
        evaluator = Evaluator(quadratic(np.eye(2)), budget=1)
        evaluator([0.0, 0.0])
        with self.assertRaises(BudgetExhausted):
            evaluator([1.0, 0.0])
        self.assertEqual(evaluator.nf, 1)

    def test_failed_calls_are_counted(self):
        def broken(x):
            raise ZeroDivisionError('division by zero')

        objective = Objective(name='broken', n=2, evaluate=broken, standard_start=(0.0, 0.0))
        evaluator = Evaluator(objective)
        with self.assertRaises(EvaluationError) as ctx:
            evaluator([1.0, 2.0])
        self.assertEqual(evaluator.nf, 1)
        self.assertEqual(ctx.exception.point, (1.0, 2.0))
        self.assertIsInstance(ctx.exception.__cause__, ZeroDivisionError)


class SolverHelperTests(SimpleTestCase):

    def test_quasi_minimality(self):
        self.assertTrue(is_quasi_minimal([1.0, 2.0], 1.5, 0.6))
        self.assertFalse(is_quasi_minimal([1.0, 2.0], 1.5, 0.4))
        with self.assertRaises(ConfigurationError):
            is_quasi_minimal([1.0], 1.0, -1.0)

    def test_preconditioner_clamps_the_diagonal(self):
        assert_allclose(preconditioner([2.0, -1.0, 0.0], clamp=1e-4), [0.5, 1e4, 1e4])

    def test_beta_is_clipped_at_zero(self):
        h_diag = np.ones(2)
        self.assertEqual(pcg_beta(np.zeros(2), np.ones(2), h_diag), 0.0)
        self.assertEqual(pcg_beta(np.array([1.0, 0.0]), np.array([0.0, 0.0]), h_diag), 0.0)
        self.assertEqual(pcg_beta(np.array([1.0, 0.0]), np.array([0.5, 0.0]), h_diag), 0.0)
        self.assertAlmostEqual(pcg_beta(np.array([1.0, 0.0]), np.array([1.0, 1.0]), np.array([2.0, 1.0])), 0.5)
        self.assertAlmostEqual(pcg_beta(np.array([1.0, 0.0]), np.array([3.0, 0.0]), h_diag), 6.0)

    def test_beta_after_an_exact_line_search(self):
        # Orthogonal successive gradients give the Fletcher-Reeves ratio
        g_old = np.array([2.0, 0.0])
        g_new = np.array([0.0, 1.0])
        self.assertAlmostEqual(pcg_beta(g_old, g_new, np.ones(2)), 0.25)
        self.assertAlmostEqual(pcg_beta(g_old, g_new, np.array([1.0, 4.0])), 1.0)

    def test_quasi_minimality_tolerance_is_configurable(self):
        self.assertAlmostEqual(SolverConfig().epsilon(0.1), 0.01)
        self.assertAlmostEqual(SolverConfig(epsilon_scale=0.5).epsilon(0.1), 0.005)
        self.assertEqual(SolverConfig(epsilon_scale=0.0).epsilon(0.1), 0.0)

    def test_line_search_finds_the_vertex_of_a_parabola(self):
        def evaluate(x):
            return float((x[0] - 3.0) ** 2)

        result = line_search(evaluate, np.zeros(1), np.ones(1), 1.0, 9.0)
        self.assertAlmostEqual(result.theta, 3.0)
        self.assertAlmostEqual(result.value, 0.0)
        self.assertEqual(result.evals, 4)

    def test_line_search_without_descent_returns_zero(self):
        def evaluate(x):
            return float(x[0] ** 2)

        result = line_search(evaluate, np.zeros(1), np.ones(1), 1.0, 0.0, budget=6)
        self.assertEqual(result.theta, 0.0)
        self.assertEqual(result.value, 0.0)
        self.assertEqual(result.evals, 6)

    def test_line_search_on_an_unbounded_ray_uses_the_budget(self):
        result = line_search(lambda x: float(-x[0]), np.zeros(1), np.ones(1), 1.0, 0.0)
        self.assertEqual(result.theta, 512.0)
        self.assertEqual(result.evals, 10)

    def test_line_search_with_zero_direction(self):
        result = line_search(lambda x: 0.0, np.zeros(2), np.zeros(2), 1.0, 5.0)
        self.assertEqual((result.theta, result.evals), (0.0, 0))

    def test_config_validation(self):
        for kwargs in ({'budget': -1}, {'shrink': 1.0}, {'h0': 0.0}, {'cmpb_diag': 'lu'}, {'kind': 'hex'},
                       {'epsilon_scale': -1.0}):
            with self.subTest(**kwargs), self.assertRaises(ConfigurationError):
                SolverConfig(**kwargs)


class SolverTests(SimpleTestCase):

    def test_zero_budget_returns_the_start(self):
        result = solve(get_problem('rosenbrock'), SolverConfig(budget=0))
        self.assertEqual(result.nf, 0)
        self.assertTrue(math.isnan(result.fmin))
        assert_allclose(result.x_min, [-1.2, 1.0])
        self.assertEqual(result.stop_reason, STOP_BUDGET)

    def test_budget_is_never_exceeded(self):
        for budget in (1, 7, 60):
            result = solve(get_problem('woods'), SolverConfig(budget=budget))
            with self.subTest(budget=budget):
                self.assertLessEqual(result.nf, budget)

    def test_diagonal_quadratic_is_minimised(self):
        objective = quadratic(np.diag([1.0, 2.0, 3.0, 4.0, 5.0]), start=np.ones(5))
        for kind in (BasisKind.CB, BasisKind.RMPB):
            result = solve(objective, SolverConfig(kind=kind))
            with self.subTest(kind=kind):
                self.assertLessEqual(result.fmin, 1e-10)
                self.assertLessEqual(result.nf, 1300)

    def test_rosenbrock_is_solved(self):
        objective = get_problem('rosenbrock')
        for kind in (BasisKind.CB, BasisKind.CMPB, BasisKind.RMPB):
            result = solve(objective, SolverConfig(kind=kind))
            with self.subTest(kind=kind):
                self.assertLessEqual(result.fmin, 1e-8)
                self.assertLessEqual(result.nf, 1300)
                assert_allclose(result.x_min, [1.0, 1.0], atol=1e-3)

    def test_trace_invariants(self):
        objective = get_problem('rosenbrock')
        for kind in (BasisKind.CB, BasisKind.CMPB, BasisKind.RMPB):
            config = SolverConfig(kind=kind)
            trace = solve(objective, config).trace
            with self.subTest(kind=kind):
                for before, after in zip(trace, trace[1:]):
                    expected = before['h'] / config.shrink if before['quasi_minimal'] else before['h']
                    self.assertEqual(after['h'], expected)
                    self.assertLessEqual(after['f_best'], before['f_best'])
                for entry in trace:
                    self.assertGreaterEqual(entry['beta'], 0.0)
                    self.assertGreater(entry['h_diag_min'], 0.0)
                    self.assertLessEqual(entry['h_diag_max'], 1e4)
                self.assertTrue(any(entry['beta'] > 0 for entry in trace))

    def test_trace_records_the_preconditioner_reset(self):
        result = solve(get_problem('rosenbrock'), SolverConfig(budget=200))
        self.assertFalse(result.trace[0]['reset'])
        self.assertTrue(result.trace[1]['reset'])
        self.assertEqual(result.trace[1]['j'], 5)
        self.assertEqual([entry['iteration'] for entry in result.trace[:3]], [1, 2, 3])

    def test_best_value_never_increases(self):
        result = solve(get_problem('beale'), SolverConfig(budget=300))
        best = [entry['f_best'] for entry in result.trace]
        self.assertEqual(best, sorted(best, reverse=True))

    def test_evaluation_failure_carries_the_partial_result(self):
        def evaluate(x):
            if x[0] > 1.5:
                raise ValueError('outside the domain')
            return float(x @ x)

        objective = Objective(name='bounded', n=2, evaluate=evaluate, standard_start=(1.0, 1.0))
        with self.assertRaises(EvaluationError) as ctx:
            solve(objective, SolverConfig(h0=1.0))
        partial = ctx.exception.partial_result
        self.assertIsNotNone(partial)
        self.assertEqual(partial.nf, 2)
        self.assertEqual(partial.fmin, 2.0)


class ProblemAPITests(APITestCase):

    def test_list_problems(self):
        response = self.client.get(reverse('optimization:problem-list'))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data), 9)
        self.assertEqual(response.data[0]['name'], 'beale')
        self.assertEqual(response.data[-1]['name'], 'broyden_tridiagonal')

    def test_retrieve_problem(self):
        response = self.client.get(reverse('optimization:problem-detail', args=['rosenbrock']))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['standard_start'], [-1.2, 1.0])
        self.assertAlmostEqual(response.data['start_value'], 24.2)
        self.assertTrue(response.data['has_hessian'])

    def test_unknown_problem_is_404(self):
        response = self.client.get(reverse('optimization:problem-detail', args=['nope']))
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)
