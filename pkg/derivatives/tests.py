import math
import time

import numpy as np
from django.test import SimpleTestCase
from django.urls import reverse
from numpy.testing import assert_allclose
from rest_framework import status
from rest_framework.test import APITestCase

from optimization.problems import Evaluator, cubic, get_problem, quadratic

from .bases import (
    BASIS_ORDER,
    BasisKind,
    apply_regular_inverse,
    apply_regular_w_inverse,
    basis_constants,
    direction,
    directions,
    verify_appendix_identities,
)
from .bounds import (
    ErrorBoundInput,
    estimate_lipschitz,
    gradient_bound,
    kappa,
    observed_order,
)
from .estimators import (
    CMPB_DIAG_CENTRAL,
    PRIMED_BLOCK_IGNORED,
    DerivativeEstimate,
    corollary_diagonal,
    corollary_gradient,
    estimate,
    estimate_from_samples,
    expected_samples,
)
from .exceptions import ConfigurationError, ContractViolation, EvaluationError, UnsupportedOperation
from .oracle import assemble, assemble_directions, kappa_from_pseudoinverse, solve_linear, solve_quadratic
from .sampling import (
    ModelOrder,
    SampleSet,
    SamplingScheme,
    difference_vectors,
    evaluate_samples,
    model_residual,
    sample_points,
)

TABLE3_POINT = np.array([1.1, 1.1 ** 2 + 1e-5])


class BasisConstantsTests(SimpleTestCase):

    def test_two_dimensional_constants(self):
        c = basis_constants(2)
        self.assertAlmostEqual(c.alpha, math.sqrt(1.5))
        self.assertAlmostEqual(c.gamma, (1 - 1 / math.sqrt(3)) / 2)
        self.assertAlmostEqual(c.mu, c.alpha ** 2 * (1 - 2 * c.gamma))
        self.assertAlmostEqual(c.omega, c.gamma ** 2 / (1 - 2 * c.gamma))

    def test_rejects_small_or_non_integer_dimension(self):
        for n in (1, 0, -3, 2.0, True, '3'):
            with self.subTest(n=n), self.assertRaises(ConfigurationError):
                basis_constants(n)

    def test_closed_form_rewrites_hold(self):
        for n in range(2, 1001):
            with self.subTest(n=n):
                self.assertLess(verify_appendix_identities(n), 1e-12)


class DirectionTests(SimpleTestCase):

    def test_sizes(self):
        for kind in BASIS_ORDER:
            with self.subTest(kind=kind):
                U = assemble_directions(kind, 4)
                self.assertEqual(U.shape, (4, kind.size(4)))

    def test_coordinate_directions(self):
        c = basis_constants(3)
        assert_allclose(direction(BasisKind.CB, c, 2), [0.0, 1.0, 0.0])
        assert_allclose(direction(BasisKind.CMPB, c, 4), [-1.0, -1.0, -1.0])

    def test_every_direction_has_unit_length_except_cmpb_extra(self):
        for n in (2, 3, 7):
            c = basis_constants(n)
            for kind in BASIS_ORDER:
                for j, u in enumerate(directions(kind, c), start=1):
                    if kind == BasisKind.CMPB and j == n + 1:
                        continue
                    with self.subTest(n=n, kind=kind, j=j):
                        self.assertAlmostEqual(np.linalg.norm(u), 1.0, places=12)

    def test_regular_minimal_positive_basis_is_a_regular_simplex(self):
        for n in (2, 3, 6):
            with self.subTest(n=n):
                U = assemble_directions(BasisKind.RMPB, n)
                gram = U.T @ U
                expected = (1 + 1 / n) * np.eye(n + 1) - np.full((n + 1, n + 1), 1 / n)
                assert_allclose(gram, expected, atol=1e-12)
                assert_allclose(U.sum(axis=1), np.zeros(n), atol=1e-12)

    def test_minimal_positive_bases_sum_to_zero(self):
        U = assemble_directions(BasisKind.CMPB, 5)
        assert_allclose(U.sum(axis=1), np.zeros(5))

    def test_index_is_one_based(self):
        c = basis_constants(2)
        for kind, j in ((BasisKind.CB, 0), (BasisKind.CB, 3), (BasisKind.RMPB, 4)):
            with self.subTest(kind=kind, j=j), self.assertRaises(IndexError):
                direction(kind, c, j)

    def test_parse_accepts_values_and_rejects_unknown(self):
        self.assertEqual(BasisKind.parse('RMPB'), BasisKind.RMPB)
        with self.assertRaises(ConfigurationError):
            BasisKind.parse('simplex')

    def test_fast_inverses_match_dense_solves(self):
        rng = np.random.default_rng(3)
        for n in (2, 5, 9):
            c = basis_constants(n)
            U = assemble_directions(BasisKind.RB, n)
            vector = rng.standard_normal(n)
            with self.subTest(n=n):
                assert_allclose(apply_regular_inverse(c, vector), np.linalg.solve(U.T, vector), rtol=1e-12)
                assert_allclose(
                    apply_regular_w_inverse(c, vector), np.linalg.solve((U ** 2).T, vector), rtol=1e-10,
                )


class SamplingSchemeTests(SimpleTestCase):

    def test_sample_counts(self):
        for kind in BASIS_ORDER:
            m = kind.size(3)
            self.assertEqual(SamplingScheme(kind, 3, 0.1).sample_count, 2 * m)
            self.assertEqual(SamplingScheme(kind, 3, 0.1, model='linear').sample_count, m)
            self.assertEqual(expected_samples(kind, ModelOrder.LINEAR, 3), m)

    def test_rejects_bad_radius_and_ratio(self):
        bad = (
            {'h': 0.0},
            {'h': math.inf},
            {'h': 1e-301},
            {'h': 0.1, 'eta': 1.0},
            {'h': 0.1, 'eta': 0.0},
            {'h': 0.1, 'eta': math.nan},
        )
        for kwargs in bad:
            with self.subTest(**kwargs), self.assertRaises(ConfigurationError):
                SamplingScheme(BasisKind.CB, 2, **kwargs)

    def test_linear_model_accepts_any_finite_eta(self):
        scheme = SamplingScheme(BasisKind.CB, 2, 0.1, eta=1.0, model='linear')
        self.assertFalse(scheme.is_quadratic)

    def test_negative_radius_is_allowed(self):
        self.assertEqual(SamplingScheme(BasisKind.RB, 2, -0.5).h, -0.5)

    def test_points_are_unprimed_then_primed(self):
        scheme = SamplingScheme(BasisKind.CB, 2, 0.5, eta=-2.0)
        points = sample_points([1.0, 1.0], scheme)
        assert_allclose(points, [[1.5, 1.0], [1.0, 1.5], [0.0, 1.0], [1.0, 0.0]])

    def test_point_length_must_match(self):
        with self.assertRaises(ContractViolation):
            sample_points([1.0, 2.0, 3.0], SamplingScheme(BasisKind.CB, 2, 0.5))

    def test_sample_set_contract(self):
        scheme = SamplingScheme(BasisKind.RB, 2, 0.5)
        with self.assertRaises(ContractViolation):
            SampleSet(f=[1.0, 2.0], f0=0.0).check(scheme)
        with self.assertRaises(ContractViolation):
            SampleSet(f=[1.0, 2.0, 3.0], f0=0.0, fprime=[1.0, 2.0]).check(scheme)


class EvaluationCountTests(SimpleTestCase):

    def setUp(self):
        self.objective = get_problem('rosenbrock')

    def test_quadratic_model_evaluates_centre_once(self):
        evaluator = Evaluator(self.objective)
        result = estimate(evaluator, TABLE3_POINT, SamplingScheme(BasisKind.CB, 2, 1e-3))
        self.assertEqual(result.evals_used, 4)
        self.assertTrue(result.center_evaluated)
        self.assertEqual(result.total_evaluations, 5)
        self.assertEqual(evaluator.nf, 5)

    def test_known_centre_is_reused(self):
        evaluator = Evaluator(self.objective)
        fx = self.objective.evaluate(TABLE3_POINT)
        result = estimate(evaluator, TABLE3_POINT, SamplingScheme(BasisKind.RMPB, 2, 1e-3), fx=fx)
        self.assertEqual(evaluator.nf, 6)
        self.assertFalse(result.center_evaluated)
        self.assertEqual(result.fx, fx)

    def test_linear_minimal_positive_skips_centre(self):
        evaluator = Evaluator(self.objective)
        result = estimate(evaluator, TABLE3_POINT, SamplingScheme(BasisKind.CMPB, 2, 1e-3, model='linear'))
        self.assertEqual(evaluator.nf, 3)
        self.assertEqual(result.total_evaluations, 3)
        self.assertIsNone(result.d)

    def test_linear_coordinate_needs_centre(self):
        evaluator = Evaluator(self.objective)
        estimate(evaluator, TABLE3_POINT, SamplingScheme(BasisKind.CB, 2, 1e-3, model='linear'))
        self.assertEqual(evaluator.nf, 3)


class EstimatorTests(SimpleTestCase):

    def sampled(self, objective, x, scheme):
        samples, _ = evaluate_samples(objective.evaluate, x, scheme)
        return samples

    def test_diagonal_quadratics_are_recovered_exactly(self):
        rng = np.random.default_rng(11)
        for n in (2, 3, 6):
            A = np.diag(rng.uniform(0.5, 4.0, n))
            b = rng.standard_normal(n)
            objective = quadratic(A, b, c=1.5)
            x = rng.standard_normal(n)
            for kind in BASIS_ORDER:
                for eta in (-1.0, -0.5, 2.0):
                    scheme = SamplingScheme(kind, n, 0.3, eta=eta)
                    result = estimate_from_samples(self.sampled(objective, x, scheme), scheme)
                    with self.subTest(n=n, kind=kind, eta=eta):
                        assert_allclose(result.g, objective.analytic_gradient(x), rtol=1e-9, atol=1e-9)
                        assert_allclose(result.d, np.diag(A), rtol=1e-8, atol=1e-8)

    def test_linear_functions_are_recovered_exactly_by_the_linear_model(self):
        gradient = np.array([2.0, -1.0, 0.5])
        objective = quadratic(np.zeros((3, 3)), gradient, c=4.0)
        x = np.array([0.3, -0.2, 1.0])
        for kind in BASIS_ORDER:
            scheme = SamplingScheme(kind, 3, 0.25, model='linear')
            result = estimate_from_samples(self.sampled(objective, x, scheme), scheme)
            with self.subTest(kind=kind):
                assert_allclose(result.g, gradient, rtol=1e-12)
                self.assertIsNone(result.d)

    def test_model_interpolates_diagonal_quadratic(self):
        objective = quadratic(np.diag([1.0, 3.0]), [0.5, -1.0])
        x = np.array([0.2, 0.7])
        for kind in BASIS_ORDER:
            scheme = SamplingScheme(kind, 2, 0.4)
            samples = self.sampled(objective, x, scheme)
            result = estimate_from_samples(samples, scheme)
            with self.subTest(kind=kind):
                assert_allclose(model_residual(result.g, result.d, samples, scheme), 0.0, atol=1e-12)

    def test_closed_forms_match_the_dense_least_squares_solution(self):
        objective = get_problem('rosenbrock')
        for n_kind in BASIS_ORDER:
            for eta in (-1.0, -0.5, 3.0):
                scheme = SamplingScheme(n_kind, 2, 0.1, eta=eta)
                samples = self.sampled(objective, TABLE3_POINT, scheme)
                result = estimate_from_samples(samples, scheme)
                g, d = solve_quadratic(assemble(scheme, samples))
                with self.subTest(kind=n_kind, eta=eta):
                    assert_allclose(result.g, g, rtol=1e-8, atol=1e-10)
                    assert_allclose(result.d, d, rtol=1e-8, atol=1e-8)

    def test_linear_closed_forms_match_the_dense_solution(self):
        objective = get_problem('rosenbrock')
        for kind in BASIS_ORDER:
            scheme = SamplingScheme(kind, 2, 0.1, model='linear')
            samples = self.sampled(objective, TABLE3_POINT, scheme)
            if samples.f0 is None:
                samples = SampleSet(f=samples.f, f0=objective.evaluate(TABLE3_POINT))
            result = estimate_from_samples(samples, scheme)
            with self.subTest(kind=kind):
                assert_allclose(result.g, solve_linear(assemble(scheme, samples)), rtol=1e-8, atol=1e-10)

    def test_central_forms_agree_with_the_general_formulas(self):
        objective = get_problem('rosenbrock')
        for kind in BASIS_ORDER:
            scheme = SamplingScheme(kind, 2, 0.5)
            samples = self.sampled(objective, TABLE3_POINT, scheme)
            result = estimate_from_samples(samples, scheme)
            with self.subTest(kind=kind):
                assert_allclose(corollary_gradient(samples, scheme.constants, scheme), result.g, rtol=1e-12, atol=1e-11)
                assert_allclose(corollary_diagonal(samples, scheme.constants, scheme), result.d, rtol=1e-12, atol=1e-11)

    def test_central_forms_need_eta_minus_one(self):
        scheme = SamplingScheme(BasisKind.CB, 2, 0.5, eta=-0.5)
        samples = SampleSet(f=[1.0, 1.0], f0=1.0, fprime=[1.0, 1.0])
        with self.assertRaises(ConfigurationError):
            corollary_gradient(samples, scheme.constants, scheme)

    def test_cmpb_central_diagonal_matches_coordinate_basis(self):
        objective = get_problem('rosenbrock')
        cmpb = SamplingScheme(BasisKind.CMPB, 2, 1e-3)
        cb = SamplingScheme(BasisKind.CB, 2, 1e-3)
        central = estimate(objective.evaluate, TABLE3_POINT, cmpb, cmpb_diag=CMPB_DIAG_CENTRAL)
        coordinate = estimate(objective.evaluate, TABLE3_POINT, cb)
        assert_allclose(central.d, coordinate.d, rtol=1e-12)

    def test_primed_block_is_ignored_by_the_linear_model(self):
        scheme = SamplingScheme(BasisKind.CB, 2, 0.5, model='linear')
        samples = SampleSet(f=[2.0, 3.0], f0=1.0, fprime=[0.0, 0.0])
        with self.assertLogs('derivatives.estimators', level='WARNING'):
            result = estimate_from_samples(samples, scheme)
        self.assertIn(PRIMED_BLOCK_IGNORED, result.warnings)
        assert_allclose(result.g, [2.0, 4.0])

    def test_difference_vectors_split_extras_for_minimal_positive_bases(self):
        scheme = SamplingScheme(BasisKind.CMPB, 2, 0.5)
        diffs = difference_vectors(SampleSet(f=[1.0, 2.0, 3.0], f0=0.0, fprime=[1.0, 0.0, 1.0]), scheme)
        self.assertEqual(diffs.y.shape, (2,))
        self.assertTrue(diffs.has_extras)
        self.assertAlmostEqual(diffs.y_extra, 1.0)
        self.assertAlmostEqual(diffs.z_extra, 2.0)

    def test_diagonal_presence_follows_model(self):
        scheme = SamplingScheme(BasisKind.CB, 2, 0.5)
        with self.assertRaises(ContractViolation):
            DerivativeEstimate(g=np.zeros(2), d=None, scheme=scheme, evals_used=4)

    def test_failures_in_the_objective_become_evaluation_errors(self):
        def broken(x):
            raise ValueError('log of a negative number')

        with self.assertRaises(EvaluationError) as ctx:
            estimate(broken, [0.0, 0.0], SamplingScheme(BasisKind.CB, 2, 0.5))
        self.assertEqual(ctx.exception.point, (0.0, 0.0))


class BoundTests(SimpleTestCase):

    def test_kappa_table(self):
        self.assertAlmostEqual(kappa(BasisKind.CB, 'quadratic', 4), 2.0)
        self.assertAlmostEqual(kappa(BasisKind.RB, 'quadratic', 4), 4.0)
        self.assertAlmostEqual(kappa(BasisKind.CMPB, 'linear', 4), math.sqrt(5))
        self.assertAlmostEqual(kappa(BasisKind.RMPB, 'linear', 4), 2.0)

    def test_kappa_matches_the_pseudoinverse(self):
        for n in range(2, 7):
            for kind in BASIS_ORDER:
                with self.subTest(n=n, kind=kind):
                    self.assertAlmostEqual(kappa(kind, 'quadratic', n), kappa_from_pseudoinverse(kind, n), places=10)

    def test_override_replaces_the_table(self):
        inp = ErrorBoundInput(BasisKind.RB, 'quadratic', 4, 0.1, 6.0, kappa_override=2.0)
        self.assertAlmostEqual(gradient_bound(inp), 6.0 * 0.01 * 2.0 / 6)

    def test_linear_bound(self):
        inp = ErrorBoundInput(BasisKind.CB, 'linear', 4, -0.1, 3.0)
        self.assertAlmostEqual(gradient_bound(inp), 0.5 * 3.0 * 0.1 * 2.0)

    def test_negative_lipschitz_is_rejected(self):
        with self.assertRaises(ConfigurationError):
            ErrorBoundInput(BasisKind.CB, 'quadratic', 2, 0.1, -1.0)

    def test_cubic_error_stays_below_the_bound(self):
        objective = cubic(2)
        x = np.array([1.0, -0.5])
        for kind in BASIS_ORDER:
            for h in (1e-1, 1e-2):
                scheme = SamplingScheme(kind, 2, h)
                result = estimate(objective.evaluate, x, scheme)
                eps_g, _ = result.errors_against(objective.analytic_gradient(x))
                bound = gradient_bound(ErrorBoundInput(kind, 'quadratic', 2, h, 6.0))
                with self.subTest(kind=kind, h=h):
                    self.assertLessEqual(eps_g, bound * (1 + 1e-9))

    def test_observed_order_of_exact_power_law(self):
        pairs = [(h, 3 * h ** 2) for h in (1e-1, 1e-2, 1e-3, 1e-4)]
        fit = observed_order(pairs)
        self.assertAlmostEqual(fit.slope, 2.0, places=10)
        self.assertAlmostEqual(fit.intercept, math.log(3), places=8)

    def test_observed_order_excludes_nonpositive_errors(self):
        fit = observed_order([(1e-1, 1e-2), (1e-2, 0.0), (1e-3, 1e-6)])
        self.assertEqual(len(fit.excluded), 1)
        self.assertAlmostEqual(fit.slope, 2.0, places=10)

    def test_observed_order_input_checks(self):
        for pairs in (
            [(1e-1, 1.0), (1e-2, 1.0)],
            [(1e-2, 1.0), (1e-1, 1.0), (1e-3, 1.0)],
            [(1e-1, 0.0), (1e-2, 0.0), (1e-3, 1.0)],
        ):
            with self.subTest(pairs=pairs), self.assertRaises(ConfigurationError):
                observed_order(pairs)

    def test_sampled_lipschitz_constant(self):
        self.assertAlmostEqual(estimate_lipschitz(cubic(2), [1.0, 0.0], 0.1), 6.0, places=10)
        self.assertEqual(estimate_lipschitz(quadratic(np.eye(2)), [1.0, 0.0], 0.1), 0.0)

    def test_sampled_lipschitz_is_reproducible(self):
        objective = get_problem('rosenbrock')
        first = estimate_lipschitz(objective, TABLE3_POINT, 1e-3, trials=50, seed=4)
        second = estimate_lipschitz(objective, TABLE3_POINT, 1e-3, trials=50, seed=4)
        self.assertEqual(first, second)

    def test_lipschitz_needs_a_hessian(self):
        with self.assertRaises(UnsupportedOperation):
            estimate_lipschitz(get_problem('beale'), [1.0, 1.0], 0.1)


class ConstantsAPITests(APITestCase):

    def test_constants_for_dimension_two(self):
        response = self.client.get(reverse('derivatives:constants', args=[2]))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertAlmostEqual(response.data['alpha'], math.sqrt(1.5))
        self.assertAlmostEqual(response.data['kappa']['rb'], 2.0)
        self.assertLess(response.data['identity_deviation'], 1e-12)

    def test_dimension_one_is_rejected(self):
        response = self.client.get(reverse('derivatives:constants', args=[1]))
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('error', response.data)


class DenseSystemTests(SimpleTestCase):

    def test_two_dimensional_regular_minimal_positive_basis(self):
        U = assemble_directions(BasisKind.RMPB, 2)
        assert_allclose(U, [[0.9659, -0.2588, -0.7071], [-0.2588, 0.9659, -0.7071]], atol=1e-4)

    def test_squared_directions(self):
        c = basis_constants(2)
        system = assemble(SamplingScheme(BasisKind.RB, 2, 0.1))
        assert_allclose(system.W, c.mu * (np.eye(2) + c.omega * np.ones((2, 2))), rtol=1e-12)
        system = assemble(SamplingScheme(BasisKind.RMPB, 2, 0.1))
        assert_allclose(system.W[:, 2], [0.5, 0.5])
        system = assemble(SamplingScheme(BasisKind.CB, 3, 0.1))
        assert_allclose(system.W, np.eye(3))

    def test_dense_solution_needs_both_blocks(self):
        with self.assertRaises(ContractViolation):
            solve_quadratic(assemble(SamplingScheme(BasisKind.CB, 2, 0.1)))


def smooth_function(rng, n):
    M = rng.standard_normal((n, n)) / n
    A = (M + M.T) / 2
    b = rng.standard_normal(n)
    c = rng.uniform(0.5, 1.5, n)

    def evaluate(x):
        return float(0.5 * x @ A @ x + b @ x + np.sum(np.cos(c * x)))

    return evaluate


class StructureTests(SimpleTestCase):

    def test_regular_basis_eigenvalues(self):
        for n in (2, 3, 10, 50, 200):
            c = basis_constants(n)
            eigenvalues = np.linalg.eigvalsh(assemble_directions(BasisKind.RB, n))
            with self.subTest(n=n):
                self.assertAlmostEqual(eigenvalues[0], 1 / math.sqrt(n), places=10)
                assert_allclose(eigenvalues[1:], c.alpha, atol=1e-10)

    def test_regular_simplex_gram_matrices(self):
        for n in (2, 5, 40, 200):
            c = basis_constants(n)
            U = assemble_directions(BasisKind.RMPB, n)
            W = U ** 2
            identity = np.eye(n)
            ones = np.ones((n, n))
            with self.subTest(n=n):
                assert_allclose(U @ U.T, c.alpha ** 2 * identity, atol=1e-12)
                assert_allclose(W @ W.T, c.mu ** 2 * (identity + c.sigma * ones), atol=1e-12)
                assert_allclose(np.linalg.norm(U, axis=0), 1.0, atol=1e-12)
                gram = U.T @ U
                off_diagonal = gram[~np.eye(n + 1, dtype=bool)]
                assert_allclose(off_diagonal, -1 / n, atol=1e-12)

    def test_coordinate_minimal_positive_gram_inverse(self):
        for n in (2, 7, 100):
            U = assemble_directions(BasisKind.CMPB, n)
            ones = np.ones((n, n))
            gram = U @ U.T
            with self.subTest(n=n):
                assert_allclose(gram, np.eye(n) + ones, atol=1e-12)
                assert_allclose(np.linalg.inv(gram), np.eye(n) - ones / (n + 1), atol=1e-12)


class OracleEquivalenceTests(SimpleTestCase):

    def assert_matches(self, actual, expected):
        scale = max(1.0, float(np.abs(expected).max()))
        assert_allclose(actual, expected, rtol=1e-9, atol=1e-9 * scale)

    def test_quadratic_model(self):
        rng = np.random.default_rng(17)
        for n in (2, 3, 5, 10, 50):
            for trial in range(10):
                evaluate = smooth_function(rng, n)
                x = 0.5 * rng.standard_normal(n)
                h = rng.uniform(0.05, 0.5)
                eta = rng.choice([-1.0, -0.5, 0.5, 2.0])
                for kind in BASIS_ORDER:
                    scheme = SamplingScheme(kind, n, h, eta=eta)
                    samples, _ = evaluate_samples(evaluate, x, scheme)
                    result = estimate_from_samples(samples, scheme)
                    g, d = solve_quadratic(assemble(scheme, samples))
                    with self.subTest(n=n, trial=trial, kind=kind):
                        self.assert_matches(result.g, g)
                        self.assert_matches(result.d, d)

    def test_linear_model(self):
        rng = np.random.default_rng(19)
        for n in (2, 3, 5, 10, 50):
            for trial in range(10):
                evaluate = smooth_function(rng, n)
                x = 0.5 * rng.standard_normal(n)
                h = rng.uniform(0.05, 0.5)
                for kind in BASIS_ORDER:
                    scheme = SamplingScheme(kind, n, h, model='linear')
                    samples, _ = evaluate_samples(evaluate, x, scheme, fx=evaluate(x))
                    result = estimate_from_samples(samples, scheme)
                    with self.subTest(n=n, trial=trial, kind=kind):
                        self.assert_matches(result.g, solve_linear(assemble(scheme, samples)))


class QuadraticExactnessTests(SimpleTestCase):

    def test_full_quadratics(self):
        rng = np.random.default_rng(23)
        for n in (2, 5, 12, 20):
            M = rng.standard_normal((n, n))
            A = M + M.T
            b = rng.standard_normal(n)
            objective = quadratic(A, b, c=-0.7)
            x = rng.standard_normal(n)
            gradient = A @ x + b
            for eta in (-1.0, 0.5, 2.0):
                for kind in BASIS_ORDER:
                    scheme = SamplingScheme(kind, n, 0.3, eta=eta)
                    samples, _ = evaluate_samples(objective.evaluate, x, scheme)
                    result = estimate_from_samples(samples, scheme)
                    with self.subTest(n=n, eta=eta, kind=kind):
                        assert_allclose(result.g, gradient, rtol=1e-8, atol=1e-8 * np.abs(gradient).max())
                        if kind == BasisKind.CB:
                            assert_allclose(result.d, np.diag(A), rtol=1e-8, atol=1e-8 * np.abs(A).max())

    def test_diagonals_differ_by_a_constant_shift(self):
        objective = get_problem('rosenbrock')
        pairs = ((BasisKind.RB, BasisKind.RMPB), (BasisKind.CB, BasisKind.CMPB))
        for eta in (-1.0, 2.0):
            for basic, minimal in pairs:
                scheme = SamplingScheme(minimal, 2, 1e-3, eta=eta)
                samples, _ = evaluate_samples(objective.evaluate, TABLE3_POINT, scheme)
                shared = SampleSet(f=samples.f[:2], f0=samples.f0, fprime=samples.fprime[:2])
                basic_scheme = SamplingScheme(basic, 2, 1e-3, eta=eta)
                difference = (
                    estimate_from_samples(shared, basic_scheme).d - estimate_from_samples(samples, scheme).d
                )
                with self.subTest(eta=eta, basis=basic):
                    self.assertLessEqual(np.ptp(difference), 1e-8 * np.abs(difference).max() + 1e-8)


class LargeDimensionTests(SimpleTestCase):

    def test_regular_minimal_positive_estimate_at_a_million_variables(self):
        n = 10 ** 6
        h = 0.1
        rng = np.random.default_rng(29)
        a = rng.uniform(1.0, 2.0, n)
        b = rng.standard_normal(n)
        c = basis_constants(n)
        # f(x) = 1/2 sum a_i x_i^2 + b^T x sampled around x = 0
        slopes = np.append(c.alpha * (b - c.gamma * b.sum()), -b.sum() / math.sqrt(n))
        curvatures = np.append(c.alpha ** 2 * (a * (1 - 2 * c.gamma) + c.gamma ** 2 * a.sum()), a.sum() / n)
        samples = SampleSet(
            f=h * slopes + 0.5 * h ** 2 * curvatures,
            f0=0.0,
            fprime=-h * slopes + 0.5 * h ** 2 * curvatures,
        )
        scheme = SamplingScheme(BasisKind.RMPB, n, h)

        started = time.perf_counter()
        result = estimate_from_samples(samples, scheme)
        elapsed = time.perf_counter() - started

        self.assertLess(elapsed, 0.5)
        assert_allclose(result.g, b, atol=1e-6)
        assert_allclose(result.d, a, atol=1e-6)
