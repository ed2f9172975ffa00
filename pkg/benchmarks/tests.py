import json
import math
import tempfile
from dataclasses import replace
from io import StringIO
from pathlib import Path
from unittest import mock

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, override_settings
from django.urls import reverse
from rest_framework import status
from rest_framework.test import APITestCase

from derivatives.bases import BasisKind
from derivatives.sampling import ModelOrder
from optimization.problems import Objective, get_problem

from .conf import solver_config
from .management.commands._base import EXIT_EVALUATION, EXIT_TOLERANCE, EXIT_USAGE
from .models import BenchmarkRun, ResultRow
from .reporting import CSV_FIELDS, render_csv, render_json, render_text
from .serializers import EstimateSpecSerializer, SweepSpecSerializer
from .suites import (
    REFERENCE_CASES,
    SOLVER_TARGET,
    SOLVER_TARGET_BASES,
    SUITE_TABLE3,
    SUITE_TABLE4,
    run_reference_case,
    run_solver_suite,
    run_sweep,
)

CSV_HEADER = 'problem,basis,model,h,eta,nf,eps_g,eps_d,fmin,gnorm,itns,qmfs\r\n'


def broken_problem():
    def evaluate(x):
        raise FloatingPointError('overflow')

    return Objective(name='broken', n=2, evaluate=evaluate, standard_start=(0.0, 0.0))


def failing_reference():
    case = REFERENCE_CASES[SUITE_TABLE3]
    return replace(case, expected={kind: (1.0, 1.0) for kind in case.expected})


class ReportingTests(SimpleTestCase):

    def setUp(self):
        self.row = {
            'problem': 'rosenbrock', 'basis': 'cb', 'model': 'quadratic',
            'h': 1e-3, 'eta': -1.0, 'nf': 5, 'eps_g': 4.39e-4, 'eps_d': 1.99e-4,
        }

    def test_csv_layout(self):
        text = render_csv([self.row])
        self.assertTrue(text.startswith(CSV_HEADER))
        self.assertEqual(
            text[len(CSV_HEADER):],
            'rosenbrock,cb,quadratic,1.000000000e-03,-1.000000000e+00,5,'
            '4.390000000e-04,1.990000000e-04,,,,\r\n',
        )

    def test_columns_follow_the_schema(self):
        self.assertEqual(','.join(CSV_FIELDS) + '\r\n', CSV_HEADER)

    def test_json_writes_null_for_missing_and_non_finite(self):
        payload = json.loads(render_json([{**self.row, 'fmin': math.nan}]))
        self.assertIsNone(payload[0]['fmin'])
        self.assertIsNone(payload[0]['itns'])
        self.assertEqual(payload[0]['nf'], 5)

    def test_text_drops_empty_columns(self):
        header = render_text([self.row]).splitlines()[0].split()
        self.assertEqual(header, ['problem', 'basis', 'model', 'h', 'eta', 'nf', 'eps_g', 'eps_d'])


class ReferenceSuiteTests(SimpleTestCase):

    def test_valley_point(self):
        outcome = run_reference_case(SUITE_TABLE3)
        self.assertEqual(outcome.failures, [])
        self.assertEqual([row['basis'] for row in outcome.rows], ['cb', 'rb', 'cmpb', 'rmpb'])
        self.assertEqual([row['nf'] for row in outcome.rows], [5, 5, 7, 7])

    def test_valley_point_values(self):
        rows = {row['basis']: row for row in run_reference_case(SUITE_TABLE3).rows}
        self.assertAlmostEqual(rows['cb']['eps_g'], 4.39e-4, delta=0.02 * 4.39e-4)
        self.assertAlmostEqual(rows['rmpb']['eps_d'], 1.77e-4, delta=0.02 * 1.77e-4)
        self.assertGreater(rows['rb']['eps_d'], 1e2)
        self.assertGreater(rows['cmpb']['eps_d'], 1e2)

    def test_near_the_solution(self):
        outcome = run_reference_case(SUITE_TABLE4)
        self.assertEqual(outcome.failures, [])
        rows = {row['basis']: row for row in outcome.rows}
        self.assertLess(rows['cb']['eps_d'], 1e-5)
        self.assertLess(rows['rmpb']['eps_d'], 1e-5)

    def test_mismatch_is_reported(self):
        with mock.patch.dict(REFERENCE_CASES, {SUITE_TABLE3: failing_reference()}):
            outcome = run_reference_case(SUITE_TABLE3)
        self.assertFalse(outcome.passed)
        self.assertEqual(len(outcome.failures), 8)


class SweepTests(SimpleTestCase):

    def sweep(self, model):
        h_values = list(np.geomspace(1e-2, 1e-5, 7))
        rows = run_sweep(get_problem('rosenbrock'), [1.1, 1.21001], h_values, model=model)
        self.assertEqual(len(rows), 4 * 7 + 4)
        footers = rows[-4:]
        self.assertTrue(all(footer.get('h') is None for footer in footers))
        return {footer['basis']: footer for footer in footers}

    def test_quadratic_model_converges_at_second_order(self):
        footers = self.sweep(ModelOrder.QUADRATIC)
        self.assertEqual(list(footers), ['cb', 'rb', 'cmpb', 'rmpb'])
        for basis, footer in footers.items():
            with self.subTest(basis=basis):
                self.assertGreaterEqual(footer['eps_g'], 1.85)
                self.assertLessEqual(footer['eps_g'], 2.15)

    def test_coordinate_diagonal_converges_at_second_order(self):
        h_values = list(np.geomspace(1e-2, 1e-4, 5))
        rows = run_sweep(get_problem('rosenbrock'), [1.1, 1.21001], h_values, kinds=[BasisKind.CB])
        self.assertAlmostEqual(rows[-1]['eps_d'], 2.0, delta=0.1)

    def test_linear_model_converges_at_first_order(self):
        footers = self.sweep(ModelOrder.LINEAR)
        for basis, footer in footers.items():
            with self.subTest(basis=basis):
                self.assertGreaterEqual(footer['eps_g'], 0.85)
                self.assertLessEqual(footer['eps_g'], 1.15)
                self.assertIsNone(footer['eps_d'])


class SolverSuiteTests(SimpleTestCase):

    def test_rosenbrock_reaches_the_target(self):
        outcome = run_solver_suite({'rosenbrock': get_problem('rosenbrock')}, kinds=SOLVER_TARGET_BASES)
        self.assertEqual(outcome.failures, [])
        self.assertTrue(all(row['fmin'] <= SOLVER_TARGET for row in outcome.rows))

    def test_rows_are_sorted_and_complete(self):
        problems = {name: get_problem(name) for name in ('woods', 'beale')}
        outcome = run_solver_suite(problems, kinds=[BasisKind.CB, BasisKind.RB], budget=40)
        self.assertEqual(
            [(row['problem'], row['basis']) for row in outcome.rows],
            [('beale', 'cb'), ('beale', 'rb'), ('woods', 'cb'), ('woods', 'rb')],
        )
        self.assertTrue(all(row['nf'] <= 40 for row in outcome.rows))

    @override_settings(DERIVATIVE_FREE={'SOLVER_BUDGET': 77, 'SOLVER_LAMBDA': 2.0, 'QUASI_MINIMAL_SCALE': 0.25})
    def test_settings_feed_the_solver_config(self):
        config = solver_config(BasisKind.RMPB, h0=0.5, h_min=None)
        self.assertEqual(config.budget, 77)
        self.assertEqual(config.shrink, 2.0)
        self.assertEqual(config.h0, 0.5)
        self.assertEqual(config.h_min, 1e-10)
        self.assertEqual(config.epsilon_scale, 0.25)


class SpecSerializerTests(SimpleTestCase):

    def test_point_as_comma_string(self):
        serializer = EstimateSpecSerializer(data={'problem': 'beale', 'x': '1, 0.5', 'basis': 'rb'})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['scheme'].kind, BasisKind.RB)
        self.assertEqual(list(serializer.validated_data['point']), [1.0, 0.5])

    def test_point_must_match_the_dimension(self):
        serializer = EstimateSpecSerializer(data={'problem': 'woods', 'x': [1, 2]})
        self.assertFalse(serializer.is_valid())
        self.assertIn('x', serializer.errors)

    def test_invalid_scheme(self):
        for data in ({'h': 0}, {'eta': 1}, {'basis': 'hex'}, {'problem': 'nope'}, {'x': 'a,b'}):
            with self.subTest(**data):
                self.assertFalse(EstimateSpecSerializer(data=data).is_valid())

    def test_sweep_grid_is_descending(self):
        serializer = SweepSpecSerializer(data={'h_max': 1e-1, 'h_min': 1e-3, 'points': 3})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        np.testing.assert_allclose(serializer.validated_data['h_values'], [1e-1, 1e-2, 1e-3])
        self.assertEqual(len(serializer.validated_data['kinds']), 4)

    def test_sweep_needs_a_range(self):
        self.assertFalse(SweepSpecSerializer(data={'h_max': 1e-3, 'h_min': 1e-2}).is_valid())
        self.assertFalse(SweepSpecSerializer(data={'points': 2}).is_valid())


class CommandTests(TestCase):

    def call(self, *args):
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO())
        return out.getvalue()

    def test_estimate_csv(self):
        output = self.call('estimate', '--problem=rosenbrock', '--x=1.1,1.21001', '--basis=cb', '--h=1e-3',
                           '--format=csv')
        header, row = output.split('\r\n')[:2]
        self.assertEqual(header + '\r\n', CSV_HEADER)
        fields = dict(zip(CSV_FIELDS, row.split(',')))
        self.assertEqual(fields['nf'], '5')
        self.assertAlmostEqual(float(fields['eps_g']), 4.39e-4, delta=1e-5)

    def test_estimate_text(self):
        output = self.call('estimate', '--x=1.1,1.21001', '--basis=rmpb', '--lipschitz-trials=20')
        self.assertIn('evals    6 samples + f(x)', output)
        self.assertIn('bound', output)

    def test_sweep(self):
        output = self.call('sweep', '--basis=cb', '--x=1.1,1.21001', '--points=4', '--format=csv')
        lines = output.strip().split('\r\n')
        self.assertEqual(len(lines), 1 + 4 + 1)
        self.assertTrue(lines[-1].startswith('rosenbrock,cb,quadratic,,'))

    def test_solve(self):
        output = self.call('solve', '--problem=beale', '--budget=60', '--format=json')
        row = json.loads(output)[0]
        self.assertEqual(row['problem'], 'beale')
        self.assertLessEqual(row['nf'], 60)

    def test_solve_trace(self):
        output = self.call('solve', '--budget=60', '--trace')
        self.assertTrue(output.startswith('iteration'))
        self.assertIn('stop: ', output)

    def test_usage_errors_exit_with_one(self):
        for args in (['--basis=hex'], ['--h=0'], ['--problem=nope'], ['--x=1,2,3'], ['--bogus']):
            with self.subTest(args=args), self.assertRaises(CommandError) as ctx:
                self.call('estimate', *args)
            self.assertEqual(ctx.exception.returncode, EXIT_USAGE)

    def test_evaluation_failure_exits_with_three(self):
        with mock.patch.dict('optimization.problems.PROBLEM_FACTORIES', {'broken': broken_problem}):
            with self.assertRaises(CommandError) as ctx:
                self.call('estimate', '--problem=broken')
        self.assertEqual(ctx.exception.returncode, EXIT_EVALUATION)
        self.assertIn('objective evaluation failed', str(ctx.exception))

    def test_bench_output_is_reproducible(self):
        with tempfile.TemporaryDirectory() as directory:
            first, second = Path(directory) / 'a.csv', Path(directory) / 'b.csv'
            self.call('bench', '--suite=table3', f'--output={first}')
            self.call('bench', '--suite=table3', f'--output={second}')
            self.assertEqual(first.read_bytes(), second.read_bytes())
            self.assertEqual(first.read_bytes().count(b'\r\n'), 5)

    def test_bench_default_output_dir(self):
        with tempfile.TemporaryDirectory() as directory:
            with override_settings(DFO_OUTPUT_DIR=Path(directory)):
                self.call('bench', '--suite=table4')
            self.assertTrue((Path(directory) / 'table4.csv').exists())

    def test_bench_to_stdout_and_saved(self):
        output = self.call('bench', '--suite=table3', '--output=-', '--save', '--seed=7')
        self.assertTrue(output.startswith(CSV_HEADER))
        run = BenchmarkRun.objects.get()
        self.assertTrue(run.passed)
        self.assertEqual(run.seed, 7)
        self.assertEqual(run.rows_count, 4)

    def test_tolerance_failure_exits_with_two(self):
        with mock.patch.dict(REFERENCE_CASES, {SUITE_TABLE3: failing_reference()}):
            with self.assertRaises(CommandError) as ctx:
                self.call('bench', '--suite=table3', '--output=-', '--save')
        self.assertEqual(ctx.exception.returncode, EXIT_TOLERANCE)
        run = BenchmarkRun.objects.get()
        self.assertFalse(run.passed)
        self.assertEqual(run.exit_code, EXIT_TOLERANCE)

    def test_unknown_suite(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('bench', '--suite=table9')
        self.assertEqual(ctx.exception.returncode, EXIT_USAGE)


class BenchmarkRunModelTests(TestCase):

    def test_record_stores_rows_in_order(self):
        rows = [
            {'problem': 'rosenbrock', 'basis': 'cb', 'model': 'quadratic', 'h': 1e-3, 'eta': -1.0, 'nf': 5,
             'eps_g': 4.4e-4, 'eps_d': 2e-4},
            {'problem': 'rosenbrock', 'basis': 'cb', 'model': 'quadratic', 'eps_g': 2.0, 'eps_d': 2.0},
        ]
        run = BenchmarkRun.record('sweep', rows)
        self.assertEqual(str(run), f'sweep #{run.pk} (passed)')
        stored = list(run.rows.all())
        self.assertEqual([row.order for row in stored], [0, 1])
        self.assertFalse(stored[0].is_footer)
        self.assertTrue(stored[1].is_footer)
        self.assertEqual(render_csv(run.as_rows()), render_csv(rows))

    def test_non_finite_values_are_stored_as_null(self):
        run = BenchmarkRun.record('mgh', [{'problem': 'woods', 'basis': 'rb', 'model': 'quadratic',
                                           'fmin': math.nan, 'gnorm': math.inf, 'nf': 0}])
        row = ResultRow.objects.get(run=run)
        self.assertIsNone(row.fmin)
        self.assertIsNone(row.gnorm)


class ComputeAPITests(APITestCase):

    def test_health(self):
        response = self.client.get(reverse('benchmarks:health'))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['status'], 'healthy')

    def test_estimate(self):
        response = self.client.post(reverse('benchmarks:estimate'), {
            'problem': 'rosenbrock', 'x': [1.1, 1.21001], 'basis': 'cb', 'h': 1e-3,
        }, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['row']['nf'], 5)
        self.assertEqual(response.data['evals_used'], 4)
        self.assertTrue(response.data['center_evaluated'])
        self.assertEqual(len(response.data['d']), 2)

    def test_linear_estimate_has_no_diagonal(self):
        response = self.client.post(reverse('benchmarks:estimate'), {
            'problem': 'beale', 'basis': 'rmpb', 'model': 'linear',
        }, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertIsNone(response.data['d'])
        self.assertEqual(response.data['row']['nf'], 3)

    def test_invalid_request_body(self):
        response = self.client.post(reverse('benchmarks:estimate'), {'basis': 'hex'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('basis', response.data)

    def test_evaluation_failure(self):
        with mock.patch.dict('optimization.problems.PROBLEM_FACTORIES', {'broken': broken_problem}):
            response = self.client.post(reverse('benchmarks:estimate'), {'problem': 'broken'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_422_UNPROCESSABLE_ENTITY)

    def test_sweep(self):
        response = self.client.post(reverse('benchmarks:sweep'), {
            'x': '1.1,1.21001', 'basis': 'rmpb', 'points': 4,
        }, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(len(response.data['rows']), 5)
        self.assertIsNone(response.data['rows'][-1]['h'])

    def test_solve_with_zero_budget(self):
        response = self.client.post(reverse('benchmarks:solve'), {'budget': 0}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertIsNone(response.data['row']['fmin'])
        self.assertEqual(response.data['row']['nf'], 0)
        self.assertEqual(response.data['result']['x_min'], [-1.2, 1.0])

    def test_solve_trace(self):
        response = self.client.post(reverse('benchmarks:solve'), {'budget': 50, 'trace': True}, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertGreater(len(response.data['trace']), 0)


class BenchmarkRunAPITests(APITestCase):

    def setUp(self):
        self.run = BenchmarkRun.record('table3', [
            {'problem': 'rosenbrock', 'basis': 'cb', 'model': 'quadratic', 'h': 1e-3, 'eta': -1.0, 'nf': 5,
             'eps_g': 4.4e-4, 'eps_d': 2e-4},
        ])
        BenchmarkRun.record('mgh', [])

    def test_list_and_filter(self):
        response = self.client.get(reverse('benchmarks:run-list'))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['count'], 2)
        response = self.client.get(reverse('benchmarks:run-list'), {'suite': 'table3'})
        self.assertEqual(response.data['count'], 1)
        self.assertEqual(response.data['results'][0]['rows_count'], 1)

    def test_rows(self):
        response = self.client.get(reverse('benchmarks:run-rows', args=[self.run.pk]))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data[0]['nf'], 5)
        self.assertIsNone(response.data[0]['fmin'])

    def test_csv(self):
        response = self.client.get(reverse('benchmarks:run-csv', args=[self.run.pk]))
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response['Content-Type'], 'text/csv')
        self.assertTrue(response.content.decode().startswith(CSV_HEADER))

    def test_runs_are_read_only(self):
        response = self.client.post(reverse('benchmarks:run-list'), {'suite': 'table3'})
        self.assertEqual(response.status_code, status.HTTP_405_METHOD_NOT_ALLOWED)
