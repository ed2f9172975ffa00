from django.core.management.base import CommandError

from benchmarks.conf import output_dir
from benchmarks.models import BenchmarkRun
from benchmarks.reporting import FORMAT_CSV, render
from benchmarks.serializers import BenchSpecSerializer
from benchmarks.suites import run_suite

from ._base import EXIT_TOLERANCE, SpecCommand

EXTENSIONS = {FORMAT_CSV: 'csv', 'json': 'json', 'text': 'txt'}


class Command(SpecCommand):
    help = 'Run a benchmark suite and write its result table'
    spec_serializer_class = BenchSpecSerializer
    command_name = 'bench'

    def add_arguments(self, parser):
        parser.add_argument('--suite', help='table3, table4 or mgh')
        parser.add_argument('--format', help='csv (default), json or text')
        parser.add_argument('--output', help="Output file, '-' for standard output (default: results/<suite>.csv)")
        parser.add_argument('--seed', type=int, help='Recorded with the run')
        parser.add_argument('--save', dest='save_run', action='store_true', default=None,
                            help='Store the run and its rows in the database')

    def spec_data(self, options):
        fields = self.spec_serializer_class().fields
        return {name: options[name] for name in fields if options.get(name) is not None}

    def run(self, spec):
        suite = spec['suite']
        outcome = run_suite(suite)
        output = spec['output'] or str(output_dir() / f"{suite}.{EXTENSIONS[spec['format']]}")
        path = self.write_output(render(outcome.rows, spec['format']), output)
        if path is not None and self.verbosity > 0:
            self.stderr.write(f'{suite}: {len(outcome.rows)} rows written to {path}')

        exit_code = 0 if outcome.passed else EXIT_TOLERANCE
        if spec['save_run']:
            BenchmarkRun.record(
                suite, outcome.rows, seed=spec['seed'], failures=outcome.failures, exit_code=exit_code,
            )
        if not outcome.passed:
            raise CommandError('\n'.join(outcome.failures), returncode=EXIT_TOLERANCE)

    def handle(self, *args, **options):
        self.verbosity = options.get('verbosity', 1)
        return super().handle(*args, **options)
