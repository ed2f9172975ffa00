from benchmarks.conf import solver_config
from benchmarks.reporting import FORMAT_TEXT, render
from benchmarks.serializers import SolveSpecSerializer
from optimization.fbpcg import solve

from ._base import SpecCommand

TRACE_COLUMNS = ('iteration', 'nf', 'f_best', 'h', 'theta', 'beta', 'j', 'reset', 'quasi_minimal')


def _cell(value):
    if isinstance(value, float):
        return f'{value:.6e}'
    return '-' if value is None else str(value)


class Command(SpecCommand):
    help = 'Minimise a registered problem with the frame based preconditioned conjugate gradient solver'
    spec_serializer_class = SolveSpecSerializer
    command_name = 'solve'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--budget', type=int, help='Maximum number of function evaluations')
        parser.add_argument('--h0', type=float, help='Initial frame radius')
        parser.add_argument('--h-min', dest='h_min', type=float, help='Stop once the radius falls below this')
        parser.add_argument('--shrink', type=float, help='Radius reduction factor after a quasi-minimal frame')
        parser.add_argument('--trace', action='store_true', default=None, help='Print one line per iteration')

    def run(self, spec):
        config = solver_config(
            spec['basis'], budget=spec.get('budget'), h0=spec.get('h0'),
            h_min=spec.get('h_min'), shrink=spec.get('shrink'),
        )
        result = solve(spec['objective'], config, start=spec['point'])
        output = render([result.as_row(spec['objective'].name)], spec['format'])

        if spec['trace'] and spec['format'] == FORMAT_TEXT:
            lines = ['  '.join(TRACE_COLUMNS)]
            lines.extend('  '.join(_cell(entry.get(column)) for column in TRACE_COLUMNS) for entry in result.trace)
            output = '\n'.join(lines) + '\n\n' + output
        if spec['format'] == FORMAT_TEXT:
            output += f'stop: {result.stop_reason}\n'
        self.write_output(output, spec['output'])
