from benchmarks.reporting import render
from benchmarks.serializers import SweepSpecSerializer
from benchmarks.suites import run_sweep

from ._base import SpecCommand


class Command(SpecCommand):
    help = 'Sweep the sampling radius and fit the observed order of the errors'
    spec_serializer_class = SweepSpecSerializer
    command_name = 'sweep'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--h-max', dest='h_max', type=float, help='Largest radius (default: 1e-2)')
        parser.add_argument('--h-min', dest='h_min', type=float, help='Smallest radius (default: 1e-5)')
        parser.add_argument('--points', type=int, help='Radii in the geometric grid (default: 7)')

    def run(self, spec):
        rows = run_sweep(
            spec['objective'], spec['point'], spec['h_values'],
            kinds=spec['kinds'], model=spec['model'], eta=spec['eta'],
        )
        self.write_output(render(rows, spec['format']), spec['output'])
