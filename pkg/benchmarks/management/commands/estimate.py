from derivatives.bounds import ErrorBoundInput, estimate_lipschitz, gradient_bound
from benchmarks.reporting import FORMAT_TEXT, render
from benchmarks.serializers import EstimateSpecSerializer
from benchmarks.suites import estimate_report

from ._base import SpecCommand


def _vector(values):
    return '[' + ', '.join(f'{value:.9e}' for value in values) + ']'


class Command(SpecCommand):
    help = 'Estimate the gradient and Hessian diagonal of a problem at a point'
    spec_serializer_class = EstimateSpecSerializer
    command_name = 'estimate'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--cmpb-diag', dest='cmpb_diag', help='least-squares or central')
        parser.add_argument(
            '--lipschitz-trials', dest='lipschitz_trials', type=int,
            help='Estimate the Hessian Lipschitz constant from this many sampled pairs and report the bound',
        )

    def run(self, spec):
        scheme = spec['scheme']
        objective = spec['objective']
        report = estimate_report(objective, spec['point'], scheme, cmpb_diag=spec['cmpb_diag'])

        if spec['format'] != FORMAT_TEXT:
            self.write_output(render([report.as_row()], spec['format']), spec['output'])
            return

        result = report.estimate
        lines = [
            f'problem  {objective.name}',
            f'basis    {scheme.kind.value} ({scheme.model.value}, h={scheme.h:.9e}, eta={scheme.eta:g})',
            f'x        {_vector(report.point)}',
            f'g        {_vector(result.g)}',
        ]
        if result.d is not None:
            lines.append(f'd        {_vector(result.d)}')
        lines.append(f'evals    {result.evals_used} samples' + (' + f(x)' if result.center_evaluated else ''))
        if report.eps_g is not None:
            lines.append(f'eps_g    {report.eps_g:.9e}')
        if report.eps_d is not None:
            lines.append(f'eps_d    {report.eps_d:.9e}')
        if spec['lipschitz_trials'] and scheme.is_quadratic and objective.has_hessian:
            lines.extend(self._bound_lines(objective, report.point, scheme, spec))
        lines.extend(f'warning  {warning}' for warning in result.warnings)
        self.write_output('\n'.join(lines) + '\n', spec['output'])

    def _bound_lines(self, objective, point, scheme, spec):
        radius = abs(scheme.h) * max(1.0, abs(scheme.eta))
        lipschitz = estimate_lipschitz(
            objective, point, radius, trials=spec['lipschitz_trials'], seed=spec['seed'],
        )
        bound = gradient_bound(ErrorBoundInput(
            kind=scheme.kind, model=scheme.model, n=scheme.n, h=scheme.h, lipschitz=lipschitz,
        ))
        return [f'M        {lipschitz:.9e} (sampled)', f'bound    {bound:.9e}']
