import sys
from functools import partial
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from derivatives.exceptions import DerivativeFreeError, EvaluationError

EXIT_USAGE = 1
EXIT_TOLERANCE = 2
EXIT_EVALUATION = 3


def format_errors(errors, prefix=''):
    """Flatten serializer errors into 'field: message' lines"""
    lines = []
    for field, messages in errors.items():
        label = f'{prefix}{field}'
        if isinstance(messages, dict):
            lines.extend(format_errors(messages, prefix=f'{label}.'))
            continue
        if not isinstance(messages, (list, tuple)):
            messages = [messages]
        lines.extend(f'{label}: {message}' for message in messages)
    return lines


class SpecCommand(BaseCommand):
    """
    Base for the commands driven by a validated run spec.

    Usage errors exit with 1, evaluation failures with 3.
    """
    spec_serializer_class = None
    command_name = None

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = partial(self._usage_error, parser)
        return parser

    @staticmethod
    def _usage_error(parser, message):
        if parser.called_from_command_line:
            parser.print_usage(sys.stderr)
            parser.exit(EXIT_USAGE, f'{parser.prog}: error: {message}\n')
        raise CommandError(f'Error: {message}', returncode=EXIT_USAGE)

    def add_arguments(self, parser):
        parser.add_argument('--problem', help='Registered problem name (default: rosenbrock)')
        parser.add_argument(
            '--x', help='Point as comma separated numbers; use --x=-1.2,1 for a leading minus sign',
        )
        parser.add_argument('--basis', help='cb, rb, cmpb or rmpb')
        parser.add_argument('--h', type=float, help='Sampling radius')
        parser.add_argument('--eta', type=float, help='Ratio of the primed radius to h')
        parser.add_argument('--model', help='linear or quadratic')
        parser.add_argument('--format', help='text, csv or json')
        parser.add_argument('--output', help='Output file (default: standard output)')
        parser.add_argument('--seed', type=int, help='Seed for randomised steps')

    def spec_data(self, options):
        fields = self.spec_serializer_class().fields
        data = {name: options[name] for name in fields if options.get(name) is not None}
        data['command'] = self.command_name
        return data

    def validated_spec(self, options):
        serializer = self.spec_serializer_class(data=self.spec_data(options))
        if not serializer.is_valid():
            raise CommandError('\n'.join(format_errors(serializer.errors)), returncode=EXIT_USAGE)
        return serializer.validated_data

    def write_output(self, text, output):
        if not output or output == '-':
            self.stdout.write(text, ending='')
            return None
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', newline='', encoding='utf-8') as handle:
            handle.write(text)
        return path

    def handle(self, *args, **options):
        spec = self.validated_spec(options)
        try:
            self.run(spec)
        except EvaluationError as exc:
            raise CommandError(str(exc), returncode=EXIT_EVALUATION)
        except DerivativeFreeError as exc:
            raise CommandError(str(exc), returncode=EXIT_USAGE)
        except OSError as exc:
            raise CommandError(f'Cannot write output: {exc}', returncode=EXIT_USAGE)

    def run(self, spec):
        raise NotImplementedError
