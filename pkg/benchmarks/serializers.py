import math

import numpy as np
from rest_framework import serializers

from derivatives.bases import BasisKind
from derivatives.exceptions import ConfigurationError, UnknownProblemError
from derivatives.estimators import CMPB_DIAG_CHOICES, CMPB_DIAG_LEAST_SQUARES
from derivatives.sampling import MIN_RADIUS, ModelOrder, SamplingScheme
from optimization.problems import PROBLEM_FACTORIES, get_problem
from optimization.serializers import FiniteFloatField

from .conf import numerics
from .models import BenchmarkRun, ResultRow
from .reporting import FORMAT_CHOICES, FORMAT_TEXT
from .suites import BENCH_SUITES

COMMAND_CHOICES = (
    ('estimate', 'Estimate derivatives at a point'),
    ('sweep', 'Sweep the sampling radius'),
    ('solve', 'Run the solver'),
    ('bench', 'Run a benchmark suite'),
)


class PointField(serializers.Field):
    """
    A point given as '1.1,1.21001' or as a list of numbers
    """
    default_error_messages = {
        'invalid': 'Enter comma separated numbers or a list of numbers.',
        'not_finite': 'Every coordinate must be finite.',
        'empty': 'The point needs at least one coordinate.',
    }

    def to_internal_value(self, data):
        if isinstance(data, str):
            data = [item for item in data.replace(' ', '').split(',') if item]
        if not isinstance(data, (list, tuple)):
            self.fail('invalid')
        try:
            values = tuple(float(item) for item in data)
        except (TypeError, ValueError):
            self.fail('invalid')
        if not values:
            self.fail('empty')
        if not all(math.isfinite(value) for value in values):
            self.fail('not_finite')
        return values

    def to_representation(self, value):
        return [float(item) for item in value]


def _default_eta():
    return float(numerics()['ETA'])


class RunSpecSerializer(serializers.Serializer):
    """
    Validated run request shared by the management commands and the API.

    validated_data gains 'objective' and 'point'; schemes are built by the
    subclasses that need one.
    """
    command = serializers.ChoiceField(choices=COMMAND_CHOICES, default='estimate')
    problem = serializers.CharField(default='rosenbrock')
    x = PointField(required=False, allow_null=True, default=None)
    basis = serializers.ChoiceField(choices=BasisKind.choices, default=BasisKind.CB.value)
    h = serializers.FloatField(default=1e-3)
    eta = serializers.FloatField(default=_default_eta)
    model = serializers.ChoiceField(choices=ModelOrder.choices, default=ModelOrder.QUADRATIC.value)
    format = serializers.ChoiceField(choices=FORMAT_CHOICES, default=FORMAT_TEXT)
    output = serializers.CharField(required=False, allow_blank=True, default='')
    seed = serializers.IntegerField(min_value=0, default=0)

    def validate_problem(self, value):
        if value not in PROBLEM_FACTORIES:
            raise serializers.ValidationError(
                f"Unknown problem. Choose from: {', '.join(PROBLEM_FACTORIES)}."
            )
        return value

    def validate_h(self, value):
        if not math.isfinite(value) or value == 0:
            raise serializers.ValidationError('Sampling radius must be finite and nonzero.')
        if abs(value) < MIN_RADIUS:
            raise serializers.ValidationError(f'Sampling radius must be at least {MIN_RADIUS} in size.')
        return value

    def validate(self, attrs):
        try:
            objective = get_problem(attrs['problem'])
        except UnknownProblemError as exc:
            raise serializers.ValidationError({'problem': str(exc)})

        point = attrs.get('x')
        if point is None:
            point = objective.standard_start
        if len(point) != objective.n:
            raise serializers.ValidationError({
                'x': f'{objective.name} needs a point with {objective.n} coordinates, got {len(point)}.'
            })
        attrs['objective'] = objective
        attrs['point'] = np.array(point, dtype=float)
        return attrs


class EstimateSpecSerializer(RunSpecSerializer):
    cmpb_diag = serializers.ChoiceField(choices=CMPB_DIAG_CHOICES, default=CMPB_DIAG_LEAST_SQUARES)
    lipschitz_trials = serializers.IntegerField(min_value=0, default=0)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        try:
            attrs['scheme'] = SamplingScheme(
                attrs['basis'], attrs['objective'].n, attrs['h'], eta=attrs['eta'], model=attrs['model'],
            )
        except ConfigurationError as exc:
            raise serializers.ValidationError({'scheme': str(exc)})
        return attrs


class SweepSpecSerializer(RunSpecSerializer):
    """
    Radius sweep. basis 'all' sweeps every scheme.
    """
    basis = serializers.ChoiceField(choices=[('all', 'All bases')] + BasisKind.choices, default='all')
    h_max = serializers.FloatField(default=1e-2)
    h_min = serializers.FloatField(default=1e-5)
    points = serializers.IntegerField(default=7)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        h_max, h_min, points = attrs['h_max'], attrs['h_min'], attrs['points']
        if points < 3:
            raise serializers.ValidationError({'points': 'A sweep needs at least 3 radii.'})
        if not (0 < h_min < h_max) or not math.isfinite(h_max):
            raise serializers.ValidationError({'h_min': 'The radius range is empty; need 0 < h_min < h_max.'})
        if h_min < MIN_RADIUS:
            raise serializers.ValidationError({'h_min': f'Radii must be at least {MIN_RADIUS}.'})
        if attrs['model'] == ModelOrder.QUADRATIC and attrs['eta'] in (0.0, 1.0):
            raise serializers.ValidationError({'eta': 'eta must differ from 0 and 1 for the quadratic model.'})
        if not attrs['objective'].has_gradient:
            raise serializers.ValidationError({'problem': 'The sweep needs an analytic gradient.'})

        attrs['h_values'] = [float(h) for h in np.geomspace(h_max, h_min, points)]
        attrs['kinds'] = [BasisKind(value) for value, _ in BasisKind.choices] if attrs['basis'] == 'all' \
            else [BasisKind(attrs['basis'])]
        return attrs


class SolveSpecSerializer(RunSpecSerializer):
    budget = serializers.IntegerField(min_value=0, required=False)
    h0 = serializers.FloatField(required=False)
    h_min = serializers.FloatField(required=False)
    shrink = serializers.FloatField(required=False)
    trace = serializers.BooleanField(default=False)

    def validate_shrink(self, value):
        if not value > 1:
            raise serializers.ValidationError('Shrink factor must be greater than 1.')
        return value

    def validate_h0(self, value):
        if not value > 0:
            raise serializers.ValidationError('Initial radius must be positive.')
        return value

    def validate_h_min(self, value):
        if not value > 0:
            raise serializers.ValidationError('Radius floor must be positive.')
        return value


class BenchSpecSerializer(serializers.Serializer):
    suite = serializers.ChoiceField(choices=BENCH_SUITES)
    format = serializers.ChoiceField(choices=FORMAT_CHOICES, default='csv')
    output = serializers.CharField(required=False, allow_blank=True, default='')
    seed = serializers.IntegerField(min_value=0, default=0)
    save_run = serializers.BooleanField(default=False)


class ResultRowSerializer(serializers.ModelSerializer):
    """
    Serializer for stored result rows
    """
    h = FiniteFloatField(allow_null=True)
    eps_g = FiniteFloatField(allow_null=True)
    eps_d = FiniteFloatField(allow_null=True)
    fmin = FiniteFloatField(allow_null=True)
    gnorm = FiniteFloatField(allow_null=True)

    class Meta:
        model = ResultRow
        fields = [
            'order', 'problem', 'basis', 'model', 'h', 'eta', 'nf',
            'eps_g', 'eps_d', 'fmin', 'gnorm', 'itns', 'qmfs',
        ]


class BenchmarkRunSerializer(serializers.ModelSerializer):
    """
    Serializer for stored benchmark runs
    """
    rows_count = serializers.IntegerField(read_only=True)

    class Meta:
        model = BenchmarkRun
        fields = ['id', 'suite', 'seed', 'passed', 'exit_code', 'failures', 'rows_count', 'created_at']
        read_only_fields = fields
