import math

from django.http import HttpResponse
from rest_framework import generics, status, viewsets
from rest_framework.decorators import action, api_view, permission_classes
from rest_framework.permissions import AllowAny
from rest_framework.response import Response

from derivatives.exceptions import DerivativeFreeError, EvaluationError
from optimization.fbpcg import solve
from optimization.serializers import SolverResultSerializer

from .conf import solver_config
from .models import BenchmarkRun
from .reporting import normalize_row, render_csv
from .serializers import (
    BenchmarkRunSerializer,
    EstimateSpecSerializer,
    ResultRowSerializer,
    SolveSpecSerializer,
    SweepSpecSerializer,
)
from .suites import estimate_report, run_sweep


def _finite(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def _vector(values):
    return None if values is None else [_finite(value) for value in values]


def _json_row(row):
    return {
        field: _finite(value) if isinstance(value, float) else value
        for field, value in normalize_row(row).items()
    }


@api_view(['GET'])
@permission_classes([AllowAny])
def health_check(request):
    """
    API health check endpoint
    GET /api/health/
    """
    return Response({
        'status': 'healthy',
        'message': 'Derivative-free API is running'
    })


class SpecView(generics.GenericAPIView):
    """
    POST a run spec, get the computed result back.

    Invalid specs answer 400, failed objective evaluations 422.
    """
    permission_classes = [AllowAny]

    def post(self, request):
        serializer = self.get_serializer(data=request.data)
        serializer.is_valid(raise_exception=True)
        try:
            payload = self.compute(serializer.validated_data)
        except EvaluationError as exc:
            return Response({'error': str(exc)}, status=status.HTTP_422_UNPROCESSABLE_ENTITY)
        except DerivativeFreeError as exc:
            return Response({'error': str(exc)}, status=status.HTTP_400_BAD_REQUEST)
        return Response(payload)

    def compute(self, spec):
        raise NotImplementedError


class EstimateView(SpecView):
    """
    Gradient and Hessian diagonal estimate at one point
    POST /api/estimate/
    """
    serializer_class = EstimateSpecSerializer

    def compute(self, spec):
        report = estimate_report(spec['objective'], spec['point'], spec['scheme'], cmpb_diag=spec['cmpb_diag'])
        result = report.estimate
        return {
            'row': _json_row(report.as_row()),
            'x': _vector(report.point),
            'g': _vector(result.g),
            'd': _vector(result.d),
            'evals_used': result.evals_used,
            'center_evaluated': result.center_evaluated,
            'warnings': list(result.warnings),
        }


class SweepView(SpecView):
    """
    Radius sweep with fitted slopes as footer rows
    POST /api/sweep/
    """
    serializer_class = SweepSpecSerializer

    def compute(self, spec):
        rows = run_sweep(
            spec['objective'], spec['point'], spec['h_values'],
            kinds=spec['kinds'], model=spec['model'], eta=spec['eta'],
        )
        return {'rows': [_json_row(row) for row in rows]}


class SolveView(SpecView):
    """
    Minimise a registered problem
    POST /api/solve/
    """
    serializer_class = SolveSpecSerializer

    def compute(self, spec):
        config = solver_config(
            spec['basis'], budget=spec.get('budget'), h0=spec.get('h0'),
            h_min=spec.get('h_min'), shrink=spec.get('shrink'),
        )
        result = solve(spec['objective'], config, start=spec['point'])
        payload = {
            'row': _json_row(result.as_row(spec['objective'].name)),
            'result': SolverResultSerializer(result).data,
        }
        if spec['trace']:
            payload['trace'] = [
                {key: _finite(value) if isinstance(value, float) else value for key, value in entry.items()}
                for entry in result.trace
            ]
        return payload


class BenchmarkRunViewSet(viewsets.ReadOnlyModelViewSet):
    """
    Stored benchmark runs, newest first
    """
    queryset = BenchmarkRun.objects.all()
    serializer_class = BenchmarkRunSerializer
    permission_classes = [AllowAny]

    def get_queryset(self):
        queryset = super().get_queryset()

        # Filter by suite
        suite = self.request.query_params.get('suite')
        if suite:
            queryset = queryset.filter(suite=suite)
        return queryset

    @action(detail=True, methods=['get'])
    def rows(self, request, pk=None):
        """Result rows of this run in table order"""
        run = self.get_object()
        serializer = ResultRowSerializer(run.rows.all(), many=True)
        return Response(serializer.data)

    @action(detail=True, methods=['get'])
    def csv(self, request, pk=None):
        """The run's table as CSV"""
        run = self.get_object()
        response = HttpResponse(render_csv(run.as_rows()), content_type='text/csv')
        response['Content-Disposition'] = f'attachment; filename="{run.suite}-{run.pk}.csv"'
        return response
