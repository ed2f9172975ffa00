from rest_framework import status, viewsets
from rest_framework.permissions import AllowAny
from rest_framework.response import Response

from derivatives.exceptions import UnknownProblemError

from .problems import get_problem, registry
from .serializers import ObjectiveSerializer


class ProblemViewSet(viewsets.ViewSet):
    """
    Read-only listing of the registered test problems
    """
    permission_classes = [AllowAny]
    lookup_field = 'name'

    def list(self, request):
        problems = sorted(registry().values(), key=lambda objective: (objective.n, objective.name))
        return Response(ObjectiveSerializer(problems, many=True).data)

    def retrieve(self, request, name=None):
        try:
            objective = get_problem(name)
        except UnknownProblemError as exc:
            return Response({'error': str(exc)}, status=status.HTTP_404_NOT_FOUND)
        return Response(ObjectiveSerializer(objective).data)
