from rest_framework import status
from rest_framework.decorators import api_view, permission_classes
from rest_framework.permissions import AllowAny
from rest_framework.response import Response

from .bases import basis_constants
from .exceptions import ConfigurationError
from .serializers import BasisConstantsSerializer

# Largest dimension served
MAX_DIMENSION = 10 ** 6


@api_view(['GET'])
@permission_classes([AllowAny])
def constants_detail(request, n):
    """Scheme constants, error constants and identity check for dimension n"""
    if n > MAX_DIMENSION:
        return Response({
            'error': f'dimension must not exceed {MAX_DIMENSION}'
        }, status=status.HTTP_400_BAD_REQUEST)
    try:
        constants = basis_constants(n)
    except ConfigurationError as exc:
        return Response({'error': str(exc)}, status=status.HTTP_400_BAD_REQUEST)
    return Response(BasisConstantsSerializer(constants).data)
