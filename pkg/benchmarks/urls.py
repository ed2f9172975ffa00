from django.urls import path, include
from rest_framework.routers import DefaultRouter
from .views import (
    BenchmarkRunViewSet,
    EstimateView,
    SolveView,
    SweepView,
    health_check,
)

app_name = 'benchmarks'

router = DefaultRouter()
router.register(r'runs', BenchmarkRunViewSet, basename='run')

urlpatterns = [
    # Health check
    path('health/', health_check, name='health'),

    path('', include(router.urls)),

    # Computations
    path('estimate/', EstimateView.as_view(), name='estimate'),
    path('sweep/', SweepView.as_view(), name='sweep'),
    path('solve/', SolveView.as_view(), name='solve'),
]
