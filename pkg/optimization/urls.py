from django.urls import path, include
from rest_framework.routers import DefaultRouter

from .views import ProblemViewSet

app_name = 'optimization'

router = DefaultRouter()
router.register(r'problems', ProblemViewSet, basename='problem')

urlpatterns = [
    path('', include(router.urls)),
]
