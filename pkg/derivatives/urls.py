from django.urls import path

from .views import constants_detail

app_name = 'derivatives'

urlpatterns = [
    path('constants/<int:n>/', constants_detail, name='constants'),
]
