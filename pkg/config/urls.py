from django.contrib import admin
from django.urls import path, include

urlpatterns = [
    path('admin/', admin.site.urls),

    # API endpoints
    path('api/derivatives/', include('derivatives.urls')),
    path('api/optimization/', include('optimization.urls')),
    path('api/', include('benchmarks.urls')),
]

# Admin customization
admin.site.site_header = "Derivative-Free Lab Administration"
admin.site.site_title = "Derivative-Free Lab Admin"
admin.site.index_title = "Benchmark runs and result tables"
