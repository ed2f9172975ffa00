from django.contrib import admin

from .models import BenchmarkRun, ResultRow


class ResultRowInline(admin.TabularInline):
    model = ResultRow
    extra = 0
    fields = ['order', 'problem', 'basis', 'model', 'h', 'nf', 'eps_g', 'eps_d', 'fmin', 'gnorm', 'itns', 'qmfs']
    readonly_fields = fields


@admin.register(BenchmarkRun)
class BenchmarkRunAdmin(admin.ModelAdmin):
    list_display = ['suite', 'seed', 'passed', 'exit_code', 'rows_count', 'created_at']
    list_filter = ['suite', 'passed', 'created_at']
    readonly_fields = ['created_at']
    inlines = [ResultRowInline]


@admin.register(ResultRow)
class ResultRowAdmin(admin.ModelAdmin):
    list_display = ['problem', 'basis', 'model', 'h', 'eps_g', 'eps_d', 'fmin', 'run']
    list_filter = ['basis', 'model', 'run__suite']
    search_fields = ['problem']
