import math

from django.db import models, transaction

from derivatives.bases import BasisKind
from derivatives.sampling import ModelOrder

from .reporting import CSV_FIELDS
from .suites import SUITE_CHOICES


class BenchmarkRun(models.Model):
    """
    One bench or sweep invocation saved with its result rows
    """
    suite = models.CharField(max_length=20, choices=SUITE_CHOICES)
    seed = models.PositiveIntegerField(default=0)
    passed = models.BooleanField(default=True)
    exit_code = models.PositiveSmallIntegerField(default=0)
    failures = models.TextField(blank=True, help_text='Tolerance failures, one per line')
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']

    @classmethod
    def record(cls, suite, rows, seed=0, failures=(), exit_code=0):
        """Save a run and its rows in one transaction"""
        with transaction.atomic():
            run = cls.objects.create(
                suite=suite,
                seed=seed,
                passed=not failures,
                exit_code=exit_code,
                failures="\n".join(failures),
            )
            ResultRow.objects.bulk_create([
                ResultRow(run=run, order=index, **_stored(row))
                for index, row in enumerate(rows)
            ])
        return run

    def __str__(self):
        status = 'passed' if self.passed else 'failed'
        return f"{self.suite} #{self.pk} ({status})"

    @property
    def rows_count(self):
        return self.rows.count()

    def as_rows(self):
        return [row.as_dict() for row in self.rows.all()]


def _stored(row):
    # SQLite has no NaN; missing and non-finite values become NULL
    values = {}
    for field in CSV_FIELDS:
        value = row.get(field)
        if isinstance(value, float) and not math.isfinite(value):
            value = None
        values[field] = value
    return values


class ResultRow(models.Model):
    """
    A result line in the fixed CSV column layout
    """
    run = models.ForeignKey(
        BenchmarkRun,
        on_delete=models.CASCADE,
        related_name='rows'
    )
    order = models.PositiveIntegerField(default=0, help_text='Position in the report')

    # Scheme
    problem = models.CharField(max_length=100)
    basis = models.CharField(max_length=10, choices=BasisKind.choices)
    model = models.CharField(max_length=10, choices=ModelOrder.choices)
    h = models.FloatField(null=True, blank=True)
    eta = models.FloatField(null=True, blank=True)

    # Measurements
    nf = models.PositiveIntegerField(null=True, blank=True)
    eps_g = models.FloatField(null=True, blank=True)
    eps_d = models.FloatField(null=True, blank=True)
    fmin = models.FloatField(null=True, blank=True)
    gnorm = models.FloatField(null=True, blank=True)
    itns = models.PositiveIntegerField(null=True, blank=True)
    qmfs = models.PositiveIntegerField(null=True, blank=True)

    class Meta:
        ordering = ['run', 'order']
        unique_together = ['run', 'order']

    def __str__(self):
        return f"{self.problem}/{self.basis} in run {self.run_id}"

    @property
    def is_footer(self):
        return self.h is None

    def as_dict(self):
        return {field: getattr(self, field) for field in CSV_FIELDS}
