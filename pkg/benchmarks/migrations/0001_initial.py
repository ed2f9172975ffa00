import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='BenchmarkRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('suite', models.CharField(choices=[('table3', 'Rosenbrock valley point, h = 1e-3'), ('table4', 'Rosenbrock near the solution, h = 1e-6'), ('mgh', 'Solver over the problem registry'), ('sweep', 'Radius sweep')], max_length=20)),
                ('seed', models.PositiveIntegerField(default=0)),
                ('passed', models.BooleanField(default=True)),
                ('exit_code', models.PositiveSmallIntegerField(default=0)),
                ('failures', models.TextField(blank=True, help_text='Tolerance failures, one per line')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='ResultRow',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('order', models.PositiveIntegerField(default=0, help_text='Position in the report')),
                ('problem', models.CharField(max_length=100)),
                ('basis', models.CharField(choices=[('cb', 'Coordinate Basis'), ('rb', 'Regular Basis'), ('cmpb', 'Coordinate Minimal Positive Basis'), ('rmpb', 'Regular Minimal Positive Basis')], max_length=10)),
                ('model', models.CharField(choices=[('linear', 'Linear'), ('quadratic', 'Quadratic')], max_length=10)),
                ('h', models.FloatField(blank=True, null=True)),
                ('eta', models.FloatField(blank=True, null=True)),
                ('nf', models.PositiveIntegerField(blank=True, null=True)),
                ('eps_g', models.FloatField(blank=True, null=True)),
                ('eps_d', models.FloatField(blank=True, null=True)),
                ('fmin', models.FloatField(blank=True, null=True)),
                ('gnorm', models.FloatField(blank=True, null=True)),
                ('itns', models.PositiveIntegerField(blank=True, null=True)),
                ('qmfs', models.PositiveIntegerField(blank=True, null=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='rows', to='benchmarks.benchmarkrun')),
            ],
            options={
                'ordering': ['run', 'order'],
                'unique_together': {('run', 'order')},
            },
        ),
    ]
