import math

from rest_framework import serializers


class FiniteFloatField(serializers.FloatField):
    """Float that renders nan and inf as null"""

    def to_representation(self, value):
        value = float(value)
        return value if math.isfinite(value) else None


class ObjectiveSerializer(serializers.Serializer):
    """
    Serializer for registered test problems
    """
    name = serializers.CharField()
    n = serializers.IntegerField()
    description = serializers.CharField()
    standard_start = serializers.ListField(child=serializers.FloatField())
    minimizer = serializers.ListField(child=serializers.FloatField(), allow_null=True)
    has_gradient = serializers.BooleanField()
    has_diag_hessian = serializers.BooleanField()
    has_hessian = serializers.BooleanField()
    start_value = serializers.SerializerMethodField()

    def get_start_value(self, obj):
        return obj.evaluate(obj.start())


class SolverResultSerializer(serializers.Serializer):
    """
    Serializer for one solver run, in the column layout of the result tables
    """
    basis = serializers.CharField(source='kind.value')
    nf = serializers.IntegerField()
    fmin = FiniteFloatField()
    gnorm = FiniteFloatField()
    h = serializers.FloatField()
    itns = serializers.IntegerField(source='iterations')
    qmfs = serializers.IntegerField(source='qmf_count')
    stop_reason = serializers.CharField()
    x_min = serializers.ListField(child=FiniteFloatField())
