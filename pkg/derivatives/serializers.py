from rest_framework import serializers

from .bases import BASIS_ORDER, verify_appendix_identities
from .bounds import kappa
from .sampling import ModelOrder


class BasisConstantsSerializer(serializers.Serializer):
    """
    Serializer for the scalar constants of dimension n
    """
    n = serializers.IntegerField()
    alpha = serializers.FloatField()
    gamma = serializers.FloatField()
    mu = serializers.FloatField()
    omega = serializers.FloatField()
    sigma = serializers.FloatField()
    identity_deviation = serializers.SerializerMethodField()
    kappa = serializers.SerializerMethodField()

    def get_identity_deviation(self, obj):
        return verify_appendix_identities(obj.n)

    def get_kappa(self, obj):
        return {kind.value: kappa(kind, ModelOrder.QUADRATIC, obj.n) for kind in BASIS_ORDER}
