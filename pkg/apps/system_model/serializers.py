"""
Validation serializers for system parameters
"""
from rest_framework import serializers


class FadingProfileSerializer(serializers.Serializer):
    """Validates the per-link channel variances"""

    var_sr = serializers.FloatField()
    var_rd1 = serializers.FloatField()
    var_rd2 = serializers.FloatField()
    var_se = serializers.FloatField()
    var_re = serializers.FloatField()
    var_si = serializers.FloatField()

    def validate(self, attrs):
        """All variances must be strictly positive"""
        errors = {
            name: ['Channel variance must be positive.']
            for name, value in attrs.items() if not value > 0
        }
        if errors:
            raise serializers.ValidationError(errors)
        return attrs


class SystemParamsSerializer(serializers.Serializer):
    """Validates SNRs, pathloss exponent and the power-allocation pair"""

    rho = serializers.FloatField()
    rho_si = serializers.FloatField(min_value=0.0)
    nu = serializers.FloatField()
    a_s = serializers.FloatField(min_value=0.0, max_value=0.5)
    a_r = serializers.FloatField(min_value=0.0, max_value=0.5)
    profile = FadingProfileSerializer()

    def validate_rho(self, value):
        if not value > 0:
            raise serializers.ValidationError('Transmit SNR must be positive.')
        return value

    def validate_nu(self, value):
        if not value > 0:
            raise serializers.ValidationError('Pathloss exponent must be positive.')
        return value


class TopologySerializer(serializers.Serializer):
    """Validates link distances in meters"""

    d_sr = serializers.FloatField()
    d_rd1 = serializers.FloatField()
    d_rd2 = serializers.FloatField()
    d_se = serializers.FloatField()
    d_re = serializers.FloatField()

    def validate(self, attrs):
        errors = {
            name: ['Distance must be positive.']
            for name, value in attrs.items() if not value > 0
        }
        if errors:
            raise serializers.ValidationError(errors)
        return attrs
