"""
Validation serializers for scenario files
"""
from rest_framework import serializers

SWEEPABLE_FIELDS = ('a_s', 'a_r', 'rho_db', 'rho_si_db', 'd_se', 'd_re', 'nu')


class ScenarioSerializer(serializers.Serializer):
    """Validates every scenario value; dB quantities are unconstrained"""

    rho_db = serializers.FloatField()
    rho_si_db = serializers.FloatField()
    nu = serializers.FloatField()
    d_sr = serializers.FloatField()
    d_rd1 = serializers.FloatField()
    d_rd2 = serializers.FloatField()
    d_se = serializers.FloatField()
    d_re = serializers.FloatField()
    a_s = serializers.FloatField(min_value=0.0, max_value=0.5)
    a_r = serializers.FloatField(min_value=0.0, max_value=0.5)
    sigma_si_sq = serializers.FloatField()
    n_realizations = serializers.IntegerField(min_value=2)
    seed = serializers.IntegerField(min_value=0)
    mc_mode = serializers.ChoiceField(choices=['a', 'b'])
    sweep = serializers.ListField(required=False, allow_null=True)

    def validate(self, attrs):
        errors = {}
        for name in ('nu', 'd_sr', 'd_rd1', 'd_rd2', 'd_se', 'd_re', 'sigma_si_sq'):
            if not attrs[name] > 0:
                errors[name] = ['Must be positive.']
        if errors:
            raise serializers.ValidationError(errors)
        return attrs

    def validate_sweep(self, value):
        """(field, start, stop, step) with a positive step"""
        if value is None:
            return value
        if len(value) != 4:
            raise serializers.ValidationError('Sweep needs field, start, stop, step.')
        name, start, stop, step = value
        if name not in SWEEPABLE_FIELDS:
            raise serializers.ValidationError(f'Cannot sweep {name!r}.')
        if not step > 0 or stop < start:
            raise serializers.ValidationError('Sweep needs step > 0 and stop >= start.')
        return value
