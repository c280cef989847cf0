# bath_modes/serializers.py
from rest_framework import serializers

SCHEMA_VERSION = 1

METHOD_CHOICES = ('id', 'ld', 'mdm', 'bsdo')
UNIT_SUFFIXES = {'fs': 'fs', 'cm1': 'cm^-1', 'k': 'K'}


def parse_methods(value):
    """'id, ld' -> ('id', 'ld'); 'all' -> every method"""
    names = [part.strip().lower() for part in str(value).split(',') if part.strip()]
    if names == ['all']:
        return METHOD_CHOICES
    if not names:
        raise serializers.ValidationError("at least one method is required")
    unknown = [n for n in names if n not in METHOD_CHOICES]
    if unknown:
        raise serializers.ValidationError(
            f"unknown method(s) {', '.join(unknown)}; choose from {', '.join(METHOD_CHOICES)} or all")
    return tuple(dict.fromkeys(names))


def parse_intervals(value):
    """'-180:180, -250:250' -> ((-180.0, 180.0), (-250.0, 250.0))"""
    intervals = []
    for part in str(value).split(','):
        if not part.strip():
            continue
        try:
            lo, hi = (float(x) for x in part.split(':'))
        except ValueError:
            raise serializers.ValidationError(f"expected lo:hi, got {part.strip()!r}")
        if not lo < hi:
            raise serializers.ValidationError(f"interval {part.strip()!r} needs lo < hi")
        intervals.append((lo, hi))
    if not intervals:
        raise serializers.ValidationError("at least one interval is required")
    return tuple(intervals)


class RunConfigSerializer(serializers.Serializer):
    """
    Validates the flat key-value run configuration. Units live in the key
    suffix (_fs, _cm1, _k); a key that matches a known one apart from its
    suffix is reported as a unit mismatch rather than as unknown.
    """
    # spectral density source
    sd_model = serializers.ChoiceField(choices=['power_law'], required=False)
    sd_exponent = serializers.FloatField(required=False)
    sd_alpha = serializers.FloatField(required=False)
    sd_cutoff_cm1 = serializers.FloatField(required=False)
    sd_table_path = serializers.CharField(required=False)
    sd_smoothing = serializers.FloatField(required=False, min_value=0)
    sd_aaa_tol = serializers.FloatField(required=False, default=1e-6)
    sd_aaa_max_degree = serializers.IntegerField(required=False, min_value=0, default=100)
    sd_floor_cm1 = serializers.FloatField(required=False, min_value=0, default=1.0)

    temperature_k = serializers.FloatField(min_value=0)
    method = serializers.CharField()

    # fine grid
    cutoff_time_fs = serializers.FloatField()
    omega_lo_cm1 = serializers.FloatField()
    omega_hi_cm1 = serializers.FloatField()
    time_points = serializers.IntegerField(required=False, min_value=2)
    freq_points = serializers.IntegerField(required=False, min_value=2, default=2000)

    # method knobs
    id_rank = serializers.IntegerField(required=False, min_value=1)
    id_tolerance = serializers.FloatField(required=False)
    id_max_rank = serializers.IntegerField(required=False, min_value=1)
    id_quadrature = serializers.ChoiceField(choices=['trapezoid', 'rectangle'], required=False,
                                            default='trapezoid')
    n_modes = serializers.IntegerField(required=False, min_value=1, default=20)
    ld_lambda = serializers.FloatField(required=False, default=1.1)
    bsdo_intervals_cm1 = serializers.CharField(required=False)

    # verification
    reference_omega_lo_cm1 = serializers.FloatField(required=False)
    reference_omega_hi_cm1 = serializers.FloatField(required=False)
    verification_points = serializers.IntegerField(required=False, min_value=2)
    oracle_tol = serializers.FloatField(required=False)
    output_dir = serializers.CharField(required=False)

    def to_internal_value(self, data):
        errors = {}
        for key in data:
            if key in self.fields:
                continue
            hint = self._unit_hint(key)
            errors[key] = [hint or "unknown key"]
        if errors:
            raise serializers.ValidationError(errors)
        return super().to_internal_value(data)

    def _unit_hint(self, key):
        stem = key.rsplit('_', 1)[0]
        for known in self.fields:
            head, _, suffix = known.rpartition('_')
            if suffix in UNIT_SUFFIXES and head in (key, stem):
                return f"unit suffix mismatch: use {known} (value in {UNIT_SUFFIXES[suffix]})"
        return None

    def validate_method(self, value):
        return parse_methods(value)

    def validate_bsdo_intervals_cm1(self, value):
        return parse_intervals(value)

    def validate(self, attrs):
        errors = {}
        has_model = 'sd_model' in attrs
        has_table = 'sd_table_path' in attrs
        if has_model and has_table:
            errors['sd_model'] = ["give either sd_model or sd_table_path, not both"]
        elif not (has_model or has_table):
            errors['sd_model'] = ["one spectral-density source (sd_model or sd_table_path) is required"]
        elif has_model:
            for key in ('sd_exponent', 'sd_alpha', 'sd_cutoff_cm1'):
                if key not in attrs:
                    errors[key] = ["required for sd_model = power_law"]
                elif not attrs[key] > 0:
                    errors[key] = ["must be > 0"]

        if not attrs['cutoff_time_fs'] > 0:
            errors['cutoff_time_fs'] = ["must be > 0"]
        if not attrs['omega_lo_cm1'] < attrs['omega_hi_cm1']:
            errors['omega_hi_cm1'] = ["must exceed omega_lo_cm1"]

        methods = attrs.get('method', ())
        if 'id' in methods:
            if ('id_rank' in attrs) == ('id_tolerance' in attrs):
                errors['id_rank'] = ["method id needs exactly one of id_rank or id_tolerance"]
            if 'id_tolerance' in attrs and not attrs['id_tolerance'] > 0:
                errors['id_tolerance'] = ["must be > 0"]
        if 'id_max_rank' in attrs and 'id_tolerance' not in attrs:
            errors['id_max_rank'] = ["only meaningful together with id_tolerance"]
        if ('ld' in methods or 'mdm' in methods) and attrs['n_modes'] % 2:
            errors['n_modes'] = ["ld and mdm need an even mode count"]
        if 'ld' in methods:
            if not attrs['ld_lambda'] > 1:
                errors['ld_lambda'] = ["must be > 1"]
            if not attrs['omega_hi_cm1'] > 0:
                errors['omega_hi_cm1'] = ["ld needs omega_hi_cm1 > 0"]
        if not attrs['sd_aaa_tol'] > 0:
            errors['sd_aaa_tol'] = ["must be > 0"]
        if 'oracle_tol' in attrs and not attrs['oracle_tol'] > 0:
            errors['oracle_tol'] = ["must be > 0"]
        lo = attrs.get('reference_omega_lo_cm1', attrs['omega_lo_cm1'])
        hi = attrs.get('reference_omega_hi_cm1', attrs['omega_hi_cm1'])
        if not lo < hi:
            errors['reference_omega_hi_cm1'] = ["must exceed reference_omega_lo_cm1"]
        if errors:
            raise serializers.ValidationError(errors)

        attrs.setdefault('time_points', 1000 if has_table else 500)
        attrs.setdefault('bsdo_intervals_cm1', ((attrs['omega_lo_cm1'], attrs['omega_hi_cm1']),))
        attrs.setdefault('reference_omega_lo_cm1', attrs['omega_lo_cm1'])
        attrs.setdefault('reference_omega_hi_cm1', attrs['omega_hi_cm1'])
        return attrs


class ModeSerializer(serializers.Serializer):
    omega_cm1 = serializers.FloatField()
    g_cm1 = serializers.FloatField(min_value=0)
    g2_cm2 = serializers.FloatField(min_value=0)


class DiscreteBathSerializer(serializers.Serializer):
    """JSON mode table: schema version, method, temperature, modes and provenance"""
    schema_version = serializers.IntegerField(default=SCHEMA_VERSION)
    method = serializers.CharField()
    temperature_k = serializers.FloatField(min_value=0)
    modes = ModeSerializer(many=True)
    provenance = serializers.JSONField(required=False, default=dict)

    def validate_schema_version(self, value):
        if value != SCHEMA_VERSION:
            raise serializers.ValidationError(f"unsupported schema version {value}")
        return value
