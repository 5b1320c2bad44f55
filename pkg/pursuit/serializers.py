from django.core.exceptions import ValidationError as DjangoValidationError
from rest_framework import serializers

from pursuit.conf import pursuit_setting
from pursuit.core import IsolationMode, SketchParams
from pursuit.experiments import sweep_cells
from pursuit.signals import NoiseModel


def setting_default(name):
    return lambda: pursuit_setting(name)


class NoiseModelField(serializers.Field):
    default_error_messages = {
        "invalid": "Expected 'none', 'l1:EPS', 'l1-rel:EPS' or 'weak1:R'.",
    }

    def to_internal_value(self, data):
        if isinstance(data, NoiseModel):
            return data
        if not isinstance(data, str):
            self.fail("invalid")
        try:
            return NoiseModel.parse(data)
        except DjangoValidationError as error:
            raise serializers.ValidationError(error.messages)

    def to_representation(self, value):
        return str(value)


class PursuitOptionsSerializer(serializers.Serializer):
    a = serializers.FloatField(default=setting_default("PASS_BASE"))
    c_trials = serializers.FloatField(default=setting_default("C_TRIALS"))
    c_buckets = serializers.FloatField(default=setting_default("C_BUCKETS"))
    retention = serializers.FloatField(default=setting_default("RETENTION_FRACTION"))
    mode = serializers.ChoiceField(
        choices=IsolationMode.choices, default=setting_default("MODE")
    )
    seed = serializers.IntegerField(
        min_value=0, max_value=(1 << 64) - 1, default=setting_default("SEED")
    )

    def validate_a(self, value):
        if value <= 2:
            raise serializers.ValidationError("Pass base must be greater than 2.")
        return value

    def validate_c_trials(self, value):
        if value <= 0:
            raise serializers.ValidationError("Trial constant must be positive.")
        return value

    def validate_c_buckets(self, value):
        if value <= 0:
            raise serializers.ValidationError("Bucket constant must be positive.")
        return value

    def validate_retention(self, value):
        if not (0 < value <= 1):
            raise serializers.ValidationError("Retention fraction must be in (0, 1].")
        return value


class SketchParamsSerializer(PursuitOptionsSerializer):
    d = serializers.IntegerField(min_value=2)
    m = serializers.IntegerField(min_value=1)
    k_rep = serializers.IntegerField(min_value=1, allow_null=True, default=None)

    def validate(self, attrs):
        if attrs["m"] > attrs["d"]:
            raise serializers.ValidationError(
                {"m": f"m must not exceed d = {attrs['d']}."}
            )
        return attrs

    def create(self, validated_data):
        try:
            return SketchParams(
                d=validated_data["d"],
                m=validated_data["m"],
                a=validated_data["a"],
                c_trials=validated_data["c_trials"],
                c_buckets=validated_data["c_buckets"],
                retention_fraction=validated_data["retention"],
                mode=validated_data["mode"],
                seed=validated_data["seed"],
                k_rep=validated_data["k_rep"],
            )
        except DjangoValidationError as error:
            raise serializers.ValidationError(error.message_dict)


class ExperimentSweepSerializer(PursuitOptionsSerializer):
    dimensions = serializers.ListField(
        child=serializers.IntegerField(min_value=2), allow_empty=False
    )
    sparsities = serializers.ListField(
        child=serializers.IntegerField(min_value=1), allow_empty=False
    )
    noises = serializers.ListField(
        child=NoiseModelField(), allow_empty=False, default=lambda: [NoiseModel()]
    )
    meas_noises = serializers.ListField(
        child=serializers.FloatField(min_value=0),
        allow_empty=False,
        default=lambda: [0.0],
    )
    runs = serializers.IntegerField(min_value=1, default=1)
    workers = serializers.IntegerField(min_value=1, default=1)
    integer = serializers.BooleanField(default=False)
    k_rep = serializers.IntegerField(min_value=1, allow_null=True, default=None)

    def validate(self, attrs):
        if min(attrs["sparsities"]) > max(attrs["dimensions"]):
            raise serializers.ValidationError(
                {"sparsities": "Every sparsity exceeds every dimension."}
            )
        return attrs

    def create(self, validated_data):
        return sweep_cells(
            validated_data["dimensions"],
            validated_data["sparsities"],
            validated_data["noises"],
            validated_data["meas_noises"],
            runs=validated_data["runs"],
            seed=validated_data["seed"],
            a=validated_data["a"],
            c_trials=validated_data["c_trials"],
            c_buckets=validated_data["c_buckets"],
            retention_fraction=validated_data["retention"],
            mode=IsolationMode(validated_data["mode"]),
            k_rep=validated_data["k_rep"],
            integer=validated_data["integer"],
        )


class RecoveryReportSerializer(serializers.Serializer):
    d = serializers.IntegerField(read_only=True)
    m = serializers.IntegerField(read_only=True)
    a = serializers.FloatField(read_only=True)
    seed = serializers.IntegerField(read_only=True)
    noise_l1 = serializers.FloatField(read_only=True)
    meas_noise_l1 = serializers.FloatField(read_only=True)
    l1_error = serializers.FloatField(read_only=True)
    opt_error = serializers.FloatField(read_only=True)
    ratio = serializers.FloatField(read_only=True)
    weak1_error = serializers.FloatField(read_only=True)
    support_out = serializers.IntegerField(read_only=True)
    sketch_bytes = serializers.IntegerField(read_only=True)
    encode_ms = serializers.FloatField(read_only=True)
    decode_ms = serializers.FloatField(read_only=True)
