from django.conf import settings

from pursuit.core import (
    DEFAULT_C_BUCKETS,
    DEFAULT_C_TRIALS,
    DEFAULT_PASS_BASE,
    DEFAULT_RETENTION_FRACTION,
    IsolationMode,
)


DEFAULTS = {
    "PASS_BASE": DEFAULT_PASS_BASE,
    "C_TRIALS": DEFAULT_C_TRIALS,
    "C_BUCKETS": DEFAULT_C_BUCKETS,
    "RETENTION_FRACTION": DEFAULT_RETENTION_FRACTION,
    "MODE": IsolationMode.EXPLICIT.value,
    "SEED": 0,
    "SEEDED_VERIFY_MAX_DIMENSION": 256,
}


def pursuit_setting(name: str):
    if name not in DEFAULTS:
        raise AttributeError(f"Invalid CHAINING_PURSUIT setting: {name!r}")
    user_settings = getattr(settings, "CHAINING_PURSUIT", None) or {}
    return user_settings.get(name, DEFAULTS[name])
