"""
Django settings for the chaining pursuit project.

The project has no web surface: Django provides configuration, logging,
management commands and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get("SECRET_KEY", "fallback-secret")

DEBUG = os.environ.get("DEBUG", "0") == "1"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "rest_framework",
    "prf",
    "pursuit",
]

# Sketches, matrices and signals live in files; nothing is persisted in a
# database.
DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True


REST_FRAMEWORK = {
    "UNAUTHENTICATED_USER": None,
    "DEFAULT_AUTHENTICATION_CLASSES": [],
    "DEFAULT_PERMISSION_CLASSES": [],
    "COERCE_DECIMAL_TO_STRING": False,
}

CHAINING_PURSUIT = {
    "PASS_BASE": float(os.environ.get("PURSUIT_PASS_BASE", 8)),
    "C_TRIALS": float(os.environ.get("PURSUIT_C_TRIALS", 4)),
    "C_BUCKETS": float(os.environ.get("PURSUIT_C_BUCKETS", 16)),
    "RETENTION_FRACTION": float(os.environ.get("PURSUIT_RETENTION", 0.9)),
    "MODE": os.environ.get("PURSUIT_MODE", "explicit"),
    "SEED": int(os.environ.get("PURSUIT_SEED", 0)),
    "SEEDED_VERIFY_MAX_DIMENSION": int(
        os.environ.get("PURSUIT_SEEDED_VERIFY_MAX_DIMENSION", 256)
    ),
}

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        "pursuit": {
            "handlers": ["console"],
            "level": os.environ.get("PURSUIT_LOG_LEVEL", "INFO"),
        },
        "prf": {
            "handlers": ["console"],
            "level": os.environ.get("PURSUIT_LOG_LEVEL", "INFO"),
        },
    },
}
