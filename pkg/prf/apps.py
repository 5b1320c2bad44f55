from django.apps import AppConfig


class PrfConfig(AppConfig):
    name = "prf"
    verbose_name = "Small-space independent hashing"
