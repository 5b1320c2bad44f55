from django.apps import AppConfig


class PursuitConfig(AppConfig):
    name = "pursuit"
    verbose_name = "Chaining Pursuit sketching and recovery"
