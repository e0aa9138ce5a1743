from django.apps import AppConfig


class MonteCarloConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.montecarlo'
    verbose_name = 'Monte Carlo'
