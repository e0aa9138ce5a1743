from django.apps import AppConfig


class SinrConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.sinr'
    verbose_name = 'SINRs and Rates'
